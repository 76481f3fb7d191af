#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "poolmech/cli.hpp"
#include "poolmech/serialize.hpp"

using namespace poolmech;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("poolmech_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return (path / name).string();
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "poolmech");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kPowerConfig = R"({
  "values": {"family": "power_cdf", "exponent": 2, "lo": 0, "hi": 1},
  "qualities": {"family": "power_cdf", "exponent": 0.25, "lo": 0, "hi": 1},
  "solver": {"grid": 80}
})";

}  // namespace

TEST_CASE("solve, verify and trace round trip") {
  TempDir dir("roundtrip");
  const auto cfg = dir.file("power.json", kPowerConfig);
  const auto out = (dir.path / "a").string();
  const auto solved = run({"solve-exogenous", "--config", cfg, "--out", out});
  CHECK(solved.code == kExitOk);
  const auto report = nlohmann::json::parse(slurp(dir.path / "a" / "report.json"));
  CHECK(report["mechanism"]["positive_items"].get<int>() >= 1);
  for (const auto& c : report["verification"]["checks"]) {
    CHECK(c["status"] == "pass");
  }

  const auto mech = (dir.path / "a" / "mechanism.json").string();
  const auto v = run({"verify", "--config", cfg, "--mechanism", mech, "--out", out});
  CHECK(v.code == kExitOk);

  const auto again = run({"solve-exogenous", "--config", cfg, "--out", (dir.path / "b").string()});
  CHECK(again.code == kExitOk);
  for (const char* name : {"report.json", "mechanism.json", "trace.csv", "recommendations.csv"}) {
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
  }

  const auto tr = run({"export-trace", "--config", cfg, "--mechanism", mech, "--out",
                       (dir.path / "c").string()});
  CHECK(tr.code == kExitOk);
  CHECK(slurp(dir.path / "c" / "trace.csv") == slurp(dir.path / "a" / "trace.csv"));

  const auto m = mechanism_from_json(nlohmann::json::parse(slurp(mech)));
  CHECK(to_json(m).dump() == nlohmann::json::parse(slurp(mech)).dump());
}

TEST_CASE("verify rejects edited mechanisms") {
  TempDir dir("edited");
  const auto cfg = dir.file("power.json", kPowerConfig);
  const auto out = dir.path.string();
  REQUIRE(run({"solve-exogenous", "--config", cfg, "--out", out}).code == kExitOk);
  const auto original = nlohmann::json::parse(slurp(dir.path / "mechanism.json"));

  auto ic = original;
  auto& cells = ic["cells"];
  const std::size_t top = cells.size() - 1;
  cells[top]["price"] = cells[top]["price"].get<double>() + 0.2;
  const auto ic_file = dir.file("ic.json", ic.dump());
  const auto bad = run({"verify", "--config", cfg, "--mechanism", ic_file, "--out", out});
  CHECK(bad.code == kExitCheckFailed);
  CHECK(bad.out.find("ic_global: FAIL - cell " + std::to_string(top + 1) + " prefers item") !=
        std::string::npos);

  auto over = original;
  over["cells"][top]["quality"] = 1.5;
  const auto over_file = dir.file("over.json", over.dump());
  const auto infeasible = run({"verify", "--config", cfg, "--mechanism", over_file, "--out", out});
  CHECK(infeasible.code == kExitCheckFailed);
  CHECK(infeasible.out.find("quality_feasible: FAIL") != std::string::npos);

  const auto garbage = dir.file("garbage.json", "{ not json");
  CHECK(run({"verify", "--config", cfg, "--mechanism", garbage, "--out", out}).code == kExitConfig);
}

TEST_CASE("configuration errors") {
  TempDir dir("errors");
  const auto eta = dir.file("eta.json", R"({
  "values": {"family": "uniform", "lo": 1, "hi": 2},
  "elasticity": 0.9
})");
  const auto r = run({"solve-endogenous", "--config", eta, "--out", dir.path.string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("elasticity must exceed 1") != std::string::npos);
  CHECK(r.err.find("eta.json:3:") != std::string::npos);

  const auto family = dir.file("family.json", R"({
  "values": {"family": "lognormal", "lo": 1, "hi": 2},
  "elasticity": 2
})");
  const auto f = run({"solve-endogenous", "--config", family, "--out", dir.path.string()});
  CHECK(f.code == kExitConfig);
  CHECK(f.err.find("family.json:2:") != std::string::npos);

  const auto broken = dir.file("broken.json", "{\n  \"values\": [1,\n}");
  const auto b = run({"solve-exogenous", "--config", broken});
  CHECK(b.code == kExitConfig);
  CHECK(b.err.find("broken.json:3:") != std::string::npos);

  const auto both = dir.file("both.json", R"({
  "values": {"family": "uniform", "lo": 1, "hi": 2},
  "qualities": {"family": "uniform", "lo": 0, "hi": 1},
  "elasticity": 2
})");
  CHECK(run({"solve-exogenous", "--config", both}).code == kExitConfig);
  CHECK(run({"solve-exogenous"}).code == kExitConfig);
  CHECK(run({"no-such-command"}).code == kExitConfig);
}

TEST_CASE("point mass instance") {
  TempDir dir("point");
  const auto cfg = dir.file("point.json", R"({
  "values": {"family": "discrete", "atoms": [1.5]},
  "elasticity": 2
})");
  const auto r = run({"solve-endogenous", "--config", cfg, "--out", dir.path.string()});
  CHECK(r.code == kExitOk);
  const auto report = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(report["mechanism"]["positive_items"] == 1);
  CHECK(report["benchmarks"]["disclosure"].is_null());
}

TEST_CASE("oracle, sweep and discretize commands") {
  TempDir dir("misc");
  const auto cfg = dir.file("power.json", kPowerConfig);
  const auto out = dir.path.string();
  CHECK(run({"oracle", "--config", cfg, "--grid", "15", "--out", out}).code == kExitConfig);
  CHECK(run({"oracle", "--config", cfg, "--grid", "6", "--dump-table", "--out", out}).code ==
        kExitOk);
  CHECK(fs::exists(dir.path / "oracle.json"));
  std::ifstream table(dir.path / "oracle_table.csv");
  std::size_t lines = 0;
  for (std::string line; std::getline(table, line);) {
    ++lines;
  }
  CHECK(lines == 1 + 32 * 7);

  CHECK(run({"discretize", "--config", cfg, "--grid", "4", "--out", out}).code == kExitOk);
  CHECK(slurp(dir.path / "grid.csv").rfind("index,value,quality\n", 0) == 0);

  const auto sweep = dir.file("sweep.json", R"({
  "values": {"family": "uniform", "lo": 1, "hi": 2},
  "sweep": {"eta": [1.1, 1.5, 2.0]},
  "solver": {"grid": 40}
})");
  CHECK(run({"sweep-eta", "--config", sweep, "--out", out}).code == kExitOk);
  CHECK(fs::exists(dir.path / "sweep.csv"));

  const auto empty = dir.file("empty.json", R"({
  "values": {"family": "uniform", "lo": 1, "hi": 2},
  "sweep": {"eta": {"from": 2.0, "to": 1.0, "step": 0.1}}
})");
  CHECK(run({"sweep-eta", "--config", empty, "--out", out}).code == kExitConfig);
}
