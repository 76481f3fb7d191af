#include "poolmech/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "poolmech/errors.hpp"
#include "poolmech/serialize.hpp"

namespace poolmech {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Configuration problem located at a line of the config file (0 if unknown).
struct ConfigError {
  std::string file;
  std::size_t line;
  std::string message;
};

struct Flags {
  std::string config;
  std::string out = ".";
  std::string mechanism;
  std::optional<std::size_t> grid;
  std::optional<std::uint64_t> seed;
  bool no_polish = false;
  bool dump_table = false;
};

class Config {
 public:
  Config(std::string file, std::string text, json doc)
      : file_(std::move(file)), text_(std::move(text)), doc_(std::move(doc)) {}

  static Config load(const std::string& file) {
    if (file.empty()) {
      throw ConfigError{"", 0, "--config is required"};
    }
    std::ifstream in(file);
    if (!in) {
      throw ConfigError{file, 0, "cannot read config file"};
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    try {
      json doc = json::parse(text);
      if (!doc.is_object()) {
        throw ConfigError{file, 1, "config must be a JSON object"};
      }
      return Config(file, std::move(text), std::move(doc));
    } catch (const json::parse_error& e) {
      throw ConfigError{file, line_at_byte(text, e.byte), e.what()};
    }
  }

  const json& doc() const { return doc_; }
  bool has(const std::string& key) const { return doc_.contains(key); }

  // Runs `build`, converting library and format errors into located ones.
  template <class F>
  auto located(const std::string& path, F&& build) const {
    try {
      return build();
    } catch (const FormatError& e) {
      throw ConfigError{file_, line_of(e.path()), e.what()};
    } catch (const ConfigError&) {
      throw;
    } catch (const RefusedError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError{file_, line_of(path), path + ": " + e.what()};
    }
  }

  Dist dist(const std::string& key) const {
    if (!has(key)) {
      throw ConfigError{file_, 0, "missing field '" + key + "'"};
    }
    return located(key, [&] { return dist_from_json(doc_.at(key), key); });
  }

  Elasticity elasticity() const {
    if (!has("elasticity")) {
      throw ConfigError{file_, 0, "missing field 'elasticity'"};
    }
    return located("elasticity", [&] {
      const json& e = doc_.at("elasticity");
      if (!e.is_number()) {
        throw FormatError("elasticity", "expected a number");
      }
      return Elasticity(e.get<double>());
    });
  }

  std::size_t line_of(const std::string& path) const {
    // Walk the dotted path, finding each key after the previous one.
    std::size_t pos = 0;
    std::size_t found = std::string::npos;
    std::stringstream parts(path);
    std::string part;
    while (std::getline(parts, part, '.')) {
      const auto bracket = part.find('[');
      const std::string key = part.substr(0, bracket);
      if (key.empty()) {
        continue;
      }
      const auto at = text_.find('"' + key + '"', pos);
      if (at == std::string::npos) {
        break;
      }
      found = at;
      pos = at + key.size() + 2;
    }
    return found == std::string::npos ? 0 : line_at_byte(text_, found + 1);
  }

  const std::string& file() const { return file_; }

 private:
  static std::size_t line_at_byte(const std::string& text, std::size_t byte) {
    const std::size_t end = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(end), '\n'));
  }

  std::string file_;
  std::string text_;
  json doc_;
};

SolveOptions solver_options(const Config& cfg, const Flags& flags) {
  SolveOptions opts;
  if (cfg.has("solver")) {
    cfg.located("solver", [&] {
      const json& s = cfg.doc().at("solver");
      if (!s.is_object()) {
        throw FormatError("solver", "expected an object");
      }
      auto count = [&](const char* key, auto& target) {
        if (s.contains(key)) {
          if (!s.at(key).is_number_unsigned()) {
            throw FormatError(std::string("solver.") + key,
                              "expected a non-negative integer");
          }
          target = s.at(key).template get<std::decay_t<decltype(target)>>();
        }
      };
      auto flag = [&](const char* key, bool& target) {
        if (s.contains(key)) {
          if (!s.at(key).is_boolean()) {
            throw FormatError(std::string("solver.") + key, "expected true or false");
          }
          target = s.at(key).get<bool>();
        }
      };
      count("grid", opts.grid);
      count("seed", opts.seed);
      count("polish_starts", opts.polish_starts);
      flag("polish", opts.polish);
      flag("oracle_check", opts.oracle_check);
      return 0;
    });
  }
  if (flags.grid) {
    opts.grid = *flags.grid;
  }
  if (flags.seed) {
    opts.seed = *flags.seed;
  }
  if (flags.no_polish) {
    opts.polish = false;
  }
  cfg.located("solver.grid", [&] {
    opts.validate();
    return 0;
  });
  return opts;
}

void require_one_cost(const Config& cfg) {
  if (cfg.has("qualities") == cfg.has("elasticity")) {
    throw ConfigError{cfg.file(), 0,
                      "exactly one of 'qualities' or 'elasticity' must be given"};
  }
}

fs::path output_dir(const Flags& flags) {
  fs::path dir(flags.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError{"", 0, "cannot create output directory '" + flags.out + "'"};
  }
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw ConfigError{"", 0, "cannot write '" + path.string() + "'"};
  }
  os << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json options_json(const SolveOptions& o) {
  return {{"grid", o.grid},
          {"polish", o.polish},
          {"polish_starts", o.polish_starts},
          {"seed", o.seed}};
}

void write_solution(const fs::path& dir, json report, const SolveReport& r,
                    const Dist& f, const Dist* q) {
  write_file(dir / "report.json", dump(report));
  write_file(dir / "mechanism.json", dump(to_json(r.mechanism)));
  std::ostringstream trace;
  write_trace_csv(trace, r.mechanism, f, q);
  write_file(dir / "trace.csv", trace.str());
  std::ostringstream rec;
  write_recommendations_csv(rec, r.mechanism, f);
  write_file(dir / "recommendations.csv", rec.str());
}

void print_checks(std::ostream& out, const VerifyReport& v) {
  for (const auto& c : v.checks) {
    out << "  " << c.name << ": " << (c.passed ? "pass" : "FAIL")
        << (c.hard ? "" : " (flag)");
    if (!c.detail.empty()) {
      out << " - " << c.detail;
    }
    out << '\n';
  }
}

int summarize(std::ostream& out, const SolveReport& r) {
  out << "profit " << format_number(r.mechanism.profit) << ", items "
      << r.mechanism.positive_items() << ", cells " << r.mechanism.cells.size()
      << '\n';
  print_checks(out, r.verification);
  return r.verification.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_solve_exogenous(const Flags& flags, std::ostream& out) {
  const auto cfg = Config::load(flags.config);
  require_one_cost(cfg);
  const Dist f = cfg.dist("values");
  if (!cfg.has("qualities")) {
    throw ConfigError{cfg.file(), 0, "solve-exogenous needs 'qualities'"};
  }
  const Dist q = cfg.dist("qualities");
  const auto opts = solver_options(cfg, flags);
  const auto dir = output_dir(flags);
  const auto r = solve_exogenous(f, q, opts);
  json report = to_json(r);
  report["command"] = "solve-exogenous";
  report["values"] = to_json(f);
  report["qualities"] = to_json(q);
  report["options"] = options_json(opts);
  write_solution(dir, std::move(report), r, f, &q);
  return summarize(out, r);
}

int cmd_solve_endogenous(const Flags& flags, std::ostream& out) {
  const auto cfg = Config::load(flags.config);
  require_one_cost(cfg);
  const Dist f = cfg.dist("values");
  if (!cfg.has("elasticity")) {
    throw ConfigError{cfg.file(), 0, "solve-endogenous needs 'elasticity'"};
  }
  const Elasticity cost = cfg.elasticity();
  const auto opts = solver_options(cfg, flags);
  const auto dir = output_dir(flags);
  const auto r = solve_endogenous(f, cost, opts);
  json report = to_json(r);
  report["command"] = "solve-endogenous";
  report["values"] = to_json(f);
  report["elasticity"] = cost.eta();
  report["options"] = options_json(opts);
  const auto bench = benchmark_profits(f, cost);
  report["benchmarks"] = {{"pooling", bench.pooling},
                          {"disclosure", bench.disclosure ? json(*bench.disclosure)
                                                          : json(nullptr)}};
  const auto cond = check_pooling_condition(f, cost);
  report["pooling_condition"] = {{"applies", cond.applies},
                                 {"pooling_optimal", cond.pooling_optimal},
                                 {"reason", cond.reason}};
  write_solution(dir, std::move(report), r, f, nullptr);
  return summarize(out, r);
}

int cmd_oracle(const Flags& flags, std::ostream& out) {
  const auto cfg = Config::load(flags.config);
  require_one_cost(cfg);
  const Dist f = cfg.dist("values");
  std::size_t n = 8;
  if (cfg.has("solver") && cfg.doc().at("solver").contains("grid")) {
    n = solver_options(cfg, Flags{}).grid;
  }
  if (flags.grid) {
    n = *flags.grid;
  }
  if (n == 0) {
    throw ConfigError{"", 0, "--grid must be positive"};
  }
  const auto dir = output_dir(flags);
  OracleResult r;
  json j;
  if (cfg.has("qualities")) {
    const Dist q = cfg.dist("qualities");
    r = oracle_exo(f.discretize(n), q.discretize(n), flags.dump_table);
    j = to_json(r, n);
    j["model"] = "exogenous";
  } else {
    const Elasticity cost = cfg.elasticity();
    r = oracle_endo(f.discretize(n), cost, flags.dump_table);
    j = to_json(r, n);
    j["model"] = "endogenous";
  }
  j["command"] = "oracle";
  write_file(dir / "oracle.json", dump(j));
  if (flags.dump_table) {
    std::ostringstream table;
    write_oracle_table_csv(table, r);
    write_file(dir / "oracle_table.csv", table.str());
  }
  out << "oracle profit " << format_number(r.best.value) << ", items " << r.best.items
      << ", cells " << r.best.partition.cells() << '\n';
  return kExitOk;
}

Mechanism load_mechanism(const std::string& file) {
  if (file.empty()) {
    throw ConfigError{"", 0, "--mechanism is required"};
  }
  std::ifstream in(file);
  if (!in) {
    throw ConfigError{file, 0, "cannot read mechanism file"};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const Config doc = [&] {
    try {
      return Config(file, text, json::parse(text));
    } catch (const json::parse_error& e) {
      throw ConfigError{file, 0, e.what()};
    }
  }();
  return doc.located("", [&] { return mechanism_from_json(doc.doc()); });
}

int cmd_verify(const Flags& flags, std::ostream& out) {
  const auto cfg = Config::load(flags.config);
  const Dist f = cfg.dist("values");
  const Mechanism m = load_mechanism(flags.mechanism);
  std::optional<Dist> q;
  if (!m.elasticity) {
    if (!cfg.has("qualities")) {
      throw ConfigError{cfg.file(), 0,
                        "verifying an exogenous-quality mechanism needs 'qualities'"};
    }
    q = cfg.dist("qualities");
  }
  const auto report = verify(m, f, q ? &*q : nullptr);
  const auto dir = output_dir(flags);
  json j = to_json(report);
  j["schema_version"] = kSchemaVersion;
  j["command"] = "verify";
  write_file(dir / "verify.json", dump(j));
  out << (report.hard_pass() ? "verify: pass" : "verify: FAIL") << '\n';
  print_checks(out, report);
  return report.hard_pass() ? kExitOk : kExitCheckFailed;
}

std::vector<double> sweep_values(const Config& cfg) {
  if (!cfg.has("sweep")) {
    throw ConfigError{cfg.file(), 0, "missing field 'sweep'"};
  }
  return cfg.located("sweep.eta", [&] {
    const json& s = cfg.doc().at("sweep");
    if (!s.is_object() || !s.contains("eta")) {
      throw FormatError("sweep.eta", "missing field");
    }
    const json& e = s.at("eta");
    std::vector<double> etas;
    if (e.is_array()) {
      for (const auto& x : e) {
        if (!x.is_number()) {
          throw FormatError("sweep.eta", "expected numbers");
        }
        etas.push_back(x.get<double>());
      }
    } else if (e.is_object()) {
      for (const char* key : {"from", "to", "step"}) {
        if (!e.contains(key) || !e.at(key).is_number()) {
          throw FormatError(std::string("sweep.eta.") + key, "expected a number");
        }
      }
      const double from = e.at("from").get<double>();
      const double to = e.at("to").get<double>();
      const double step = e.at("step").get<double>();
      if (!(step > 0.0)) {
        throw FormatError("sweep.eta.step", "step must be positive");
      }
      for (std::size_t i = 0;; ++i) {
        const double x = from + static_cast<double>(i) * step;
        if (x > to + 1e-9 * step) {
          break;
        }
        etas.push_back(x);
      }
    } else {
      throw FormatError("sweep.eta", "expected a list or {from, to, step}");
    }
    if (etas.empty()) {
      throw FormatError("sweep.eta", "elasticity range is empty");
    }
    for (std::size_t i = 1; i < etas.size(); ++i) {
      if (!(etas[i] > etas[i - 1])) {
        throw FormatError("sweep.eta", "elasticities must be increasing");
      }
    }
    for (double x : etas) {
      Elasticity check(x);
      (void)check;
    }
    return etas;
  });
}

int cmd_sweep(const Flags& flags, std::ostream& out) {
  const auto cfg = Config::load(flags.config);
  const Dist f = cfg.dist("values");
  const auto etas = sweep_values(cfg);
  QuantilePartition structure = QuantilePartition::pooled({0.0, 0.5, 1.0});
  if (cfg.doc().at("sweep").contains("structure")) {
    structure = cfg.located("sweep.structure", [&] {
      return partition_from_json(cfg.doc().at("sweep").at("structure"), "sweep.structure");
    });
  }
  const auto opts = solver_options(cfg, flags);
  const auto dir = output_dir(flags);
  const auto rows = sweep_eta(f, structure, etas, opts);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_file(dir / "sweep.csv", csv.str());
  out << "sweep: " << rows.size() << " rows\n";
  return kExitOk;
}

int cmd_discretize(const Flags& flags, std::ostream& out) {
  const auto cfg = Config::load(flags.config);
  const Dist f = cfg.dist("values");
  std::optional<Dist> q;
  if (cfg.has("qualities")) {
    q = cfg.dist("qualities");
  }
  const std::size_t n = flags.grid.value_or(solver_options(cfg, Flags{}).grid);
  if (n == 0) {
    throw ConfigError{"", 0, "--grid must be positive"};
  }
  const auto dir = output_dir(flags);
  const auto fg = f.discretize(n);
  const auto qg = q ? q->discretize(n) : GridDist{};
  std::ostringstream csv;
  csv << "index,value" << (q ? ",quality" : "") << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    csv << i << ',' << format_number(fg.values[i]);
    if (q) {
      csv << ',' << format_number(qg.values[i]);
    }
    csv << '\n';
  }
  write_file(dir / "grid.csv", csv.str());
  out << "grid: " << n << " atoms, mean " << format_number(fg.mean()) << '\n';
  return kExitOk;
}

int cmd_export_trace(const Flags& flags, std::ostream& out) {
  const auto cfg = Config::load(flags.config);
  const Dist f = cfg.dist("values");
  const Mechanism m = load_mechanism(flags.mechanism);
  std::optional<Dist> q;
  if (cfg.has("qualities")) {
    q = cfg.dist("qualities");
  }
  const auto dir = output_dir(flags);
  std::ostringstream csv;
  write_trace_csv(csv, m, f, q ? &*q : nullptr);
  write_file(dir / "trace.csv", csv.str());
  out << "trace: 1001 rows\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal joint information structure and menu for a monopolist"};
  app.require_subcommand(1);
  Flags flags;
  std::size_t grid = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Instance config (JSON)");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--grid", grid, "Grid size")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for multi-start polish");
    sub->add_flag("--no-polish", flags.no_polish, "Skip continuous polish");
  };
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Flags&, std::ostream&);
    bool mechanism;
  };
  const Command commands[] = {
      {"solve-exogenous", "Solve with an exogenous quality distribution", cmd_solve_exogenous, false},
      {"solve-endogenous", "Solve with constant-elasticity quality cost", cmd_solve_endogenous, false},
      {"oracle", "Exhaustive search on a small grid", cmd_oracle, false},
      {"verify", "Check a mechanism file against an instance", cmd_verify, true},
      {"sweep-eta", "Profit comparison across cost elasticities", cmd_sweep, false},
      {"discretize", "Write the equal-mass grid of the distributions", cmd_discretize, false},
      {"export-trace", "Write quantile functions of a mechanism", cmd_export_trace, true},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    if (c.mechanism) {
      sub->add_option("--mechanism", flags.mechanism, "Mechanism file (JSON)");
    }
    if (std::string(c.name) == "oracle") {
      sub->add_flag("--dump-table", flags.dump_table, "Also write every candidate");
    }
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (const auto& [sub, cmd] : subs) {
    if (!sub->parsed()) {
      continue;
    }
    if (sub->count("--grid") > 0) {
      flags.grid = grid;
    }
    if (sub->count("--seed") > 0) {
      flags.seed = seed;
    }
    try {
      return cmd->run(flags, out);
    } catch (const ConfigError& e) {
      err << "error: ";
      if (!e.file.empty()) {
        err << e.file << ':';
        if (e.line > 0) {
          err << e.line << ':';
        }
        err << ' ';
      }
      err << e.message << '\n';
      return kExitConfig;
    } catch (const RefusedError& e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const ConsistencyError& e) {
      err << "internal consistency failure: " << e.what() << '\n';
      return kExitCheckFailed;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }
  return kExitConfig;
}

}  // namespace poolmech
