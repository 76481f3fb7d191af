#include "poolmech/serialize.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "poolmech/errors.hpp"

namespace poolmech {

using nlohmann::json;

namespace {

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) {
    throw FormatError(path, "expected an object");
  }
  const auto it = j.find(key);
  if (it == j.end()) {
    throw FormatError(path.empty() ? key : path + "." + key, "missing field");
  }
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_number()) {
    throw FormatError(join(path, key), "expected a number");
  }
  return v.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) {
    throw FormatError(path, "expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw FormatError(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(j[i].get<double>());
  }
  return out;
}

// Library exceptions raised while building an object are reported against
// the field that described it.
template <class F>
auto at_path(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(path, e.what());
  }
}

json cell_json(const MechanismCell& c) {
  return {{"mass", c.mass},         {"value", c.value},
          {"quality", c.quality},   {"price", c.price},
          {"virtual_value", c.virtual_value}, {"cost", c.cost}};
}

std::string csv_number(double x) {
  return std::isfinite(x) ? format_number(x) : std::string();
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json to_json(const Dist& d) {
  json j{{"family", d.family_name()}};
  switch (d.family()) {
    case Dist::Family::PowerCdf:
      j["exponent"] = d.exponent();
      j["lo"] = d.lo();
      j["hi"] = d.hi();
      break;
    case Dist::Family::Uniform:
      j["lo"] = d.lo();
      j["hi"] = d.hi();
      break;
    case Dist::Family::PiecewiseLinear: {
      json knots = json::array();
      for (const auto& k : d.knots()) {
        knots.push_back({k.value, k.cdf});
      }
      j["knots"] = knots;
      break;
    }
    case Dist::Family::Discrete:
      j["atoms"] = std::vector<double>(d.atoms().begin(), d.atoms().end());
      break;
  }
  return j;
}

Dist dist_from_json(const json& j, const std::string& path) {
  const json& fam = field(j, "family", path);
  if (!fam.is_string()) {
    throw FormatError(join(path, "family"), "expected a string");
  }
  const auto family = fam.get<std::string>();
  if (family == "power_cdf") {
    const double a = number(j, "exponent", path);
    const double lo = number(j, "lo", path);
    const double hi = number(j, "hi", path);
    return at_path(path, [&] { return Dist::power_cdf(a, lo, hi); });
  }
  if (family == "uniform") {
    const double lo = number(j, "lo", path);
    const double hi = number(j, "hi", path);
    return at_path(path, [&] { return Dist::uniform(lo, hi); });
  }
  if (family == "piecewise_linear") {
    const std::string kpath = join(path, "knots");
    const json& arr = field(j, "knots", path);
    if (!arr.is_array()) {
      throw FormatError(kpath, "expected an array of [value, cdf] pairs");
    }
    std::vector<Dist::Knot> knots;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto pair = numbers(arr[i], kpath + "[" + std::to_string(i) + "]");
      if (pair.size() != 2) {
        throw FormatError(kpath + "[" + std::to_string(i) + "]",
                          "expected a [value, cdf] pair");
      }
      knots.push_back({pair[0], pair[1]});
    }
    return at_path(kpath, [&] { return Dist::piecewise_linear(std::move(knots)); });
  }
  if (family == "discrete") {
    auto atoms = numbers(field(j, "atoms", path), join(path, "atoms"));
    return at_path(join(path, "atoms"), [&] { return Dist::discrete(std::move(atoms)); });
  }
  throw FormatError(join(path, "family"),
                    "unknown family '" + family +
                        "' (expected power_cdf, uniform, piecewise_linear or discrete)");
}

json to_json(const QuantilePartition& p) {
  json modes = json::array();
  for (auto m : p.modes) {
    modes.push_back(m == CellMode::Pool ? "pool" : "disclose");
  }
  return {{"breakpoints", p.breakpoints}, {"exclusion", p.exclusion}, {"modes", modes}};
}

QuantilePartition partition_from_json(const json& j, const std::string& path) {
  QuantilePartition p;
  p.breakpoints = numbers(field(j, "breakpoints", path), join(path, "breakpoints"));
  p.exclusion = j.contains("exclusion") ? number(j, "exclusion", path) : 0.0;
  if (j.contains("modes")) {
    const json& modes = j.at("modes");
    if (!modes.is_array()) {
      throw FormatError(join(path, "modes"), "expected an array");
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto& m = modes[i];
      if (m == "pool") {
        p.modes.push_back(CellMode::Pool);
      } else if (m == "disclose") {
        p.modes.push_back(CellMode::Disclose);
      } else {
        throw FormatError(join(path, "modes") + "[" + std::to_string(i) + "]",
                          "expected \"pool\" or \"disclose\"");
      }
    }
  } else if (p.breakpoints.size() > 1) {
    p.modes.assign(p.breakpoints.size() - 1, CellMode::Pool);
  }
  at_path(path, [&] {
    p.validate();
    return 0;
  });
  return p;
}

json to_json(const Mechanism& m) {
  json cells = json::array();
  for (const auto& c : m.cells) {
    cells.push_back(cell_json(c));
  }
  json j{{"schema_version", kSchemaVersion},
         {"model", m.elasticity ? "endogenous" : "exogenous"},
         {"partition", to_json(m.partition)},
         {"cells", cells},
         {"revenue", m.revenue},
         {"profit", m.profit},
         {"positive_items", m.positive_items()}};
  if (m.elasticity) {
    j["elasticity"] = *m.elasticity;
  }
  return j;
}

Mechanism mechanism_from_json(const json& j) {
  const json& version = field(j, "schema_version", "");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
    throw FormatError("schema_version", "unsupported schema version");
  }
  Mechanism m;
  m.partition = partition_from_json(field(j, "partition", ""), "partition");
  const json& cells = field(j, "cells", "");
  if (!cells.is_array()) {
    throw FormatError("cells", "expected an array");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string path = "cells[" + std::to_string(i) + "]";
    MechanismCell c;
    c.mass = number(cells[i], "mass", path);
    c.value = number(cells[i], "value", path);
    c.quality = number(cells[i], "quality", path);
    c.price = number(cells[i], "price", path);
    c.virtual_value = number(cells[i], "virtual_value", path);
    c.cost = cells[i].contains("cost") ? number(cells[i], "cost", path) : 0.0;
    m.cells.push_back(c);
  }
  if (j.contains("elasticity")) {
    m.elasticity = number(j, "elasticity", "");
  }
  m.revenue = number(j, "revenue", "");
  m.profit = number(j, "profit", "");
  return m;
}

json to_json(const VerifyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"status", c.passed ? "pass" : "fail"},
                      {"kind", c.hard ? "hard" : "flag"},
                      {"detail", c.detail}});
  }
  json disclosure = json::array();
  for (const auto& d : r.disclosure) {
    const auto& mm = d.moments;
    disclosure.push_back({{"cell", d.cell},
                          {"mass", mm.mass},
                          {"mean_value", mm.mean_value},
                          {"mean_virtual_value", mm.mean_phi},
                          {"sd_virtual_value", mm.sd_phi},
                          {"mean_quality", mm.mean_quality},
                          {"sd_quality", mm.sd_quality},
                          {"cauchy_schwarz_bound", mm.cauchy_schwarz_bound},
                          {"bhatia_davis_bound", mm.bhatia_davis_bound}});
  }
  return {{"hard_pass", r.hard_pass()},
          {"all_pass", r.all_pass()},
          {"checks", checks},
          {"disclosure_intervals", disclosure}};
}

json to_json(const SolveReport& r) {
  const auto& t = r.trace;
  json j{{"schema_version", kSchemaVersion},
         {"profit", r.mechanism.profit},
         {"positive_items", r.mechanism.positive_items()},
         {"cells", r.mechanism.cells.size()},
         {"mechanism", to_json(r.mechanism)},
         {"trace",
          {{"grid", t.grid},
           {"dp_cuts", t.dp_partition.cuts},
           {"dp_exclusion", t.dp_partition.exclusion},
           {"dp_value", t.dp_value},
           {"canonical_profit", t.canonical_profit},
           {"polish_starts", t.polish_starts},
           {"polish_accepted", t.polish_accepted},
           {"polish_gain", t.polish_gain}}},
         {"verification", to_json(r.verification)}};
  j["oracle_gap"] = r.oracle_gap ? json(*r.oracle_gap) : json(nullptr);
  return j;
}

json to_json(const OracleResult& r, std::size_t n) {
  json j{{"schema_version", kSchemaVersion},
         {"grid", n},
         {"cuts", r.best.partition.cuts},
         {"exclusion", r.best.partition.exclusion},
         {"profit", r.best.value},
         {"positive_items", r.best.items},
         {"candidates", r.table.size()}};
  if (r.ironed_best) {
    j["ironed_profit"] = *r.ironed_best;
  }
  return j;
}

json to_json(const EtaThresholds& t) {
  json j{{"upper", t.upper},
         {"upper_beta", t.upper_beta},
         {"lower_bracketed", t.lower_bracketed},
         {"scan_window", {t.scan_lo, t.scan_hi}},
         {"note", t.note}};
  j["lower_estimate"] = t.lower ? json(*t.lower) : json(nullptr);
  return j;
}

json to_json(const DisclosureTest& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"delta", s.delta},
                     {"v1", s.v1},
                     {"v2", s.v2},
                     {"quality_pooling_loss", s.quality_pooling_loss},
                     {"joint_pooling_gain", s.joint_pooling_gain},
                     {"ratio", s.ratio},
                     {"cauchy_schwarz_bound", s.cauchy_schwarz_bound},
                     {"bhatia_davis_bound", s.bhatia_davis_bound}});
  }
  return {{"center", t.center},
          {"steps", steps},
          {"gain_limit", t.gain_limit},
          {"loss_limit", t.loss_limit}};
}

void write_trace_csv(std::ostream& os, const Mechanism& m, const Dist& f,
                     const Dist* q) {
  const StepQuantile g = [&] {
    StepQuantile s;
    s.partition = m.partition;
    s.base = f;
    for (const auto& c : m.cells) {
      s.levels.push_back(c.value);
    }
    return s;
  }();
  StepQuantile r;
  r.partition = m.partition;
  for (const auto& c : m.cells) {
    r.levels.push_back(c.quality);
  }
  if (q != nullptr) {
    r.base = *q;
  }
  os << "t,F_inv,G_inv,Q_inv,R_inv\n";
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    os << format_number(t) << ',' << format_number(f.quantile(t)) << ','
       << format_number(g.at(t)) << ',';
    os << (q != nullptr ? format_number(q->quantile(t)) : std::string()) << ',';
    os << format_number(r.at(t)) << '\n';
  }
}

void write_recommendations_csv(std::ostream& os, const Mechanism& m, const Dist& f) {
  os << "value_lo,value_hi,item,quality,price\n";
  for (const auto& row : recommendation_table(m, f)) {
    os << format_number(row.value_lo) << ',' << format_number(row.value_hi) << ','
       << row.item << ',' << format_number(row.quality) << ','
       << format_number(row.price) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "eta,structure_profit,pooling_profit,disclosure_profit,solver_items,solver_profit\n";
  for (const auto& r : rows) {
    os << format_number(r.eta) << ',' << format_number(r.structure) << ','
       << format_number(r.pooling) << ','
       << (r.disclosure ? csv_number(*r.disclosure) : std::string()) << ','
       << r.solver_items << ',' << format_number(r.solver_profit) << '\n';
  }
}

void write_oracle_table_csv(std::ostream& os, const OracleResult& r) {
  os << "mask,exclusion,profit,admissible\n";
  for (const auto& row : r.table) {
    os << row.mask << ',' << row.exclusion << ',' << format_number(row.profit) << ','
       << (row.admissible ? 1 : 0) << '\n';
  }
}

}  // namespace poolmech
