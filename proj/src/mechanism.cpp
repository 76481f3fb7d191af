#include "poolmech/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "poolmech/errors.hpp"
#include "quadrature.hpp"

namespace poolmech {

namespace {

constexpr double kAccountingTolerance = 1e-9;

double scaled(double tolerance, double scale) {
  return tolerance * std::max(1.0, std::abs(scale));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::vector<CellMass> masses_of(std::span<const MechanismCell> cells) {
  std::vector<CellMass> out;
  out.reserve(cells.size());
  for (const auto& c : cells) {
    out.push_back({c.mass, c.value});
  }
  return out;
}

// Cells with masses and expected values filled from the value distribution.
std::vector<MechanismCell> value_cells(const Dist& f, const QuantilePartition& p) {
  if (!p.all_pooled()) {
    throw InvalidPartition("a mechanism needs every cell pooled");
  }
  std::vector<MechanismCell> cells(p.cells());
  for (std::size_t k = 0; k < p.cells(); ++k) {
    cells[k].mass = p.upper(k) - p.lower(k);
    cells[k].value = f.conditional_mean(p.lower(k), p.upper(k));
    if (k > 0 && !(cells[k].value > cells[k - 1].value)) {
      throw InvalidPartition("cells " + std::to_string(k) + " and " +
                             std::to_string(k + 1) +
                             " have the same expected value");
    }
  }
  return cells;
}

}  // namespace

std::size_t Mechanism::positive_items() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(),
                    [](const MechanismCell& c) { return c.quality > 0.0; }));
}

std::vector<double> discrete_virtual_values(std::span<const CellMass> cells) {
  std::vector<double> phi(cells.size());
  double cumulative = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!(cells[k].mass > 0.0)) {
      throw DomainError("cell masses must be positive");
    }
    if (k > 0 && !(cells[k].value > cells[k - 1].value)) {
      throw DomainError("cell values must be strictly increasing");
    }
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cumulative += cells[k].mass;
    if (k + 1 == cells.size()) {
      phi[k] = cells[k].value;
      break;
    }
    const double above = std::max(0.0, 1.0 - cumulative);
    phi[k] = cells[k].value -
             (cells[k + 1].value - cells[k].value) * above / cells[k].mass;
  }
  return phi;
}

RevenueIdentities revenue_identities(std::span<const MechanismCell> cells) {
  RevenueIdentities out;
  double below = 0.0;  // G_{k-1}
  double previous_quality = 0.0;
  for (const auto& c : cells) {
    out.by_prices += c.mass * c.price;
    out.by_increments += c.value * (c.quality - previous_quality) * (1.0 - below);
    out.by_virtual_values += c.mass * c.virtual_value * c.quality;
    below += c.mass;
    previous_quality = c.quality;
  }
  return out;
}

double profit(const Mechanism& m) {
  const auto ids = revenue_identities(m.cells);
  const double tol = scaled(kAccountingTolerance, ids.by_increments);
  if (std::abs(ids.by_prices - ids.by_increments) > tol ||
      std::abs(ids.by_virtual_values - ids.by_increments) > tol) {
    throw ConsistencyError("revenue formulas disagree: prices " +
                           fmt(ids.by_prices) + ", increments " +
                           fmt(ids.by_increments) + ", virtual values " +
                           fmt(ids.by_virtual_values));
  }
  return ids.by_increments;
}

void assign_prices(std::vector<MechanismCell>& cells) {
  double previous_price = 0.0;
  double previous_quality = 0.0;
  for (auto& c : cells) {
    c.price = previous_price + c.value * (c.quality - previous_quality);
    previous_price = c.price;
    previous_quality = c.quality;
  }
}

Mechanism build_mechanism(const Dist& f, const Dist& q,
                          const QuantilePartition& p) {
  p.validate();
  Mechanism m;
  m.partition = p;
  m.cells = value_cells(f, p);
  for (std::size_t k = 0; k < p.cells(); ++k) {
    m.cells[k].quality = pooled_quality(q, p.lower(k), p.upper(k), p.exclusion);
  }
  const auto phi = discrete_virtual_values(masses_of(m.cells));
  for (std::size_t k = 0; k < m.cells.size(); ++k) {
    m.cells[k].virtual_value = phi[k];
  }
  assign_prices(m.cells);
  m.revenue = profit(m);
  m.profit = m.revenue;
  return m;
}

Mechanism build_endogenous_mechanism(const Dist& f, const Elasticity& cost,
                                     const QuantilePartition& p) {
  p.validate();
  Mechanism m;
  m.partition = p;
  m.elasticity = cost.eta();
  m.cells = value_cells(f, p);
  const auto masses = masses_of(m.cells);
  const auto phi = discrete_virtual_values(masses);
  std::vector<double> weights;
  weights.reserve(masses.size());
  for (const auto& c : masses) {
    weights.push_back(c.mass);
  }
  const auto ironed = iron(weights, phi);
  double production = 0.0;
  double zero_until = 0.0;
  for (std::size_t k = 0; k < m.cells.size(); ++k) {
    auto& c = m.cells[k];
    c.virtual_value = phi[k];
    c.quality = pointwise_profit(ironed[k], cost).quality;
    c.cost = cost.cost(c.quality);
    production += c.mass * c.cost;
    if (c.quality == 0.0) {
      zero_until = p.upper(k);
    }
  }
  m.partition.exclusion = zero_until;
  assign_prices(m.cells);
  m.revenue = profit(m);
  m.profit = m.revenue - production;
  return m;
}

IntervalMoments interval_moments(const Dist& f, const Dist& q, double t1,
                                 double t2, double exclusion) {
  if (!(t2 > t1)) {
    throw DomainError("interval_moments needs t1 < t2");
  }
  IntervalMoments out;
  out.mass = t2 - t1;
  out.mean_value = f.integrate_quantile(t1, t2) / out.mass;
  out.mean_quality = pooled_quality(q, t1, t2, exclusion);
  auto phi = [&](double t) { return f.virtual_value(f.quantile(t)); };
  auto quality = [&](double t) { return t < exclusion ? 0.0 : q.quantile(t); };
  out.mean_phi = detail::integrate(phi, t1, t2) / out.mass;
  const double var_phi =
      detail::integrate(
          [&](double t) {
            const double d = phi(t) - out.mean_phi;
            return d * d;
          },
          t1, t2) /
      out.mass;
  const double var_q =
      detail::integrate(
          [&](double t) {
            const double d = quality(t) - out.mean_quality;
            return d * d;
          },
          t1, t2) /
      out.mass;
  out.sd_phi = std::sqrt(var_phi);
  out.sd_quality = std::sqrt(var_q);
  out.cauchy_schwarz_bound = out.sd_phi * out.sd_quality * out.mass;
  const double spread_q = std::max(
      0.0, (out.mean_quality - quality(t1)) * (quality(t2) - out.mean_quality));
  const double spread_phi =
      std::max(0.0, (out.mean_phi - phi(t1)) * (phi(t2) - out.mean_phi));
  out.bhatia_davis_bound = std::sqrt(spread_q) * std::sqrt(spread_phi) * out.mass;
  return out;
}

bool VerifyReport::hard_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed || !c.hard; });
}

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.passed; });
}

const Check* VerifyReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) {
      return &c;
    }
  }
  return nullptr;
}

VerifyReport verify(const Mechanism& m, const Dist& f, const Dist* q) {
  VerifyReport report;
  const auto& cells = m.cells;
  const std::size_t n = cells.size();
  double scale = 0.0;
  for (const auto& c : cells) {
    scale = std::max({scale, std::abs(c.value * c.quality), std::abs(c.price)});
  }
  const double tol = scaled(kAccountingTolerance, scale);

  {
    Check c{"partition", true, true, ""};
    try {
      m.partition.validate();
      if (m.partition.cells() != n) {
        c.passed = false;
        c.detail = "partition has " + std::to_string(m.partition.cells()) +
                   " cells but the menu has " + std::to_string(n);
      }
      for (std::size_t k = 0; c.passed && k < n; ++k) {
        const double width = m.partition.upper(k) - m.partition.lower(k);
        if (std::abs(cells[k].mass - width) > 1e-12) {
          c.passed = false;
          c.detail = "mass of cell " + std::to_string(k + 1) +
                     " does not match its quantile width";
        }
      }
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = e.what();
    }
    report.checks.push_back(c);
    if (!c.passed) {
      return report;
    }
  }

  {
    Check c{"monotone", true, true, ""};
    for (std::size_t k = 1; k < n; ++k) {
      if (!(cells[k].value > cells[k - 1].value)) {
        c.passed = false;
        c.detail = "expected values not strictly increasing at cell " +
                   std::to_string(k + 1);
        break;
      }
      if (cells[k].quality < cells[k - 1].quality - tol) {
        c.passed = false;
        c.detail = "quality decreases at cell " + std::to_string(k + 1);
        break;
      }
    }
    report.checks.push_back(c);
  }

  {
    Check c{"ic_global", true, true, ""};
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double own = cells[k].value * cells[k].quality - cells[k].price;
      for (std::size_t j = 0; j < n; ++j) {
        const double deviation =
            cells[k].value * cells[j].quality - cells[j].price - own;
        if (deviation > tol && deviation > worst) {
          worst = deviation;
          c.passed = false;
          c.detail = "cell " + std::to_string(k + 1) + " prefers item " +
                     std::to_string(j + 1) + " by " + fmt(deviation);
        }
      }
    }
    report.checks.push_back(c);
  }

  {
    Check c{"ir", true, true, ""};
    for (std::size_t k = 0; k < n; ++k) {
      const double surplus = cells[k].value * cells[k].quality - cells[k].price;
      if (surplus < -tol) {
        c.passed = false;
        c.detail = "cell " + std::to_string(k + 1) + " has surplus " + fmt(surplus);
        break;
      }
    }
    report.checks.push_back(c);
  }

  {
    Check c{"accounting", true, true, ""};
    const auto ids = revenue_identities(cells);
    double production = 0.0;
    double total_mass = 0.0;
    for (const auto& cell : cells) {
      production += cell.mass * cell.cost;
      total_mass += cell.mass;
    }
    const double t = scaled(kAccountingTolerance, ids.by_increments);
    if (std::abs(total_mass - 1.0) > 1e-12) {
      c.passed = false;
      c.detail = "cell masses sum to " + fmt(total_mass);
    } else if (std::abs(ids.by_prices - ids.by_increments) > t ||
               std::abs(ids.by_virtual_values - ids.by_increments) > t) {
      c.passed = false;
      c.detail = "revenue formulas disagree: prices " + fmt(ids.by_prices) +
                 ", increments " + fmt(ids.by_increments) +
                 ", virtual values " + fmt(ids.by_virtual_values);
    } else if (std::abs(m.revenue - ids.by_prices) > t ||
               std::abs(m.profit - (ids.by_prices - production)) > t) {
      c.passed = false;
      c.detail = "reported revenue/profit do not match the menu";
    }
    report.checks.push_back(c);
  }

  {
    Check c{"increasing_increments", true, false, ""};
    double previous_increment = 0.0;
    double previous_quality = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double increment = cells[k].quality - previous_quality;
      if (k > 0 && increment < previous_increment - tol) {
        c.passed = false;
        c.detail = "quality increment falls at cell " + std::to_string(k + 1);
        break;
      }
      previous_increment = increment;
      previous_quality = cells[k].quality;
    }
    report.checks.push_back(c);
  }

  if (q != nullptr && q->lo() > 0.0) {
    Check c{"item_bound", true, false, ""};
    const auto bound =
        static_cast<std::size_t>(std::floor(q->hi() / q->lo() + 1e-12));
    if (m.positive_items() > bound) {
      c.passed = false;
      c.detail = std::to_string(m.positive_items()) + " items exceed the bound " +
                 std::to_string(bound);
    }
    report.checks.push_back(c);
  }

  if (q != nullptr) {
    Check c{"quality_feasible", true, true, ""};
    StepQuantile r;
    r.partition = m.partition;
    r.base = *q;
    for (const auto& cell : cells) {
      r.levels.push_back(cell.quality);
    }
    const auto res = check_weak_major(r, *q);
    if (!res.holds) {
      c.passed = false;
      c.detail = "tail integral exceeds the quality supply by " +
                 fmt(res.max_violation) + " at quantile " + fmt(res.worst_probe);
    }
    report.checks.push_back(c);
  }

  {
    Check c{"information_feasible", true, true, ""};
    StepQuantile g;
    g.partition = m.partition;
    g.base = f;
    for (const auto& cell : cells) {
      g.levels.push_back(cell.value);
    }
    const auto res = check_mpc(g, f);
    if (!res.holds) {
      c.passed = false;
      c.detail = "not a mean-preserving contraction: violation " +
                 fmt(res.max_violation) + " at quantile " + fmt(res.worst_probe);
    }
    report.checks.push_back(c);
  }

  if (q != nullptr && f.is_continuous()) {
    for (std::size_t k = 0; k < m.partition.cells(); ++k) {
      if (m.partition.modes[k] == CellMode::Disclose) {
        report.disclosure.push_back(
            {k, interval_moments(f, *q, m.partition.lower(k),
                                 m.partition.upper(k), m.partition.exclusion)});
      }
    }
  }
  return report;
}

std::vector<Recommendation> recommendation_table(const Mechanism& m,
                                                 const Dist& f) {
  std::vector<Recommendation> rows;
  std::size_t item = 0;
  for (std::size_t k = 0; k < m.cells.size(); ++k) {
    const auto& c = m.cells[k];
    const bool sold = c.quality > 0.0;
    if (sold) {
      ++item;
    }
    rows.push_back({f.quantile(m.partition.lower(k)),
                    f.quantile(m.partition.upper(k)), sold ? item : 0,
                    c.quality, c.price});
  }
  return rows;
}

}  // namespace poolmech
