#include "poolmech/solve_endo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poolmech/errors.hpp"
#include "poolmech/oracle.hpp"
#include "polish.hpp"
#include "quadrature.hpp"

namespace poolmech {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// One way to continue upward from cell [b, c): the cell above it ends at d.
struct Option {
  double phi;
  double value;  // this cell and everything above
  std::uint32_t items;
  std::uint32_t cells;
  std::uint32_t d;
  std::uint32_t next;  // chosen option of cell [c, d)
};

bool better_option(const Option& a, const Option& b) {
  if (a.value > b.value + kProfitTieTolerance) {
    return true;
  }
  if (a.value < b.value - kProfitTieTolerance) {
    return false;
  }
  return a.items < b.items || (a.items == b.items && a.cells < b.cells);
}

// Options of a cell sorted by phi descending, with the running best so that
// "best option with phi >= p" is a binary search.
struct OptionList {
  std::vector<Option> options;
  std::vector<std::uint32_t> best_prefix;

  void finish() {
    std::stable_sort(options.begin(), options.end(),
                     [](const Option& x, const Option& y) { return x.phi > y.phi; });
    best_prefix.resize(options.size());
    for (std::size_t i = 0; i < options.size(); ++i) {
      best_prefix[i] = static_cast<std::uint32_t>(i);
      if (i > 0 && !better_option(options[i], options[best_prefix[i - 1]])) {
        best_prefix[i] = best_prefix[i - 1];
      }
    }
  }

  // Best option whose quality is at least that of virtual value p.
  std::uint32_t best_at_least(double p) const {
    std::size_t count = options.size();
    if (p > 0.0) {
      count = static_cast<std::size_t>(
          std::partition_point(options.begin(), options.end(),
                               [p](const Option& o) { return o.phi >= p; }) -
          options.begin());
    }
    return count == 0 ? kNone : best_prefix[count - 1];
  }
};

double pi_scaled(double phi, double scale, double beta) {
  return phi > 0.0 ? std::pow(phi / scale, beta) : 0.0;
}

// Integral over quantiles of (max(phi, 0) / scale)^beta, split where the
// virtual value turns positive.
double disclosure_integral(const Dist& f, double scale, double beta) {
  auto phi = [&f](double t) { return f.virtual_value(f.quantile(t)); };
  double from = 0.0;
  const double eps = 1e-12;
  if (phi(eps) <= 0.0) {
    double lo = eps;
    double hi = 1.0 - eps;
    if (phi(hi) <= 0.0) {
      return 0.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) > 0.0 ? hi : lo) = mid;
    }
    from = hi;
  }
  return detail::integrate(
      [&](double t) { return pi_scaled(phi(t), scale, beta); }, from, 1.0, 1e-10);
}

QuantilePartition merge_cells(const Dist& f, const Elasticity& cost,
                              QuantilePartition p) {
  for (;;) {
    bool merged = false;
    const double before = build_endogenous_mechanism(f, cost, p).profit;
    for (std::size_t k = 0; k + 1 < p.cells() && !merged; ++k) {
      const double w0 = f.conditional_mean(p.lower(k), p.upper(k));
      const double w1 = f.conditional_mean(p.lower(k + 1), p.upper(k + 1));
      const bool equal_values =
          std::abs(w1 - w0) <= 1e-12 * std::max({1.0, std::abs(w0), std::abs(w1)});
      QuantilePartition trial = p;
      trial.breakpoints.erase(trial.breakpoints.begin() + static_cast<long>(k) + 1);
      trial.modes.erase(trial.modes.begin() + static_cast<long>(k));
      if (equal_values) {
        p = trial;
        merged = true;
        break;
      }
      const auto m = build_endogenous_mechanism(f, cost, p);
      if (m.cells[k].quality == 0.0 && m.cells[k + 1].quality == 0.0 &&
          build_endogenous_mechanism(f, cost, trial).profit >= before) {
        p = trial;
        merged = true;
      }
    }
    if (!merged) {
      return p;
    }
  }
}

}  // namespace

GridCandidate dp_grid_endo(const GridDist& values, const Elasticity& cost) {
  const auto g = GridPrefix::make(values, nullptr);
  const std::size_t n = g.n;
  std::vector<OptionList> lists((n + 1) * (n + 1));
  auto list = [&](std::size_t b, std::size_t c) -> OptionList& {
    return lists[b * (n + 1) + c];
  };

  for (std::size_t c = n; c >= 1; --c) {
    for (std::size_t b = 0; b < c; ++b) {
      OptionList& here = list(b, c);
      const double mass = g.mass(b, c);
      if (c == n) {
        const double phi = g.phi(b, n, n);
        here.options.push_back({phi, mass * pointwise_profit(phi, cost).profit,
                                phi > 0.0 ? 1U : 0U, 1U,
                                static_cast<std::uint32_t>(n), kNone});
      } else {
        here.options.reserve(n - c);
        for (std::size_t d = c + 1; d <= n; ++d) {
          const double phi = g.phi(b, c, d);
          const OptionList& above = list(c, d);
          const std::uint32_t pick = above.best_at_least(std::max(phi, 0.0));
          if (pick == kNone) {
            continue;
          }
          const Option& rest = above.options[pick];
          here.options.push_back({phi, mass * pointwise_profit(phi, cost).profit + rest.value,
                                  rest.items + (phi > 0.0 ? 1U : 0U), rest.cells + 1,
                                  static_cast<std::uint32_t>(d), pick});
        }
      }
      here.finish();
    }
  }

  // The bottom cell has no constraint from below.
  std::size_t best_c = n;
  std::uint32_t best_idx = kNone;
  for (std::size_t c = 1; c <= n; ++c) {
    const OptionList& bottom = list(0, c);
    if (bottom.options.empty()) {
      continue;
    }
    const std::uint32_t idx = bottom.best_prefix.back();
    if (best_idx == kNone ||
        better_option(bottom.options[idx], list(0, best_c).options[best_idx])) {
      best_c = c;
      best_idx = idx;
    }
  }

  GridCandidate out;
  out.partition.cuts.push_back(0);
  std::size_t b = 0;
  std::size_t c = best_c;
  std::uint32_t idx = best_idx;
  for (;;) {
    out.partition.cuts.push_back(c);
    if (c == n) {
      break;
    }
    const Option& o = list(b, c).options[idx];
    b = c;
    c = o.d;
    idx = o.next;
  }
  out.value = endo_grid_profit(g, out.partition.cuts, cost);
  out.items = endo_positive_items(grid_virtual_values(g, out.partition.cuts));
  return out;
}

SolveReport solve_endogenous(const Dist& f, const Elasticity& cost,
                             const SolveOptions& opts) {
  opts.validate();
  const std::size_t n = opts.grid;
  const auto fg = f.discretize(n);

  SolveReport report;
  const auto dp = dp_grid_endo(fg, cost);
  report.trace.grid = n;
  report.trace.dp_partition = dp.partition;
  report.trace.dp_value = dp.value;

  const auto partition = merge_cells(f, cost, to_quantile_partition(dp.partition, n));
  Mechanism m = build_endogenous_mechanism(f, cost, partition);
  VerifyReport checks = verify(m, f, nullptr);
  report.trace.canonical_profit = m.profit;

  if (opts.polish && partition.cells() > 1) {
    const std::vector<double> x0(partition.breakpoints.begin() + 1,
                                 partition.breakpoints.end() - 1);
    auto unpack = [](const std::vector<double>& x) {
      std::vector<double> bps{0.0};
      bps.insert(bps.end(), x.begin(), x.end());
      bps.push_back(1.0);
      return QuantilePartition::pooled(std::move(bps));
    };
    auto objective = [&](const std::vector<double>& x) {
      try {
        return build_endogenous_mechanism(f, cost, unpack(x)).profit;
      } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    const auto polished = detail::maximize_multistart(
        objective, x0, 1.0 / static_cast<double>(n), opts.polish_starts, opts.seed);
    report.trace.polish_starts = opts.polish_starts;
    if (std::isfinite(polished.value) && polished.value > m.profit + 1e-12) {
      const auto candidate = build_endogenous_mechanism(
          f, cost, merge_cells(f, cost, unpack(polished.x)));
      const auto candidate_checks = verify(candidate, f, nullptr);
      if (candidate.profit > m.profit &&
          detail::no_new_failures(candidate_checks, checks)) {
        report.trace.polish_gain = candidate.profit - m.profit;
        report.trace.polish_accepted = true;
        m = candidate;
        checks = candidate_checks;
      }
    }
  }

  report.mechanism = std::move(m);
  report.verification = std::move(checks);
  if (opts.oracle_check && n <= kOracleMaxAtoms) {
    report.oracle_gap = oracle_endo(fg, cost).best.value - dp.value;
  }
  return report;
}

double disclosure_profit(const Dist& f, const Elasticity& cost) {
  if (!f.is_continuous()) {
    throw UnsupportedProbe("complete-disclosure profit needs a continuous distribution");
  }
  const double scale = f.hi();
  const double beta = cost.beta();
  return std::pow(scale, beta) / beta * disclosure_integral(f, scale, beta);
}

Benchmarks benchmark_profits(const Dist& f, const Elasticity& cost) {
  Benchmarks b;
  b.pooling = pointwise_profit(f.mean(), cost).profit;
  if (f.is_continuous()) {
    b.disclosure = disclosure_profit(f, cost);
  }
  return b;
}

std::vector<CellMass> structure_cells(const Dist& f, const QuantilePartition& p) {
  p.validate();
  std::vector<CellMass> cells;
  for (std::size_t k = 0; k < p.cells(); ++k) {
    cells.push_back({p.upper(k) - p.lower(k), f.conditional_mean(p.lower(k), p.upper(k))});
  }
  return cells;
}

double structure_profit(std::span<const CellMass> cells, const Elasticity& cost) {
  const auto phi = discrete_virtual_values(cells);
  double total = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    total += cells[k].mass * pointwise_profit(phi[k], cost).profit;
  }
  return total;
}

EtaThresholds eta_thresholds(std::span<const CellMass> cells, const Dist& f,
                             const EtaScan& scan) {
  if (cells.size() < 2) {
    throw DomainError("thresholds need a structure with more than one cell");
  }
  if (!(scan.lo > 1.0) || !(scan.hi > scan.lo) || scan.points < 2) {
    throw DomainError("elasticity scan window must satisfy 1 < lo < hi");
  }
  const auto phi = discrete_virtual_values(cells);
  double mean = 0.0;
  for (const auto& c : cells) {
    mean += c.mass * c.value;
  }

  // log(sum g (phi+/mean)^beta): the structure beats pooling iff positive.
  auto log_ratio = [&](double beta) {
    double top = -std::numeric_limits<double>::infinity();
    for (double x : phi) {
      if (x > 0.0) {
        top = std::max(top, beta * std::log(x / mean));
      }
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      if (phi[k] > 0.0) {
        sum += cells[k].mass * std::exp(beta * std::log(phi[k] / mean) - top);
      }
    }
    return top + std::log(sum);
  };

  EtaThresholds out;
  double lo = 1.0;
  if (!(log_ratio(lo) < 0.0)) {
    throw DomainError("structure does not lose to pooling as eta grows");
  }
  double hi = 2.0;
  while (!(log_ratio(hi) > 0.0)) {
    hi *= 2.0;
    if (hi > 1e7) {
      throw DomainError("structure does not beat pooling as eta approaches 1");
    }
  }
  for (int it = 0; it < 300 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (log_ratio(mid) > 0.0 ? hi : lo) = mid;
  }
  out.upper_beta = 0.5 * (lo + hi);
  out.upper = out.upper_beta / (out.upper_beta - 1.0);

  out.scan_lo = scan.lo;
  out.scan_hi = scan.hi;
  if (!f.is_continuous()) {
    out.note = "no disclosure benchmark for a discrete distribution";
    return out;
  }
  // Structure minus disclosure, both divided by v_hi^beta / beta.
  const double scale = f.hi();
  auto gap = [&](double eta) {
    const double beta = eta / (eta - 1.0);
    double s = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      s += cells[k].mass * pi_scaled(phi[k], scale, beta);
    }
    return s - disclosure_integral(f, scale, beta);
  };
  std::vector<double> grid(scan.points);
  const double log_lo = std::log(scan.lo - 1.0);
  const double log_hi = std::log(scan.hi - 1.0);
  for (std::size_t i = 0; i < scan.points; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(scan.points - 1);
    grid[i] = 1.0 + std::exp(log_lo + u * (log_hi - log_lo));
  }
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (gap(grid[i]) <= 0.0) {
      last = i;
    }
  }
  if (!last) {
    out.note = "structure beats disclosure across the whole scan window";
    return out;
  }
  if (*last + 1 == grid.size()) {
    out.lower = grid.back();
    out.note = "structure loses to disclosure up to the top of the scan window";
    return out;
  }
  double a = grid[*last];
  double b = grid[*last + 1];
  for (int it = 0; it < 200 && b - a > 1e-12 * b; ++it) {
    const double mid = 0.5 * (a + b);
    (gap(mid) <= 0.0 ? a : b) = mid;
  }
  out.lower = a;
  out.lower_bracketed = true;
  out.note = "largest scanned crossing; uniqueness is not guaranteed";
  return out;
}

PoolingCondition check_pooling_condition(const Dist& f, const Elasticity& cost) {
  PoolingCondition out;
  if (!(f.lo() > 0.0)) {
    out.reason = "lower support bound is zero, the ratio is undefined";
    return out;
  }
  out.applies = true;
  out.pooling_optimal = f.hi() / f.lo() < cost.eta();
  out.reason = out.pooling_optimal ? "support ratio below the elasticity"
                                   : "support ratio not below the elasticity";
  return out;
}

std::vector<SweepRow> sweep_eta(const Dist& f, const QuantilePartition& structure,
                                std::span<const double> etas,
                                const SolveOptions& opts) {
  if (etas.empty()) {
    throw DomainError("elasticity sweep is empty");
  }
  const auto cells = structure_cells(f, structure);
  std::vector<SweepRow> rows;
  for (double eta : etas) {
    const Elasticity cost(eta);
    const auto bench = benchmark_profits(f, cost);
    const auto solved = solve_endogenous(f, cost, opts);
    rows.push_back({eta, structure_profit(cells, cost), bench.pooling, bench.disclosure,
                    solved.mechanism.positive_items(), solved.mechanism.profit});
  }
  return rows;
}

}  // namespace poolmech
