#include "poolmech/solve_exo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "poolmech/errors.hpp"
#include "poolmech/oracle.hpp"
#include "polish.hpp"
#include "quadrature.hpp"

namespace poolmech {

namespace {

// Best continuation above a served cell: total over the cells that follow,
// their count and the number with positive quality.
struct Tail {
  double value = 0.0;
  std::uint32_t items = 0;
  std::uint32_t cells = 0;
  std::uint32_t next = 0;  // upper edge of the first following cell
};

bool better_tail(double value, std::uint32_t items, std::uint32_t cells,
                 const Tail& best) {
  if (value > best.value + kProfitTieTolerance) {
    return true;
  }
  if (value < best.value - kProfitTieTolerance) {
    return false;
  }
  return items < best.items || (items == best.items && cells < best.cells);
}

class ExoDp {
 public:
  explicit ExoDp(const GridPrefix& g)
      : g_(g), n_(g.n), w_((n_ + 1) * (n_ + 1)), r_((n_ + 1) * (n_ + 1)),
        tab_((n_ + 1) * (n_ + 1)) {
    for (std::size_t a = 0; a < n_; ++a) {
      for (std::size_t b = a + 1; b <= n_; ++b) {
        w_[at(a, b)] = g_.value(a, b);
        r_[at(a, b)] = g_.quality(a, b, 0);
      }
    }
    for (std::size_t b = n_ - 1; b >= 1; --b) {
      for (std::size_t a = 0; a < b; ++a) {
        tab_[at(a, b)] = continuation(b, r_[at(a, b)]);
      }
    }
  }

  // Best continuation after a served cell ending at b whose quality is rho.
  Tail continuation(std::size_t b, double rho) const {
    Tail best;
    best.next = static_cast<std::uint32_t>(n_);
    if (b == n_) {
      return best;
    }
    bool found = false;
    const double above = g_.above(b);
    for (std::size_t c = b + 1; c <= n_; ++c) {
      const double r = r_[at(b, c)];
      const Tail& rest = c == n_ ? empty_ : tab_[at(b, c)];
      const double value = w_[at(b, c)] * (r - rho) * above + rest.value;
      const auto items = rest.items + (r > 0.0 ? 1U : 0U);
      const auto cells = rest.cells + 1;
      if (!found || better_tail(value, items, cells, best)) {
        best = {value, items, cells, static_cast<std::uint32_t>(c)};
        found = true;
      }
    }
    return best;
  }

  // Cuts from b upward following the stored continuations.
  void extend(std::vector<std::size_t>& cuts, std::size_t b, double rho) const {
    if (b == n_) {
      return;
    }
    std::size_t c = continuation(b, rho).next;
    cuts.push_back(c);
    while (c < n_) {
      const std::size_t d = tab_[at(b, c)].next;
      b = c;
      c = d;
      cuts.push_back(c);
    }
  }

 private:
  std::size_t at(std::size_t a, std::size_t b) const { return a * (n_ + 1) + b; }

  const GridPrefix& g_;
  std::size_t n_;
  std::vector<double> w_;
  std::vector<double> r_;
  std::vector<Tail> tab_;
  Tail empty_{};
};

struct CellStats {
  std::vector<double> values;
  std::vector<double> qualities;
};

CellStats cell_stats(const Dist& f, const Dist& q, const QuantilePartition& p) {
  CellStats s;
  for (std::size_t k = 0; k < p.cells(); ++k) {
    s.values.push_back(f.conditional_mean(p.lower(k), p.upper(k)));
    s.qualities.push_back(pooled_quality(q, p.lower(k), p.upper(k), p.exclusion));
  }
  return s;
}

bool same(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

GridCandidate dp_grid(const GridDist& values, const GridDist& qualities,
                      std::span<const std::size_t> exclusions) {
  const auto g = GridPrefix::make(values, &qualities);
  const std::size_t n = g.n;
  std::vector<std::size_t> levels(exclusions.begin(), exclusions.end());
  if (levels.empty()) {
    for (std::size_t j = 0; j <= n; ++j) {
      levels.push_back(j);
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.back() > n) {
    throw DomainError("exclusion level beyond the grid");
  }

  const ExoDp dp(g);
  // Winner as (j, a, b) with a total and counts, compared like GridCandidate.
  bool found = false;
  std::size_t best_j = n;
  std::size_t best_a = 0;
  std::size_t best_b = n;
  Tail best;
  for (std::size_t j : levels) {
    if (j == n) {
      const Tail nothing{0.0, 0, 1, static_cast<std::uint32_t>(n)};
      if (!found || better_tail(nothing.value, nothing.items, nothing.cells, best)) {
        best = nothing;
        best_j = n;
        best_a = 0;
        best_b = n;
        found = true;
      }
      continue;
    }
    for (std::size_t a = 0; a <= j; ++a) {
      for (std::size_t b = j + 1; b <= n; ++b) {
        const double rho = g.quality(a, b, j);
        const Tail rest = dp.continuation(b, rho);
        const double value = g.value(a, b) * (rho - 0.0) * g.above(a) + rest.value;
        const auto items = rest.items + (rho > 0.0 ? 1U : 0U);
        const auto cells = rest.cells + 1 + (a > 0 ? 1U : 0U);
        if (!found || better_tail(value, items, cells, best)) {
          best = {value, items, cells, 0};
          best_j = j;
          best_a = a;
          best_b = b;
          found = true;
        }
      }
    }
  }

  GridCandidate out;
  out.partition.exclusion = best_j;
  out.partition.cuts.push_back(0);
  if (best_j == n) {
    out.partition.cuts.push_back(n);
  } else {
    if (best_a > 0) {
      out.partition.cuts.push_back(best_a);
    }
    out.partition.cuts.push_back(best_b);
    dp.extend(out.partition.cuts, best_b, g.quality(best_a, best_b, best_j));
  }
  out.value = exo_grid_profit(g, out.partition);
  out.items = exo_positive_items(g, out.partition);
  return out;
}

QuantilePartition merge_redundant_cells(const Dist& f, const Dist& q,
                                        QuantilePartition p) {
  // An exclusion threshold a rounding error away from a breakpoint would
  // leave a spurious sliver of positive quality.
  for (double x : p.breakpoints) {
    if (std::abs(p.exclusion - x) <= 1e-9) {
      p.exclusion = x;
    }
  }
  for (;;) {
    const auto s = cell_stats(f, q, p);
    std::size_t merge = p.cells();
    for (std::size_t k = 0; k + 1 < p.cells(); ++k) {
      if (same(s.values[k], s.values[k + 1]) ||
          same(s.qualities[k], s.qualities[k + 1])) {
        merge = k;
        break;
      }
    }
    if (merge == p.cells()) {
      return p;
    }
    p.breakpoints.erase(p.breakpoints.begin() + static_cast<long>(merge) + 1);
    p.modes.erase(p.modes.begin() + static_cast<long>(merge));
  }
}

SolveReport solve_exogenous(const Dist& f, const Dist& q, const SolveOptions& opts) {
  opts.validate();
  const std::size_t n = opts.grid;
  const auto fg = f.discretize(n);
  const auto qg = q.discretize(n);

  SolveReport report;
  const auto dp = dp_grid(fg, qg);
  report.trace.grid = n;
  report.trace.dp_partition = dp.partition;
  report.trace.dp_value = dp.value;

  const auto partition = merge_redundant_cells(f, q, to_quantile_partition(dp.partition, n));
  Mechanism m = build_mechanism(f, q, partition);
  VerifyReport checks = verify(m, f, &q);
  report.trace.canonical_profit = m.profit;

  if (opts.polish) {
    // Free coordinates: interior breakpoints, then the exclusion threshold.
    std::vector<double> x0(partition.breakpoints.begin() + 1,
                           partition.breakpoints.end() - 1);
    x0.push_back(partition.exclusion);
    const std::size_t interior = x0.size() - 1;
    auto unpack = [interior](const std::vector<double>& x) {
      std::vector<double> bps{0.0};
      bps.insert(bps.end(), x.begin(), x.begin() + static_cast<long>(interior));
      bps.push_back(1.0);
      return QuantilePartition::pooled(std::move(bps),
                                       std::clamp(x.back(), 0.0, 1.0));
    };
    auto objective = [&](const std::vector<double>& x) {
      if (x.back() < 0.0 || x.back() > 1.0) {
        return std::numeric_limits<double>::quiet_NaN();
      }
      try {
        return build_mechanism(f, q, unpack(x)).profit;
      } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    const double step = 1.0 / static_cast<double>(n);
    const auto polished =
        detail::maximize_multistart(objective, x0, step, opts.polish_starts, opts.seed);
    report.trace.polish_starts = opts.polish_starts;
    if (std::isfinite(polished.value) && polished.value > m.profit + 1e-12) {
      const auto candidate = build_mechanism(f, q, merge_redundant_cells(f, q, unpack(polished.x)));
      const auto candidate_checks = verify(candidate, f, &q);
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
    report.oracle_gap = oracle_exo(fg, qg).best.value - dp.value;
  }
  return report;
}

DisclosureTest disclosure_improvement_test(const Dist& f, const Dist& q,
                                           const QuantilePartition& mechanism,
                                           double center,
                                           std::span<const double> deltas) {
  mechanism.validate();
  if (!f.is_continuous() || !q.is_continuous()) {
    throw UnsupportedProbe("the disclosure test needs continuous distributions");
  }
  DisclosureTest out;
  out.center = center;
  const double excl = mechanism.exclusion;
  auto quality = [&](double t) { return t < excl ? 0.0 : q.quantile(t); };
  auto phi = [&](double t) { return f.virtual_value(f.quantile(t)); };

  for (double delta : deltas) {
    DisclosureStep s;
    s.delta = delta;
    s.v1 = center - delta;
    s.v2 = center + delta;
    if (!(delta > 0.0) || s.v1 < f.lo() || s.v2 > f.hi()) {
      throw DomainError("interval around the center leaves the value support");
    }
    const double t1 = f.cdf(s.v1);
    const double t2 = f.cdf(s.v2);
    const std::size_t cell = mechanism.cell_of(t1);
    if (mechanism.modes[cell] != CellMode::Disclose || t2 > mechanism.upper(cell) ||
        t1 < excl) {
      throw DomainError("interval (" + std::to_string(s.v1) + ", " +
                        std::to_string(s.v2) +
                        ") is not fully disclosed and separated");
    }
    const auto mom = interval_moments(f, q, t1, t2, excl);
    s.quality_pooling_loss = detail::integrate(
        [&](double t) {
          return (phi(t) - mom.mean_phi) * (quality(t) - mom.mean_quality);
        },
        t1, t2);
    // Quality just below v1: the left limit of the allocation.
    const double below = quality(t1);
    s.joint_pooling_gain =
        (mom.mean_quality - below) * (mom.mean_value - s.v1) * (1.0 - t1);
    s.ratio = s.quality_pooling_loss / s.joint_pooling_gain;
    s.cauchy_schwarz_bound = mom.cauchy_schwarz_bound;
    s.bhatia_davis_bound = mom.bhatia_davis_bound;
    out.steps.push_back(s);
  }

  const double t = f.cdf(center);
  const double density = f.density(center);
  const double quality_slope = q.quantile_slope(t) * density;
  const double h = 1e-5 * std::max(1.0, std::abs(center));
  const double phi_slope =
      (f.virtual_value(center + h) - f.virtual_value(center - h)) / (2.0 * h);
  out.gain_limit = quality_slope * (1.0 - t);
  out.loss_limit = quality_slope * phi_slope * density;
  return out;
}

}  // namespace poolmech
