#include "poolmech/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "poolmech/errors.hpp"

namespace poolmech {

QuantilePartition QuantilePartition::pooled(std::vector<double> breakpoints,
                                            double exclusion) {
  QuantilePartition p;
  p.breakpoints = std::move(breakpoints);
  p.exclusion = exclusion;
  p.modes.assign(p.breakpoints.empty() ? 0 : p.breakpoints.size() - 1,
                 CellMode::Pool);
  p.validate();
  return p;
}

bool QuantilePartition::all_pooled() const {
  return std::all_of(modes.begin(), modes.end(),
                     [](CellMode m) { return m == CellMode::Pool; });
}

std::size_t QuantilePartition::cell_of(double t) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  auto k = static_cast<std::size_t>(it - breakpoints.begin());
  if (k == 0) {
    return 0;
  }
  return std::min(k - 1, cells() - 1);
}

void QuantilePartition::validate() const {
  if (breakpoints.size() < 2) {
    throw DomainError("partition needs at least two breakpoints");
  }
  if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0) {
    throw DomainError("partition breakpoints must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw DomainError("partition breakpoints must be strictly increasing");
    }
  }
  if (!(exclusion >= 0.0 && exclusion <= 1.0)) {
    throw DomainError("exclusion threshold must lie in [0, 1]");
  }
  if (modes.size() != cells()) {
    throw DomainError("partition needs one mode per cell");
  }
}

double pooled_quality(const Dist& q, double a, double b, double exclusion) {
  if (b <= exclusion) {
    return 0.0;
  }
  const double from = std::max(a, exclusion);
  return q.integrate_quantile(from, b) / (b - a);
}

double StepQuantile::at(double t) const {
  const std::size_t k = partition.cell_of(t);
  if (partition.modes[k] == CellMode::Pool) {
    return levels[k];
  }
  return t < partition.exclusion ? 0.0 : base->quantile(t);
}

double StepQuantile::integral(double a, double b) const {
  if (a > b) {
    throw DomainError("StepQuantile::integral needs a <= b");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < partition.cells(); ++k) {
    const double lo = std::max(a, partition.lower(k));
    const double hi = std::min(b, partition.upper(k));
    if (hi <= lo) {
      continue;
    }
    if (partition.modes[k] == CellMode::Pool) {
      total += levels[k] * (hi - lo);
    } else {
      const double from = std::max(lo, partition.exclusion);
      if (hi > from) {
        total += base->integrate_quantile(from, hi);
      }
    }
  }
  return total;
}

bool StepQuantile::levels_monotone() const {
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < partition.cells(); ++k) {
    double lo_level = levels[k];
    double hi_level = levels[k];
    if (partition.modes[k] == CellMode::Disclose) {
      lo_level = at(partition.lower(k));
      hi_level = base->quantile(partition.upper(k));
    }
    if (lo_level < last) {
      return false;
    }
    last = hi_level;
  }
  return true;
}

std::vector<double> majorization_probes(const QuantilePartition* p) {
  std::vector<double> probes;
  probes.reserve(1001 + (p ? p->breakpoints.size() + 1 : 0));
  for (int i = 0; i <= 1000; ++i) {
    probes.push_back(static_cast<double>(i) / 1000.0);
  }
  if (p != nullptr) {
    probes.insert(probes.end(), p->breakpoints.begin(), p->breakpoints.end());
    probes.push_back(p->exclusion);
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  return probes;
}

namespace {

// sup over probes of tail(candidate) - tail(reference).
MajorizationCheck tail_dominance(const std::function<double(double)>& candidate,
                                 const std::function<double(double)>& reference,
                                 std::span<const double> probes) {
  MajorizationCheck out;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (double x : probes) {
    const double v = candidate(x) - reference(x);
    if (v > out.max_violation) {
      out.max_violation = v;
      out.worst_probe = x;
    }
  }
  out.holds = out.max_violation <= kMajorizationTolerance;
  return out;
}

MajorizationCheck with_mean_equality(MajorizationCheck c, double mean_gap) {
  if (std::abs(mean_gap) > c.max_violation) {
    c.max_violation = std::abs(mean_gap);
    c.worst_probe = 0.0;
  }
  c.holds = c.max_violation <= kMajorizationTolerance;
  return c;
}

}  // namespace

MajorizationCheck check_mpc(const StepQuantile& g, const Dist& f) {
  const auto probes = majorization_probes(&g.partition);
  auto c = tail_dominance([&](double x) { return g.tail_integral(x); },
                          [&](double x) { return f.integrate_quantile(x, 1.0); },
                          probes);
  return with_mean_equality(c, g.mean() - f.mean());
}

MajorizationCheck check_mpc(const Dist& g, const Dist& f) {
  const auto probes = majorization_probes(nullptr);
  auto c = tail_dominance([&](double x) { return g.integrate_quantile(x, 1.0); },
                          [&](double x) { return f.integrate_quantile(x, 1.0); },
                          probes);
  return with_mean_equality(c, g.mean() - f.mean());
}

MajorizationCheck check_weak_major(const StepQuantile& r, const Dist& q) {
  const auto probes = majorization_probes(&r.partition);
  return tail_dominance([&](double x) { return r.tail_integral(x); },
                        [&](double x) { return q.integrate_quantile(x, 1.0); },
                        probes);
}

StepQuantile pool_values(const Dist& f, const QuantilePartition& p) {
  p.validate();
  StepQuantile g;
  g.partition = p;
  g.partition.exclusion = 0.0;
  g.base = f;
  g.levels.reserve(p.cells());
  for (std::size_t k = 0; k < p.cells(); ++k) {
    g.levels.push_back(p.modes[k] == CellMode::Pool
                           ? f.conditional_mean(p.lower(k), p.upper(k))
                           : std::numeric_limits<double>::quiet_NaN());
  }
  return g;
}

StepQuantile pool_qualities(const Dist& q, const QuantilePartition& p) {
  p.validate();
  StepQuantile r;
  r.partition = p;
  r.base = q;
  r.levels.reserve(p.cells());
  for (std::size_t k = 0; k < p.cells(); ++k) {
    r.levels.push_back(p.modes[k] == CellMode::Pool
                           ? pooled_quality(q, p.lower(k), p.upper(k), p.exclusion)
                           : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

}  // namespace poolmech
