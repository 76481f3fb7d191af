#include "poolmech/grid.hpp"

#include <algorithm>
#include <cmath>

#include "poolmech/errors.hpp"

namespace poolmech {

GridPrefix GridPrefix::make(const GridDist& values, const GridDist* qualities) {
  if (values.size() == 0) {
    throw DomainError("grid needs at least one atom");
  }
  if (qualities != nullptr && qualities->size() != values.size()) {
    throw DomainError("value and quality grids differ in length");
  }
  GridPrefix g;
  g.n = values.size();
  g.value_sums.assign(g.n + 1, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    g.value_sums[i + 1] = g.value_sums[i] + values.values[i];
  }
  if (qualities != nullptr) {
    g.quality_sums.assign(g.n + 1, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
      g.quality_sums[i + 1] = g.quality_sums[i] + qualities->values[i];
    }
  }
  return g;
}

GridPartition partition_from_mask(std::size_t n, unsigned long mask,
                                  std::size_t exclusion) {
  GridPartition p;
  p.exclusion = exclusion;
  p.cuts.push_back(0);
  for (std::size_t i = 1; i < n; ++i) {
    if (mask & (1UL << (i - 1))) {
      p.cuts.push_back(i);
    }
  }
  p.cuts.push_back(n);
  return p;
}

double exo_grid_profit(const GridPrefix& g, const GridPartition& p) {
  double total = 0.0;
  double previous = 0.0;
  for (std::size_t k = 0; k + 1 < p.cuts.size(); ++k) {
    const std::size_t a = p.cuts[k];
    const std::size_t b = p.cuts[k + 1];
    const double r = g.quality(a, b, p.exclusion);
    total += g.value(a, b) * (r - previous) * g.above(a);
    previous = r;
  }
  return total;
}

std::size_t exo_positive_items(const GridPrefix& g, const GridPartition& p) {
  std::size_t items = 0;
  for (std::size_t k = 0; k + 1 < p.cuts.size(); ++k) {
    if (g.quality(p.cuts[k], p.cuts[k + 1], p.exclusion) > 0.0) {
      ++items;
    }
  }
  return items;
}

std::vector<double> grid_virtual_values(const GridPrefix& g,
                                        const std::vector<std::size_t>& cuts) {
  std::vector<double> phi(cuts.size() - 1);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const std::size_t next = k + 2 < cuts.size() ? cuts[k + 2] : g.n;
    phi[k] = g.phi(cuts[k], cuts[k + 1], next);
  }
  return phi;
}

bool endo_admissible(const std::vector<double>& phi) {
  double floor = 0.0;
  for (double x : phi) {
    const double level = std::max(x, 0.0);
    if (level < floor) {
      return false;
    }
    floor = level;
  }
  return true;
}

double endo_grid_profit(const GridPrefix& g, const std::vector<std::size_t>& cuts,
                        const Elasticity& cost) {
  const auto phi = grid_virtual_values(g, cuts);
  double total = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    total += g.mass(cuts[k], cuts[k + 1]) * pointwise_profit(phi[k], cost).profit;
  }
  return total;
}

double endo_grid_ironed_profit(const GridPrefix& g,
                               const std::vector<std::size_t>& cuts,
                               const Elasticity& cost) {
  const auto phi = grid_virtual_values(g, cuts);
  std::vector<double> weights(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    weights[k] = g.mass(cuts[k], cuts[k + 1]);
  }
  const auto ironed = iron(weights, phi);
  double total = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    total += weights[k] * pointwise_profit(ironed[k], cost).profit;
  }
  return total;
}

std::size_t endo_positive_items(const std::vector<double>& phi) {
  return static_cast<std::size_t>(
      std::count_if(phi.begin(), phi.end(), [](double x) { return x > 0.0; }));
}

bool better(const GridCandidate& a, const GridCandidate& b) {
  if (a.value > b.value + kProfitTieTolerance) {
    return true;
  }
  if (a.value < b.value - kProfitTieTolerance) {
    return false;
  }
  if (a.items != b.items) {
    return a.items < b.items;
  }
  if (a.partition.cells() != b.partition.cells()) {
    return a.partition.cells() < b.partition.cells();
  }
  if (a.partition.cuts != b.partition.cuts) {
    return a.partition.cuts < b.partition.cuts;
  }
  return a.partition.exclusion < b.partition.exclusion;
}

}  // namespace poolmech
