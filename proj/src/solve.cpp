#include "poolmech/solve.hpp"

#include <cmath>

#include "poolmech/errors.hpp"

namespace poolmech {

void SolveOptions::validate() const {
  if (grid < 2) {
    throw DomainError("grid must have at least 2 cells");
  }
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) {
    throw DomainError("profit tolerance must be a non-negative number");
  }
}

QuantilePartition to_quantile_partition(const GridPartition& p, std::size_t n) {
  std::vector<double> breakpoints;
  breakpoints.reserve(p.cuts.size());
  for (std::size_t c : p.cuts) {
    breakpoints.push_back(static_cast<double>(c) / static_cast<double>(n));
  }
  return QuantilePartition::pooled(
      std::move(breakpoints),
      static_cast<double>(p.exclusion) / static_cast<double>(n));
}

}  // namespace poolmech
