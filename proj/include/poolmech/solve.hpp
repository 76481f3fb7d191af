#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "poolmech/grid.hpp"
#include "poolmech/majorization.hpp"
#include "poolmech/mechanism.hpp"

namespace poolmech {

struct SolveOptions {
  std::size_t grid = 200;
  bool polish = true;
  double tolerance = kProfitTieTolerance;
  std::uint64_t seed = 0;
  std::size_t polish_starts = 8;
  /// Compare with the exhaustive oracle when the grid is small enough.
  bool oracle_check = false;

  void validate() const;
};

struct SolverTrace {
  std::size_t grid = 0;
  GridPartition dp_partition;
  double dp_value = 0.0;
  /// Continuous profit after merging redundant cells, before polishing.
  double canonical_profit = 0.0;
  double polish_gain = 0.0;
  bool polish_accepted = false;
  std::size_t polish_starts = 0;
};

struct SolveReport {
  Mechanism mechanism;
  SolverTrace trace;
  VerifyReport verification;
  /// Oracle optimum minus the grid optimum (zero when they agree).
  std::optional<double> oracle_gap;

  double profit() const { return mechanism.profit; }
};

/// Pooled quantile partition with breakpoints c / n and exclusion j / n.
QuantilePartition to_quantile_partition(const GridPartition& p, std::size_t n);

}  // namespace poolmech
