#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "poolmech/cost.hpp"
#include "poolmech/dist.hpp"
#include "poolmech/grid.hpp"

namespace poolmech {

inline constexpr std::size_t kOracleMaxAtoms = 14;

struct OracleRow {
  unsigned long mask;
  std::size_t exclusion;
  double profit;
  /// Endogenous model only: qualities are monotone for this partition.
  bool admissible = true;
};

struct OracleResult {
  GridCandidate best;
  /// Endogenous model only: best ironed profit over all partitions, an
  /// independent route to the same optimum.
  std::optional<double> ironed_best;
  std::vector<OracleRow> table;
};

/// Exhaustive search over every consecutive-cell partition and every grid
/// exclusion level. Throws RefusedError above kOracleMaxAtoms atoms.
OracleResult oracle_exo(const GridDist& values, const GridDist& qualities,
                        bool keep_table = false);

/// Exhaustive search over partitions with monotone qualities for the
/// constant-elasticity cost.
OracleResult oracle_endo(const GridDist& values, const Elasticity& cost,
                         bool keep_table = false);

}  // namespace poolmech
