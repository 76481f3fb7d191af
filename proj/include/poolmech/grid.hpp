#pragma once

#include <cstddef>
#include <vector>

#include "poolmech/cost.hpp"
#include "poolmech/dist.hpp"

namespace poolmech {

/// Prefix sums of equal-mass grids. Every grid profit in the library (dynamic
/// programs and exhaustive oracle alike) is evaluated through the helpers
/// below, so equal partitions give bitwise equal profits.
struct GridPrefix {
  std::size_t n = 0;
  std::vector<double> value_sums;    // size n + 1
  std::vector<double> quality_sums;  // size n + 1, empty without qualities

  static GridPrefix make(const GridDist& values, const GridDist* qualities);

  /// Mean value of atoms [a, b).
  double value(std::size_t a, std::size_t b) const {
    return (value_sums[b] - value_sums[a]) / static_cast<double>(b - a);
  }
  /// Pooled quality of atoms [a, b) with atoms below `exclusion` zeroed.
  double quality(std::size_t a, std::size_t b, std::size_t exclusion) const {
    if (b <= exclusion) {
      return 0.0;
    }
    const std::size_t from = a < exclusion ? exclusion : a;
    return (quality_sums[b] - quality_sums[from]) / static_cast<double>(b - a);
  }
  /// 1 - G at the lower edge of a cell starting at atom a.
  double above(std::size_t a) const {
    return static_cast<double>(n - a) / static_cast<double>(n);
  }
  double mass(std::size_t a, std::size_t b) const {
    return static_cast<double>(b - a) / static_cast<double>(n);
  }
  /// Virtual value of cell [b, c) followed by cell [c, d); the top cell
  /// (c == n) carries its mean value.
  double phi(std::size_t b, std::size_t c, std::size_t d) const {
    const double w = value(b, c);
    if (c == n) {
      return w;
    }
    return w - (value(c, d) - w) * static_cast<double>(n - c) /
                   static_cast<double>(c - b);
  }
};

/// Consecutive-cell partition of the grid: cuts 0 = c_0 < ... < c_K = n and
/// the number of bottom quality atoms that are zeroed.
struct GridPartition {
  std::vector<std::size_t> cuts;
  std::size_t exclusion = 0;

  std::size_t cells() const { return cuts.size() - 1; }
  bool operator==(const GridPartition&) const = default;
};

/// Partition from the bitmask of interior cut positions (bit i-1 set means a
/// cut at atom i).
GridPartition partition_from_mask(std::size_t n, unsigned long mask,
                                  std::size_t exclusion);

/// sum_k w_k (r_k - r_{k-1}) (1 - G_{k-1}), r_0 = 0.
double exo_grid_profit(const GridPrefix& g, const GridPartition& p);
std::size_t exo_positive_items(const GridPrefix& g, const GridPartition& p);

std::vector<double> grid_virtual_values(const GridPrefix& g,
                                        const std::vector<std::size_t>& cuts);
/// Qualities max(phi, 0)^(1/(eta-1)) are non-decreasing.
bool endo_admissible(const std::vector<double>& phi);
/// sum_k g_k pi(phi_k).
double endo_grid_profit(const GridPrefix& g, const std::vector<std::size_t>& cuts,
                        const Elasticity& cost);
/// Same, with phi ironed across cells first.
double endo_grid_ironed_profit(const GridPrefix& g,
                               const std::vector<std::size_t>& cuts,
                               const Elasticity& cost);
std::size_t endo_positive_items(const std::vector<double>& phi);

/// A scored grid partition. Ordering: higher value (beyond 1e-9) wins; ties go
/// to fewer positive items, then fewer cells, then lexicographically smaller
/// cuts, then a smaller exclusion.
struct GridCandidate {
  GridPartition partition;
  double value = 0.0;
  std::size_t items = 0;
};

inline constexpr double kProfitTieTolerance = 1e-9;

bool better(const GridCandidate& a, const GridCandidate& b);

}  // namespace poolmech
