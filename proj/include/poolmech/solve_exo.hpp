#pragma once

#include <span>
#include <vector>

#include "poolmech/dist.hpp"
#include "poolmech/grid.hpp"
#include "poolmech/majorization.hpp"
#include "poolmech/solve.hpp"

namespace poolmech {

/// Exact maximizer of the grid profit over consecutive-cell partitions and
/// the given exclusion levels (all of 0..n when empty).
///
/// Every partition reduces, without changing profit, to at most one
/// zero-quality bottom cell [0, a), a first served cell [a, b) that contains
/// the exclusion level j, and cells above b. The table of best continuations
/// after a served cell [a, b) costs O(n^3) once for all exclusion levels; the
/// scan over (j, a, b) then costs O(n^4 / 24) continuation lookups.
GridCandidate dp_grid(const GridDist& values, const GridDist& qualities,
                      std::span<const std::size_t> exclusions = {});

/// Grid dynamic program, merge of redundant cells, optional continuous
/// polish, then verification.
SolveReport solve_exogenous(const Dist& f, const Dist& q,
                            const SolveOptions& opts = {});

/// Partition with cells merged wherever adjacent expected values or
/// qualities coincide.
QuantilePartition merge_redundant_cells(const Dist& f, const Dist& q,
                                        QuantilePartition p);

struct DisclosureStep {
  double delta = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  /// Profit lost by pooling only the qualities on (v1, v2).
  double quality_pooling_loss = 0.0;
  /// Profit gained by also pooling the values and splitting at their mean,
  /// relative to pooling qualities only.
  double joint_pooling_gain = 0.0;
  double ratio = 0.0;
  double cauchy_schwarz_bound = 0.0;
  double bhatia_davis_bound = 0.0;
};

struct DisclosureTest {
  double center = 0.0;
  std::vector<DisclosureStep> steps;
  /// Lower bound on the limit of gain / delta^2: q*'(v) (1 - F(v)).
  double gain_limit = 0.0;
  /// Upper bound on the limit of loss / delta^3: q*'(v) phi'(v) f(v).
  double loss_limit = 0.0;
};

/// Evaluates the two local variations of a mechanism that fully discloses
/// and separates around `center`, for each half-width in `deltas`.
/// Throws DomainError if some interval is not inside one disclosure cell
/// with positive qualities.
DisclosureTest disclosure_improvement_test(const Dist& f, const Dist& q,
                                           const QuantilePartition& mechanism,
                                           double center,
                                           std::span<const double> deltas);

}  // namespace poolmech
