#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poolmech/cost.hpp"
#include "poolmech/dist.hpp"
#include "poolmech/grid.hpp"
#include "poolmech/mechanism.hpp"
#include "poolmech/solve.hpp"

namespace poolmech {

/// Exact maximizer of sum_k g_k pi(phi_k) over grid partitions whose induced
/// qualities are non-decreasing. Cells are added from the top: a cell's
/// virtual value depends on the cell above it, so the state is the pair of
/// boundaries of the lowest two cells placed so far. O(n^3 log n) time.
GridCandidate dp_grid_endo(const GridDist& values, const Elasticity& cost);

SolveReport solve_endogenous(const Dist& f, const Elasticity& cost,
                             const SolveOptions& opts = {});

struct Benchmarks {
  /// All values pooled: pi(mean).
  double pooling = 0.0;
  /// Complete disclosure: integral of pi(max(phi(v), 0)); absent for
  /// discrete value distributions.
  std::optional<double> disclosure;
};

Benchmarks benchmark_profits(const Dist& f, const Elasticity& cost);

/// Complete-disclosure profit; throws UnsupportedProbe for discrete f.
double disclosure_profit(const Dist& f, const Elasticity& cost);

/// Cells (mass, mean value) of a pooled partition of f.
std::vector<CellMass> structure_cells(const Dist& f, const QuantilePartition& p);

/// sum_k g_k pi(phi_k) for a fixed information structure.
double structure_profit(std::span<const CellMass> cells, const Elasticity& cost);

struct EtaThresholds {
  /// The structure earns less than pooling iff eta >= upper.
  double upper = 0.0;
  double upper_beta = 0.0;
  /// Largest scanned-and-refined eta at which the structure earns no more
  /// than complete disclosure; an estimate, see the scan window.
  std::optional<double> lower;
  /// True when the lower estimate is bracketed inside the window; false when
  /// the condition held up to the top of the window.
  bool lower_bracketed = false;
  double scan_lo = 0.0;
  double scan_hi = 0.0;
  std::string note;
};

struct EtaScan {
  double lo = 1.001;
  double hi = 101.0;
  std::size_t points = 200;
};

/// Throws DomainError for a single-cell structure.
EtaThresholds eta_thresholds(std::span<const CellMass> cells, const Dist& f,
                             const EtaScan& scan = {});

struct PoolingCondition {
  bool applies = false;
  /// v_hi / v_lo < eta: pooling is optimal whatever the distribution.
  bool pooling_optimal = false;
  std::string reason;
};

PoolingCondition check_pooling_condition(const Dist& f, const Elasticity& cost);

struct SweepRow {
  double eta = 0.0;
  double structure = 0.0;
  double pooling = 0.0;
  std::optional<double> disclosure;
  std::size_t solver_items = 0;
  double solver_profit = 0.0;
};

/// One row per eta: profits of the structure, pooling, disclosure, and the
/// solver's item count and profit.
std::vector<SweepRow> sweep_eta(const Dist& f, const QuantilePartition& structure,
                                std::span<const double> etas,
                                const SolveOptions& opts = {});

}  // namespace poolmech
