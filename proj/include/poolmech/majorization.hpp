#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "poolmech/dist.hpp"

namespace poolmech {

enum class CellMode { Pool, Disclose };

/// Breakpoints 0 = x_0 < x_1 < ... < x_K = 1 in quantile space, an exclusion
/// threshold below which qualities are zeroed before pooling, and a
/// pool/disclose flag per cell.
struct QuantilePartition {
  std::vector<double> breakpoints;
  double exclusion = 0.0;
  std::vector<CellMode> modes;

  /// All cells pooled. Throws DomainError on malformed breakpoints.
  static QuantilePartition pooled(std::vector<double> breakpoints,
                                  double exclusion = 0.0);

  std::size_t cells() const { return breakpoints.size() - 1; }
  double lower(std::size_t k) const { return breakpoints[k]; }
  double upper(std::size_t k) const { return breakpoints[k + 1]; }
  bool all_pooled() const;
  /// Index of the cell containing quantile t (cells are half-open, the last
  /// one closed).
  std::size_t cell_of(double t) const;

  void validate() const;
};

/// A quantile function that is constant on pooled cells and follows a base
/// distribution (zeroed below `exclusion`) on disclosure cells.
struct StepQuantile {
  QuantilePartition partition;
  std::vector<double> levels;  // NaN on disclosure cells
  std::optional<Dist> base;

  double at(double t) const;
  /// Integral of the quantile function over [a, b].
  double integral(double a, double b) const;
  double tail_integral(double x) const { return integral(x, 1.0); }
  double mean() const { return integral(0.0, 1.0); }
  bool levels_monotone() const;
};

struct MajorizationCheck {
  bool holds = false;
  /// Largest signed violation over the probe set; <= tolerance when `holds`.
  double max_violation = 0.0;
  /// Quantile at which the largest violation was observed.
  double worst_probe = 0.0;
};

inline constexpr double kMajorizationTolerance = 1e-9;

/// G is a mean-preserving contraction of F: tail integrals of G^{-1} never
/// exceed those of F^{-1}, with equal means.
MajorizationCheck check_mpc(const StepQuantile& g, const Dist& f);
MajorizationCheck check_mpc(const Dist& g, const Dist& f);

/// R^{-1} is weakly majorized by Q^{-1}: tail integrals of R^{-1} never exceed
/// those of Q^{-1}; the total may fall short.
MajorizationCheck check_weak_major(const StepQuantile& r, const Dist& q);

/// G^{-1}: F^{-1} on disclosure cells, the cell's conditional mean on pooled
/// cells. The partition's exclusion is ignored for values.
StepQuantile pool_values(const Dist& f, const QuantilePartition& p);

/// R^{-1}: Q^{-1} zeroed below the exclusion threshold, then pooled per cell.
StepQuantile pool_qualities(const Dist& q, const QuantilePartition& p);

/// Pooled quality level of quantile cell [a, b) under exclusion x_hat.
double pooled_quality(const Dist& q, double a, double b, double exclusion);

/// Probe set used by the majorization checks: breakpoints, the exclusion
/// threshold and a 1e-3 grid.
std::vector<double> majorization_probes(const QuantilePartition* p);

}  // namespace poolmech
