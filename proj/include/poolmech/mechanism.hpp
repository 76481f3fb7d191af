#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poolmech/cost.hpp"
#include "poolmech/dist.hpp"
#include "poolmech/majorization.hpp"

namespace poolmech {

/// One menu item: the pooled buyers it is recommended to and its terms.
struct MechanismCell {
  double mass = 0.0;           // g_k
  double value = 0.0;          // w_k, expected value of the pooled buyers
  double quality = 0.0;        // r_k
  double price = 0.0;          // p_k
  double virtual_value = 0.0;  // phi_k
  double cost = 0.0;           // production cost per unit mass
};

struct Mechanism {
  QuantilePartition partition;
  std::vector<MechanismCell> cells;
  /// Set for the endogenous-quality model.
  std::optional<double> elasticity;
  double revenue = 0.0;
  double profit = 0.0;

  std::size_t positive_items() const;
};

struct CellMass {
  double mass;
  double value;
};

/// phi_k = w_k - (w_{k+1} - w_k)(1 - G_k) / g_k with w_{K+1} = w_K.
/// Throws DomainError unless values strictly increase and masses are positive.
std::vector<double> discrete_virtual_values(std::span<const CellMass> cells);

/// Revenue computed three ways; all agree for a consistent menu.
struct RevenueIdentities {
  double by_prices = 0.0;            // sum g_k p_k
  double by_increments = 0.0;        // sum w_k dr_k (1 - G_{k-1})
  double by_virtual_values = 0.0;    // sum g_k phi_k r_k
};

RevenueIdentities revenue_identities(std::span<const MechanismCell> cells);

/// Menu revenue as the increment sum; throws ConsistencyError if the three
/// revenue formulas disagree by more than 1e-9 (relative to scale).
double profit(const Mechanism& m);

/// Binding downward IC: p_1 = w_1 r_1, p_k = p_{k-1} + w_k (r_k - r_{k-1}).
void assign_prices(std::vector<MechanismCell>& cells);

/// Exogenous-quality mechanism on a fully pooled partition.
Mechanism build_mechanism(const Dist& f, const Dist& q,
                          const QuantilePartition& p);

/// Endogenous-quality mechanism: qualities from the ironed discrete virtual
/// values through c'(r) = phi.
Mechanism build_endogenous_mechanism(const Dist& f, const Elasticity& cost,
                                     const QuantilePartition& p);

/// Conditional moments of virtual values and allocated qualities on a value
/// interval, plus the two bounds on the loss from pooling qualities only.
struct IntervalMoments {
  double mass = 0.0;
  double mean_value = 0.0;
  double mean_phi = 0.0;
  double sd_phi = 0.0;
  double mean_quality = 0.0;
  double sd_quality = 0.0;
  double cauchy_schwarz_bound = 0.0;
  double bhatia_davis_bound = 0.0;
};

/// Moments over quantiles [t1, t2] of a fully disclosed and fully separated
/// interval: the allocation there is Q^{-1}(t) (zero below `exclusion`).
IntervalMoments interval_moments(const Dist& f, const Dist& q, double t1,
                                 double t2, double exclusion);

struct Check {
  std::string name;
  bool passed = true;
  /// Hard checks are feasibility/consistency; soft ones are optimality flags.
  bool hard = true;
  std::string detail;
};

struct DisclosureDiagnostic {
  std::size_t cell = 0;
  IntervalMoments moments;
};

struct VerifyReport {
  std::vector<Check> checks;
  std::vector<DisclosureDiagnostic> disclosure;

  bool hard_pass() const;
  bool all_pass() const;
  const Check* find(std::string_view name) const;
};

/// Checks global IC, IR, increasing quality increments, the item-count bound,
/// quality feasibility (weak majorization, when q is given), information
/// feasibility (mean-preserving contraction), and accounting consistency.
VerifyReport verify(const Mechanism& m, const Dist& f, const Dist* q);

/// Rows of the recommendation table: buyers whose value lies in
/// [value_lo, value_hi] are steered to the item (quality, price).
struct Recommendation {
  double value_lo;
  double value_hi;
  std::size_t item;
  double quality;
  double price;
};

std::vector<Recommendation> recommendation_table(const Mechanism& m,
                                                 const Dist& f);

}  // namespace poolmech
