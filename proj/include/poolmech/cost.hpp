#pragma once

#include <span>
#include <variant>
#include <vector>

#include "poolmech/dist.hpp"

namespace poolmech {

/// Constant-elasticity production cost c(q) = q^eta / eta, eta > 1.
class Elasticity {
 public:
  explicit Elasticity(double eta);

  double eta() const { return eta_; }
  double cost(double quality) const;
  /// beta = eta / (eta - 1), the exponent of the pointwise profit.
  double beta() const { return eta_ / (eta_ - 1.0); }

 private:
  double eta_;
};

/// Either an exogenous quality distribution or a production cost.
using CostSpec = std::variant<Dist, Elasticity>;

struct PointwiseProfit {
  double quality;
  double profit;
};

/// Quality solving c'(r) = phi and the resulting profit per unit mass,
/// ((eta - 1) / eta) * phi^(eta / (eta - 1)); zero for phi <= 0.
PointwiseProfit pointwise_profit(double phi, const Elasticity& cost);

/// Weighted isotonic (non-decreasing) regression by pool-adjacent-violators.
std::vector<double> iron(std::span<const double> weights,
                         std::span<const double> values);

}  // namespace poolmech
