#include "poolmech/cost.hpp"

#include <cmath>

#include "poolmech/errors.hpp"

namespace poolmech {

Elasticity::Elasticity(double eta) : eta_(eta) {
  if (!(eta > 1.0) || !std::isfinite(eta)) {
    throw DomainError("elasticity must exceed 1");
  }
}

double Elasticity::cost(double quality) const {
  return std::pow(quality, eta_) / eta_;
}

PointwiseProfit pointwise_profit(double phi, const Elasticity& cost) {
  if (!(phi > 0.0)) {
    return {0.0, 0.0};
  }
  const double eta = cost.eta();
  return {std::pow(phi, 1.0 / (eta - 1.0)),
          (eta - 1.0) / eta * std::pow(phi, eta / (eta - 1.0))};
}

std::vector<double> iron(std::span<const double> weights,
                         std::span<const double> values) {
  struct Block {
    double weight;
    double sum;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({weights[i], weights[i] * values[i], 1});
    while (blocks.size() > 1) {
      const Block& hi = blocks.back();
      const Block& lo = blocks[blocks.size() - 2];
      if (lo.sum / lo.weight <= hi.sum / hi.weight) {
        break;
      }
      Block merged{lo.weight + hi.weight, lo.sum + hi.sum, lo.count + hi.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  std::size_t i = 0;
  for (const Block& b : blocks) {
    if (b.count == 1) {
      // Untouched entries keep their exact value.
      out.push_back(values[i]);
    } else {
      out.insert(out.end(), b.count, b.sum / b.weight);
    }
    i += b.count;
  }
  return out;
}

}  // namespace poolmech
