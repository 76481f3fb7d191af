#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "poolmech/mechanism.hpp"

namespace poolmech::detail {

struct PolishResult {
  std::vector<double> x;
  double value;
};

/// Maximizes `objective` by Nelder-Mead from `x0` and from `starts - 1`
/// Gaussian perturbations of it (scale `step`, seeded). The objective returns
/// NaN for infeasible points. The result is never worse than x0.
PolishResult maximize_multistart(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& x0, double step, std::size_t starts,
    std::uint64_t seed);


/// A polished mechanism may replace the base one only if it passes every
/// check the base passes.
inline bool no_new_failures(const VerifyReport& candidate,
                            const VerifyReport& base) {
  for (const auto& c : candidate.checks) {
    if (c.passed) {
      continue;
    }
    const Check* b = base.find(c.name);
    if (c.hard || b == nullptr || b->passed) {
      return false;
    }
  }
  return true;
}

}  // namespace poolmech::detail
