#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace poolmech::detail {

/// Adaptive Gauss-Kronrod (7-15) on [a, b]. Nodes are interior, so integrands
/// may be singular at the endpoints.
template <class F>
double integrate(F&& f, double a, double b, double tolerance = 1e-12) {
  if (!(b > a)) {
    return 0.0;
  }
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 15, tolerance);
}

}  // namespace poolmech::detail
