#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace poolmech {

/// Equal-mass discretization of a distribution: `values[i]` carries mass 1/n.
struct GridDist {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double mean() const;
};

/// A one-dimensional distribution on a compact support with exact quantile
/// calculus. Four families are supported:
///
///   power_cdf        F(v) = ((v - lo) / (hi - lo))^exponent
///   uniform          power_cdf with exponent 1
///   piecewise_linear CDF interpolating strictly increasing knots (v_i, F_i)
///   discrete         equal-mass atoms
///
/// Quantiles follow the generalized-inverse convention
/// F^{-1}(t) = inf{v : F(v) >= t}, with F^{-1}(0) = lo.
class Dist {
 public:
  enum class Family { PowerCdf, Uniform, PiecewiseLinear, Discrete };

  struct Knot {
    double value;
    double cdf;
  };

  static Dist power_cdf(double exponent, double lo, double hi);
  static Dist uniform(double lo, double hi);
  static Dist piecewise_linear(std::vector<Knot> knots);
  static Dist discrete(std::vector<double> atoms);
  static Dist point_mass(double at) { return discrete({at}); }

  Family family() const { return family_; }
  std::string_view family_name() const;
  bool is_continuous() const { return family_ != Family::Discrete; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double cdf(double v) const;
  double quantile(double t) const;
  double density(double v) const;
  double mean() const;

  /// Integral of the quantile function over [a, b] (closed form).
  double integrate_quantile(double a, double b) const;
  /// Mean of the distribution restricted to quantiles [a, b).
  double conditional_mean(double a, double b) const;
  /// Continuous virtual value v - (1 - F(v)) / f(v).
  double virtual_value(double v) const;
  /// Derivative of the quantile function; continuous families only.
  double quantile_slope(double t) const;

  GridDist discretize(std::size_t n) const;

  // Family parameters, for serialization.
  double exponent() const;
  std::span<const Knot> knots() const;
  std::span<const double> atoms() const;

 private:
  struct Power {
    double exponent;
  };
  struct Piecewise {
    std::vector<Knot> knots;
  };
  struct Atoms {
    std::vector<double> atoms;
  };

  Dist(Family family, double lo, double hi,
       std::variant<Power, Piecewise, Atoms> params)
      : family_(family), lo_(lo), hi_(hi), params_(std::move(params)) {}

  void require_support(double v) const;

  Family family_;
  double lo_;
  double hi_;
  std::variant<Power, Piecewise, Atoms> params_;
};

}  // namespace poolmech
