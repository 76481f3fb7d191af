#include "poolmech/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "poolmech/errors.hpp"

namespace poolmech {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_quantile(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("quantile probe " + std::to_string(t) + " outside [0, 1]");
  }
}

void require_finite_support(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("support bounds must be finite");
  }
  if (lo < 0.0) {
    throw DomainError("support must lie in [0, inf)");
  }
}

// Index of the atom holding quantile t in an m-atom equal-mass list.
std::size_t atom_index(double t, std::size_t m) {
  if (t <= 0.0) {
    return 0;
  }
  const double scaled = t * static_cast<double>(m);
  auto k = static_cast<std::size_t>(std::ceil(scaled - 1e-12));
  k = std::clamp<std::size_t>(k, 1, m);
  return k - 1;
}

}  // namespace

double GridDist::mean() const {
  if (values.empty()) {
    return 0.0;
  }
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

Dist Dist::power_cdf(double exponent, double lo, double hi) {
  require_finite_support(lo, hi);
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw DomainError("power_cdf exponent must be positive");
  }
  if (!(hi > lo)) {
    throw DomainError("power_cdf needs lo < hi");
  }
  return Dist(Family::PowerCdf, lo, hi, Power{exponent});
}

Dist Dist::uniform(double lo, double hi) {
  Dist d = power_cdf(1.0, lo, hi);
  d.family_ = Family::Uniform;
  return d;
}

Dist Dist::piecewise_linear(std::vector<Knot> knots) {
  if (knots.size() < 2) {
    throw DomainError("piecewise_linear needs at least two knots");
  }
  if (knots.front().cdf != 0.0 || knots.back().cdf != 1.0) {
    throw DomainError("piecewise_linear CDF must run from 0 to 1");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].value > knots[i - 1].value) ||
        !(knots[i].cdf > knots[i - 1].cdf)) {
      throw DomainError(
          "piecewise_linear knots must be strictly increasing in value and CDF");
    }
  }
  require_finite_support(knots.front().value, knots.back().value);
  const double lo = knots.front().value;
  const double hi = knots.back().value;
  return Dist(Family::PiecewiseLinear, lo, hi, Piecewise{std::move(knots)});
}

Dist Dist::discrete(std::vector<double> atoms) {
  if (atoms.empty()) {
    throw DomainError("discrete distribution needs at least one atom");
  }
  std::sort(atoms.begin(), atoms.end());
  require_finite_support(atoms.front(), atoms.back());
  const double lo = atoms.front();
  const double hi = atoms.back();
  return Dist(Family::Discrete, lo, hi, Atoms{std::move(atoms)});
}

std::string_view Dist::family_name() const {
  switch (family_) {
    case Family::PowerCdf:
      return "power_cdf";
    case Family::Uniform:
      return "uniform";
    case Family::PiecewiseLinear:
      return "piecewise_linear";
    case Family::Discrete:
      return "discrete";
  }
  return "unknown";
}

void Dist::require_support(double v) const {
  if (!(v >= lo_ && v <= hi_)) {
    throw DomainError("probe " + std::to_string(v) + " outside support [" +
                      std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
  }
}

double Dist::cdf(double v) const {
  require_support(v);
  return std::visit(
      overloaded{
          [&](const Power& p) {
            return std::pow((v - lo_) / (hi_ - lo_), p.exponent);
          },
          [&](const Piecewise& p) {
            const auto& k = p.knots;
            auto it = std::upper_bound(
                k.begin(), k.end(), v,
                [](double x, const Knot& knot) { return x < knot.value; });
            if (it == k.end()) {
              return 1.0;
            }
            const Knot& right = *it;
            const Knot& left = *(it - 1);
            return left.cdf + (right.cdf - left.cdf) * (v - left.value) /
                                  (right.value - left.value);
          },
          [&](const Atoms& a) {
            auto it = std::upper_bound(a.atoms.begin(), a.atoms.end(), v);
            return static_cast<double>(it - a.atoms.begin()) /
                   static_cast<double>(a.atoms.size());
          },
      },
      params_);
}

double Dist::quantile(double t) const {
  require_quantile(t);
  return std::visit(
      overloaded{
          [&](const Power& p) {
            return lo_ + (hi_ - lo_) * std::pow(t, 1.0 / p.exponent);
          },
          [&](const Piecewise& p) {
            const auto& k = p.knots;
            if (t <= 0.0) {
              return k.front().value;
            }
            auto it = std::lower_bound(
                k.begin(), k.end(), t,
                [](const Knot& knot, double x) { return knot.cdf < x; });
            const Knot& right = *it;
            const Knot& left = *(it - 1);
            return left.value + (right.value - left.value) * (t - left.cdf) /
                                    (right.cdf - left.cdf);
          },
          [&](const Atoms& a) { return a.atoms[atom_index(t, a.atoms.size())]; },
      },
      params_);
}

double Dist::density(double v) const {
  require_support(v);
  return std::visit(
      overloaded{
          [&](const Power& p) {
            const double s = (v - lo_) / (hi_ - lo_);
            if (p.exponent == 1.0) {
              return 1.0 / (hi_ - lo_);
            }
            return p.exponent * std::pow(s, p.exponent - 1.0) / (hi_ - lo_);
          },
          [&](const Piecewise& p) {
            const auto& k = p.knots;
            auto it = std::upper_bound(
                k.begin(), k.end(), v,
                [](double x, const Knot& knot) { return x < knot.value; });
            if (it == k.end()) {
              --it;
            }
            const Knot& right = *it;
            const Knot& left = *(it - 1);
            return (right.cdf - left.cdf) / (right.value - left.value);
          },
          [&](const Atoms&) -> double {
            throw UnsupportedProbe("density of a discrete distribution");
          },
      },
      params_);
}

double Dist::quantile_slope(double t) const {
  require_quantile(t);
  return std::visit(
      overloaded{
          [&](const Power& p) {
            const double e = 1.0 / p.exponent;
            if (e == 1.0) {
              return hi_ - lo_;
            }
            return (hi_ - lo_) * e * std::pow(t, e - 1.0);
          },
          [&](const Piecewise& p) {
            const auto& k = p.knots;
            auto it = std::lower_bound(
                k.begin(), k.end(), t,
                [](const Knot& knot, double x) { return knot.cdf < x; });
            if (it == k.begin()) {
              ++it;
            }
            const Knot& right = *it;
            const Knot& left = *(it - 1);
            return (right.value - left.value) / (right.cdf - left.cdf);
          },
          [&](const Atoms&) -> double {
            throw UnsupportedProbe("quantile slope of a discrete distribution");
          },
      },
      params_);
}

double Dist::mean() const { return integrate_quantile(0.0, 1.0); }

double Dist::integrate_quantile(double a, double b) const {
  require_quantile(a);
  require_quantile(b);
  if (a > b) {
    throw DomainError("integrate_quantile needs a <= b");
  }
  if (a == b) {
    return 0.0;
  }
  return std::visit(
      overloaded{
          [&](const Power& p) {
            const double e = 1.0 + 1.0 / p.exponent;
            return lo_ * (b - a) +
                   (hi_ - lo_) * (std::pow(b, e) - std::pow(a, e)) / e;
          },
          [&](const Piecewise& p) {
            // The quantile is linear on each [F_i, F_{i+1}]: sum trapezoids.
            double total = 0.0;
            const auto& k = p.knots;
            for (std::size_t i = 1; i < k.size(); ++i) {
              const double t0 = std::max(a, k[i - 1].cdf);
              const double t1 = std::min(b, k[i].cdf);
              if (t1 <= t0) {
                continue;
              }
              const double slope =
                  (k[i].value - k[i - 1].value) / (k[i].cdf - k[i - 1].cdf);
              const double q0 = k[i - 1].value + slope * (t0 - k[i - 1].cdf);
              const double q1 = k[i - 1].value + slope * (t1 - k[i - 1].cdf);
              total += 0.5 * (q0 + q1) * (t1 - t0);
            }
            return total;
          },
          [&](const Atoms& at) {
            const auto m = at.atoms.size();
            const double mass = 1.0 / static_cast<double>(m);
            const std::size_t first = atom_index(a, m);
            const std::size_t last = atom_index(b, m);
            double total = 0.0;
            for (std::size_t i = first; i <= last; ++i) {
              const double t0 = std::max(a, static_cast<double>(i) * mass);
              const double t1 = std::min(b, static_cast<double>(i + 1) * mass);
              if (t1 > t0) {
                total += at.atoms[i] * (t1 - t0);
              }
            }
            return total;
          },
      },
      params_);
}

double Dist::conditional_mean(double a, double b) const {
  if (!(b > a)) {
    throw DomainError("conditional_mean needs a < b");
  }
  const double mean = integrate_quantile(a, b) / (b - a);
  // Rounding can push a cell mean a hair outside the quantile range.
  return std::clamp(mean, quantile(a), quantile(b));
}

double Dist::virtual_value(double v) const {
  if (!is_continuous()) {
    throw UnsupportedProbe("virtual value of a discrete distribution");
  }
  require_support(v);
  if (v == hi_) {
    return hi_;
  }
  const double f = density(v);
  if (!(f > 0.0)) {
    throw DomainError("virtual value undefined where the density vanishes");
  }
  if (std::isinf(f)) {
    return v;
  }
  return v - (1.0 - cdf(v)) / f;
}

GridDist Dist::discretize(std::size_t n) const {
  if (n == 0) {
    throw DomainError("discretize needs n >= 1");
  }
  GridDist grid;
  grid.values.reserve(n);
  const auto cells = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = static_cast<double>(i) / cells;
    const double b = static_cast<double>(i + 1) / cells;
    grid.values.push_back(conditional_mean(a, b));
  }
  return grid;
}

double Dist::exponent() const {
  if (const auto* p = std::get_if<Power>(&params_)) {
    return p->exponent;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::span<const Dist::Knot> Dist::knots() const {
  if (const auto* p = std::get_if<Piecewise>(&params_)) {
    return p->knots;
  }
  return {};
}

std::span<const double> Dist::atoms() const {
  if (const auto* a = std::get_if<Atoms>(&params_)) {
    return a->atoms;
  }
  return {};
}

}  // namespace poolmech
