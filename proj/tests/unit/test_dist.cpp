#include <doctest.h>

#include <cmath>

#include "poolmech/dist.hpp"
#include "poolmech/errors.hpp"

using namespace poolmech;

namespace {

// Inverts a CDF by bisection, independent of the library quantile.
double bisect_quantile(const Dist& d, double t) {
  double lo = d.lo();
  double hi = d.hi();
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (d.cdf(mid) < t ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("quantiles") {
  const auto f = Dist::power_cdf(2.0, 0.0, 1.0);
  CHECK(f.quantile(0.25) == doctest::Approx(0.5).epsilon(1e-15));

  const auto q = Dist::power_cdf(0.25, 0.0, 1.0);
  CHECK(q.quantile(0.5) == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(bisect_quantile(q, 0.5) == doctest::Approx(q.quantile(0.5)).epsilon(1e-12));

  for (const auto& d : {f, q, Dist::uniform(1.0, 2.0), Dist::discrete({2.0, 3.0}),
                        Dist::piecewise_linear({{0.0, 0.0}, {1.0, 0.3}, {2.0, 1.0}})}) {
    CHECK(d.cdf(d.hi()) == 1.0);
  }

  const auto pw = Dist::piecewise_linear({{0.0, 0.0}, {1.0, 0.3}, {2.0, 1.0}});
  for (double t : {0.1, 0.3, 0.65, 0.9}) {
    CHECK(pw.quantile(t) == doctest::Approx(bisect_quantile(pw, t)).epsilon(1e-12));
  }
}

TEST_CASE("probe errors") {
  const auto f = Dist::uniform(0.0, 1.0);
  CHECK_THROWS_AS(f.cdf(1.5), DomainError);
  CHECK_THROWS_AS(f.quantile(-0.1), DomainError);
  CHECK_THROWS_AS(Dist::discrete({2.0, 3.0}).density(2.0), UnsupportedProbe);
  CHECK_THROWS_AS(Dist::discrete({2.0, 3.0}).virtual_value(2.0), UnsupportedProbe);
  CHECK_THROWS_AS(f.integrate_quantile(0.6, 0.5), DomainError);
  CHECK_THROWS_AS(f.conditional_mean(0.5, 0.5), DomainError);
  CHECK_THROWS_AS(Dist::power_cdf(-1.0, 0.0, 1.0), DomainError);
  // F(v) = v^2 has zero density at the bottom of its support.
  CHECK_THROWS_AS(Dist::power_cdf(2.0, 0.0, 1.0).virtual_value(0.0), DomainError);
}

TEST_CASE("quantile integrals and conditional means") {
  const auto f = Dist::power_cdf(2.0, 0.0, 1.0);
  const auto q = Dist::power_cdf(0.25, 0.0, 1.0);
  CHECK(f.integrate_quantile(0.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(f.integrate_quantile(0.4, 0.4) == 0.0);
  CHECK(q.integrate_quantile(0.0, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
  // Antiderivative (2/3) t^{3/2} on a sub-interval.
  CHECK(f.integrate_quantile(0.2, 0.7) ==
        doctest::Approx((2.0 / 3.0) * (std::pow(0.7, 1.5) - std::pow(0.2, 1.5))).epsilon(1e-12));

  CHECK(f.conditional_mean(0.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(f.conditional_mean(0.25, 1.0) == doctest::Approx(7.0 / 9.0).epsilon(1e-12));
  CHECK(Dist::uniform(1.0, 2.0).conditional_mean(0.0, 1.0) == doctest::Approx(1.5));
  CHECK(Dist::discrete({1.0, 2.0, 6.0}).mean() == doctest::Approx(3.0));
}

TEST_CASE("virtual values") {
  CHECK(Dist::uniform(0.0, 1.0).virtual_value(0.5) == doctest::Approx(0.0).scale(1.0));
  CHECK(Dist::uniform(0.0, 1.0).virtual_value(1.0) == doctest::Approx(1.0));
  const auto f = Dist::power_cdf(2.0, 0.0, 1.0);
  CHECK(f.virtual_value(1.0) == doctest::Approx(1.0));
  CHECK(std::abs(f.virtual_value(1.0 / std::sqrt(3.0))) < 1e-12);
  // Closed form (3v^2 - 1) / (2v).
  CHECK(f.virtual_value(0.7) == doctest::Approx((3 * 0.49 - 1) / 1.4).epsilon(1e-12));
}

TEST_CASE("discretize") {
  const auto u = Dist::uniform(0.0, 1.0).discretize(2);
  REQUIRE(u.size() == 2);
  CHECK(u.values[0] == doctest::Approx(0.25));
  CHECK(u.values[1] == doctest::Approx(0.75));

  const auto b = Dist::discrete({2.0, 3.0}).discretize(2);
  CHECK(b.values == std::vector<double>{2.0, 3.0});

  const auto one = Dist::power_cdf(2.0, 0.0, 1.0).discretize(1);
  CHECK(one.values[0] == doctest::Approx(2.0 / 3.0));

  // Grid means preserve the distribution mean.
  const auto g = Dist::power_cdf(3.0, 1.0, 4.0).discretize(37);
  CHECK(g.mean() == doctest::Approx(Dist::power_cdf(3.0, 1.0, 4.0).mean()).epsilon(1e-12));
  CHECK_THROWS_AS(Dist::uniform(0.0, 1.0).discretize(0), DomainError);
}
