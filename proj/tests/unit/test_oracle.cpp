#include <doctest.h>

#include <cmath>
#include <random>

#include "poolmech/errors.hpp"
#include "poolmech/oracle.hpp"
#include "poolmech/solve_endo.hpp"
#include "poolmech/solve_exo.hpp"

using namespace poolmech;

namespace {

double mean_of(const std::vector<double>& x, std::size_t a, std::size_t b) {
  double s = 0.0;
  for (std::size_t i = a; i < b; ++i) {
    s += x[i];
  }
  return s / static_cast<double>(b - a);
}

// Menu profit from prices, computed straight from the atoms.
double direct_exo_profit(const std::vector<double>& v, const std::vector<double>& q,
                         const std::vector<std::size_t>& cuts, std::size_t excl) {
  const double n = static_cast<double>(v.size());
  double price = 0.0;
  double r_prev = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const std::size_t a = cuts[k];
    const std::size_t b = cuts[k + 1];
    double r = 0.0;
    for (std::size_t i = std::max(a, excl); i < b; ++i) {
      r += q[i];
    }
    r /= static_cast<double>(b - a);
    price += mean_of(v, a, b) * (r - r_prev);
    r_prev = r;
    total += static_cast<double>(b - a) / n * price;
  }
  return total;
}

double brute_exo(const std::vector<double>& v, const std::vector<double>& q) {
  const std::size_t n = v.size();
  double best = -1.0;
  for (unsigned long mask = 0; mask < (1ul << (n - 1)); ++mask) {
    std::vector<std::size_t> cuts{0};
    for (std::size_t i = 1; i < n; ++i) {
      if (mask & (1ul << (i - 1))) {
        cuts.push_back(i);
      }
    }
    cuts.push_back(n);
    for (std::size_t j = 0; j <= n; ++j) {
      best = std::max(best, direct_exo_profit(v, q, cuts, j));
    }
  }
  return best;
}

std::vector<double> sorted_uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (auto& e : x) {
    e = u(rng);
  }
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace

TEST_CASE("binary instance enumeration") {
  const GridDist v{{2.0, 3.0}};
  const GridDist q{{1.0, 4.0}};
  const auto r = oracle_exo(v, q, true);
  CHECK(r.best.value == doctest::Approx(6.5));
  CHECK(r.best.partition.cells() == 2);
  CHECK(r.best.partition.exclusion == 0);
  double pooled = 0.0;
  double excluded = 0.0;
  for (const auto& row : r.table) {
    if (row.mask == 0 && row.exclusion == 0) {
      pooled = row.profit;
    }
    if (row.mask == 1 && row.exclusion == 1) {
      excluded = row.profit;
    }
  }
  CHECK(pooled == doctest::Approx(6.25));
  CHECK(excluded == doctest::Approx(6.0));

  const auto low = oracle_exo(GridDist{{1.0, 2.0}}, GridDist{{1.0, 2.0}});
  CHECK(low.best.partition.cells() == 1);
  CHECK(low.best.value == doctest::Approx(2.25));

  const auto single = oracle_exo(GridDist{{0.7}}, GridDist{{0.4}});
  CHECK(single.best.partition.cells() == 1);
  CHECK(single.best.value == doctest::Approx(0.28));
}

TEST_CASE("refusal above the atom limit") {
  const auto v = Dist::uniform(0.0, 1.0).discretize(15);
  CHECK_THROWS_AS(oracle_exo(v, v), RefusedError);
  CHECK_THROWS_AS(oracle_endo(v, Elasticity(2.0)), RefusedError);
}

TEST_CASE("oracle and dynamic program against direct enumeration") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const auto v = sorted_uniform(rng, n, 0.0, 3.0);
    const auto q = sorted_uniform(rng, n, 0.0, 2.0);
    const double brute = brute_exo(v, q);
    const auto o = oracle_exo(GridDist{v}, GridDist{q});
    const auto dp = dp_grid(GridDist{v}, GridDist{q});
    CHECK(o.best.value == doctest::Approx(brute).epsilon(1e-12));
    CHECK(dp.value == o.best.value);
    CHECK(dp.partition == o.best.partition);
  }
}

TEST_CASE("endogenous enumeration") {
  const auto grid = Dist::uniform(1.0, 2.0).discretize(2);
  const auto r3 = oracle_endo(grid, Elasticity(3.0));
  CHECK(r3.best.partition.cells() == 1);
  // pi(1.5) at eta = 3 against the two-cell (1/2)(pi(0.75) + pi(1.75)).
  const auto pi = [](double phi, double eta) {
    return (eta - 1) / eta * std::pow(phi, eta / (eta - 1));
  };
  CHECK(r3.best.value == doctest::Approx(pi(1.5, 3.0)));
  CHECK(pi(1.5, 3.0) > 0.5 * (pi(0.75, 3.0) + pi(1.75, 3.0)));

  const auto r11 = oracle_endo(grid, Elasticity(1.1));
  CHECK(r11.best.partition.cells() == 2);
  CHECK(r11.best.value == doctest::Approx(0.5 * (pi(0.75, 1.1) + pi(1.75, 1.1))));

  const auto point = oracle_endo(GridDist{{1.3, 1.3, 1.3}}, Elasticity(2.0));
  CHECK(point.best.partition.cells() == 1);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = sorted_uniform(rng, 2 + trial % 8, 0.0, 2.0);
    const Elasticity cost(1.05 + 0.1 * trial);
    const auto o = oracle_endo(GridDist{v}, cost);
    const auto dp = dp_grid_endo(GridDist{v}, cost);
    CHECK(dp.value == o.best.value);
    REQUIRE(o.ironed_best.has_value());
    CHECK(*o.ironed_best == doctest::Approx(o.best.value).epsilon(1e-9));
  }
}
