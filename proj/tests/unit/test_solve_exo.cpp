#include <doctest.h>

#include <cmath>

#include "poolmech/errors.hpp"
#include "poolmech/solve_exo.hpp"

using namespace poolmech;

TEST_CASE("power instance") {
  const auto f = Dist::power_cdf(2.0, 0.0, 1.0);
  const auto q = Dist::power_cdf(0.25, 0.0, 1.0);
  SolveOptions opts;
  opts.grid = 200;
  const auto r = solve_exogenous(f, q, opts);
  CHECK(r.verification.all_pass());
  CHECK(r.mechanism.positive_items() >= 1);
  CHECK(r.profit() >= 0.16750);
  CHECK(r.profit() >= r.trace.dp_value - 1e-12);
}

TEST_CASE("uniform instance has one item and exclusion near 1/3") {
  const auto u = Dist::uniform(0.0, 1.0);
  SolveOptions opts;
  opts.grid = 300;
  const auto r = solve_exogenous(u, u, opts);
  // Pooling every buyer and excluding the bottom a of qualities gives
  // (1 - a)(1 + a)^2 / 4, maximized at a = 1/3.
  CHECK(r.mechanism.positive_items() == 1);
  CHECK(r.mechanism.partition.exclusion == doctest::Approx(1.0 / 3).epsilon(0.01));
  CHECK(std::abs(r.profit() - 8.0 / 27) < 1e-3);
}

TEST_CASE("binary instance separates") {
  SolveOptions opts;
  opts.grid = 2;
  opts.oracle_check = true;
  const auto r = solve_exogenous(Dist::discrete({2.0, 3.0}), Dist::discrete({1.0, 4.0}), opts);
  CHECK(r.profit() == doctest::Approx(6.5));
  CHECK(r.mechanism.positive_items() == 2);
  REQUIRE(r.oracle_gap.has_value());
  CHECK(*r.oracle_gap == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("single atom grid") {
  const auto f = Dist::uniform(0.0, 1.0);
  const auto q = Dist::uniform(0.0, 1.0);
  const auto g = dp_grid(f.discretize(1), q.discretize(1));
  CHECK(g.partition.cells() == 1);
  CHECK(g.value == doctest::Approx(0.25));
}

TEST_CASE("options validation") {
  SolveOptions opts;
  opts.grid = 1;
  CHECK_THROWS(solve_exogenous(Dist::uniform(0, 1), Dist::uniform(0, 1), opts));
}

TEST_CASE("merging redundant cells") {
  const auto u = Dist::uniform(0.0, 1.0);
  // Two cells below the exclusion carry zero quality and collapse.
  const auto p = merge_redundant_cells(u, u, QuantilePartition::pooled({0.0, 0.1, 0.2, 1.0}, 0.2));
  CHECK(p.cells() == 2);
}

TEST_CASE("disclosure improvement test") {
  const auto f = Dist::power_cdf(2.0, 0.0, 1.0);
  const auto q = Dist::power_cdf(0.25, 0.0, 1.0);
  QuantilePartition full{{0.0, 1.0}, 0.0, {CellMode::Disclose}};
  const double deltas[] = {0.1, 0.05, 0.025};
  const auto t = disclosure_improvement_test(f, q, full, 0.6, deltas);
  REQUIRE(t.steps.size() == 3);
  for (const auto& s : t.steps) {
    CHECK(s.joint_pooling_gain > 0.0);
    CHECK(s.quality_pooling_loss >= 0.0);
    CHECK(s.quality_pooling_loss <= s.cauchy_schwarz_bound + 1e-15);
  }
  CHECK(t.steps[1].ratio < t.steps[0].ratio);
  CHECK(t.steps[2].ratio < t.steps[1].ratio);
  // Finite-difference slope of the allocation Q^{-1}(F(v)) = v^8 at 0.6.
  const double h = 1e-5;
  const double slope = (std::pow(0.6 + h, 8) - std::pow(0.6 - h, 8)) / (2 * h);
  CHECK(t.gain_limit == doctest::Approx(slope * (1 - 0.36)).epsilon(1e-6));
  const double last = t.steps[2].joint_pooling_gain / (0.025 * 0.025);
  CHECK(last >= 0.95 * t.gain_limit);

  const auto pooled = QuantilePartition::pooled({0.0, 1.0});
  CHECK_THROWS_AS(disclosure_improvement_test(f, q, pooled, 0.6, deltas), DomainError);
}
