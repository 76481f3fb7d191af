#include <doctest.h>

#include <cmath>

#include "poolmech/cost.hpp"
#include "poolmech/errors.hpp"
#include "poolmech/mechanism.hpp"

using namespace poolmech;

namespace {

const Dist kValues = Dist::power_cdf(2.0, 0.0, 1.0);
const Dist kQualities = Dist::power_cdf(0.25, 0.0, 1.0);

}  // namespace

TEST_CASE("two-cell menu prices") {
  const auto m = build_mechanism(kValues, kQualities, QuantilePartition::pooled({0.0, 0.5, 1.0}));
  REQUIRE(m.cells.size() == 2);
  // Cell values (2/3)(b^1.5 - a^1.5)/(b - a), qualities (b^5 - a^5)/5/(b - a).
  const double w1 = (2.0 / 3.0) * std::pow(0.5, 1.5) / 0.5;
  const double w2 = (2.0 / 3.0) * (1 - std::pow(0.5, 1.5)) / 0.5;
  const double r1 = 0.0125;
  const double r2 = 0.3875;
  const double p1 = w1 * r1;
  const double p2 = p1 + w2 * (r2 - r1);
  CHECK(m.cells[0].price == doctest::Approx(p1).epsilon(1e-12));
  CHECK(m.cells[1].price == doctest::Approx(p2).epsilon(1e-12));
  CHECK(m.cells[0].price == doctest::Approx(0.005893).epsilon(1e-3));
  CHECK(m.cells[1].price == doctest::Approx(0.329105).epsilon(1e-5));
  CHECK(m.profit == doctest::Approx(0.5 * (p1 + p2)).epsilon(1e-12));
  CHECK(m.profit == doctest::Approx(0.16750).epsilon(1e-4));
  CHECK(m.positive_items() == 2);
}

TEST_CASE("single cell and full exclusion") {
  const auto one = build_mechanism(kValues, kQualities, QuantilePartition::pooled({0.0, 1.0}));
  CHECK(one.profit == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
  const auto none = build_mechanism(kValues, kQualities, QuantilePartition::pooled({0.0, 1.0}, 1.0));
  CHECK(none.profit == 0.0);
  CHECK(none.positive_items() == 0);
}

TEST_CASE("binary instance") {
  const auto f = Dist::discrete({2.0, 3.0});
  const auto q = Dist::discrete({1.0, 4.0});
  const auto m = build_mechanism(f, q, QuantilePartition::pooled({0.0, 0.5, 1.0}));
  CHECK(m.profit == doctest::Approx(2.0 * 1 * 1 + 3.0 * 3 * 0.5));
  const auto report = verify(m, f, &q);
  CHECK(report.all_pass());
  REQUIRE(report.find("item_bound") != nullptr);
  CHECK(report.find("item_bound")->passed);
}

TEST_CASE("discrete virtual values") {
  const double w1 = 0.4714;
  const double w2 = 0.8619;
  const CellMass cells[] = {{0.5, w1}, {0.5, w2}};
  const auto phi = discrete_virtual_values(cells);
  CHECK(phi[0] == doctest::Approx(w1 - (w2 - w1)));
  CHECK(phi[0] == doctest::Approx(0.0809));
  CHECK(phi[1] == doctest::Approx(w2));

  const CellMass single[] = {{1.0, 0.7}};
  CHECK(discrete_virtual_values(single)[0] == 0.7);

  const CellMass halves[] = {{0.5, 1.25}, {0.5, 1.75}};
  const auto p = discrete_virtual_values(halves);
  CHECK(p[0] == doctest::Approx(0.75));
  CHECK(p[1] == doctest::Approx(1.75));

  const CellMass bad[] = {{0.5, 1.75}, {0.5, 1.25}};
  CHECK_THROWS_AS(discrete_virtual_values(bad), DomainError);
}

TEST_CASE("revenue identities") {
  std::vector<MechanismCell> cells(3);
  const double masses[] = {0.2, 0.5, 0.3};
  const double values[] = {1.0, 2.0, 4.0};
  const double qualities[] = {0.0, 1.0, 3.0};
  for (int k = 0; k < 3; ++k) {
    cells[k].mass = masses[k];
    cells[k].value = values[k];
    cells[k].quality = qualities[k];
  }
  std::vector<CellMass> cm;
  for (const auto& c : cells) {
    cm.push_back({c.mass, c.value});
  }
  const auto phi = discrete_virtual_values(cm);
  for (int k = 0; k < 3; ++k) {
    cells[k].virtual_value = phi[k];
  }
  assign_prices(cells);
  // Hand recursion: p = (0, 2, 2 + 4 * 2).
  CHECK(cells[1].price == doctest::Approx(2.0));
  CHECK(cells[2].price == doctest::Approx(10.0));
  const auto ids = revenue_identities(cells);
  CHECK(ids.by_prices == doctest::Approx(0.5 * 2 + 0.3 * 10));
  CHECK(ids.by_increments == doctest::Approx(ids.by_prices).epsilon(1e-12));
  CHECK(ids.by_virtual_values == doctest::Approx(ids.by_prices).epsilon(1e-12));
  // Sum of g phi equals the lowest value; the top virtual value is its value.
  CHECK(masses[0] * phi[0] + masses[1] * phi[1] + masses[2] * phi[2] ==
        doctest::Approx(values[0]).epsilon(1e-12));
  CHECK(phi[2] == values[2]);

  cells[2].price += 0.1;
  Mechanism m;
  m.cells = cells;
  CHECK_THROWS_AS(profit(m), ConsistencyError);
}

TEST_CASE("verify flags falling increments") {
  const auto f = Dist::uniform(0.0, 1.0);
  Mechanism m;
  m.partition = QuantilePartition::pooled({0.0, 1.0 / 3, 2.0 / 3, 1.0});
  const double r[] = {0.5, 0.8, 0.9};
  for (int k = 0; k < 3; ++k) {
    MechanismCell c;
    c.mass = 1.0 / 3;
    c.value = (2 * k + 1) / 6.0;
    c.quality = r[k];
    m.cells.push_back(c);
  }
  std::vector<CellMass> cm;
  for (const auto& c : m.cells) {
    cm.push_back({c.mass, c.value});
  }
  const auto phi = discrete_virtual_values(cm);
  for (int k = 0; k < 3; ++k) {
    m.cells[k].virtual_value = phi[k];
  }
  assign_prices(m.cells);
  m.revenue = m.profit = profit(m);
  const auto report = verify(m, f, nullptr);
  CHECK(report.hard_pass());
  CHECK_FALSE(report.all_pass());
  CHECK_FALSE(report.find("increasing_increments")->passed);
  CHECK_FALSE(report.find("increasing_increments")->hard);
}

TEST_CASE("verify catches IC and feasibility violations") {
  const auto f = Dist::discrete({2.0, 3.0});
  const auto q = Dist::discrete({1.0, 4.0});
  auto m = build_mechanism(f, q, QuantilePartition::pooled({0.0, 0.5, 1.0}));
  auto ic = m;
  ic.cells[1].price += 0.5;
  ic.revenue = ic.profit = 0.5 * (ic.cells[0].price + ic.cells[1].price);
  const auto bad = verify(ic, f, &q);
  CHECK_FALSE(bad.find("ic_global")->passed);
  CHECK(bad.find("ic_global")->detail.find("cell 2 prefers item 1") != std::string::npos);

  auto over = m;
  over.cells[1].quality = 5.0;
  assign_prices(over.cells);
  over.revenue = over.profit = 0.5 * (over.cells[0].price + over.cells[1].price);
  CHECK_FALSE(verify(over, f, &q).find("quality_feasible")->passed);
}

TEST_CASE("pointwise endogenous profit") {
  const Elasticity two(2.0);
  CHECK(pointwise_profit(3.0, two).quality == doctest::Approx(3.0));
  CHECK(pointwise_profit(3.0, two).profit == doctest::Approx(4.5));
  CHECK(pointwise_profit(-0.5, two).quality == 0.0);
  CHECK(pointwise_profit(0.0, two).profit == 0.0);
  for (double eta : {1.2, 2.0, 5.0}) {
    const auto one = pointwise_profit(1.0, Elasticity(eta));
    CHECK(one.quality == doctest::Approx(1.0));
    CHECK(one.profit == doctest::Approx((eta - 1) / eta));
  }
  CHECK_THROWS_AS(Elasticity(1.0), DomainError);
  CHECK_THROWS_AS(Elasticity(0.9), DomainError);
}

TEST_CASE("ironing") {
  const double w[] = {1, 1, 1};
  const double v[] = {1.0, 3.0, 2.0};
  const auto out = iron(w, v);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == doctest::Approx(2.5));
  CHECK(out[2] == doctest::Approx(2.5));
}

TEST_CASE("recommendation table") {
  const auto f = Dist::uniform(0.0, 1.0);
  const auto q = Dist::uniform(0.0, 1.0);
  const auto m = build_mechanism(f, q, QuantilePartition::pooled({0.0, 1.0 / 3, 1.0}, 1.0 / 3));
  const auto rows = recommendation_table(m, f);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value_hi == doctest::Approx(1.0 / 3));
  CHECK(rows[0].quality == 0.0);
  CHECK(rows[1].price == doctest::Approx(m.cells[1].price));
}
