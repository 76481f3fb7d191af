#include "poolmech/oracle.hpp"

#include <algorithm>
#include <string>

#include "poolmech/errors.hpp"

namespace poolmech {

namespace {

void require_small(std::size_t n) {
  if (n == 0) {
    throw DomainError("oracle needs at least one atom");
  }
  if (n > kOracleMaxAtoms) {
    throw RefusedError("oracle refuses " + std::to_string(n) +
                       " atoms (limit " + std::to_string(kOracleMaxAtoms) + ")");
  }
}

}  // namespace

OracleResult oracle_exo(const GridDist& values, const GridDist& qualities,
                        bool keep_table) {
  const std::size_t n = values.size();
  require_small(n);
  const auto g = GridPrefix::make(values, &qualities);
  OracleResult out;
  bool first = true;
  const unsigned long masks = 1UL << (n - 1);
  for (unsigned long mask = 0; mask < masks; ++mask) {
    for (std::size_t j = 0; j <= n; ++j) {
      GridCandidate c;
      c.partition = partition_from_mask(n, mask, j);
      c.value = exo_grid_profit(g, c.partition);
      c.items = exo_positive_items(g, c.partition);
      if (keep_table) {
        out.table.push_back({mask, j, c.value, true});
      }
      if (first || better(c, out.best)) {
        out.best = std::move(c);
        first = false;
      }
    }
  }
  return out;
}

OracleResult oracle_endo(const GridDist& values, const Elasticity& cost,
                         bool keep_table) {
  const std::size_t n = values.size();
  require_small(n);
  const auto g = GridPrefix::make(values, nullptr);
  OracleResult out;
  bool first = true;
  double ironed = 0.0;
  const unsigned long masks = 1UL << (n - 1);
  for (unsigned long mask = 0; mask < masks; ++mask) {
    GridCandidate c;
    c.partition = partition_from_mask(n, mask, 0);
    const auto phi = grid_virtual_values(g, c.partition.cuts);
    ironed = std::max(ironed, endo_grid_ironed_profit(g, c.partition.cuts, cost));
    const bool admissible = endo_admissible(phi);
    c.value = endo_grid_profit(g, c.partition.cuts, cost);
    c.items = endo_positive_items(phi);
    if (keep_table) {
      out.table.push_back({mask, 0, c.value, admissible});
    }
    if (admissible && (first || better(c, out.best))) {
      out.best = std::move(c);
      first = false;
    }
  }
  out.ironed_best = ironed;
  return out;
}

}  // namespace poolmech
