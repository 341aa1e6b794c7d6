#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "treecvrp/baselines.hpp"
#include "treecvrp/errors.hpp"
#include "treecvrp/gen.hpp"
#include "treecvrp/model.hpp"
#include "treecvrp/splittable.hpp"

using namespace treecvrp;

namespace {

// depot - a (2, demand 2) - and a second branch b (3, demand 3).
Instance lumpy_star() {
  return make_instance({-1, 0, 0}, {0, 2, 3}, {0, 2, 3}, 2);
}

}  // namespace

TEST_CASE("expansion turns a demand into that many zero-weight unit leaves") {
  const Instance inst = make_instance({-1, 0}, {0, 4}, {0, 3}, 2);
  auto [wide, map] = expand(inst);
  validate(wide);
  CHECK(wide.unit_demand());
  CHECK(wide.total_demand() == 3);
  CHECK(wide.n() == inst.n() + 4);  // positions 2..5 of the binary gadget
  CHECK(!wide.is_terminal(1));
  const auto d = distances(wide);
  for (int t : wide.terminals()) {
    CHECK(d.dist[t] == 4);  // gadget edges weigh nothing
    CHECK(map.to_base[t] == 1);
  }
  CHECK(map.terminal_image[1] >= inst.n());  // demand moved to a fresh leaf
}

TEST_CASE("expansion leaves unit-demand instances untouched") {
  const Instance inst = gen_random(6, 3, 9, 11);
  auto [same, map] = expand(inst);
  CHECK(same == inst);
  for (int v = 0; v < inst.n(); ++v) CHECK(map.to_base[v] == v);
}

TEST_CASE("solving the expansion matches the splittable brute force") {
  CHECK(exact_partition_dp(expand(lumpy_star()).first).cost ==
        exact_splittable_brute(lumpy_star()));
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Instance inst = gen_random(2 + static_cast<int>(seed % 4), 2 + seed % 2, 7, seed);
    // Grow demands to at most 8 units total.
    Rng rng(seed * 1009);
    std::int64_t room = 8 - inst.total_demand();
    for (int t : inst.terminals()) {
      if (room <= 0) break;
      const std::int64_t extra = static_cast<std::int64_t>(rng.below(3));
      inst.demand[t] += std::min(extra, room);
      room -= std::min(extra, room);
    }
    auto [wide, map] = expand(inst);
    const Solution on_wide = exact_partition_dp(wide);
    CHECK(on_wide.cost == exact_splittable_brute(inst));
    const Solution back = contract_solution(map, inst, on_wide);
    CHECK(back.cost == on_wide.cost);
    // Split claims merge per tour: total claimed units per terminal add up.
    std::vector<std::int64_t> served(inst.n(), 0);
    for (const auto& t : back.tours) {
      for (const auto& c : t.claims) served[c.v] += c.units;
    }
    for (int v = 0; v < inst.n(); ++v) CHECK(served[v] == inst.demand[v]);
  }
}

TEST_CASE("contracting an infeasible expansion plan is refused") {
  const Instance inst = lumpy_star();
  auto [wide, map] = expand(inst);
  Solution bogus;
  bogus.tours = {unit_tour({wide.terminals().front()})};
  bogus.cost = solution_cost(wide, bogus);
  CHECK_THROWS_AS(contract_solution(map, inst, bogus), ValidationError);
}

TEST_CASE("expansion respects its budget") {
  Instance monster = make_instance({-1, 0}, {0, 1}, {0, 2'000'000}, 5);
  CHECK_THROWS_WITH_AS(expand(monster), doctest::Contains("TREECVRP_EXPAND_BUDGET"),
                       BudgetError);
}

TEST_CASE("peeling prepays full tours and keeps the residue") {
  // One terminal of demand 5 at distance 2, capacity 2.
  const Instance inst = make_instance({-1, 0}, {0, 2}, {0, 5}, 2);
  const Peeled peeled = peel_full_tours(inst, 1);
  CHECK(peeled.prepaid.size() == 2);  // floor(5/2) full tours
  CHECK(peeled.prepaid_cost == 2 * 2 * 2);
  CHECK(peeled.reduced.demand[1] == 1);
  for (const auto& t : peeled.prepaid) {
    REQUIRE(t.claims.size() == 1);
    CHECK(t.claims[0] == Claim{1, 2});
  }

  // A huge threshold turns peeling off.
  const Peeled off = peel_full_tours(inst, 1000);
  CHECK(off.prepaid.empty());
  CHECK(off.reduced == inst);

  CHECK_THROWS_AS(peel_full_tours(inst, -2), ValidationError);
}

TEST_CASE("peeling is a heuristic: never cheaper than the true optimum") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    Instance inst = gen_random(2 + static_cast<int>(seed % 3), 2, 7, seed);
    Rng rng(seed * 31);
    std::int64_t room = 8 - inst.total_demand();
    for (int t : inst.terminals()) {
      const std::int64_t extra = std::min<std::int64_t>(rng.below(4), std::max<std::int64_t>(room, 0));
      inst.demand[t] += extra;
      room -= extra;
    }
    const Cost opt = exact_splittable_brute(inst);
    const Peeled peeled = peel_full_tours(inst, 0);  // peel aggressively
    Cost with_peel = peeled.prepaid_cost;
    if (peeled.reduced.total_demand() > 0) {
      with_peel += exact_partition_dp(expand(peeled.reduced).first).cost;
    }
    CHECK(with_peel >= opt);
  }
}
