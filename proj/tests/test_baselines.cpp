#include <cstdlib>

#include "doctest.h"
#include "helpers.hpp"
#include "treecvrp/baselines.hpp"
#include "treecvrp/bounds.hpp"
#include "treecvrp/errors.hpp"
#include "treecvrp/gen.hpp"
#include "treecvrp/io.hpp"
#include "treecvrp/model.hpp"

using namespace treecvrp;

TEST_CASE("itp on a uniform star pairs neighbours") {
  const Instance star = gen_star({1, 1, 1}, 2);
  const Solution sol = itp(star);
  CHECK(verify(star, sol).feasible);
  CHECK(sol.cost == 6);
  CHECK(sol.tours.size() == 2);  // ceil(3/2)
}

TEST_CASE("itp always uses the minimum tour count") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int nt = 2 + static_cast<int>(seed % 9);
    const std::int64_t k = 1 + static_cast<std::int64_t>(seed % 5);
    const Instance inst = gen_random(nt, k, 9, seed);
    const Solution sol = itp(inst);
    CHECK(verify(inst, sol).feasible);
    CHECK(sol.tours.size() == static_cast<std::size_t>((nt + k - 1) / k));
  }
}

TEST_CASE("itp stays below its constructive bound") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = gen_random(3 + static_cast<int>(seed % 8), 3, 9, seed);
    CHECK(itp(inst).cost <= itp_constructive_bound(inst));
  }
}

TEST_CASE("itp endpoints: capacity one and capacity everything") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Instance inst = gen_random(2 + static_cast<int>(seed % 7), 1, 9, seed);
    // At capacity one the bound is met with equality.
    CHECK(cost_to_rational(inst, itp(inst).cost) == lb_edge(inst, EdgeBoundMode::Ceiling));
    // One big tour equals the tree tour.
    inst.capacity = inst.total_demand();
    const Solution sol = itp(inst);
    CHECK(sol.tours.size() == 1);
    CHECK(sol.cost == tree_tsp_cost_scaled(inst, inst.terminals()));
  }
}

TEST_CASE("the partition oracle beats or matches every heuristic") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = gen_random(2 + static_cast<int>(seed % 7), 2 + seed % 3, 9, seed);
    const Cost opt = exact_partition_dp(inst).cost;
    CHECK(opt <= itp(inst).cost);
    CHECK(opt <= greedy(inst).cost);
  }
}

TEST_CASE("both exact solvers agree everywhere") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const int nt = 2 + static_cast<int>(seed % 8);
    for (std::int64_t k : {std::int64_t{1}, std::int64_t{2}, std::int64_t{3},
                           static_cast<std::int64_t>(nt)}) {
      const Instance inst = gen_random(nt, k, 9, seed * 31 + k);
      const Solution a = exact_partition_dp(inst);
      const Solution b = exact_config_dp(inst);
      CHECK(verify(inst, a).feasible);
      CHECK(verify(inst, b).feasible);
      CHECK(a.cost == b.cost);
    }
  }
}

TEST_CASE("exact solvers handle the two-terminal path fixture") {
  // depot - a (1) - b (1), both terminals; capacity 2 serves both in one go.
  const Instance path = make_instance({-1, 0, 1}, {0, 1, 1}, {0, 1, 1}, 2);
  CHECK(exact_partition_dp(path).cost == 4);
  CHECK(exact_config_dp(path).cost == 4);
  CHECK(itp(path).cost == 4);
}

TEST_CASE("an instance with no demand solves to an empty plan") {
  const Instance empty = make_instance({-1, 0}, {0, 5}, {0, 0}, 2);
  for (const Solution& sol :
       {exact_partition_dp(empty), exact_config_dp(empty), itp(empty), greedy(empty)}) {
    CHECK(sol.tours.empty());
    CHECK(sol.cost == 0);
  }
}

TEST_CASE("greedy endpoints") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Instance inst = gen_random(2 + static_cast<int>(seed % 7), 1, 9, seed);
    inst.capacity = inst.total_demand();
    const Solution sol = greedy(inst);
    CHECK(verify(inst, sol).feasible);
    CHECK(sol.tours.size() == 1);
    CHECK(sol.cost == tree_tsp_cost_scaled(inst, inst.terminals()));
  }
}

TEST_CASE("splittable brute force agrees with the unit-demand oracle") {
  const Instance star = gen_star({1, 1, 4}, 2);
  CHECK(exact_splittable_brute(star) == 12);
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Instance inst = gen_random(2 + static_cast<int>(seed % 5), 2, 7, seed);
    CHECK(exact_splittable_brute(inst) == exact_partition_dp(inst).cost);
  }
}

TEST_CASE("terminal budgets guard the exponential solvers") {
  const Instance big = gen_random(16, 3, 9, 7);
  CHECK_THROWS_WITH_AS(exact_partition_dp(big), doctest::Contains("TREECVRP_EXACT_BUDGET"),
                       BudgetError);
  const Instance bigger = gen_random(19, 3, 9, 7);
  CHECK_THROWS_WITH_AS(exact_config_dp(bigger), doctest::Contains("TREECVRP_CONFIG_BUDGET"),
                       BudgetError);
  const Instance heavy = gen_random(11, 3, 9, 7);
  CHECK_THROWS_WITH_AS(exact_splittable_brute(heavy), doctest::Contains("TREECVRP_SPLIT_BUDGET"),
                       BudgetError);

  // The environment override moves the line.
  setenv("TREECVRP_EXACT_BUDGET", "5", 1);
  const Instance six = gen_random(6, 3, 9, 7);
  CHECK_THROWS_AS(exact_partition_dp(six), BudgetError);
  setenv("TREECVRP_EXACT_BUDGET", "16", 1);
  CHECK(verify(big, exact_partition_dp(big)).feasible);
  unsetenv("TREECVRP_EXACT_BUDGET");
}

TEST_CASE("itp requires unit demands") {
  const Instance lumpy = make_instance({-1, 0}, {0, 1}, {0, 3}, 2);
  CHECK_THROWS_AS(itp(lumpy), ValidationError);
  CHECK_THROWS_AS(exact_partition_dp(lumpy), ValidationError);
  CHECK_THROWS_AS(exact_config_dp(lumpy), ValidationError);
  // The splittable brute force is the one that accepts it.
  CHECK(exact_splittable_brute(lumpy) == 4);
}
