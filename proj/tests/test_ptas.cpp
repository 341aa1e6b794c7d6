#include <cstdint>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "treecvrp/baselines.hpp"
#include "treecvrp/decomposition.hpp"
#include "treecvrp/errors.hpp"
#include "treecvrp/gen.hpp"
#include "treecvrp/io.hpp"
#include "treecvrp/model.hpp"
#include "treecvrp/ptas_dp.hpp"

using namespace treecvrp;

namespace {

constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

PtasParams loose(std::int64_t k) {
  PtasParams p;
  p.inv_eps = 4;
  p.gamma_k = 1;
  p.min_subtour_demand = 1;
  p.max_tours_per_component = 8;
  p.x_set_size = std::max<std::int64_t>(1, k);
  p.sum_list_cap = 8;
  p.class_width = 1;
  return p;
}

Component leaf_component(const Instance& tree) {
  Component c;
  c.id = 0;
  c.kind = Component::Kind::Leaf;
  c.root = tree.root;
  for (int v = 0; v < tree.n(); ++v) {
    if (v != tree.root) c.edges.push_back(v);
  }
  c.demand = tree.total_demand();
  return c;
}

}  // namespace

TEST_CASE("faithful parameter derivation at easy scales") {
  const PtasParams p = PtasParams::from_epsilon(1, 5);
  CHECK(p.gamma_k == 60);
  CHECK(p.min_subtour_demand == 5);
  CHECK(p.max_tours_per_component == 25);
  CHECK(p.x_set_size == 4);
  CHECK(p.sum_list_cap == 4);

  const PtasParams q = PtasParams::from_epsilon(2, 4);
  CHECK(q.gamma_k == 96);
  CHECK(q.min_subtour_demand == 1);   // ceil(4 / 2^3)
  CHECK(q.max_tours_per_component == 385);
  CHECK(q.x_set_size == 2048);        // 4 * 2^9
  CHECK(q.sum_list_cap == kMax);      // 2048^8 saturates

  const PtasParams r = PtasParams::from_epsilon(4, 3);
  CHECK(r.gamma_k == 144);
  CHECK(r.min_subtour_demand == 1);
  CHECK(r.max_tours_per_component == 98305);  // 24*4^6 + 1
  CHECK(r.x_set_size == 4LL * 4294967296LL * 4LL);  // 4 * 4^17
  CHECK(r.sum_list_cap == kMax);
}

TEST_CASE("distance-class count for the faithful width") {
  CHECK(h_epsilon(1) == 1);
  CHECK(h_epsilon(2) == 32);
  CHECK(h_epsilon(4) == 262144);
  CHECK(h_epsilon(1000) == kMax);  // saturates
}

TEST_CASE("vacuous caps really are vacuous") {
  const Instance star = gen_star({1, 4}, 2);
  const PtasParams p = PtasParams::vacuous(star);
  CHECK(p.min_subtour_demand == 1);
  CHECK(p.max_tours_per_component == 2);
  CHECK(p.x_set_size == 2);
  CHECK(p.sum_list_cap == 2);
  CHECK(p.class_width == 1);
  CHECK(p.gamma_k == PtasParams::from_epsilon(4, 2).gamma_k);
}

TEST_CASE("local values at a leaf component") {
  // Two unit-weight terminal leaves under the depot.
  const Instance tree = gen_star({1, 1}, 2);
  const auto f = local_dp(tree, leaf_component(tree), loose(2));
  REQUIRE(f.size() == 2);
  CHECK(f.at({{2, false}}) == 4);
  CHECK(f.at({{1, false}, {1, false}}) == 4);

  // Capacity one forbids the combined subtour.
  const Instance tight = gen_star({1, 1}, 1);
  const auto f1 = local_dp(tight, leaf_component(tight), loose(1));
  REQUIRE(f1.size() == 1);
  CHECK(f1.at({{1, false}, {1, false}}) == 4);

  // A single terminal at distance 4.
  const Instance one = gen_star({4}, 3);
  const auto fo = local_dp(one, leaf_component(one), loose(3));
  REQUIRE(fo.size() == 1);
  CHECK(fo.at({{1, false}}) == 8);
}

TEST_CASE("local values on a bare spine pay the doubled spine per passing subtour") {
  // Component root 0 with exit 1 at weight 3; the only terminal of the tree
  // sits outside the component, capping the exit seeds at one subtour.
  const Instance tree = make_instance({-1, 0, 0}, {0, 3, 1}, {0, 0, 1}, 2);
  Component c;
  c.id = 0;
  c.kind = Component::Kind::Internal;
  c.root = 0;
  c.exit = 1;
  c.edges = {1};
  c.demand = 0;
  c.spine_weight = 3;
  const auto f = local_dp(tree, c, loose(2));
  REQUIRE(f.size() == 2);
  CHECK(f.at({}) == 0);
  CHECK(f.at({{0, true}}) == 6);
}

TEST_CASE("component-root values aggregate a leaf component") {
  const Instance tree = gen_star({1, 1}, 2);
  const std::map<SumKey, Cost> closed = {{{}, 0}};
  const auto g = subtree_dp_component_root(tree, leaf_component(tree), closed, loose(2));
  REQUIRE(g.size() == 2);
  CHECK(g.at({{2, 1}}) == 4);
  CHECK(g.at({{1, 2}}) == 4);
}

TEST_CASE("component-root values splice exit subtours into passing ones") {
  // Component: root 0 with terminal child 1 and inner vertex 2; vertex 2 has
  // terminal child 3 and the exit 4.  Unit weights, spine 0->2->4 of 2.
  const Instance tree =
      make_instance({-1, 0, 0, 2, 2}, {0, 1, 1, 1, 1}, {0, 1, 0, 1, 0}, 5);
  Component c;
  c.id = 0;
  c.kind = Component::Kind::Internal;
  c.root = 0;
  c.exit = 4;
  c.edges = {1, 2, 3, 4};
  c.demand = 2;
  c.spine_weight = 2;

  // Below the exit: one finished subtree configuration, one subtour of
  // padded demand 3 costing 10.
  const std::map<SumKey, Cost> exit_values = {{{{3, 1}}, 10}};
  const auto g = subtree_dp_component_root(tree, c, exit_values, loose(5));
  REQUIRE(g.size() == 4);
  // Both terminals on one passing subtour that swallows the exit subtour.
  CHECK(g.at({{5, 1}}) == 18);  // 8 + 10, no unassociated exits
  // One ending, one passing subtour.
  CHECK(g.at({{1, 1}, {4, 1}}) == 18);
  // No passing subtour: the exit subtour pays the doubled spine itself.
  CHECK(g.at({{1, 2}, {3, 1}}) == 20);  // 6 + 10 + 2*2
  CHECK(g.at({{2, 1}, {3, 1}}) == 20);
}

TEST_CASE("critical-vertex values round up, pay the hop, and may merge") {
  using Table = std::map<SumKey, Cost>;
  const Table child = {{{{2, 1}}, 10}};

  // One child at edge weight 3: identity rounding, 2*n*delta surcharge.
  auto g = subtree_dp_critical({{child, 3}}, 4, loose(4), {2});
  REQUIRE(g.size() == 1);
  CHECK(g.at({{2, 1}}) == 16);

  // Forced rounding to 4.
  g = subtree_dp_critical({{child, 3}}, 4, loose(4), {4});
  REQUIRE(g.size() == 1);
  CHECK(g.at({{4, 1}}) == 16);

  // Rounding with no candidate above the demand kills the configuration.
  const Table heavy = {{{{5, 1}}, 10}};
  g = subtree_dp_critical({{heavy, 0}}, 4, loose(4), {4});
  CHECK(g.empty());

  // Two children at zero distance: merged and unmerged variants coexist.
  const Table a = {{{{2, 1}}, 7}};
  const Table b = {{{{2, 1}}, 9}};
  g = subtree_dp_critical({{a, 0}, {b, 0}}, 4, loose(4), {2, 4});
  REQUIRE(g.size() == 2);          // rounding is least-upper, so only these
  CHECK(g.at({{4, 1}}) == 16);     // merged: padded 2+2 fits capacity 4
  CHECK(g.at({{2, 2}}) == 16);     // kept apart

  // Demand 3 rounds up to 4 under X = {2, 4}.
  const Table odd = {{{{3, 1}}, 5}};
  g = subtree_dp_critical({{odd, 1}}, 4, loose(4), {2, 4});
  REQUIRE(g.size() == 1);
  CHECK(g.at({{4, 1}}) == 7);
}

TEST_CASE("exhaustive candidate enumeration refuses to explode") {
  PtasParams p = loose(60);
  p.x_set_size = 10;
  const std::map<SumKey, Cost> child = {{{{1, 1}}, 0}};
  CHECK_THROWS_WITH_AS(subtree_dp_critical({{child, 0}}, 60, p, {}),
                       doctest::Contains("TREECVRP_XSET_BUDGET"), BudgetError);
}

TEST_CASE("caps so tight that nothing fits are reported, not mangled") {
  const Instance star = gen_star({1, 1}, 1);
  PtasParams p = PtasParams::vacuous(star);
  p.max_tours_per_component = 1;  // two tours are unavoidable at capacity 1
  CHECK_THROWS_WITH_AS(solve_ptas(star, p), doctest::Contains("caps are too tight"),
                       ValidationError);
  p.max_tours_per_component = 2;
  CHECK(solve_ptas(star, p).cost == 4);
}

TEST_CASE("vacuous caps reproduce the exact optimum across decompositions") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int nt = 2 + static_cast<int>(seed % 7);
    const std::int64_t k = 1 + static_cast<std::int64_t>(seed % 4);
    auto [norm, map] = normalize(gen_random(nt, k, 9, seed));
    const Cost opt = exact_partition_dp(norm).cost;
    PtasParams p = PtasParams::vacuous(norm);
    for (std::int64_t gamma : {std::int64_t{1}, std::int64_t{3}, k, 4 * k, p.gamma_k}) {
      p.gamma_k = gamma;
      PtasMeta meta;
      const Solution sol = solve_ptas(norm, p, &meta);
      CHECK(verify(norm, sol).feasible);
      CHECK(sol.cost == opt);
      CHECK(meta.hat_cost == sol.cost);  // width-1 reduction is lossless
      CHECK(meta.components >= 1);
      CHECK(meta.groups >= 1);
      CHECK(!meta.theory_guarantee);  // exactness here is not the proof regime
    }
  }
}

TEST_CASE("gap-family optima survive the full pipeline") {
  for (std::int64_t k : {3, 6}) {
    auto [norm, map] = normalize(gen_single_assignment_gap(k, 3));
    const Solution sol = solve_ptas(norm, PtasParams::vacuous(norm));
    CHECK(verify(norm, sol).feasible);
    CHECK(sol.cost == 4);
  }
}

TEST_CASE("faithful caps keep the promised ratio and set the guarantee flag") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const int nt = 2 + static_cast<int>(seed % 5);
    auto [norm, map] = normalize(gen_random(nt, 2, 6, seed));
    const Cost opt = exact_partition_dp(norm).cost;
    PtasMeta meta;
    const PtasParams p = PtasParams::from_epsilon(1, norm.capacity);
    const Solution sol = solve_ptas(norm, p, &meta);
    CHECK(verify(norm, sol).feasible);
    CHECK(meta.theory_guarantee);
    CHECK(sol.cost >= opt);
    CHECK(sol.cost <= 5 * opt);  // (1 + 4*eps) at eps = 1

    PtasParams bent = p;
    bent.gamma_k = 7;  // off the faithful value: no stated bound
    PtasMeta meta2;
    const Solution sol2 = solve_ptas(norm, bent, &meta2);
    CHECK(verify(norm, sol2).feasible);
    CHECK(!meta2.theory_guarantee);
  }
}

TEST_CASE("heuristic and grid candidate strategies stay feasible") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int nt = 3 + static_cast<int>(seed % 6);
    const std::int64_t k = 2 + static_cast<std::int64_t>(seed % 3);
    auto [norm, map] = normalize(gen_random(nt, k, 9, seed));
    const Cost opt = exact_partition_dp(norm).cost;
    for (XStrategy strat : {XStrategy::FromHeuristic, XStrategy::GeometricGrid}) {
      PtasParams p = PtasParams::vacuous(norm);
      p.x_strategy = strat;
      p.x_set_size = 2;
      PtasMeta meta;
      const Solution sol = solve_ptas(norm, p, &meta);
      CHECK(verify(norm, sol).feasible);
      CHECK(sol.cost >= opt);
      CHECK(meta.x_candidates >= 1);
    }
  }
}

TEST_CASE("solver demands a normalized instance; the any-shape wrapper copes") {
  const Instance wide = gen_star({1, 1, 4}, 2);
  CHECK_THROWS_AS(solve_ptas(wide, PtasParams::vacuous(wide)), ValidationError);
  const Solution sol = solve_ptas_any(wide, PtasParams::vacuous(wide));
  CHECK(verify(wide, sol).feasible);
  CHECK(sol.cost == 12);
}

TEST_CASE("single-terminal instance") {
  const Instance one = gen_star({5}, 1);
  const Solution sol = solve_ptas(one, PtasParams::vacuous(one));
  CHECK(sol.cost == 10);
  CHECK(sol.tours.size() == 1);
}

TEST_CASE("identical runs produce identical solutions") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto [norm, map] = normalize(gen_random(6, 3, 9, seed));
    const PtasParams p = PtasParams::vacuous(norm);
    const Solution a = solve_ptas(norm, p);
    const Solution b = solve_ptas(norm, p);
    CHECK(a == b);
    CHECK(write_solution(norm, a) == write_solution(norm, b));
  }
}
