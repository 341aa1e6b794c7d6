#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "treecvrp/baselines.hpp"
#include "treecvrp/bounds.hpp"
#include "treecvrp/gen.hpp"
#include "treecvrp/model.hpp"

using namespace treecvrp;

TEST_CASE("rng is stable across runs and platforms") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  // First outputs of splitmix64 at seed 0 are fixed by the algorithm.
  Rng zero(0);
  CHECK(zero.next() == 0xE220A8397B1DCDAFull);
  CHECK(zero.next() == 0x6E789E6AA1B965F4ull);
}

TEST_CASE("random instances are valid, unit-demand, and seed-determined") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance a = gen_random(8, 3, 9, seed);
    const Instance b = gen_random(8, 3, 9, seed);
    CHECK(a == b);
    validate(a);
    CHECK(a.unit_demand());
    CHECK(a.terminals().size() == 8);
    CHECK(a.capacity == 3);
  }
  CHECK(gen_random(8, 3, 9, 1) != gen_random(8, 3, 9, 2));
}

TEST_CASE("caterpillar shape") {
  const Instance cat = gen_caterpillar(10, 2, 3);
  validate(cat);
  CHECK(cat.terminals().size() == 10);
  CHECK(cat.capacity == 3);
  // Every edge has unit weight.
  for (int v = 0; v < cat.n(); ++v) {
    if (v != cat.root) CHECK(cat.weight[v] == 1);
  }
  CHECK_THROWS(gen_caterpillar(9, 2, 3));  // terminals must split across arms
}

TEST_CASE("star shape") {
  const Instance star = gen_star({1, 1, 4}, 2);
  CHECK(star.n() == 4);
  for (int v = 1; v <= 3; ++v) {
    CHECK(star.parent[v] == 0);
    CHECK(star.is_terminal(v));
  }
  CHECK(star.weight == std::vector<Cost>({0, 1, 1, 4}));
}

TEST_CASE("single-assignment gap family: split beats cluster-faithful service") {
  for (std::int64_t k : {3, 6, 9}) {
    const Instance gap = gen_single_assignment_gap(k, 3);
    validate(gap);
    CHECK(gap.total_demand() == 2 * k);
    CHECK(gap.capacity == k);
    // All terminals sit at distance 1 behind the single hub edge.
    const auto d = distances(gap);
    CHECK(d.d_min == 1);
    CHECK(d.d_max == 1);
    // Exactly three clusters of 2k/3 zero-distance terminals, where a
    // cluster is everything hanging below one child of the hub.
    const auto kids = children_of(gap);
    REQUIRE(kids[gap.root].size() == 1);
    const int hub = kids[gap.root][0];
    std::map<int, int> cluster_sizes;
    for (int t : gap.terminals()) {
      int u = t;
      while (gap.parent[u] != hub) u = gap.parent[u];
      cluster_sizes[u]++;
    }
    CHECK(cluster_sizes.size() == 3);
    for (const auto& [r, size] : cluster_sizes) CHECK(size == 2 * k / 3);
  }

  // k=3: two full tours of 3 cost 4; one-cluster-per-tour forces 3 tours.
  const Instance gap3 = gen_single_assignment_gap(3, 3);
  CHECK(exact_partition_dp(gap3).cost == 4);
  CHECK(restricted_cluster_optimum(gap3) == 6);
  CHECK_THROWS(gen_single_assignment_gap(4, 3));  // 2k must split into groups
}

TEST_CASE("restricted optimum never undercuts the true optimum") {
  for (std::int64_t k : {3, 6}) {
    const Instance gap = gen_single_assignment_gap(k, 3);
    CHECK(restricted_cluster_optimum(gap) >= exact_partition_dp(gap).cost);
  }
}
