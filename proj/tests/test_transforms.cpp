#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "treecvrp/baselines.hpp"
#include "treecvrp/bounds.hpp"
#include "treecvrp/decomposition.hpp"
#include "treecvrp/gen.hpp"
#include "treecvrp/model.hpp"
#include "treecvrp/transforms.hpp"

using namespace treecvrp;

namespace {

std::int64_t ipow(std::int64_t b, std::int64_t e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Exact optimum of the instance restricted to the given terminals.
Cost restricted_opt(const Instance& inst, const std::vector<int>& keep) {
  Instance sub = inst;
  std::set<int> keep_set(keep.begin(), keep.end());
  for (int v = 0; v < sub.n(); ++v) {
    if (!keep_set.count(v)) sub.demand[v] = 0;
  }
  if (sub.total_demand() == 0) return 0;
  return exact_partition_dp(sub).cost;
}

}  // namespace

TEST_CASE("distance split: three spread-out terminals, base two, offset zero") {
  const Instance star = gen_star({1, 2, 5}, 2);
  const auto parts = split_by_distance(star, 2, 0);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].tag == "near:0");
  CHECK(parts[0].sub.terminals() == std::vector<int>({1}));
  CHECK(parts[1].tag == "far:0");
  CHECK(parts[1].sub.terminals() == std::vector<int>({2}));
  CHECK(parts[2].tag == "near:1");
  CHECK(parts[2].sub.terminals() == std::vector<int>({3}));
  for (const auto& p : parts) CHECK(p.terminals == 1);
}

TEST_CASE("distance split partitions terminals for every offset") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = gen_random(3 + static_cast<int>(seed % 8), 3, 50, seed);
    for (std::int64_t base : {2, 3, 4}) {
      for (std::int64_t offset = 0; offset < base; ++offset) {
        const auto parts = split_by_distance(inst, base, offset);
        std::vector<int> seen;
        for (const auto& p : parts) {
          const auto sub_terms = p.sub.terminals();
          CHECK(static_cast<std::int64_t>(sub_terms.size()) == p.terminals);
          seen.insert(seen.end(), sub_terms.begin(), sub_terms.end());
          // Restricted instances share the tree shape of the original.
          CHECK(p.sub.parent == inst.parent);
          CHECK(p.sub.weight == inst.weight);
        }
        std::sort(seen.begin(), seen.end());
        CHECK(seen == inst.terminals());
      }
    }
  }
}

TEST_CASE("every split part spans less than the guaranteed distance ratio") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Instance inst = gen_random(3 + static_cast<int>(seed % 8), 3, 50, seed);
    for (std::int64_t base : {2, 3, 4}) {
      for (std::int64_t offset = 0; offset < base; ++offset) {
        for (const auto& p : split_by_distance(inst, base, offset)) {
          if (p.tag == "zero") {
            for (int t : p.sub.terminals()) CHECK(distances(inst).dist[t] == 0);
            continue;
          }
          const auto d = distances(p.sub);
          CHECK(d.d_min > 0);
          CHECK(d.d_max < d.d_min * ipow(base, base - 1));
        }
      }
    }
  }
}

TEST_CASE("per-band optima sum to at most twice (1+eps) the optimum") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Instance inst = gen_random(3 + static_cast<int>(seed % 6), 3, 40, seed);
    const Solution opt = exact_partition_dp(inst);
    const auto d = distances(inst);
    for (std::int64_t base : {2, 3}) {
      // Group terminals by raw geometric band [base^i, base^(i+1)).
      std::map<std::int64_t, std::vector<int>> bands;
      for (int t : inst.terminals()) {
        std::int64_t idx = 0;
        if (d.dist[t] > 0) {
          idx = 0;
          while (ipow(base, idx + 1) <= d.dist[t]) ++idx;
          ++idx;  // shift so that zero-distance terminals keep index 0
        }
        bands[idx].push_back(t);
      }
      Cost sum = 0;
      for (const auto& [idx, terms] : bands) sum += restricted_opt(inst, terms);
      CHECK(base * sum <= 2 * (base + 1) * opt.cost);
    }
  }
}

TEST_CASE("banded solve with an exact helper keeps the promised ratio") {
  const SubSolver exact = [](const Instance& sub) { return exact_partition_dp(sub); };
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Instance inst = gen_random(3 + static_cast<int>(seed % 6), 3, 30, seed);
    const Cost opt = exact_partition_dp(inst).cost;
    for (std::int64_t base : {2, 3, 4}) {
      const Solution sol = solve_banded(inst, base, exact);
      CHECK(verify(inst, sol).feasible);
      CHECK(sol.cost >= opt);
      CHECK(base * sol.cost <= (base + 5) * opt);
    }
  }
}

TEST_CASE("banded solve is exact when one band holds everything") {
  // Distances 8..11 share band [8,16) at base 2.
  const Instance star = gen_star({8, 9, 10, 11}, 2);
  const SubSolver exact = [](const Instance& sub) { return exact_partition_dp(sub); };
  CHECK(solve_banded(star, 2, exact).cost == exact_partition_dp(star).cost);
}

TEST_CASE("zero-distance terminals ride along for free") {
  const Instance star = gen_star({0, 0, 3}, 2);
  const SubSolver exact = [](const Instance& sub) { return exact_partition_dp(sub); };
  const Solution sol = solve_banded(star, 2, exact);
  CHECK(verify(star, sol).feasible);
  CHECK(sol.cost == exact_partition_dp(star).cost);
}

TEST_CASE("random-offset banding is feasible and never beats the best offset") {
  const SubSolver exact = [](const Instance& sub) { return exact_partition_dp(sub); };
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = gen_random(4 + static_cast<int>(seed % 5), 3, 30, seed);
    const Solution best = solve_banded(inst, 3, exact);
    const Solution rnd = solve_banded_random(inst, 3, exact, seed * 13);
    CHECK(verify(inst, rnd).feasible);
    CHECK(rnd.cost >= best.cost);
  }
}

TEST_CASE("height reduction on a long one-arm caterpillar") {
  auto [norm, nmap] = normalize(gen_caterpillar(10, 1, 3));
  REQUIRE(norm.n() == 20);
  const Decomposition dec = decompose(norm, 3);
  REQUIRE(dec.components.size() == 4);
  const HatTree hat = build_hat_tree(norm, dec, 4);

  // One component root moves: it gains a copy vertex re-hung at the depot
  // with an edge carrying its full original distance (2).
  CHECK(hat.hat.n() == norm.n() + 1);
  CHECK(hat.class_width == 4);
  CHECK(hat.anchors == std::vector<int>({0, 9, 15}));

  int moved = 0;
  const auto dnorm = distances(norm);
  for (std::size_t c = 0; c < hat.placement.size(); ++c) {
    const auto& pl = hat.placement[c];
    const int r = dec.components[c].root;
    CHECK(pl.dist_class == dnorm.dist[r] / 4 + 1);
    if (pl.hat_root != r) {
      ++moved;
      CHECK(pl.hat_root >= norm.n());
      CHECK(pl.attach_weight == dnorm.dist[r]);
      CHECK(hat.hat.parent[pl.hat_root] == pl.anchor);
      CHECK(hat.hat.weight[pl.hat_root] == pl.attach_weight);
      CHECK(hat.map.to_base[pl.hat_root] == r);
    } else {
      CHECK(pl.attach_weight == 0);
      CHECK(pl.anchor == r);
    }
  }
  CHECK(moved == 1);
  CHECK(hat.placement[2].attach_weight == 2);
  CHECK(hat.placement[2].anchor == 0);
  CHECK(hat.placement[2].group == hat.placement[3].group);

  // The vacated original root stays behind as a closed, demand-free leaf.
  const int old_root = dec.components[2].root;
  CHECK(children_of(hat.hat)[old_root].empty());
  CHECK(!hat.hat.is_terminal(old_root));
}

TEST_CASE("height reduction without movement is the identity") {
  const Instance star = gen_star({1, 4}, 2);
  const Decomposition dec = decompose(star, 100);
  const HatTree hat = build_hat_tree(star, dec, 1);
  CHECK(hat.hat == star);
  CHECK(hat.placement.size() == 1);
  CHECK(hat.placement[0].attach_weight == 0);
}

TEST_CASE("height reduction preserves terminal distances and component edges") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto [norm, nmap] = normalize(gen_random(3 + static_cast<int>(seed % 9), 3, 9, seed));
    for (std::int64_t gamma : {2, 3}) {
      const Decomposition dec = decompose(norm, gamma);
      for (Cost width : {Cost{1}, Cost{3}, default_class_width(norm, 4)}) {
        const HatTree hat = build_hat_tree(norm, dec, width);
        validate(hat.hat);
        const auto dh = distances(hat.hat);
        const auto dn = distances(norm);
        for (int t : norm.terminals()) {
          CHECK(hat.hat.is_terminal(t));
          CHECK(dh.dist[t] >= dn.dist[t]);
          CHECK(dh.dist[t] == dn.dist[t]);  // this construction is lossless
        }
        // Component edge sets survive untouched: same edges, same weights,
        // same parents except where the component root was replaced.
        for (const auto& c : dec.components) {
          const int hat_root = hat.placement[c.id].hat_root;
          for (int e : c.edges) {
            CHECK(hat.hat.weight[e] == norm.weight[e]);
            const int expect = norm.parent[e] == c.root ? hat_root : norm.parent[e];
            CHECK(hat.hat.parent[e] == expect);
          }
        }
        // Groups hang below their anchor at the anchor's distance class.
        for (std::size_t c = 0; c < hat.placement.size(); ++c) {
          const auto& pl = hat.placement[c];
          const auto& anchor_pl =
              hat.placement[std::find_if(hat.placement.begin(), hat.placement.end(),
                                         [&](const ComponentPlacement& q) {
                                           return q.hat_root == pl.anchor;
                                         }) -
                            hat.placement.begin()];
          CHECK(anchor_pl.group == pl.group);
        }
      }
    }
  }
}

TEST_CASE("solutions on the reduced tree lift back at no extra cost") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto [norm, nmap] = normalize(gen_random(3 + static_cast<int>(seed % 8), 3, 9, seed));
    const Decomposition dec = decompose(norm, 2);
    const HatTree hat = build_hat_tree(norm, dec, 2);
    for (const Solution& hat_sol : {itp(hat.hat), exact_partition_dp(hat.hat)}) {
      const Solution lifted = lift_solution(hat, norm, hat_sol);
      CHECK(verify(norm, lifted).feasible);
      CHECK(lifted.cost <= hat_sol.cost);
    }
    // Lifting rejects garbage.
    Solution junk;
    junk.tours = {unit_tour({norm.root})};
    CHECK_THROWS(lift_solution(hat, norm, junk));
  }
}

TEST_CASE("reduced-tree optimum equals the original optimum at width one") {
  // Width-one classes make every re-hang distance-exact, so the reduction
  // cannot change the optimal cost.
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto [norm, nmap] = normalize(gen_random(3 + static_cast<int>(seed % 7), 3, 8, seed));
    const Decomposition dec = decompose(norm, 2);
    const HatTree hat = build_hat_tree(norm, dec, 1);
    CHECK(exact_partition_dp(hat.hat).cost == exact_partition_dp(norm).cost);
  }
}

TEST_CASE("default class width scales the smallest positive terminal distance") {
  const Instance star = gen_star({32, 64}, 2);
  CHECK(default_class_width(star, 2) == 2);   // 32 / 2^4
  CHECK(default_class_width(star, 3) == 1);   // 32 / 3^5 clamps to 1
  const Instance mixed = gen_star({0, 8}, 2);
  CHECK(default_class_width(mixed, 2) == 1);  // 8 / 16 clamps to 1
}
