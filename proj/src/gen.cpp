#include "treecvrp/gen.hpp"

#include <algorithm>
#include <functional>

#include "treecvrp/bounds.hpp"

namespace treecvrp {

std::uint64_t Rng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling keeps the distribution exactly uniform.
  std::uint64_t limit = ~0ULL - ~0ULL % bound;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % bound;
}

std::int64_t Rng::range(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
}

namespace {

struct TreeSketch {
  std::vector<int> parent;
  std::vector<Cost> weight;
  std::vector<std::int64_t> demand;

  int add(int par, Cost w, std::int64_t d) {
    parent.push_back(par);
    weight.push_back(w);
    demand.push_back(d);
    return static_cast<int>(parent.size()) - 1;
  }

  Instance finish(std::int64_t capacity) {
    Instance inst;
    inst.root = 0;
    inst.parent = std::move(parent);
    inst.weight = std::move(weight);
    inst.demand = std::move(demand);
    inst.capacity = capacity;
    inst.scale = 1;
    validate(inst);
    return inst;
  }
};

}  // namespace

Instance gen_random(int terminals, std::int64_t capacity, std::int64_t max_weight,
                    std::uint64_t seed) {
  if (terminals < 1) throw ValidationError("gen_random needs at least one terminal");
  if (max_weight < 0) throw ValidationError("negative max weight");
  Rng rng(seed);
  TreeSketch t;
  t.add(-1, 0, 0);  // root

  auto weight = [&]() -> Cost {
    // A fifth of the edges are zero so zero-distance and tie paths get hit.
    if (max_weight == 0 || rng.below(5) == 0) return 0;
    return rng.range(1, max_weight);
  };

  // Recursively split `count` terminals below vertex `at`.
  std::function<void(int, int)> grow = [&](int at, int count) {
    if (count == 1) {
      t.add(at, weight(), 1);
      return;
    }
    // Either attach a terminal here and recurse, or split in two.
    if (count >= 2 && rng.below(3) == 0) {
      t.add(at, weight(), 1);
      int mid = t.add(at, weight(), 0);
      grow(mid, count - 1);
      return;
    }
    int left = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(count - 1)));
    int lv = t.add(at, weight(), 0);
    int rv = t.add(at, weight(), 0);
    grow(lv, left);
    grow(rv, count - left);
  };
  grow(0, terminals);
  return t.finish(capacity);
}

Instance gen_caterpillar(int terminals, int arms, std::int64_t capacity) {
  if (arms != 1 && arms != 2) throw ValidationError("caterpillar arms must be 1 or 2");
  if (terminals < 2 * arms) throw ValidationError("caterpillar needs at least two terminals per arm");
  if (terminals % arms != 0) throw ValidationError("terminals must divide evenly across arms");
  TreeSketch t;
  t.add(-1, 0, 0);
  const int per_arm = terminals / arms;
  for (int a = 0; a < arms; ++a) {
    // Spine of per_arm-1 vertices; a leaf under each; an extra leaf at the tip.
    int at = 0;
    for (int i = 0; i < per_arm - 1; ++i) {
      int spine = t.add(at, 1, 0);
      t.add(spine, 1, 1);
      at = spine;
    }
    t.add(at, 1, 1);
  }
  return t.finish(capacity);
}

Instance gen_star(const std::vector<std::int64_t>& leaf_weights, std::int64_t capacity) {
  if (leaf_weights.empty()) throw ValidationError("star needs at least one leaf");
  TreeSketch t;
  t.add(-1, 0, 0);
  for (std::int64_t w : leaf_weights) {
    if (w < 0) throw ValidationError("negative leaf weight");
    t.add(0, w, 1);
  }
  return t.finish(capacity);
}

Instance gen_single_assignment_gap(std::int64_t capacity, int groups) {
  if (capacity < 1) throw ValidationError("capacity must be at least 1");
  if (groups < 1) throw ValidationError("groups must be at least 1");
  if ((2 * capacity) % groups != 0) {
    throw ValidationError("2*capacity must be divisible by the group count");
  }
  const std::int64_t per_group = 2 * capacity / groups;
  TreeSketch t;
  t.add(-1, 0, 0);
  int hub = t.add(0, 1, 0);
  for (int g = 0; g < groups; ++g) {
    int head = t.add(hub, 0, 0);
    for (std::int64_t i = 0; i < per_group; ++i) t.add(head, 0, 1);
  }
  return t.finish(capacity);
}

Cost restricted_cluster_optimum(const Instance& inst) {
  // Clusters are the subtrees under the hub (the root's single child).
  auto ch = children_of(inst);
  if (ch[inst.root].size() != 1) throw ValidationError("not a gap-family instance");
  int hub = ch[inst.root][0];
  std::vector<std::int64_t> cluster;  // demand per cluster
  for (int head : ch[hub]) {
    std::int64_t d = 0;
    for (int leaf : ch[head]) d += inst.demand[leaf];
    cluster.push_back(d);
  }
  const int m = static_cast<int>(cluster.size());
  if (m > 20) throw BudgetError("restricted_cluster_optimum limited to 20 clusters");
  // Minimal number of tours over set partitions with per-part demand <= k;
  // each tour costs 2 (the unit edge twice).  Subset-cover DP.
  const int full = (1 << m) - 1;
  std::vector<std::int64_t> dsum(full + 1, 0);
  for (int mask = 1; mask <= full; ++mask) {
    int low = mask & -mask;
    int idx = __builtin_ctz(static_cast<unsigned>(low));
    dsum[mask] = dsum[mask ^ low] + cluster[idx];
  }
  std::vector<int> best(full + 1, m + 1);
  best[0] = 0;
  for (int mask = 1; mask <= full; ++mask) {
    for (int sub = mask; sub != 0; sub = (sub - 1) & mask) {
      if (dsum[sub] <= inst.capacity) {
        best[mask] = std::min(best[mask], best[mask ^ sub] + 1);
      }
    }
  }
  if (best[full] > m) throw ValidationError("a cluster exceeds the capacity");
  // Every tour pays the root-to-hub edge in both directions; the rest is free.
  return static_cast<Cost>(2 * best[full]) * inst.weight[hub];
}

}  // namespace treecvrp
