#include "treecvrp/bounds.hpp"

#include <algorithm>

namespace treecvrp {

std::vector<std::int64_t> edge_loads(const Instance& inst) {
  // Accumulate demands bottom-up; process vertices in an order where every
  // child precedes its parent (ids are arbitrary, so build a post-order).
  const int n = inst.n();
  std::vector<std::int64_t> load(inst.demand.begin(), inst.demand.end());
  auto ch = children_of(inst);
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack = {inst.root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int c : ch[v]) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (*it != inst.root) load[inst.parent[*it]] += load[*it];
  }
  return load;
}

Rational lb_edge(const Instance& inst, EdgeBoundMode mode) {
  validate(inst);
  auto load = edge_loads(inst);
  if (mode == EdgeBoundMode::Fractional) {
    __int128 acc = 0;  // sum of w(e) * load(e), scaled
    for (int v = 0; v < inst.n(); ++v) {
      if (v == inst.root) continue;
      acc += (__int128)inst.weight[v] * load[v];
    }
    return Rational::from_int128(2 * acc, (__int128)inst.capacity * inst.scale);
  }
  __int128 acc = 0;  // sum of w(e) * ceil(load/capacity), scaled
  for (int v = 0; v < inst.n(); ++v) {
    if (v == inst.root) continue;
    std::int64_t trips = (load[v] + inst.capacity - 1) / inst.capacity;
    acc += (__int128)inst.weight[v] * trips;
  }
  return Rational::from_int128(2 * acc, inst.scale);
}

Rational lb_radial(const Instance& inst) {
  validate(inst);
  auto d = inst.total_demand() > 0 ? distances(inst) : Distances{};
  if (inst.total_demand() == 0) return Rational(0);
  __int128 acc = 0;  // sum of demand(v) * dist(v), scale^1 units
  for (int v = 0; v < inst.n(); ++v) {
    if (inst.demand[v] > 0) acc += (__int128)inst.demand[v] * d.dist[v];
  }
  return Rational::from_int128(2 * acc, (__int128)inst.capacity * inst.scale);
}

Cost tree_tsp_cost_scaled(const Instance& inst, const std::vector<int>& subset) {
  Tour t;
  for (int v : subset) {
    if (v < 0 || v >= inst.n()) throw ValidationError("tree_tsp_cost: vertex out of range");
    t.claims.push_back({v, 1});
  }
  return tour_cost(inst, t);
}

Rational tree_tsp_cost(const Instance& inst, const std::vector<int>& subset) {
  return Rational(tree_tsp_cost_scaled(inst, subset), inst.scale);
}

}  // namespace treecvrp
