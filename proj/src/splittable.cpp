#include "treecvrp/splittable.hpp"

#include <algorithm>
#include <string>

#include "treecvrp/errors.hpp"

namespace treecvrp {

std::pair<Instance, VertexMap> expand(const Instance& inst) {
  validate(inst);
  const std::int64_t budget = env_budget("TREECVRP_EXPAND_BUDGET", 1000000);
  const std::int64_t total = inst.total_demand();
  if (total > budget) {
    throw BudgetError("expand: total demand " + std::to_string(total) +
                      " exceeds the budget of " + std::to_string(budget) +
                      " (TREECVRP_EXPAND_BUDGET overrides); peel_full_tours can shrink "
                      "the demands first");
  }

  Instance out = inst;
  VertexMap map = identity_map(inst);
  for (int v = 0; v < inst.n(); ++v) {
    const std::int64_t d = inst.demand[v];
    if (d < 2) continue;
    out.demand[v] = 0;
    // Heap-shaped gadget: positions 1..2d-1, position 1 being v itself;
    // children of position i sit at 2i and 2i+1; positions d..2d-1 are the
    // leaves that inherit the demand one unit each.
    std::vector<int> pos_to_vertex(2 * d, -1);
    pos_to_vertex[1] = v;
    for (std::int64_t p = 2; p <= 2 * d - 1; ++p) {
      const int nv = out.n();
      pos_to_vertex[p] = nv;
      const int parent = pos_to_vertex[p / 2];
      out.parent.push_back(parent);
      out.weight.push_back(0);
      out.demand.push_back(p >= d ? 1 : 0);
      map.to_base.push_back(v);
      if (p == d) map.terminal_image[v] = nv;  // leftmost leaf stands for v
    }
  }
  validate(out);
  return {std::move(out), std::move(map)};
}

Solution contract_solution(const VertexMap& map, const Instance& original, const Solution& sol) {
  Solution merged = map_solution_to_base(map, original, sol);
  const VerifyReport rep = verify(original, merged);
  if (!rep.feasible) {
    std::string msg = "contract_solution: the folded solution is infeasible";
    for (const auto& v : rep.violations) msg += "; " + v.message;
    throw ValidationError(msg);
  }
  return merged;
}

Peeled peel_full_tours(const Instance& inst, std::int64_t threshold) {
  validate(inst);
  if (threshold < 0) throw ValidationError("peel_full_tours: threshold must be non-negative");
  const std::int64_t k = inst.capacity;
  const Distances dd = distances(inst);
  Peeled out;
  out.reduced = inst;
  for (int v = 0; v < inst.n(); ++v) {
    const std::int64_t d = inst.demand[v];
    if (d == 0) continue;
    // threshold * k may overflow for sentinel-sized thresholds; widen.
    if (static_cast<__int128>(d) <= static_cast<__int128>(threshold) * k) continue;
    const std::int64_t full = d / k;
    for (std::int64_t i = 0; i < full; ++i) {
      Tour t;
      t.claims.push_back({v, k});
      out.prepaid.push_back(std::move(t));
      out.prepaid_cost += 2 * dd.dist[v];
    }
    out.reduced.demand[v] = d - full * k;
  }
  return out;
}

}  // namespace treecvrp
