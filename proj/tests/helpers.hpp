#pragma once

#include <vector>

#include "treecvrp/model.hpp"

namespace treecvrp {

// Builds a validated instance from parallel vectors; parents[root] must be -1.
inline Instance make_instance(std::vector<int> parents, std::vector<Cost> weights,
                              std::vector<std::int64_t> demands, std::int64_t capacity,
                              std::int64_t scale = 1) {
  Instance inst;
  inst.parent = std::move(parents);
  inst.weight = std::move(weights);
  inst.demand = std::move(demands);
  inst.capacity = capacity;
  inst.scale = scale;
  validate(inst);
  return inst;
}

// One tour claiming the given terminals with one unit each.
inline Tour unit_tour(std::vector<int> vertices) {
  Tour t;
  for (int v : vertices) t.claims.push_back({v, 1});
  return t;
}

}  // namespace treecvrp
