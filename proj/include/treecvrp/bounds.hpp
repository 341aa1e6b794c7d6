#pragma once

#include <vector>

#include "treecvrp/model.hpp"

namespace treecvrp {

// Demand strictly below each edge; the edge is identified by its child
// vertex.  load[root] is the whole demand and unused by the bounds.
std::vector<std::int64_t> edge_loads(const Instance& inst);

enum class EdgeBoundMode { Fractional, Ceiling };

// Load-based lower bound on the optimal cost, in true (unscaled) units:
//   fractional: sum over edges of 2 * w(e) * load(e) / capacity
//   ceiling:    sum over edges of 2 * w(e) * ceil(load(e) / capacity)
// Both are valid lower bounds; the ceiling form is tight at capacity 1.
Rational lb_edge(const Instance& inst, EdgeBoundMode mode);

// Radial lower bound (2/capacity) * sum over vertices of demand * root
// distance.  On trees this coincides exactly with the fractional edge bound;
// it is computed independently so tests can assert that identity.
Rational lb_radial(const Instance& inst);

// Cost of serving a vertex subset with one tour ignoring capacity: twice the
// weight of the minimal subtree spanning the root and the subset.  True units.
Rational tree_tsp_cost(const Instance& inst, const std::vector<int>& subset);

// Same, in scaled units (handy for exact comparisons against tour costs).
Cost tree_tsp_cost_scaled(const Instance& inst, const std::vector<int>& subset);

}  // namespace treecvrp
