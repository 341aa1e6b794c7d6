#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "treecvrp/errors.hpp"
#include "treecvrp/rational.hpp"

namespace treecvrp {

// Costs are exact integers in units of 1/scale; every weight of an instance
// shares the one denominator, so sums and comparisons stay integral.
using Cost = std::int64_t;

// Rooted tree with demands at terminals and a tour capacity.  Vertices are
// 0..n-1; each non-root vertex stores its parent and the weight of the edge
// towards it.  Instances are treated as immutable once built: every transform
// returns a fresh instance plus a vertex map.
struct Instance {
  int root = 0;
  std::vector<int> parent;           // parent[root] == -1
  std::vector<Cost> weight;          // weight[v] = scaled weight of edge (parent[v], v)
  std::vector<std::int64_t> demand;  // 0 marks a non-terminal
  std::int64_t capacity = 1;
  std::int64_t scale = 1;            // weights are multiples of 1/scale

  int n() const { return static_cast<int>(parent.size()); }
  bool is_terminal(int v) const { return demand[v] > 0; }
  std::vector<int> terminals() const;
  std::int64_t total_demand() const;
  bool unit_demand() const;

  bool operator==(const Instance&) const = default;
};

// Structural sanity: parent pointers form one tree rooted at `root`,
// weights are non-negative, demands non-negative, capacity >= 1.
// Throws ValidationError otherwise.
void validate(const Instance& inst);

// Children lists, each sorted ascending by vertex id.  That order is the
// canonical child order everywhere (DFS, binarization, tie-breaks).
std::vector<std::vector<int>> children_of(const Instance& inst);

// Normal form: unit demands, every leaf is a terminal, every terminal is a
// leaf, and every internal vertex other than the root has exactly two
// children (the root keeps one or two).
bool is_normalized(const Instance& inst);

// Relates the vertices of a transformed instance back to the instance it was
// built from.  `to_base[v]` gives the originating base vertex of transformed
// vertex v; `terminal_image[t]` gives, for each base terminal t, the
// transformed terminal now carrying its demand (-1 elsewhere).
struct VertexMap {
  std::vector<int> to_base;
  std::vector<int> terminal_image;
};

VertexMap identity_map(const Instance& inst);

// Composes a base->mid map with a mid->out map into a base->out map.
VertexMap compose(const VertexMap& base_to_mid, const VertexMap& mid_to_out);

// Rewrites an instance into normal form: internal terminals get a zero-weight
// leaf carrying their demand, non-terminal leaves are pruned, non-root
// degree-two vertices are spliced out (weights added), and vertices with more
// than two children are split into a zero-weight binary chain.  Optimal cost
// is preserved exactly.  Requires unit demands and at least one terminal.
std::pair<Instance, VertexMap> normalize(const Instance& inst);

// One vehicle trip: the set of (terminal, units) it serves.  The walk itself
// is implicit; the canonical cost below is the cheapest realization.
struct Claim {
  int v = 0;
  std::int64_t units = 0;
  auto operator<=>(const Claim&) const = default;
};

struct Tour {
  std::vector<Claim> claims;  // canonical order: ascending by vertex
  std::int64_t total_units() const;
  bool operator==(const Tour&) const = default;
};

struct Solution {
  std::vector<Tour> tours;
  Cost cost = 0;  // scaled; sum of canonical tour costs
  bool operator==(const Solution&) const = default;
};

// Canonical cost of a tour: twice the weight of the minimal subtree spanning
// the root and all claimed vertices.  Scaled units.
Cost tour_cost(const Instance& inst, const Tour& tour);

Cost solution_cost(const Instance& inst, const Solution& sol);

struct Violation {
  enum class Kind { Claim, Capacity, Coverage, Cost };
  Kind kind;
  int tour;  // index into tours, or -1 for whole-solution issues
  std::string message;
};

struct VerifyReport {
  bool feasible = false;
  std::vector<Violation> violations;
  Cost total_cost = 0;  // recomputed, not trusted from the input
};

// Full feasibility check: claims hit existing terminals with positive units,
// per-tour units fit the capacity, every terminal's demand is covered
// exactly, and the recorded cost matches the recomputed canonical cost.
VerifyReport verify(const Instance& inst, const Solution& sol);

struct Distances {
  std::vector<Cost> dist;  // root distance per vertex, scaled
  Cost d_min = 0;          // over terminals with positive distance handled by callers
  Cost d_max = 0;          // both over all terminals
};

// Root distances for all vertices plus min/max over terminals.
// Throws EmptyInstanceError when the instance has no terminal.
Distances distances(const Instance& inst);

// Maps a solution on a transformed instance back onto its base instance:
// claims are renamed through `to_base`, claims landing on one base terminal
// are merged, and costs are recomputed on the base instance.
Solution map_solution_to_base(const VertexMap& map, const Instance& base,
                              const Solution& sol);

}  // namespace treecvrp
