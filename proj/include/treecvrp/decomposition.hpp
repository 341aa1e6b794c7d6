#pragma once

#include <string>
#include <vector>

#include "treecvrp/model.hpp"

namespace treecvrp {

// One block of the edge partition.  Edges are named by their child vertex.
// `root` is the component vertex closest to the depot; internal components
// additionally have an exit vertex where deeper components attach.
struct Component {
  enum class Kind { Leaf, Internal };
  int id = -1;
  Kind kind = Kind::Leaf;
  int root = -1;
  int exit = -1;               // -1 for leaf components
  std::vector<int> edges;      // child vertex per edge, ascending
  std::int64_t demand = 0;     // terminals covered by the component's edges
  Cost spine_weight = 0;       // one-way root->exit weight, 0 for leaf kind
};

struct Decomposition {
  std::int64_t gamma_k = 0;              // demand threshold used to build it
  std::vector<Component> components;
  std::vector<int> edge_component;       // per vertex: component owning its parent edge (-1 at root)
  std::vector<int> key_vertices;         // ascending
  std::vector<char> big;                 // per component: demand >= gamma_k
  std::vector<int> big_image;            // per component: the big component it is charged to
};

// Splits a normalized instance into leaf components (maximal subtrees whose
// demand first reaches gamma_k) and internal components peeled bottom-up
// between consecutive key vertices.  In a multi-component decomposition every
// component has demand below 2*gamma_k, leaf components have demand at least
// gamma_k, and every component is charged to a big descendant-or-self
// component with at most three charges per big component.  When no subtree
// reaches gamma_k the whole tree is one leaf component.
Decomposition decompose(const Instance& inst, std::int64_t gamma_k);

struct DecompositionCheck {
  bool ok = false;
  std::vector<std::string> violations;
};

// Independent structural verification of a decomposition against an
// instance: the edge partition is total and consistent, components are
// connected with correctly recorded roots/exits/kinds/spines, non-root
// non-exit vertices touch only their own component, demand bounds hold, the
// charging map points to big descendant-or-self components with at most
// three charges each, and gamma_k * |components| <= 3 * total demand.  The
// demand bounds and charging are specific to multi-component decompositions
// and are skipped for the single-component degenerate case.
DecompositionCheck check_decomposition(const Instance& inst, const Decomposition& dec);

// Sum of root distances over all components, scaled units.  The load bound
// dominates it: gamma_k * sum <= 3 * sum over edges of weight * load.
Cost sum_component_root_distances(const Instance& inst, const Decomposition& dec);

// For every vertex: number of children minus one, summed; at most the leaf
// count minus one on any tree.  Exposed for the transform tests.
std::int64_t sum_extra_children(const Instance& inst);

}  // namespace treecvrp
