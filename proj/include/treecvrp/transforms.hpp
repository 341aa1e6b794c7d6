#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "treecvrp/decomposition.hpp"
#include "treecvrp/model.hpp"

namespace treecvrp {

// One part of the distance partition: the full tree with the terminal set
// restricted to one band group.
struct BandPart {
  std::string tag;        // "zero", "near:<j>" (single band) or "far:<j>" (band run)
  Instance sub;           // same tree, terminals restricted
  std::int64_t terminals = 0;
};

// Groups terminals by root distance into geometric bands
// [band_base^i, band_base^(i+1)) and assembles them into the band-offset
// partition: bands congruent to `offset` (mod band_base) stand alone, the
// runs between them are merged.  Zero-distance terminals form their own
// "zero" part since they have no band index.  Every terminal lands in
// exactly one part; each non-zero part has
// max distance < band_base^(band_base-1) * min distance.
std::vector<BandPart> split_by_distance(const Instance& inst, std::int64_t band_base,
                                        std::int64_t offset);

using SubSolver = std::function<Solution(const Instance&)>;

// Solves each band part separately and concatenates: zero-distance terminals
// are served by dedicated zero-cost tours, each remaining part goes to the
// sub-solver.  All band offsets are tried and the cheapest union returned
// (ties towards the smaller offset).  With an exact sub-solver the result
// costs at most (1 + 5/band_base) times the optimum.
Solution solve_banded(const Instance& inst, std::int64_t band_base,
                      const SubSolver& solve);

// Same, but a single offset drawn from the seed instead of the best one;
// exists for benchmarking the derandomization gap.
Solution solve_banded_random(const Instance& inst, std::int64_t band_base,
                             const SubSolver& solve, std::uint64_t seed);

// Height reduction: components whose roots fall in the same distance class
// (width class_width) and touch each other are re-hung directly below the
// class's topmost component root ("anchor"), with a fresh copy of each moved
// component root attached by an edge of weight equal to the original
// root-to-anchor distance.  Per-vertex root distances are preserved exactly;
// any solution on the result maps back to the original tree without cost
// increase; the component edge sets are untouched.
struct ComponentPlacement {
  int anchor = -1;        // vertex the component hangs from in the new tree
  Cost attach_weight = 0; // weight of the fresh edge; 0 for unmoved components
  int hat_root = -1;      // component root in the new tree (fresh copy if moved)
  std::int64_t dist_class = 0;
  int group = -1;         // connected same-class group id
};

struct HatTree {
  Instance hat;
  VertexMap map;                      // hat -> original
  Cost class_width = 0;
  std::vector<ComponentPlacement> placement;  // per component id
  std::vector<int> anchors;                   // distinct anchor vertices, ascending
};

HatTree build_hat_tree(const Instance& inst, const Decomposition& dec, Cost class_width);

// Faithful default class width derived from the solver epsilon, in scaled
// units: (1/inv_eps)^(inv_eps+2) * min positive terminal distance, clamped
// to at least 1.
Cost default_class_width(const Instance& inst, std::int64_t inv_eps);

// Maps a feasible solution on the reduced tree back to the original
// instance.  Claims keep their identity (terminals are never copied); costs
// are recomputed and can only shrink.  Throws if `sol` is infeasible on the
// reduced tree.
Solution lift_solution(const HatTree& hat, const Instance& original, const Solution& sol);

}  // namespace treecvrp
