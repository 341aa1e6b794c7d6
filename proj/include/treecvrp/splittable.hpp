#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "treecvrp/model.hpp"

namespace treecvrp {

// Reduces a splittable-demand instance to a unit-demand one: every terminal
// v with demand d >= 2 keeps its position but hands its demand to a complete
// binary tree of d zero-weight leaves grown under it (heap-shaped, so the
// last level is filled left to right; leaves are numbered in heap order).
// Optimal costs match exactly because the gadget edges are free.  The
// expanded instance has at most 2 * total_demand extra vertices; expansions
// beyond the budget (default 1000000, TREECVRP_EXPAND_BUDGET overrides)
// throw BudgetError and suggest peel_full_tours.
std::pair<Instance, VertexMap> expand(const Instance& inst);

// Folds a solution of the expanded instance back: claims on gadget leaves
// merge into one (v, units) claim per tour.  The merged solution is verified
// against the original instance; an infeasible input surfaces as
// ValidationError.  Cost is recomputed and, by the zero-weight construction,
// unchanged.
Solution contract_solution(const VertexMap& map, const Instance& original, const Solution& sol);

// Optional demand preprocessing, OFF unless asked for: every terminal with
// d(v) > threshold * k sends floor(d(v)/k) dedicated full tours (cost
// 2*dist(v) each) up front, leaving d(v) mod k behind.  The prepaid tours
// must be appended to whatever a solver later returns for the residue.  This
// is a heuristic reduction — it can miss optima that split those demands
// differently — so callers should surface it as such.
struct Peeled {
  Instance reduced;
  std::vector<Tour> prepaid;
  Cost prepaid_cost = 0;
};
Peeled peel_full_tours(const Instance& inst, std::int64_t threshold);

}  // namespace treecvrp
