#pragma once

#include "treecvrp/model.hpp"

namespace treecvrp {

// Iterated tour partitioning: order the terminals along a depth-first
// traversal (children in ascending id order), chop the order into capacity-
// sized blocks, and serve each block with one tour.  All cyclic block offsets
// are tried and the cheapest kept when the instance is small (<= 10^4
// terminals); ties prefer the smaller offset.  Tour count is always
// ceil(terminals / capacity).  Requires unit demands.
Solution itp(const Instance& inst);

// Offset-zero upper bound for itp, scaled units: the tree tour cost plus, for
// every block, the root distances of its first and last terminal.  The
// returned solution always costs at most this.
Cost itp_constructive_bound(const Instance& inst);

// Exact optimum by dynamic programming over terminal subsets: best[S] =
// min over feasible first groups G of best[S\G] + group cost.  Runs on any
// valid unit-demand instance without normalizing it, which keeps this
// independent of the transform pipeline — it is the reference oracle.
// Throws BudgetError above the terminal budget (default 15,
// TREECVRP_EXACT_BUDGET overrides).
Solution exact_partition_dp(const Instance& inst);

// Exact optimum via the tour-multiset recurrence: tables keyed by the
// multiset of open tour loads per subtree, no caps.  Same recurrence family
// as the approximation solver but implemented standalone (arbitrary degree,
// no decomposition), so the two exact routes check each other.  Throws
// BudgetError above the terminal budget (default 18, TREECVRP_CONFIG_BUDGET
// overrides).
Solution exact_config_dp(const Instance& inst);

// Foil heuristic: repeatedly opens a tour and fills it with the deepest
// unserved terminals (ties towards smaller ids).  Feasible but with no
// guarantee; exists to give bench a weak baseline.  Requires unit demands.
Solution greedy(const Instance& inst);

// Exact splittable optimum by brute force over claim vectors; total demand
// is capped (default 10, TREECVRP_SPLIT_BUDGET overrides).  Independent of
// the expansion reduction so the two can be checked against each other.
Cost exact_splittable_brute(const Instance& inst);

}  // namespace treecvrp
