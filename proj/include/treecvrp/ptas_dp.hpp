#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "treecvrp/decomposition.hpp"
#include "treecvrp/model.hpp"
#include "treecvrp/transforms.hpp"

namespace treecvrp {

// How the candidate value sets X for demand rounding are produced.
//  - Exhaustive: every x_set_size-subset of [L, k]; carries the approximation
//    guarantee, cost grows as C(k-L+1, x_set_size) (budget-checked).
//  - FromHeuristic: one X seeded from per-component subtour demands of an
//    ITP warm start, truncated by frequency; k always included.
//  - GeometricGrid: one X = {ceil(L*(1+1/inv_eps)^t)} clipped to [L, k],
//    truncated to x_set_size values; k always included.
enum class XStrategy { Exhaustive, FromHeuristic, GeometricGrid };

// The solver's knob set.  from_epsilon fills the theory-faithful values
// (astronomical for small epsilon; they saturate at int64 max), but the
// engine treats each knob independently so that runnable configurations can
// be dialed in.  Only Exhaustive with faithful-or-looser caps carries the
// (1+4*eps) bound.
struct PtasParams {
  std::int64_t inv_eps = 4;                  // epsilon = 1/inv_eps
  std::int64_t gamma_k = 1;                  // component demand threshold (Gamma*k)
  std::int64_t min_subtour_demand = 1;       // L, the alpha*k floor on X values
  std::int64_t max_tours_per_component = 1;  // M, the 2*Gamma/alpha + 1 cap
  std::int64_t x_set_size = 1;               // |X|, the 1/beta cap
  std::int64_t sum_list_cap = 1;             // distinct demands per sum list, the (1/beta)^(1/alpha) cap
  XStrategy x_strategy = XStrategy::Exhaustive;
  Cost class_width = 0;                      // 0: derive from the instance (alpha*eps*D_min)

  // Theory-faithful parameters for epsilon = 1/inv_eps and the given tour
  // capacity: Gamma = 12/eps, alpha = eps^(1/eps+1), beta = (1/4)*eps^(4/eps+1),
  // L = ceil(alpha*k), M = 2*Gamma/alpha + 1, |X| = 1/beta,
  // sum_list_cap = (1/beta)^(1/alpha).  All saturating.
  static PtasParams from_epsilon(std::int64_t inv_eps, std::int64_t capacity);

  // Caps that make the dynamic program provably exact on a normalized
  // instance: L = 1, M >= #terminals, X = the whole of [1, k],
  // unbounded sum lists.  gamma_k defaults to the faithful value for eps=1/4.
  static PtasParams vacuous(const Instance& normalized);
};

// (1/eps)^(2/eps+1): the distance-class count under the faithful class
// width; saturating.  Exposed for tests and documentation output.
std::int64_t h_epsilon(std::int64_t inv_eps);

// One subtour inside a component: s terminals served below the current
// vertex, and whether the subtour continues through the component's exit.
struct LocalPair {
  std::int64_t s = 0;
  bool passing = false;
  auto operator<=>(const LocalPair&) const = default;
};
using LocalKey = std::vector<LocalPair>;  // canonical: sorted

// Aggregated subtour demands below a component root or critical vertex:
// n subtours of padded demand s each.  Canonical: ascending s, n >= 1.
struct SumPair {
  std::int64_t s = 0;
  std::int64_t n = 0;
  auto operator<=>(const SumPair&) const = default;
};
using SumKey = std::vector<SumPair>;

// Local-configuration values f(r_c, A) for one component: minimum cost of
// |A| subtours rooted at r_c that together serve every terminal of the
// component, where pair i serves s_i of them and passing pairs reach the
// exit.  `tree` must contain the component's edges (the original or the
// height-reduced tree).
std::map<LocalKey, Cost> local_dp(const Instance& tree, const Component& comp,
                                  const PtasParams& params);

// Subtree-configuration values g(r_c, A) at a component root: leaf
// components re-tag their local table (n_i = 1, tags dropped); internal
// components combine every local configuration with every entry of the exit
// table, associating each passing subtour with one exit subtour under the
// capacity bound, and paying the doubled spine for every unassociated exit
// subtour.  `exit_values` must be empty-key-only for a closed exit.
std::map<SumKey, Cost> subtree_dp_component_root(const Instance& tree, const Component& comp,
                                                 const std::map<SumKey, Cost>& exit_values,
                                                 const PtasParams& params);

// Subtree-configuration values g(z, A) at a critical vertex, combining the
// component-root tables of the children hung below z.  Each child i is a
// pair (table, edge weight w_i); every child subtour pays 2*w_i, child
// demands are rounded up to the active X set (dummy padding), and subtours
// of distinct children may merge while the padded sum stays within capacity.
// `forced_x`, when non-empty, bypasses the strategy and uses exactly that X.
std::map<SumKey, Cost> subtree_dp_critical(
    const std::vector<std::pair<std::map<SumKey, Cost>, Cost>>& children,
    std::int64_t capacity, const PtasParams& params,
    const std::vector<std::int64_t>& forced_x = {});

struct PtasMeta {
  PtasParams effective;
  bool theory_guarantee = false;  // Exhaustive with faithful-or-looser caps
  std::int64_t x_candidates = 0;  // candidate X sets tried, summed over critical vertices
  int components = 0;
  int groups = 0;
  Cost hat_cost = 0;  // solution cost on the height-reduced tree
};

// End-to-end solve on a normalized instance: decompose, reduce height, run
// the three-stage dynamic program bottom-up, reconstruct the cheapest
// complete configuration at the depot, and lift the tours back off the
// height-reduced tree.  The reconstructed cost is asserted against the
// stored table value; dummy padding never reaches the output.
Solution solve_ptas(const Instance& inst, const PtasParams& params, PtasMeta* meta = nullptr);

// Convenience wrapper for arbitrary unit-demand instances: normalize, solve,
// map the tours back.
Solution solve_ptas_any(const Instance& inst, const PtasParams& params, PtasMeta* meta = nullptr);

}  // namespace treecvrp
