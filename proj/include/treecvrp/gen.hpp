#pragma once

#include <cstdint>
#include <vector>

#include "treecvrp/model.hpp"

namespace treecvrp {

// Deterministic 64-bit generator (splitmix64).  Identical across platforms
// and standard libraries, which keeps generated corpora byte-stable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, bound): bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  std::int64_t range(std::int64_t lo, std::int64_t hi);  // inclusive

 private:
  std::uint64_t state_;
};

// Random tree built by recursively splitting the terminal set; weights are
// uniform integers in [0, max_weight] with occasional zero weights so that
// ties and zero-length edges stay exercised.
Instance gen_random(int terminals, std::int64_t capacity, std::int64_t max_weight,
                    std::uint64_t seed);

// Spine with one leaf per spine vertex and a doubled leaf at each tip.
// arms=1 hangs a single spine off the root; arms=2 grows one spine per side
// of the root.  Unit edge weights.  `terminals` must be divisible by arms.
Instance gen_caterpillar(int terminals, int arms, std::int64_t capacity);

// Root with one leaf per given weight.
Instance gen_star(const std::vector<std::int64_t>& leaf_weights, std::int64_t capacity);

// Adversarial single-assignment family: a unit-weight edge from the root to a
// hub, below it `groups` clusters of (2*capacity/groups) zero-distance
// terminals.  2*capacity must be divisible by groups.  Two capacity-full
// tours cost exactly 4, while serving each cluster within a single tour
// forces at least three tours and cost at least 6.
Instance gen_single_assignment_gap(std::int64_t capacity, int groups);

// Optimal cost (in scaled units) over solutions restricted to serving each
// zero-distance cluster of the gap family inside one tour; brute force over
// cluster groupings.  Used to certify the cost-6 side of the family.
Cost restricted_cluster_optimum(const Instance& inst);

}  // namespace treecvrp
