// Scratch harness: cross-check the two exact oracles and the vacuous-cap
// approximation pipeline on small random instances.  Not installed.
#include <cstdio>
#include <cstdlib>

#include "treecvrp/baselines.hpp"
#include "treecvrp/gen.hpp"
#include "treecvrp/ptas_dp.hpp"
#include "treecvrp/splittable.hpp"

using namespace treecvrp;

int main(int argc, char** argv) {
  const int rounds = argc > 1 ? std::atoi(argv[1]) : 50;
  const bool with_ptas = argc <= 2 || std::atoi(argv[2]) != 0;
  int bad = 0;
  for (int seed = 1; seed <= rounds; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed) * 1000003);
    const int nt = 1 + static_cast<int>(rng.below(8));
    const std::int64_t kpick = 1 + static_cast<std::int64_t>(rng.below(4));
    Instance inst = gen_random(nt, kpick, /*max_weight=*/7, rng.next());
    const auto terms = inst.terminals().size();
    if (terms == 0) continue;
    try {
      const Solution a = exact_partition_dp(inst);
      const Solution b = exact_config_dp(inst);
      if (a.cost != b.cost) {
        std::printf("seed %d: partition=%lld config=%lld nt=%d k=%lld terms=%zu\n", seed,
                    static_cast<long long>(a.cost), static_cast<long long>(b.cost), nt,
                    static_cast<long long>(inst.capacity), terms);
        ++bad;
        continue;
      }
      if (with_ptas) {
        auto [norm, map] = normalize(inst);
        if (norm.terminals().empty()) continue;
        const std::int64_t gammas[] = {1, 2, 3, inst.capacity, 4 * inst.capacity,
                                       48 * inst.capacity};
        for (const std::int64_t g : gammas) {
          PtasParams params = PtasParams::vacuous(norm);
          params.gamma_k = g;
          const Solution c = solve_ptas(norm, params);
          if (c.cost != a.cost) {
            std::printf("seed %d gamma %lld: exact=%lld ptas=%lld nt=%d k=%lld terms=%zu\n",
                        seed, static_cast<long long>(g), static_cast<long long>(a.cost),
                        static_cast<long long>(c.cost), nt,
                        static_cast<long long>(inst.capacity), terms);
            ++bad;
            continue;
          }
          const auto rep = verify(norm, c);
          if (!rep.feasible) {
            std::printf("seed %d gamma %lld: ptas solution failed verify\n", seed,
                        static_cast<long long>(g));
            ++bad;
          }
        }
      }
    } catch (const std::exception& e) {
      std::printf("seed %d: exception: %s\n", seed, e.what());
      ++bad;
    }
  }
  // Splittable: expanded exact == brute-force splittable optimum.
  for (int seed = 1; seed <= rounds / 4; ++seed) {
    Rng rng(0xabcdef12u + static_cast<std::uint64_t>(seed));
    const int nt = 1 + static_cast<int>(rng.below(3));
    const std::int64_t kpick = 1 + static_cast<std::int64_t>(rng.below(3));
    Instance inst = gen_random(nt, kpick, 5, rng.next());
    bool grew = false;
    for (int v = 0; v < inst.n(); ++v) {
      if (inst.demand[v] > 0 && inst.total_demand() < 8) {
        inst.demand[v] += static_cast<std::int64_t>(rng.below(3));
        grew = true;
      }
    }
    if (!grew || inst.total_demand() == 0) continue;
    try {
      const Cost brute = exact_splittable_brute(inst);
      auto [unit, map] = expand(inst);
      const Solution usol = exact_partition_dp(unit);
      const Solution back = contract_solution(map, inst, usol);
      if (back.cost != brute || usol.cost != brute) {
        std::printf("split seed %d: brute=%lld expanded=%lld contracted=%lld\n", seed,
                    static_cast<long long>(brute), static_cast<long long>(usol.cost),
                    static_cast<long long>(back.cost));
        ++bad;
      }
    } catch (const std::exception& e) {
      std::printf("split seed %d: exception: %s\n", seed, e.what());
      ++bad;
    }
  }
  std::printf("%s (%d bad)\n", bad == 0 ? "OK" : "FAIL", bad);
  return bad == 0 ? 0 : 1;
}
