#pragma once

#include <string>
#include <utility>
#include <vector>

#include "treecvrp/model.hpp"

namespace treecvrp {

// One (instance, algorithm) measurement.  Costs and ratios are exact
// rationals rendered as strings; `seconds` is the only inexact field and is
// printed solely when timings are requested, keeping the default report
// byte-stable run over run.
struct BenchRow {
  std::string instance;
  std::string algo;
  std::string cost;   // instance units, reduced rational
  std::string ratio;  // cost / lb_edge(ceiling), "-" when the bound is zero
  std::int64_t tours = 0;
  double seconds = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;  // sorted by (instance, algo)
  std::string text_table(bool timings) const;
  std::string to_json(bool timings) const;
};

// Algorithms: itp, greedy, exact (partition oracle), exact_config (second
// oracle), ptas (exhaustive caps wide enough to be exact — small instances
// only).  Every solution is verified before it is recorded; an infeasible
// one aborts the whole benchmark, since a measurement of a wrong answer is
// worse than no measurement.  Runs are dispatched concurrently (hardware
// threads by default) and assembled deterministically.
BenchReport run_bench(const std::vector<std::pair<std::string, Instance>>& corpus,
                      const std::vector<std::string>& algos, int threads = 0);

}  // namespace treecvrp
