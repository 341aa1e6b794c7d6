#pragma once

#include <iosfwd>
#include <string>

#include "treecvrp/model.hpp"

namespace treecvrp {

// Instance files:
//   {"n": int, "root": int,
//    "edges": [{"child": int, "parent": int, "weight": "rational"}...],
//    "terminals": [{"v": int, "demand": int}...],
//    "capacity": int}
// Weights are rational strings ("3", "5/2", "0.75"); on read they are put
// over one common denominator which becomes the instance scale.
Instance read_instance(std::istream& in);
Instance read_instance_file(const std::string& path);
std::string write_instance(const Instance& inst);

// Solution files: {"tours": [{"claims": [{"v": int, "units": int}...]}...],
//                  "cost": "rational"}.  Costs are written in instance units
// (scaled cost / scale, reduced).  Extra top-level keys are ignored on read.
Solution read_solution(std::istream& in, const Instance& inst);
Solution read_solution_file(const std::string& path, const Instance& inst);
std::string write_solution(const Instance& inst, const Solution& sol);

// Scaled cost -> exact rational in instance units.
Rational cost_to_rational(const Instance& inst, Cost c);

}  // namespace treecvrp
