#include "treecvrp/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>

#include <nlohmann/json.hpp>

namespace treecvrp {

using ordered_json = nlohmann::ordered_json;

namespace {

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  __int128 g = std::gcd(a, b);
  __int128 l = (__int128)a / g * b;
  if (l > std::numeric_limits<std::int64_t>::max()) {
    throw OverflowError("weight denominators produce an oversized scale");
  }
  return static_cast<std::int64_t>(l);
}

ordered_json parse_stream(std::istream& in) {
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad JSON: ") + e.what());
  }
  return j;
}

}  // namespace

Instance read_instance(std::istream& in) {
  ordered_json j = parse_stream(in);
  try {
    Instance inst;
    const int n = j.at("n").get<int>();
    if (n <= 0) throw ValidationError("instance field n must be positive");
    inst.root = j.at("root").get<int>();
    inst.parent.assign(n, -1);
    inst.demand.assign(n, 0);
    inst.capacity = j.at("capacity").get<std::int64_t>();

    std::vector<Rational> weights(n, Rational(0));
    std::vector<char> has_parent(n, 0);
    for (const auto& e : j.at("edges")) {
      const int child = e.at("child").get<int>();
      const int par = e.at("parent").get<int>();
      if (child < 0 || child >= n || par < 0 || par >= n) {
        throw ValidationError("edge endpoint out of range");
      }
      if (has_parent[child]) throw ValidationError("duplicate edge to child " + std::to_string(child));
      has_parent[child] = 1;
      inst.parent[child] = par;
      weights[child] = Rational::parse(e.at("weight").get<std::string>());
      if (weights[child] < Rational(0)) throw ValidationError("negative edge weight");
    }
    for (const auto& t : j.at("terminals")) {
      const int v = t.at("v").get<int>();
      if (v < 0 || v >= n) throw ValidationError("terminal vertex out of range");
      inst.demand[v] = t.at("demand").get<std::int64_t>();
      if (inst.demand[v] < 1) throw ValidationError("terminal demand must be at least 1");
    }

    inst.scale = 1;
    for (const auto& w : weights) inst.scale = lcm64(inst.scale, w.den());
    inst.weight.assign(n, 0);
    for (int v = 0; v < n; ++v) {
      __int128 scaled = (__int128)weights[v].num() * (inst.scale / weights[v].den());
      if (scaled > std::numeric_limits<Cost>::max()) {
        throw OverflowError("edge weight too large after scaling");
      }
      inst.weight[v] = static_cast<Cost>(scaled);
    }
    validate(inst);
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad instance JSON: ") + e.what());
  }
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file: " + path);
  return read_instance(in);
}

std::string write_instance(const Instance& inst) {
  ordered_json j;
  j["n"] = inst.n();
  j["root"] = inst.root;
  ordered_json edges = ordered_json::array();
  for (int v = 0; v < inst.n(); ++v) {
    if (v == inst.root) continue;
    ordered_json e;
    e["child"] = v;
    e["parent"] = inst.parent[v];
    e["weight"] = Rational(inst.weight[v], inst.scale).str();
    edges.push_back(std::move(e));
  }
  j["edges"] = std::move(edges);
  ordered_json terms = ordered_json::array();
  for (int v = 0; v < inst.n(); ++v) {
    if (!inst.is_terminal(v)) continue;
    ordered_json t;
    t["v"] = v;
    t["demand"] = inst.demand[v];
    terms.push_back(std::move(t));
  }
  j["terminals"] = std::move(terms);
  j["capacity"] = inst.capacity;
  return j.dump(2) + "\n";
}

Solution read_solution(std::istream& in, const Instance& inst) {
  ordered_json j = parse_stream(in);
  try {
    Solution sol;
    for (const auto& tj : j.at("tours")) {
      Tour t;
      for (const auto& cj : tj.at("claims")) {
        t.claims.push_back({cj.at("v").get<int>(), cj.at("units").get<std::int64_t>()});
      }
      std::sort(t.claims.begin(), t.claims.end());
      sol.tours.push_back(std::move(t));
    }
    const Rational cost = Rational::parse(j.at("cost").get<std::string>());
    const Rational scaled = cost * Rational(inst.scale);
    if (!scaled.is_integer()) {
      throw ValidationError("solution cost is not a multiple of 1/scale");
    }
    sol.cost = scaled.num();
    return sol;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad solution JSON: ") + e.what());
  }
}

Solution read_solution_file(const std::string& path, const Instance& inst) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open solution file: " + path);
  return read_solution(in, inst);
}

std::string write_solution(const Instance& inst, const Solution& sol) {
  ordered_json j;
  ordered_json tours = ordered_json::array();
  for (const auto& t : sol.tours) {
    ordered_json tj;
    ordered_json claims = ordered_json::array();
    auto sorted = t.claims;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& c : sorted) {
      ordered_json cj;
      cj["v"] = c.v;
      cj["units"] = c.units;
      claims.push_back(std::move(cj));
    }
    tj["claims"] = std::move(claims);
    tours.push_back(std::move(tj));
  }
  j["tours"] = std::move(tours);
  j["cost"] = cost_to_rational(inst, sol.cost).str();
  return j.dump(2) + "\n";
}

Rational cost_to_rational(const Instance& inst, Cost c) {
  return Rational(c, inst.scale);
}

}  // namespace treecvrp
