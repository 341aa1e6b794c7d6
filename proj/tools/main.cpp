// Command-line surface for the tree-CVRP toolkit: instance generation,
// solvers, verification, lower bounds, structure inspection, benchmarks.
// Exit codes: 0 ok, 1 infeasible/validation failure, 2 usage, 3 budget.
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "treecvrp/baselines.hpp"
#include "treecvrp/bench.hpp"
#include "treecvrp/bounds.hpp"
#include "treecvrp/decomposition.hpp"
#include "treecvrp/errors.hpp"
#include "treecvrp/gen.hpp"
#include "treecvrp/io.hpp"
#include "treecvrp/model.hpp"
#include "treecvrp/ptas_dp.hpp"
#include "treecvrp/splittable.hpp"
#include "treecvrp/transforms.hpp"

namespace {

using namespace treecvrp;
using nlohmann::ordered_json;

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open output file: " + path);
  f << text;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Rational instance units -> scaled integer units.
Cost to_scaled(const Rational& r, const Instance& inst, const char* what) {
  const __int128 num = static_cast<__int128>(r.num()) * inst.scale;
  if (num % r.den() != 0)
    throw ValidationError(std::string(what) + ": " + r.str() +
                          " is not representable at instance scale " +
                          std::to_string(inst.scale));
  const __int128 v = num / r.den();
  if (v < 0 || v > std::numeric_limits<std::int64_t>::max())
    throw ValidationError(std::string(what) + ": value out of range");
  return static_cast<Cost>(v);
}

struct PtasFlags {
  std::string eps = "1/4";
  bool vacuous = false;
  std::int64_t gamma = 0;
  std::int64_t min_subtour = 0;
  std::int64_t max_tours = 0;
  std::int64_t x_size = 0;
  std::int64_t sum_cap = 0;
  std::string x_strategy;
  std::string class_width;
};

void add_ptas_flags(CLI::App* cmd, PtasFlags& f) {
  cmd->add_option("--eps", f.eps, "approximation parameter, a unit fraction like 1/4");
  cmd->add_flag("--vacuous", f.vacuous,
                "caps wide enough to be exact on the instance (small instances only)");
  cmd->add_option("--gamma", f.gamma, "override the component demand threshold");
  cmd->add_option("--min-subtour", f.min_subtour, "override the smallest rounded subtour demand");
  cmd->add_option("--max-tours", f.max_tours, "override the per-component subtour cap");
  cmd->add_option("--xsize", f.x_size, "override the rounding set size");
  cmd->add_option("--sumcap", f.sum_cap, "override the sum-list length cap");
  cmd->add_option("--xstrategy", f.x_strategy, "exhaustive | from_heuristic | geometric_grid")
      ->check(CLI::IsMember({"exhaustive", "from_heuristic", "geometric_grid"}));
  cmd->add_option("--class-width", f.class_width,
                  "distance class width in instance units (rational); default derived");
}

PtasParams make_ptas_params(const PtasFlags& f, const Instance& unit_inst) {
  PtasParams p;
  if (f.vacuous) {
    auto [norm, map] = normalize(unit_inst);
    p = PtasParams::vacuous(norm);
  } else {
    const Rational eps = Rational::parse(f.eps);
    if (eps.num() != 1 || eps.den() < 1)
      throw ValidationError("--eps must be a unit fraction 1/q with integer q >= 1");
    p = PtasParams::from_epsilon(eps.den(), unit_inst.capacity);
  }
  if (f.gamma > 0) p.gamma_k = f.gamma;
  if (f.min_subtour > 0) p.min_subtour_demand = f.min_subtour;
  if (f.max_tours > 0) p.max_tours_per_component = f.max_tours;
  if (f.x_size > 0) p.x_set_size = f.x_size;
  if (f.sum_cap > 0) p.sum_list_cap = f.sum_cap;
  if (f.x_strategy == "from_heuristic") p.x_strategy = XStrategy::FromHeuristic;
  if (f.x_strategy == "geometric_grid") p.x_strategy = XStrategy::GeometricGrid;
  if (f.x_strategy == "exhaustive") p.x_strategy = XStrategy::Exhaustive;
  if (!f.class_width.empty())
    p.class_width = to_scaled(Rational::parse(f.class_width), unit_inst, "--class-width");
  return p;
}

const char* strategy_name(XStrategy s) {
  switch (s) {
    case XStrategy::Exhaustive:
      return "exhaustive";
    case XStrategy::FromHeuristic:
      return "from_heuristic";
    case XStrategy::GeometricGrid:
      return "geometric_grid";
  }
  return "?";
}

int cmd_gen(const std::string& family, int terminals, std::int64_t capacity,
            std::int64_t max_weight, std::uint64_t seed, int arms,
            const std::string& weights_csv, int groups, const std::string& out) {
  Instance inst;
  if (family == "random_binary") {
    inst = gen_random(terminals, capacity, max_weight, seed);
  } else if (family == "caterpillar") {
    inst = gen_caterpillar(terminals, arms, capacity);
  } else if (family == "star") {
    std::vector<std::int64_t> ws;
    for (const auto& tok : split_csv(weights_csv)) ws.push_back(std::stoll(tok));
    if (ws.empty()) throw ValidationError("star family needs --weights w1,w2,...");
    inst = gen_star(ws, capacity);
  } else if (family == "gap") {
    inst = gen_single_assignment_gap(capacity, groups);
  } else {
    throw ValidationError("unknown family: " + family);
  }
  emit(out, write_instance(inst));
  return 0;
}

Solution dispatch_unit_solver(const std::string& algo, const Instance& inst,
                              const PtasFlags& pf, ordered_json& meta) {
  if (algo == "itp") return itp(inst);
  if (algo == "greedy") return greedy(inst);
  if (algo == "exact") return exact_partition_dp(inst);
  if (algo == "exact_config") return exact_config_dp(inst);
  if (algo == "ptas") {
    const PtasParams params = make_ptas_params(pf, inst);
    PtasMeta pm;
    Solution sol = solve_ptas_any(inst, params, &pm);
    ordered_json eff;
    eff["inv_eps"] = pm.effective.inv_eps;
    eff["gamma"] = pm.effective.gamma_k;
    eff["min_subtour_demand"] = pm.effective.min_subtour_demand;
    eff["max_tours_per_component"] = pm.effective.max_tours_per_component;
    eff["x_set_size"] = pm.effective.x_set_size;
    eff["sum_list_cap"] = pm.effective.sum_list_cap;
    eff["x_strategy"] = strategy_name(pm.effective.x_strategy);
    eff["class_width_scaled"] = pm.effective.class_width;
    meta["ptas"] = {{"effective", eff},
                    {"theory_guarantee", pm.theory_guarantee},
                    {"x_candidates", pm.x_candidates},
                    {"components", pm.components},
                    {"groups", pm.groups}};
    return sol;
  }
  throw ValidationError("unknown algorithm: " + algo);
}

int cmd_solve(const std::string& in, const std::string& algo, bool splittable,
              std::int64_t peel_threshold, const PtasFlags& pf, const std::string& out) {
  const Instance original = read_instance_file(in);
  ordered_json meta;
  meta["algo"] = algo;

  Instance work = original;
  std::vector<Tour> prepaid;
  Cost prepaid_cost = 0;
  if (peel_threshold >= 0) {
    Peeled p = peel_full_tours(work, peel_threshold);
    prepaid = std::move(p.prepaid);
    prepaid_cost = p.prepaid_cost;
    work = std::move(p.reduced);
    meta["peeled"] = {{"threshold", peel_threshold},
                      {"prepaid_tours", prepaid.size()},
                      {"note", "heuristic preprocessing; optimality not preserved"}};
  }

  Solution sol;
  if (splittable) {
    auto [unit, map] = expand(work);
    meta["splittable"] = {{"expanded_vertices", unit.n()}, {"original_vertices", work.n()}};
    const Solution unit_sol = dispatch_unit_solver(algo, unit, pf, meta);
    sol = contract_solution(map, work, unit_sol);
  } else {
    sol = dispatch_unit_solver(algo, work, pf, meta);
  }

  for (auto& t : prepaid) sol.tours.push_back(std::move(t));
  sol.cost += prepaid_cost;

  const VerifyReport rep = verify(original, sol);
  if (!rep.feasible) {
    std::string msg = "solver produced an infeasible solution";
    for (const auto& v : rep.violations) msg += "; " + v.message;
    throw ValidationError(msg);
  }

  ordered_json doc = ordered_json::parse(write_solution(original, sol));
  doc["meta"] = std::move(meta);
  emit(out, doc.dump(2) + "\n");
  return 0;
}

int cmd_verify(const std::string& in, const std::string& sol_path) {
  const Instance inst = read_instance_file(in);
  const Solution sol = read_solution_file(sol_path, inst);
  const VerifyReport rep = verify(inst, sol);
  if (rep.feasible) {
    std::cout << "feasible, cost " << cost_to_rational(inst, rep.total_cost).str() << "\n";
    return 0;
  }
  std::cout << "infeasible:\n";
  for (const auto& v : rep.violations) std::cout << "  " << v.message << "\n";
  return 1;
}

int cmd_lb(const std::string& in, const std::string& out) {
  const Instance inst = read_instance_file(in);
  ordered_json doc;
  doc["edge_fractional"] = lb_edge(inst, EdgeBoundMode::Fractional).str();
  doc["edge_ceiling"] = lb_edge(inst, EdgeBoundMode::Ceiling).str();
  doc["radial"] = lb_radial(inst).str();
  emit(out, doc.dump(2) + "\n");
  return 0;
}

int cmd_decompose(const std::string& in, std::int64_t gamma, const std::string& out) {
  const Instance raw = read_instance_file(in);
  auto [inst, map] = normalize(raw);
  const Decomposition dec = decompose(inst, gamma);
  const DecompositionCheck check = check_decomposition(inst, dec);
  ordered_json doc;
  doc["normalized_vertices"] = inst.n();
  doc["gamma"] = dec.gamma_k;
  ordered_json comps = ordered_json::array();
  for (const auto& c : dec.components) {
    comps.push_back({{"id", c.id},
                     {"kind", c.kind == Component::Kind::Leaf ? "leaf" : "internal"},
                     {"root", c.root},
                     {"exit", c.exit},
                     {"edges", c.edges.size()},
                     {"demand", c.demand},
                     {"charged_to", dec.big_image[c.id]}});
  }
  doc["components"] = std::move(comps);
  doc["key_vertices"] = dec.key_vertices;
  doc["check_ok"] = check.ok;
  doc["check_violations"] = check.violations;
  emit(out, doc.dump(2) + "\n");
  return check.ok ? 0 : 1;
}

int cmd_transform(const std::string& in, const std::string& op, std::int64_t gamma,
                  const std::string& class_width, std::int64_t band_base,
                  std::int64_t offset, const std::string& out) {
  const Instance raw = read_instance_file(in);
  ordered_json doc;
  doc["op"] = op;
  if (op == "normalize") {
    auto [norm, map] = normalize(raw);
    doc["instance"] = ordered_json::parse(write_instance(norm));
    doc["to_base"] = map.to_base;
    doc["terminal_image"] = map.terminal_image;
  } else if (op == "hat") {
    auto [norm, map] = normalize(raw);
    const Decomposition dec = decompose(norm, gamma);
    const Cost width = class_width.empty()
                           ? default_class_width(norm, 4)
                           : to_scaled(Rational::parse(class_width), norm, "--class-width");
    const HatTree hat = build_hat_tree(norm, dec, width);
    doc["gamma"] = gamma;
    doc["class_width_scaled"] = width;
    doc["instance"] = ordered_json::parse(write_instance(hat.hat));
    ordered_json placements = ordered_json::array();
    for (size_t c = 0; c < hat.placement.size(); ++c) {
      const auto& pl = hat.placement[c];
      placements.push_back({{"component", c},
                            {"anchor", pl.anchor},
                            {"attach_weight", pl.attach_weight},
                            {"hat_root", pl.hat_root},
                            {"dist_class", pl.dist_class},
                            {"group", pl.group}});
    }
    doc["placements"] = std::move(placements);
    doc["anchors"] = hat.anchors;
  } else if (op == "bands") {
    if (band_base < 2) throw ValidationError("--band-base must be at least 2");
    if (offset < 0 || offset >= band_base) {
      throw ValidationError("--offset must lie in [0, band_base)");
    }
    doc["band_base"] = band_base;
    doc["offset"] = offset;
    ordered_json parts = ordered_json::array();
    for (const auto& part : split_by_distance(raw, band_base, offset)) {
      std::vector<int> terms = part.sub.terminals();
      parts.push_back({{"tag", part.tag},
                       {"terminals", terms},
                       {"instance", ordered_json::parse(write_instance(part.sub))}});
    }
    doc["parts"] = std::move(parts);
  } else {
    throw ValidationError("unknown transform op: " + op);
  }
  emit(out, doc.dump(2) + "\n");
  return 0;
}

int cmd_bench(int count, int terminals, std::int64_t capacity, std::int64_t max_weight,
              std::uint64_t seed, const std::string& algos_csv, bool timings, int threads,
              const std::string& json_out) {
  std::vector<std::pair<std::string, Instance>> corpus;
  for (int i = 0; i < count; ++i) {
    const int nt = 2 + static_cast<int>(i % std::max(1, terminals - 1));
    const std::int64_t k = 1 + static_cast<std::int64_t>((seed + i) % capacity);
    std::string name = "rand-t" + std::to_string(nt) + "-k" + std::to_string(k) + "-i" +
                       std::to_string(i);
    corpus.emplace_back(std::move(name), gen_random(nt, k, max_weight, seed + i));
  }
  const std::vector<std::string> algos = split_csv(algos_csv);
  if (algos.empty()) throw ValidationError("bench: no algorithms given");
  const BenchReport report = run_bench(corpus, algos, threads);
  std::cout << report.text_table(timings);
  if (!json_out.empty()) emit(json_out, report.to_json(timings));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacitated vehicle routing on trees: solvers, bounds, benchmarks"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance");
  std::string g_family;
  int g_terminals = 8;
  std::int64_t g_capacity = 3;
  std::int64_t g_max_weight = 10;
  std::uint64_t g_seed = 1;
  int g_arms = 1;
  std::string g_weights;
  int g_groups = 3;
  std::string g_out;
  gen->add_option("--family", g_family, "random_binary | caterpillar | star | gap")
      ->required()
      ->check(CLI::IsMember({"random_binary", "caterpillar", "star", "gap"}));
  gen->add_option("--terminals", g_terminals, "terminal count");
  gen->add_option("--capacity", g_capacity, "tour capacity k");
  gen->add_option("--max-weight", g_max_weight, "max edge weight (random_binary)");
  gen->add_option("--seed", g_seed, "generator seed");
  gen->add_option("--arms", g_arms, "caterpillar arms (1 or 2)");
  gen->add_option("--weights", g_weights, "star leaf weights, comma separated");
  gen->add_option("--groups", g_groups, "gap-family cluster count (2*capacity divisible by it)");
  gen->add_option("-o,--out", g_out, "output file (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance");
  std::string s_in, s_algo = "itp", s_out;
  bool s_split = false;
  std::int64_t s_peel = -1;
  PtasFlags s_pf;
  solve->add_option("-i,--instance", s_in, "instance file")->required();
  solve->add_option("--algo", s_algo, "itp | greedy | exact | exact_config | ptas")
      ->check(CLI::IsMember({"itp", "greedy", "exact", "exact_config", "ptas"}));
  solve->add_flag("--splittable", s_split, "expand demands to unit before solving");
  solve->add_option("--peel-threshold", s_peel,
                    "peel full tours above threshold*k demand first (heuristic, default off)");
  add_ptas_flags(solve, s_pf);
  solve->add_option("-o,--out", s_out, "solution file (default stdout)");

  // verify
  auto* ver = app.add_subcommand("verify", "check a solution file");
  std::string v_in, v_sol;
  ver->add_option("-i,--instance", v_in, "instance file")->required();
  ver->add_option("-s,--solution", v_sol, "solution file")->required();

  // lb
  auto* lb = app.add_subcommand("lb", "lower bounds");
  std::string l_in, l_out;
  lb->add_option("-i,--instance", l_in, "instance file")->required();
  lb->add_option("-o,--out", l_out, "output file (default stdout)");

  // decompose
  auto* dec = app.add_subcommand("decompose", "component decomposition of the normalized tree");
  std::string d_in, d_out;
  std::int64_t d_gamma = 0;
  dec->add_option("-i,--instance", d_in, "instance file")->required();
  dec->add_option("--gamma", d_gamma, "demand threshold")->required();
  dec->add_option("-o,--out", d_out, "output file (default stdout)");

  // transform
  auto* tr = app.add_subcommand("transform",
                                "normalize, height-reduce, or band-split an instance");
  std::string t_in, t_op, t_width, t_out;
  std::int64_t t_gamma = 1, t_base = 4, t_offset = 0;
  tr->add_option("-i,--instance", t_in, "instance file")->required();
  tr->add_option("--op", t_op, "normalize | hat | bands")
      ->required()
      ->check(CLI::IsMember({"normalize", "hat", "bands"}));
  tr->add_option("--gamma", t_gamma, "demand threshold (hat)");
  tr->add_option("--class-width", t_width, "distance class width, instance units (hat)");
  tr->add_option("--band-base", t_base, "geometric band base (bands)");
  tr->add_option("--offset", t_offset, "band offset in [0, band-base) (bands)");
  tr->add_option("-o,--out", t_out, "output file (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark algorithms on a generated corpus");
  int b_count = 20, b_terminals = 8, b_threads = 0;
  std::int64_t b_capacity = 3, b_max_weight = 10;
  std::uint64_t b_seed = 1;
  std::string b_algos = "itp,greedy,exact";
  bool b_timings = false;
  std::string b_json;
  bench->add_option("--count", b_count, "number of instances");
  bench->add_option("--terminals", b_terminals, "max terminals per instance");
  bench->add_option("--capacity", b_capacity, "max capacity");
  bench->add_option("--max-weight", b_max_weight, "max edge weight");
  bench->add_option("--seed", b_seed, "corpus seed");
  bench->add_option("--algos", b_algos, "comma separated algorithm list");
  bench->add_flag("--timings", b_timings, "include wall-clock times (non-reproducible)");
  bench->add_option("--threads", b_threads, "worker threads (default: hardware)");
  bench->add_option("--json", b_json, "also write a JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen(g_family, g_terminals, g_capacity, g_max_weight, g_seed, g_arms, g_weights,
                     g_groups, g_out);
    if (solve->parsed()) return cmd_solve(s_in, s_algo, s_split, s_peel, s_pf, s_out);
    if (ver->parsed()) return cmd_verify(v_in, v_sol);
    if (lb->parsed()) return cmd_lb(l_in, l_out);
    if (dec->parsed()) return cmd_decompose(d_in, d_gamma, d_out);
    if (tr->parsed())
      return cmd_transform(t_in, t_op, t_gamma, t_width, t_base, t_offset, t_out);
    if (bench->parsed())
      return cmd_bench(b_count, b_terminals, b_capacity, b_max_weight, b_seed, b_algos, b_timings,
                       b_threads, b_json);
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
