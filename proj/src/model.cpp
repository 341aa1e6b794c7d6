#include "treecvrp/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>

namespace treecvrp {

std::int64_t env_budget(const char* name, std::int64_t fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  long long v = std::strtoll(raw, &end, 10);
  if (end == raw || *end != '\0' || v <= 0) {
    throw ValidationError(std::string("bad value for ") + name + ": " + raw);
  }
  return v;
}

std::vector<int> Instance::terminals() const {
  std::vector<int> out;
  for (int v = 0; v < n(); ++v) {
    if (is_terminal(v)) out.push_back(v);
  }
  return out;
}

std::int64_t Instance::total_demand() const {
  std::int64_t total = 0;
  for (int v = 0; v < n(); ++v) total += demand[v];
  return total;
}

bool Instance::unit_demand() const {
  for (int v = 0; v < n(); ++v) {
    if (demand[v] > 1) return false;
  }
  return true;
}

void validate(const Instance& inst) {
  const int n = inst.n();
  if (n <= 0) throw ValidationError("instance has no vertices");
  if (inst.root < 0 || inst.root >= n) throw ValidationError("root out of range");
  if ((int)inst.weight.size() != n || (int)inst.demand.size() != n) {
    throw ValidationError("weight/demand arrays disagree with vertex count");
  }
  if (inst.capacity < 1) throw ValidationError("capacity must be at least 1");
  if (inst.scale < 1) throw ValidationError("scale must be at least 1");
  if (inst.parent[inst.root] != -1) throw ValidationError("root must have parent -1");
  for (int v = 0; v < n; ++v) {
    if (v != inst.root) {
      if (inst.parent[v] < 0 || inst.parent[v] >= n || inst.parent[v] == v) {
        throw ValidationError("vertex " + std::to_string(v) + " has a bad parent");
      }
    }
    if (inst.weight[v] < 0) throw ValidationError("negative edge weight");
    if (inst.demand[v] < 0) throw ValidationError("negative demand");
  }
  // Every vertex must reach the root without cycles.
  std::vector<int> state(n, 0);  // 0 unseen, 1 on path, 2 done
  for (int v = 0; v < n; ++v) {
    int u = v;
    std::vector<int> path;
    while (state[u] == 0 && u != inst.root) {
      state[u] = 1;
      path.push_back(u);
      u = inst.parent[u];
    }
    if (state[u] == 1) throw ValidationError("parent pointers contain a cycle");
    for (int w : path) state[w] = 2;
    state[inst.root] = 2;
  }
}

std::vector<std::vector<int>> children_of(const Instance& inst) {
  std::vector<std::vector<int>> ch(inst.n());
  for (int v = 0; v < inst.n(); ++v) {
    if (v != inst.root) ch[inst.parent[v]].push_back(v);
  }
  // parent[] iteration already yields ascending ids, but keep it explicit.
  for (auto& c : ch) std::sort(c.begin(), c.end());
  return ch;
}

bool is_normalized(const Instance& inst) {
  auto ch = children_of(inst);
  for (int v = 0; v < inst.n(); ++v) {
    const bool leaf = ch[v].empty();
    if (leaf != inst.is_terminal(v)) return false;
    if (leaf && inst.demand[v] != 1) return false;
    if (!leaf && v != inst.root && ch[v].size() != 2) return false;
    if (v == inst.root && !leaf && ch[v].size() > 2) return false;
  }
  return true;
}

VertexMap identity_map(const Instance& inst) {
  VertexMap m;
  m.to_base.resize(inst.n());
  std::iota(m.to_base.begin(), m.to_base.end(), 0);
  m.terminal_image.assign(inst.n(), -1);
  for (int v = 0; v < inst.n(); ++v) {
    if (inst.is_terminal(v)) m.terminal_image[v] = v;
  }
  return m;
}

VertexMap compose(const VertexMap& base_to_mid, const VertexMap& mid_to_out) {
  VertexMap m;
  m.to_base.resize(mid_to_out.to_base.size());
  for (std::size_t v = 0; v < mid_to_out.to_base.size(); ++v) {
    int mid = mid_to_out.to_base[v];
    m.to_base[v] = mid >= 0 ? base_to_mid.to_base[mid] : -1;
  }
  m.terminal_image.assign(base_to_mid.terminal_image.size(), -1);
  for (std::size_t t = 0; t < base_to_mid.terminal_image.size(); ++t) {
    int mid = base_to_mid.terminal_image[t];
    if (mid >= 0) m.terminal_image[t] = mid_to_out.terminal_image[mid];
  }
  return m;
}

namespace {

// Mutable scratch tree used while normalizing; flattened back at the end.
struct Builder {
  std::vector<int> parent, base;
  std::vector<Cost> weight;
  std::vector<std::int64_t> demand;
  std::vector<char> alive;

  int add(int par, Cost w, std::int64_t d, int base_vertex) {
    parent.push_back(par);
    weight.push_back(w);
    demand.push_back(d);
    base.push_back(base_vertex);
    alive.push_back(1);
    return static_cast<int>(parent.size()) - 1;
  }
};

}  // namespace

std::pair<Instance, VertexMap> normalize(const Instance& inst) {
  validate(inst);
  if (!inst.unit_demand()) {
    throw ValidationError("normalize requires unit demands; expand splittable instances first");
  }
  if (inst.total_demand() == 0) throw EmptyInstanceError("instance has no terminals");

  Builder b;
  for (int v = 0; v < inst.n(); ++v) {
    b.add(inst.parent[v], inst.weight[v], inst.demand[v], v);
  }
  std::vector<int> token(inst.n(), -1);  // base terminal -> vertex holding it

  // Internal terminals hand their demand to a fresh zero-weight leaf.
  {
    std::vector<char> internal(inst.n(), 0);
    for (int v = 0; v < inst.n(); ++v) {
      if (v != inst.root) internal[inst.parent[v]] = 1;
    }
    for (int v = 0; v < inst.n(); ++v) {
      if (!inst.is_terminal(v)) continue;
      if (internal[v]) {
        int leaf = b.add(v, 0, 1, v);
        b.demand[v] = 0;
        token[v] = leaf;
      } else {
        token[v] = v;
      }
    }
  }

  const int root = inst.root;
  auto recompute_children = [&]() {
    std::vector<std::vector<int>> ch(b.parent.size());
    for (int v = 0; v < (int)b.parent.size(); ++v) {
      if (b.alive[v] && v != root) ch[b.parent[v]].push_back(v);
    }
    return ch;
  };

  // Prune non-terminal leaves and splice out non-root degree-two vertices
  // until neither rule applies.
  bool changed = true;
  while (changed) {
    changed = false;
    auto ch = recompute_children();
    for (int v = 0; v < (int)b.parent.size(); ++v) {
      if (!b.alive[v] || v == root) continue;
      if (ch[v].empty() && b.demand[v] == 0) {
        b.alive[v] = 0;
        changed = true;
      } else if (ch[v].size() == 1 && b.demand[v] == 0) {
        int c = ch[v][0];
        b.parent[c] = b.parent[v];
        b.weight[c] += b.weight[v];
        b.alive[v] = 0;
        changed = true;
      }
    }
  }

  // Split vertices with more than two children into zero-weight binary chains.
  {
    bool split = true;
    while (split) {
      split = false;
      auto ch = recompute_children();
      for (int v = 0; v < (int)b.parent.size(); ++v) {
        if (!b.alive[v] || ch[v].size() <= 2) continue;
        // Keep the smallest child, move the rest under a fresh vertex.
        int fresh = b.add(v, 0, 0, b.base[v]);
        for (std::size_t i = 1; i < ch[v].size(); ++i) b.parent[ch[v][i]] = fresh;
        split = true;
        break;  // children lists are stale now
      }
    }
  }

  // Flatten live vertices into a dense instance.
  std::vector<int> dense(b.parent.size(), -1);
  Instance out;
  out.capacity = inst.capacity;
  out.scale = inst.scale;
  VertexMap map;
  map.terminal_image.assign(inst.n(), -1);
  // Root first so ids stay root-before-descendants friendly; rest keep order.
  for (int pass = 0; pass < 2; ++pass) {
    for (int v = 0; v < (int)b.parent.size(); ++v) {
      if (!b.alive[v]) continue;
      if ((pass == 0) != (v == root)) continue;
      dense[v] = static_cast<int>(out.parent.size());
      out.parent.push_back(-2);  // fixed below
      out.weight.push_back(v == root ? 0 : b.weight[v]);
      out.demand.push_back(b.demand[v]);
      map.to_base.push_back(b.base[v]);
    }
  }
  out.root = dense[root];
  for (int v = 0; v < (int)b.parent.size(); ++v) {
    if (!b.alive[v]) continue;
    out.parent[dense[v]] = v == root ? -1 : dense[b.parent[v]];
  }
  for (int t = 0; t < inst.n(); ++t) {
    if (token[t] >= 0) map.terminal_image[t] = dense[token[t]];
  }

  validate(out);
  if (!is_normalized(out)) throw ValidationError("normalization failed to reach normal form");
  return {out, map};
}

std::int64_t Tour::total_units() const {
  std::int64_t total = 0;
  for (const auto& c : claims) total += c.units;
  return total;
}

Cost tour_cost(const Instance& inst, const Tour& tour) {
  // Union of root paths of all claimed vertices, each edge charged twice.
  static thread_local std::vector<char> seen;
  seen.assign(inst.n(), 0);
  Cost sum = 0;
  for (const auto& c : tour.claims) {
    int v = c.v;
    while (v != inst.root && !seen[v]) {
      seen[v] = 1;
      sum += inst.weight[v];
      v = inst.parent[v];
    }
  }
  return 2 * sum;
}

Cost solution_cost(const Instance& inst, const Solution& sol) {
  Cost sum = 0;
  for (const auto& t : sol.tours) sum += tour_cost(inst, t);
  return sum;
}

VerifyReport verify(const Instance& inst, const Solution& sol) {
  VerifyReport report;
  std::vector<std::int64_t> served(inst.n(), 0);
  for (int i = 0; i < (int)sol.tours.size(); ++i) {
    const Tour& t = sol.tours[i];
    std::int64_t units = 0;
    for (const auto& c : t.claims) {
      if (c.v < 0 || c.v >= inst.n() || !inst.is_terminal(c.v)) {
        report.violations.push_back({Violation::Kind::Claim, i,
                                     "claim on non-terminal vertex " + std::to_string(c.v)});
        continue;
      }
      if (c.units <= 0) {
        report.violations.push_back({Violation::Kind::Claim, i,
                                     "non-positive units at vertex " + std::to_string(c.v)});
        continue;
      }
      served[c.v] += c.units;
      units += c.units;
    }
    if (units > inst.capacity) {
      report.violations.push_back({Violation::Kind::Capacity, i,
                                   "tour serves " + std::to_string(units) + " units, capacity " +
                                       std::to_string(inst.capacity)});
    }
    report.total_cost += tour_cost(inst, t);
  }
  for (int v = 0; v < inst.n(); ++v) {
    if (served[v] != inst.demand[v]) {
      report.violations.push_back({Violation::Kind::Coverage, -1,
                                   "vertex " + std::to_string(v) + " served " +
                                       std::to_string(served[v]) + " of demand " +
                                       std::to_string(inst.demand[v])});
    }
  }
  if (report.total_cost != sol.cost) {
    report.violations.push_back({Violation::Kind::Cost, -1,
                                 "recorded cost " + std::to_string(sol.cost) +
                                     " differs from recomputed " +
                                     std::to_string(report.total_cost)});
  }
  report.feasible = report.violations.empty();
  return report;
}

Distances distances(const Instance& inst) {
  Distances d;
  d.dist.assign(inst.n(), -1);
  d.dist[inst.root] = 0;
  // Vertex ids are not ordered root-first in general; resolve lazily.
  for (int v = 0; v < inst.n(); ++v) {
    if (d.dist[v] >= 0) continue;
    std::vector<int> stack;
    int u = v;
    while (d.dist[u] < 0) {
      stack.push_back(u);
      u = inst.parent[u];
    }
    while (!stack.empty()) {
      int w = stack.back();
      stack.pop_back();
      d.dist[w] = d.dist[inst.parent[w]] + inst.weight[w];
    }
  }
  bool any = false;
  for (int v = 0; v < inst.n(); ++v) {
    if (!inst.is_terminal(v)) continue;
    if (!any) {
      d.d_min = d.d_max = d.dist[v];
      any = true;
    } else {
      d.d_min = std::min(d.d_min, d.dist[v]);
      d.d_max = std::max(d.d_max, d.dist[v]);
    }
  }
  if (!any) throw EmptyInstanceError("distances: instance has no terminals");
  return d;
}

Solution map_solution_to_base(const VertexMap& map, const Instance& base,
                              const Solution& sol) {
  Solution out;
  out.tours.reserve(sol.tours.size());
  for (const auto& t : sol.tours) {
    std::map<int, std::int64_t> merged;
    for (const auto& c : t.claims) {
      int b = map.to_base[c.v];
      if (b < 0) throw ValidationError("claim on a vertex with no base image");
      merged[b] += c.units;
    }
    Tour bt;
    bt.claims.reserve(merged.size());
    for (const auto& [v, units] : merged) bt.claims.push_back({v, units});
    out.tours.push_back(std::move(bt));
  }
  out.cost = solution_cost(base, out);
  return out;
}

}  // namespace treecvrp
