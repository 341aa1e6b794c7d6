#include "treecvrp/transforms.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "treecvrp/gen.hpp"

namespace treecvrp {

namespace {

// Largest i with band_base^i <= d, for scaled d >= 1 (so i >= 0).
std::int64_t band_index(Cost d, std::int64_t base) {
  std::int64_t i = 0;
  __int128 p = 1;
  while (p * base <= d) {
    p *= base;
    ++i;
  }
  return i;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::vector<BandPart> split_by_distance(const Instance& inst, std::int64_t band_base,
                                        std::int64_t offset) {
  if (band_base < 2) throw ValidationError("split_by_distance: band base must be at least 2");
  if (offset < 0 || offset >= band_base)
    throw ValidationError("split_by_distance: offset out of range");
  const Distances d = distances(inst);

  struct Collector {
    std::string tag;
    std::vector<int> terms;
  };
  // Key: minimal band index the part can contain; the zero part sorts first.
  std::map<std::int64_t, Collector> parts;
  constexpr std::int64_t kZeroKey = std::numeric_limits<std::int64_t>::min();

  for (int v = 0; v < inst.n(); ++v) {
    if (!inst.is_terminal(v)) continue;
    const Cost dv = d.dist[v];
    if (dv == 0) {
      auto& c = parts[kZeroKey];
      c.tag = "zero";
      c.terms.push_back(v);
      continue;
    }
    const std::int64_t i = band_index(dv, band_base);
    std::int64_t key;
    std::string tag;
    if ((i - offset) % band_base == 0 && i >= offset) {
      key = i;
      tag = "near:" + std::to_string((i - offset) / band_base);
    } else {
      const std::int64_t j = floor_div(i - offset, band_base);
      key = band_base * j + offset + 1;  // lowest index the run may hold
      tag = "far:" + std::to_string(j);
    }
    auto& c = parts[key];
    c.tag = tag;
    c.terms.push_back(v);
  }

  std::vector<BandPart> out;
  out.reserve(parts.size());
  for (auto& [key, col] : parts) {
    BandPart p;
    p.tag = col.tag;
    p.sub = inst;
    std::fill(p.sub.demand.begin(), p.sub.demand.end(), 0);
    for (int v : col.terms) p.sub.demand[v] = inst.demand[v];
    p.terminals = static_cast<std::int64_t>(col.terms.size());
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

// Zero-distance terminals cost nothing to serve; pack them greedily.
void serve_free_terminals(const Instance& inst, const BandPart& part, Solution& acc) {
  Tour t;
  std::int64_t used = 0;
  for (int v = 0; v < part.sub.n(); ++v) {
    if (!part.sub.is_terminal(v)) continue;
    const std::int64_t dem = part.sub.demand[v];
    if (dem > inst.capacity)
      throw ValidationError("solve_banded: terminal demand exceeds capacity");
    if (used + dem > inst.capacity) {
      acc.tours.push_back(std::move(t));
      t = Tour{};
      used = 0;
    }
    t.claims.push_back({v, dem});
    used += dem;
  }
  if (!t.claims.empty()) acc.tours.push_back(std::move(t));
}

Solution assemble_banded(const Instance& inst, std::int64_t band_base, std::int64_t offset,
                         const SubSolver& solve) {
  Solution acc;
  for (const BandPart& part : split_by_distance(inst, band_base, offset)) {
    if (part.tag == "zero") {
      serve_free_terminals(inst, part, acc);
    } else {
      Solution sub = solve(part.sub);
      for (auto& t : sub.tours) acc.tours.push_back(std::move(t));
    }
  }
  acc.cost = solution_cost(inst, acc);
  return acc;
}

}  // namespace

Solution solve_banded(const Instance& inst, std::int64_t band_base, const SubSolver& solve) {
  if (band_base < 2) throw ValidationError("solve_banded: band base must be at least 2");
  if (inst.terminals().empty()) return Solution{};
  Solution best;
  bool have = false;
  for (std::int64_t offset = 0; offset < band_base; ++offset) {
    Solution cand = assemble_banded(inst, band_base, offset, solve);
    if (!have || cand.cost < best.cost) {
      best = std::move(cand);
      have = true;
    }
  }
  return best;
}

Solution solve_banded_random(const Instance& inst, std::int64_t band_base,
                             const SubSolver& solve, std::uint64_t seed) {
  if (band_base < 2) throw ValidationError("solve_banded: band base must be at least 2");
  if (inst.terminals().empty()) return Solution{};
  Rng rng(seed);
  const std::int64_t offset = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(band_base)));
  return assemble_banded(inst, band_base, offset, solve);
}

namespace {

struct UnionFind {
  std::vector<int> up;
  explicit UnionFind(int n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  int find(int x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) up[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

HatTree build_hat_tree(const Instance& inst, const Decomposition& dec, Cost class_width) {
  if (class_width < 1) throw ValidationError("build_hat_tree: class width must be positive");
  if (dec.components.empty()) throw ValidationError("build_hat_tree: empty decomposition");
  const int n = inst.n();
  const int m = static_cast<int>(dec.components.size());
  const std::vector<Cost> dist = distances(inst).dist;

  std::vector<int> depth(n, 0);
  {
    const auto kids = children_of(inst);
    std::vector<int> stack{inst.root};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int c : kids[v]) {
        depth[c] = depth[v] + 1;
        stack.push_back(c);
      }
    }
  }

  std::vector<std::int64_t> kappa(m);
  for (int c = 0; c < m; ++c) kappa[c] = dist[dec.components[c].root] / class_width + 1;

  // Same-class components sharing a vertex merge into one group: a component
  // always shares its root with the component owning the edge above it, and
  // components rooted at one vertex share that vertex (and, having equal root
  // distance, always agree on the class).
  UnionFind uf(m);
  std::map<int, int> first_at_root;
  for (int c = 0; c < m; ++c) {
    const int r = dec.components[c].root;
    auto [it, fresh] = first_at_root.emplace(r, c);
    if (!fresh) uf.unite(it->second, c);
    if (r != inst.root) {
      const int pc = dec.edge_component[r];
      if (pc >= 0 && kappa[pc] == kappa[c]) uf.unite(pc, c);
    }
  }

  // Group ids in order of smallest member, anchor = unique shallowest root.
  std::vector<int> group(m, -1);
  std::vector<int> group_anchor;
  for (int c = 0; c < m; ++c) {
    const int rep = uf.find(c);
    if (group[rep] < 0) {
      group[rep] = static_cast<int>(group_anchor.size());
      group_anchor.push_back(dec.components[rep].root);
    }
    group[c] = group[rep];
    int& anchor = group_anchor[group[c]];
    const int r = dec.components[c].root;
    if (depth[r] < depth[anchor]) anchor = r;
  }
  for (int c = 0; c < m; ++c) {
    const int r = dec.components[c].root;
    const int anchor = group_anchor[group[c]];
    if (r != anchor && depth[r] == depth[anchor])
      throw ValidationError("build_hat_tree: ambiguous group anchor");
  }

  HatTree out;
  out.hat = inst;
  out.class_width = class_width;
  out.placement.resize(m);
  std::map<int, int> copy_of;  // original moved root -> fresh vertex
  for (int c = 0; c < m; ++c) {
    const Component& comp = dec.components[c];
    const int anchor = group_anchor[group[c]];
    ComponentPlacement& pl = out.placement[c];
    pl.anchor = anchor;
    pl.dist_class = kappa[c];
    pl.group = group[c];
    if (comp.root == anchor) {
      pl.attach_weight = 0;
      pl.hat_root = comp.root;
      continue;
    }
    pl.attach_weight = dist[comp.root] - dist[anchor];
    auto [it, fresh] = copy_of.emplace(comp.root, 0);
    if (fresh) {
      it->second = static_cast<int>(out.hat.parent.size());
      out.hat.parent.push_back(anchor);
      out.hat.weight.push_back(pl.attach_weight);
      out.hat.demand.push_back(0);
    }
    pl.hat_root = it->second;
    for (int e : comp.edges)
      if (inst.parent[e] == comp.root) out.hat.parent[e] = pl.hat_root;
  }

  out.map.to_base.resize(out.hat.n());
  std::iota(out.map.to_base.begin(), out.map.to_base.end(), 0);
  for (const auto& [orig, copy] : copy_of) out.map.to_base[copy] = orig;
  out.map.terminal_image.assign(n, -1);
  for (int v = 0; v < n; ++v)
    if (inst.is_terminal(v)) out.map.terminal_image[v] = v;

  out.anchors = group_anchor;
  std::sort(out.anchors.begin(), out.anchors.end());
  out.anchors.erase(std::unique(out.anchors.begin(), out.anchors.end()), out.anchors.end());

  validate(out.hat);
  return out;
}

Cost default_class_width(const Instance& inst, std::int64_t inv_eps) {
  if (inv_eps < 1) throw ValidationError("default_class_width: inverse epsilon must be positive");
  const Distances d = distances(inst);
  Cost dmin_pos = 0;
  for (int v = 0; v < inst.n(); ++v) {
    if (!inst.is_terminal(v) || d.dist[v] <= 0) continue;
    if (dmin_pos == 0 || d.dist[v] < dmin_pos) dmin_pos = d.dist[v];
  }
  if (dmin_pos == 0) return 1;
  __int128 denom = 1;
  const __int128 cap = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t i = 0; i < inv_eps + 2; ++i) {
    denom *= inv_eps;
    if (denom > cap) return 1;
  }
  const Cost w = dmin_pos / static_cast<Cost>(denom);
  return w >= 1 ? w : 1;
}

Solution lift_solution(const HatTree& hat, const Instance& original, const Solution& sol) {
  const VerifyReport rep = verify(hat.hat, sol);
  if (!rep.feasible) {
    std::ostringstream msg;
    msg << "lift_solution: infeasible on the reduced tree:";
    for (const auto& v : rep.violations) msg << ' ' << v.message << ';';
    throw ValidationError(msg.str());
  }
  return map_solution_to_base(hat.map, original, sol);
}

}  // namespace treecvrp
