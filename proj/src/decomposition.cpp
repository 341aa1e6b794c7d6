#include "treecvrp/decomposition.hpp"

#include <algorithm>
#include <numeric>

namespace treecvrp {

namespace {

struct TreeView {
  std::vector<std::vector<int>> children;
  std::vector<int> order;       // root-first traversal
  std::vector<std::int64_t> subtree_demand;
  std::vector<int> pre, post;   // preorder interval per vertex
  std::vector<Cost> dist;
};

TreeView make_view(const Instance& inst) {
  TreeView t;
  t.children = children_of(inst);
  t.order.reserve(inst.n());
  t.pre.assign(inst.n(), 0);
  t.post.assign(inst.n(), 0);
  t.dist.assign(inst.n(), 0);
  std::vector<std::pair<int, bool>> stack = {{inst.root, false}};
  int clock = 0;
  while (!stack.empty()) {
    auto [v, exiting] = stack.back();
    stack.pop_back();
    if (exiting) {
      t.post[v] = clock;
      continue;
    }
    t.pre[v] = clock++;
    t.order.push_back(v);
    if (v != inst.root) t.dist[v] = t.dist[inst.parent[v]] + inst.weight[v];
    stack.push_back({v, true});
    for (auto it = t.children[v].rbegin(); it != t.children[v].rend(); ++it) {
      stack.push_back({*it, false});
    }
  }
  t.subtree_demand.assign(inst.demand.begin(), inst.demand.end());
  for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
    if (*it != inst.root) t.subtree_demand[inst.parent[*it]] += t.subtree_demand[*it];
  }
  return t;
}

// Collects every edge of the subtree rooted at v (child-vertex naming).
void collect_subtree_edges(const TreeView& t, int v, std::vector<int>& out) {
  std::vector<int> stack = {v};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int c : t.children[u]) {
      out.push_back(c);
      stack.push_back(c);
    }
  }
}

}  // namespace

Decomposition decompose(const Instance& inst, std::int64_t gamma_k) {
  validate(inst);
  if (!is_normalized(inst)) throw ValidationError("decompose requires a normalized instance");
  if (gamma_k < 1) throw ValidationError("gamma_k must be at least 1");

  TreeView t = make_view(inst);
  Decomposition dec;
  dec.gamma_k = gamma_k;
  dec.edge_component.assign(inst.n(), -1);

  auto emit = [&](Component c) {
    c.id = static_cast<int>(dec.components.size());
    std::sort(c.edges.begin(), c.edges.end());
    c.demand = 0;
    for (int e : c.edges) {
      dec.edge_component[e] = c.id;
      c.demand += inst.demand[e];  // terminals are leaves, so edge children cover them
    }
    dec.components.push_back(std::move(c));
  };

  // Leaf components: deepest subtrees whose demand reaches gamma_k.
  std::vector<int> leaf_roots;
  for (int v : t.order) {
    if (t.children[v].empty()) continue;
    if (t.subtree_demand[v] < gamma_k) continue;
    bool all_below = true;
    for (int c : t.children[v]) {
      if (t.subtree_demand[c] >= gamma_k) {
        all_below = false;
        break;
      }
    }
    if (all_below) leaf_roots.push_back(v);
  }

  if (leaf_roots.empty()) {
    // Degenerate case: no subtree reaches the threshold (or the threshold is
    // too small to admit one).  The whole tree forms a single leaf component.
    Component whole;
    whole.kind = Component::Kind::Leaf;
    whole.root = inst.root;
    collect_subtree_edges(t, inst.root, whole.edges);
    emit(std::move(whole));
    dec.key_vertices = {inst.root};
  } else {
    for (int v : leaf_roots) {
      Component leaf;
      leaf.kind = Component::Kind::Leaf;
      leaf.root = v;
      collect_subtree_edges(t, v, leaf.edges);
      emit(std::move(leaf));
    }

    // Backbone: vertices on root-to-leaf-component paths.
    std::vector<char> backbone(inst.n(), 0);
    for (int v : leaf_roots) {
      int u = v;
      while (u != -1 && !backbone[u]) {
        backbone[u] = 1;
        u = inst.parent[u];
      }
    }
    std::vector<char> is_key(inst.n(), 0);
    is_key[inst.root] = 1;
    for (int v : leaf_roots) is_key[v] = 1;
    for (int v = 0; v < inst.n(); ++v) {
      if (!backbone[v]) continue;
      int spread = 0;
      for (int c : t.children[v]) spread += backbone[c];
      if (spread >= 2) is_key[v] = 1;
    }
    for (int v = 0; v < inst.n(); ++v) {
      if (is_key[v]) dec.key_vertices.push_back(v);
    }

    // Between each key vertex and its closest key ancestor, peel components
    // bottom-up: walk towards the ancestor accumulating the demand hanging
    // off the path, and cut as soon as it reaches gamma_k.
    for (int lower : dec.key_vertices) {
      if (lower == inst.root) continue;
      std::vector<int> path = {lower};  // lower ... upper
      int upper = inst.parent[lower];
      while (!is_key[upper]) {
        path.push_back(upper);
        upper = inst.parent[upper];
      }
      path.push_back(upper);

      std::vector<char> on_path(inst.n(), 0);
      for (int v : path) on_path[v] = 1;

      int cut = lower;  // exit vertex of the next component to peel
      std::int64_t hanging = 0;
      std::vector<int> side_edges;  // edges collected since the last cut
      for (std::size_t i = 1; i < path.size(); ++i) {
        const int v = path[i];
        side_edges.push_back(path[i - 1]);  // path edge towards the cut
        for (int c : t.children[v]) {
          if (on_path[c] || backbone[c]) continue;  // other pairs own backbone branches
          hanging += t.subtree_demand[c];
          side_edges.push_back(c);
          collect_subtree_edges(t, c, side_edges);
        }
        const bool last = i + 1 == path.size();
        if (hanging >= gamma_k || (last && !side_edges.empty())) {
          Component part;
          part.kind = Component::Kind::Internal;
          part.root = v;
          part.exit = cut;
          part.spine_weight = t.dist[cut] - t.dist[v];
          part.edges = std::move(side_edges);
          emit(std::move(part));
          side_edges.clear();
          cut = v;
          hanging = 0;
        }
      }
    }
  }

  for (int v = 0; v < inst.n(); ++v) {
    if (v != inst.root && dec.edge_component[v] < 0) {
      throw ValidationError("decompose: edge partition is not total");
    }
  }

  // Charging map: big components carry themselves; a small component charges
  // the extreme leaf component under its exit — the rightmost one when the
  // component hangs off its root's first child, the leftmost one otherwise.
  dec.big.assign(dec.components.size(), 0);
  dec.big_image.assign(dec.components.size(), -1);
  std::vector<std::pair<int, int>> leaf_pre;  // (preorder of root, component id)
  for (const auto& c : dec.components) {
    if (c.kind == Component::Kind::Leaf) leaf_pre.push_back({t.pre[c.root], c.id});
  }
  std::sort(leaf_pre.begin(), leaf_pre.end());
  for (auto& c : dec.components) {
    dec.big[c.id] = c.demand >= gamma_k ? 1 : 0;
    if (dec.big[c.id] || dec.components.size() == 1) {
      dec.big_image[c.id] = c.id;
      continue;
    }
    // Leaf components under the exit: preorder interval of the exit vertex.
    auto lo = std::lower_bound(leaf_pre.begin(), leaf_pre.end(),
                               std::make_pair(t.pre[c.exit], -1));
    auto hi = std::lower_bound(leaf_pre.begin(), leaf_pre.end(),
                               std::make_pair(t.post[c.exit], -1));
    if (lo == hi) throw ValidationError("decompose: small component with no leaf below");
    const auto& kids = t.children[c.root];
    const bool first_side =
        !kids.empty() && dec.edge_component[kids[0]] == c.id;
    dec.big_image[c.id] = first_side ? std::prev(hi)->second : lo->second;
  }

  return dec;
}

Cost sum_component_root_distances(const Instance& inst, const Decomposition& dec) {
  auto t = make_view(inst);
  Cost sum = 0;
  for (const auto& c : dec.components) sum += t.dist[c.root];
  return sum;
}

std::int64_t sum_extra_children(const Instance& inst) {
  auto ch = children_of(inst);
  std::int64_t total = 0;
  for (int v = 0; v < inst.n(); ++v) {
    if (!ch[v].empty()) total += static_cast<std::int64_t>(ch[v].size()) - 1;
  }
  return total;
}

namespace {

void complain(DecompositionCheck& chk, std::string msg) {
  chk.violations.push_back(std::move(msg));
}

}  // namespace

DecompositionCheck check_decomposition(const Instance& inst, const Decomposition& dec) {
  DecompositionCheck chk;
  TreeView t = make_view(inst);
  const std::int64_t gk = dec.gamma_k;
  const bool multi = dec.components.size() > 1;

  // --- edge partition ---
  std::vector<int> owner(inst.n(), -1);
  std::size_t edge_total = 0;
  for (const auto& c : dec.components) {
    if (c.id != static_cast<int>(&c - dec.components.data())) {
      complain(chk, "component ids are not dense");
    }
    if (c.edges.empty()) complain(chk, "component " + std::to_string(c.id) + " has no edges");
    for (int e : c.edges) {
      if (e <= -1 || e >= inst.n() || e == inst.root) {
        complain(chk, "component " + std::to_string(c.id) + " names a bad edge");
        continue;
      }
      if (owner[e] != -1) {
        complain(chk, "edge to " + std::to_string(e) + " appears in two components");
      }
      owner[e] = c.id;
    }
    edge_total += c.edges.size();
  }
  for (int v = 0; v < inst.n(); ++v) {
    if (v == inst.root) continue;
    if (owner[v] < 0) complain(chk, "edge to " + std::to_string(v) + " belongs to no component");
    if ((int)dec.edge_component.size() == inst.n() && dec.edge_component[v] != owner[v]) {
      complain(chk, "edge_component disagrees with component edge lists at " + std::to_string(v));
    }
  }
  if (edge_total != static_cast<std::size_t>(inst.n() - 1)) {
    complain(chk, "edge partition does not cover the tree exactly once");
  }
  if (!chk.violations.empty()) {
    chk.ok = false;
    return chk;  // structure is broken; deeper checks would chase bad data
  }

  std::int64_t total_demand = inst.total_demand();

  for (const auto& c : dec.components) {
    // Vertices of the component and their incident component edges.
    std::vector<int> verts;
    for (int e : c.edges) {
      verts.push_back(e);
      verts.push_back(inst.parent[e]);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

    // Root: the unique vertex whose parent edge is outside the component.
    int root_found = -1;
    for (int v : verts) {
      if (v == inst.root || owner[v] != c.id) {
        if (root_found != -1) {
          complain(chk, "component " + std::to_string(c.id) + " is disconnected");
        }
        root_found = v;
      }
    }
    if (root_found != c.root) {
      complain(chk, "component " + std::to_string(c.id) + " records the wrong root");
    }

    // Demand recorded vs terminals among component edge children.
    std::int64_t demand = 0;
    for (int e : c.edges) demand += inst.demand[e];
    if (demand != c.demand) {
      complain(chk, "component " + std::to_string(c.id) + " records the wrong demand");
    }

    // Interaction restriction: below the root, only the exit may touch other
    // components; an exit touches them only through its child edges.
    int exit_found = -1;
    for (int v : verts) {
      if (v == c.root) continue;
      bool dangling = false;
      for (int child : t.children[v]) {
        if (owner[child] != c.id) dangling = true;
      }
      if (dangling) {
        if (exit_found != -1) {
          complain(chk, "component " + std::to_string(c.id) + " has two exit vertices");
        }
        exit_found = v;
      }
    }
    if (c.kind == Component::Kind::Leaf) {
      if (exit_found != -1) {
        complain(chk, "leaf component " + std::to_string(c.id) + " has edges below it");
      }
      if (c.exit != -1) complain(chk, "leaf component with a recorded exit");
      if (multi && demand < gk) {
        complain(chk, "leaf component " + std::to_string(c.id) + " below the demand threshold");
      }
    } else {
      if (c.exit < 0 || c.exit >= inst.n() ||
          (exit_found != -1 && exit_found != c.exit)) {
        complain(chk, "internal component " + std::to_string(c.id) + " records the wrong exit");
      }
      // The exit must lie strictly below the root inside the component, and
      // the recorded spine must be the root->exit distance.
      if (c.exit >= 0) {
        bool reachable = false;
        Cost spine = 0;
        int u = c.exit;
        while (u != -1 && u != c.root) {
          if (owner[u] != c.id) break;
          spine += inst.weight[u];
          u = inst.parent[u];
        }
        reachable = (u == c.root) && c.exit != c.root;
        if (!reachable) {
          complain(chk, "exit of component " + std::to_string(c.id) +
                            " is not below its root inside the component");
        } else if (spine != c.spine_weight) {
          complain(chk, "component " + std::to_string(c.id) + " records the wrong spine weight");
        }
      }
    }
    if (multi && demand > 2 * gk) {
      complain(chk, "component " + std::to_string(c.id) + " exceeds twice the demand threshold");
    }

    // Charging map.
    if (multi) {
      int img = c.id < (int)dec.big_image.size() ? dec.big_image[c.id] : -1;
      if (img < 0 || img >= (int)dec.components.size()) {
        complain(chk, "component " + std::to_string(c.id) + " charges nothing");
      } else {
        const auto& target = dec.components[img];
        if (target.demand < gk) {
          complain(chk, "component " + std::to_string(c.id) + " charges a small component");
        }
        // Descendant-or-self: the target root lies in the subtree of c.root.
        if (!(t.pre[c.root] <= t.pre[target.root] && t.pre[target.root] < t.post[c.root])) {
          complain(chk, "component " + std::to_string(c.id) + " charges a non-descendant");
        }
        if (dec.big[c.id] && img != c.id) {
          complain(chk, "big component " + std::to_string(c.id) + " must charge itself");
        }
      }
    }
  }

  if (multi) {
    std::vector<int> charges(dec.components.size(), 0);
    for (int img : dec.big_image) {
      if (img >= 0 && img < (int)charges.size()) charges[img]++;
    }
    for (std::size_t i = 0; i < charges.size(); ++i) {
      if (charges[i] > 3) {
        complain(chk, "big component " + std::to_string(i) + " is charged " +
                          std::to_string(charges[i]) + " times");
      }
    }
    if ((__int128)gk * static_cast<std::int64_t>(dec.components.size()) >
        (__int128)3 * total_demand) {
      complain(chk, "component count exceeds 3/gamma_k times the total demand");
    }
  }

  chk.ok = chk.violations.empty();
  return chk;
}

}  // namespace treecvrp
