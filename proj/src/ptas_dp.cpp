#include "treecvrp/ptas_dp.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "treecvrp/baselines.hpp"

namespace treecvrp {

namespace {

constexpr std::int64_t kSat = std::numeric_limits<std::int64_t>::max();

std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  const __int128 p = static_cast<__int128>(a) * b;
  if (p > kSat) return kSat;
  return static_cast<std::int64_t>(p);
}

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  const __int128 s = static_cast<__int128>(a) + b;
  if (s > kSat) return kSat;
  return static_cast<std::int64_t>(s);
}

std::int64_t sat_pow(std::int64_t base, std::int64_t exp) {
  std::int64_t r = 1;
  for (std::int64_t i = 0; i < exp; ++i) {
    r = sat_mul(r, base);
    if (r == kSat) return kSat;
  }
  return r;
}

std::int64_t binom_capped(std::int64_t n, std::int64_t r, std::int64_t cap) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  __int128 acc = 1;
  for (std::int64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;  // exact at every step
    if (acc > cap) return cap + 1;
  }
  return static_cast<std::int64_t>(acc);
}

LocalKey canon_local(LocalKey key) {
  std::sort(key.begin(), key.end());
  return key;
}

SumKey to_sum_key(const std::map<std::int64_t, std::int64_t>& agg) {
  SumKey key;
  for (const auto& [s, n] : agg)
    if (n > 0) key.push_back({s, n});
  return key;
}

std::int64_t sum_tours(const SumKey& key) {
  std::int64_t t = 0;
  for (const auto& p : key) t += p.n;
  return t;
}

using Matrix = std::vector<std::vector<std::int64_t>>;

// All non-negative integer matrices with row sums <= rows[r] (== if
// row_exact) and column sums <= cols[c], zero outside `ok`.  The callback
// sees each matrix once; enumeration order is deterministic.
void enum_matrices(const std::vector<std::int64_t>& rows, const std::vector<std::int64_t>& cols,
                   const std::vector<std::vector<char>>& ok, bool row_exact,
                   const std::function<void(const Matrix&)>& cb) {
  const int R = static_cast<int>(rows.size());
  const int C = static_cast<int>(cols.size());
  Matrix m(R, std::vector<std::int64_t>(C, 0));
  if (R == 0) {
    cb(m);
    return;
  }
  std::vector<std::int64_t> col_rem = cols;
  std::function<void(int, int, std::int64_t)> rec = [&](int r, int c, std::int64_t row_rem) {
    if (c == C) {
      if (row_exact && row_rem != 0) return;
      if (r + 1 == R) {
        cb(m);
      } else {
        rec(r + 1, 0, rows[r + 1]);
      }
      return;
    }
    const std::int64_t hi = ok[r][c] ? std::min(row_rem, col_rem[c]) : 0;
    for (std::int64_t u = 0; u <= hi; ++u) {
      m[r][c] = u;
      col_rem[c] -= u;
      rec(r, c + 1, row_rem - u);
      col_rem[c] += u;
    }
    m[r][c] = 0;
  };
  rec(0, 0, rows[0]);
}

// ---------------------------------------------------------------- tables

struct LocalBack {
  enum class Kind { LeafSeed, ExitSeed, Merge } kind = Kind::LeafSeed;
  LocalKey a1, a2;  // child configurations (a2 empty for a single child)
  // merged pairs by value: (pair from child 1, pair from child 2, count)
  std::vector<std::tuple<LocalPair, LocalPair, std::int64_t>> matches;
};
struct LocalVal {
  Cost cost = 0;
  LocalBack back;
};
using LocalTable = std::map<LocalKey, LocalVal>;

struct RootBack {
  bool leaf = true;
  LocalKey ac;
  SumKey ae;
  // associations by value: (passing local demand, exit subtour demand, count)
  std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> assoc;
};
struct RootVal {
  Cost cost = 0;
  RootBack back;
};
using RootTable = std::map<SumKey, RootVal>;

struct ZStep {
  SumKey child_cfg;  // pre-rounding key in the child's table
  // associations by value: (pool padded demand, rounded child demand, count)
  std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> assoc;
};
struct ZBack {
  std::vector<std::int64_t> x;
  std::vector<ZStep> steps;
};
struct ZVal {
  Cost cost = 0;
  ZBack back;
};
using ZTable = std::map<SumKey, ZVal>;

template <typename Table, typename Val>
void insert_min(Table& table, const typename Table::key_type& key, const Val& val) {
  auto it = table.find(key);
  if (it == table.end()) {
    table.emplace(key, val);
  } else if (val.cost < it->second.cost) {
    it->second = val;
  }
}

void check_params(const PtasParams& p, std::int64_t capacity) {
  if (p.inv_eps < 1) throw ValidationError("ptas: inverse epsilon must be at least 1");
  if (p.gamma_k < 1 || p.min_subtour_demand < 1 || p.max_tours_per_component < 1 ||
      p.x_set_size < 1 || p.sum_list_cap < 1)
    throw ValidationError("ptas: all parameter caps must be at least 1");
  if (p.min_subtour_demand > capacity)
    throw ValidationError("ptas: min_subtour_demand exceeds the tour capacity");
}

// ----------------------------------------------------- local configurations

struct CompView {
  int root = -1;            // component root in the working tree
  int exit = -1;            // -1 for leaf components
  std::map<int, std::vector<int>> kids;  // in-component children
  std::vector<int> order;   // bottom-up
};

CompView make_comp_view(const Instance& tree, const Component& comp, int root_override) {
  CompView cv;
  cv.root = root_override >= 0 ? root_override : comp.root;
  cv.exit = comp.kind == Component::Kind::Internal ? comp.exit : -1;
  for (int e : comp.edges) cv.kids[tree.parent[e]].push_back(e);
  for (auto& [v, ks] : cv.kids) std::sort(ks.begin(), ks.end());
  std::vector<int> stack{cv.root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    cv.order.push_back(v);
    auto it = cv.kids.find(v);
    if (it != cv.kids.end())
      for (int c : it->second) stack.push_back(c);
  }
  std::reverse(cv.order.begin(), cv.order.end());
  return cv;
}

// f-tables for every vertex of one component, bottom-up.
std::map<int, LocalTable> compute_local(const Instance& tree, const CompView& cv,
                                        const PtasParams& params, std::int64_t pass_cap) {
  const std::int64_t k = tree.capacity;
  std::map<int, LocalTable> tables;
  for (int v : cv.order) {
    LocalTable& tab = tables[v];
    const auto kit = cv.kids.find(v);
    const bool has_kids = kit != cv.kids.end() && !kit->second.empty();
    if (!has_kids) {
      if (v == cv.exit) {
        // Case 1: the exit seeds any number of spine-bound passing subtours.
        LocalKey key;
        for (std::int64_t l = 0; l <= pass_cap; ++l) {
          LocalVal val;
          val.back.kind = LocalBack::Kind::ExitSeed;
          tab.emplace(key, val);
          key.push_back({0, true});
        }
      } else {
        // Case 2: a leaf of the working tree is a terminal.
        if (!tree.is_terminal(v))
          throw std::logic_error("ptas local_dp: childless component vertex is not a terminal");
        LocalVal val;
        val.back.kind = LocalBack::Kind::LeafSeed;
        tab.emplace(LocalKey{{1, false}}, val);
      }
      continue;
    }
    // Case 3: merge the children; with a single child only the edge is paid.
    const std::vector<int>& ks = kit->second;
    if (ks.size() > 2) throw std::logic_error("ptas local_dp: component vertex has >2 children");
    const int v1 = ks[0];
    const int v2 = ks.size() == 2 ? ks[1] : -1;
    const LocalTable& t1 = tables.at(v1);
    static const LocalTable kEmptyTable = {{LocalKey{}, LocalVal{}}};
    const LocalTable& t2 = v2 >= 0 ? tables.at(v2) : kEmptyTable;
    const Cost w1 = tree.weight[v1];
    const Cost w2 = v2 >= 0 ? tree.weight[v2] : 0;
    for (const auto& [a1, val1] : t1) {
      for (const auto& [a2, val2] : t2) {
        const Cost base = val1.cost + val2.cost +
                          2 * static_cast<Cost>(a1.size()) * w1 +
                          2 * static_cast<Cost>(a2.size()) * w2;
        // Group equal pairs; a merged part takes one subtour from each side.
        std::vector<std::pair<LocalPair, std::int64_t>> g1, g2;
        for (const auto& p : a1) {
          if (!g1.empty() && g1.back().first == p)
            ++g1.back().second;
          else
            g1.push_back({p, 1});
        }
        for (const auto& p : a2) {
          if (!g2.empty() && g2.back().first == p)
            ++g2.back().second;
          else
            g2.push_back({p, 1});
        }
        std::vector<std::int64_t> rows, cols;
        for (auto& [p, c] : g1) rows.push_back(c);
        for (auto& [p, c] : g2) cols.push_back(c);
        std::vector<std::vector<char>> ok(rows.size(), std::vector<char>(cols.size(), 0));
        for (size_t r = 0; r < g1.size(); ++r)
          for (size_t c = 0; c < g2.size(); ++c)
            ok[r][c] = g1[r].first.s + g2[c].first.s <= k;
        enum_matrices(rows, cols, ok, false, [&](const Matrix& m) {
          LocalKey out;
          std::int64_t merged = 0;
          std::vector<std::tuple<LocalPair, LocalPair, std::int64_t>> matches;
          std::vector<std::int64_t> used_r(g1.size(), 0), used_c(g2.size(), 0);
          for (size_t r = 0; r < g1.size(); ++r) {
            for (size_t c = 0; c < g2.size(); ++c) {
              const std::int64_t u = m[r][c];
              if (u == 0) continue;
              used_r[r] += u;
              used_c[c] += u;
              merged += u;
              matches.emplace_back(g1[r].first, g2[c].first, u);
              const LocalPair mp{g1[r].first.s + g2[c].first.s,
                                 g1[r].first.passing || g2[c].first.passing};
              for (std::int64_t i = 0; i < u; ++i) out.push_back(mp);
            }
          }
          for (size_t r = 0; r < g1.size(); ++r)
            for (std::int64_t i = used_r[r]; i < g1[r].second; ++i) out.push_back(g1[r].first);
          for (size_t c = 0; c < g2.size(); ++c)
            for (std::int64_t i = used_c[c]; i < g2[c].second; ++i) out.push_back(g2[c].first);
          if (static_cast<std::int64_t>(out.size()) > params.max_tours_per_component) return;
          LocalVal val;
          val.cost = base;
          val.back.kind = LocalBack::Kind::Merge;
          val.back.a1 = a1;
          val.back.a2 = a2;
          val.back.matches = matches;
          insert_min(tab, canon_local(std::move(out)), val);
        });
      }
    }
  }
  return tables;
}

// ------------------------------------------- subtree configs at comp roots

std::int64_t root_list_cap(const PtasParams& p) {
  return sat_add(p.sum_list_cap, p.max_tours_per_component);
}

RootTable compute_root(const LocalTable& local_at_root, const Component& comp,
                       const std::map<SumKey, Cost>& exit_values, const PtasParams& params,
                       std::int64_t k) {
  RootTable out;
  const std::int64_t cap = root_list_cap(params);
  if (comp.kind == Component::Kind::Leaf) {
    for (const auto& [key, val] : local_at_root) {
      std::map<std::int64_t, std::int64_t> agg;
      for (const auto& p : key) {
        if (p.passing) throw std::logic_error("ptas: passing subtour in a leaf component");
        ++agg[p.s];
      }
      const SumKey skey = to_sum_key(agg);
      if (static_cast<std::int64_t>(skey.size()) > cap) continue;
      RootVal rv;
      rv.cost = val.cost;
      rv.back.leaf = true;
      rv.back.ac = key;
      insert_min(out, skey, rv);
    }
    return out;
  }

  const Cost spine_round_trip = 2 * comp.spine_weight;
  for (const auto& [ae, ecost] : exit_values) {
    for (const auto& [ac, val] : local_at_root) {
      // Distinct passing demands with counts; every one must be associated.
      std::map<std::int64_t, std::int64_t> pass;
      std::vector<LocalPair> endings;
      for (const auto& p : ac) {
        if (p.passing)
          ++pass[p.s];
        else
          endings.push_back(p);
      }
      std::vector<std::int64_t> rows, cols;
      std::vector<std::int64_t> row_val, col_val;
      for (const auto& [s, c] : pass) {
        rows.push_back(c);
        row_val.push_back(s);
      }
      for (const auto& p : ae) {
        cols.push_back(p.n);
        col_val.push_back(p.s);
      }
      std::int64_t total_pass = 0, total_exit = 0;
      for (auto c : rows) total_pass += c;
      for (auto c : cols) total_exit += c;
      if (total_pass > total_exit) continue;
      std::vector<std::vector<char>> ok(rows.size(), std::vector<char>(cols.size(), 0));
      for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < cols.size(); ++c)
          ok[r][c] = row_val[r] + col_val[c] <= k;
      const Cost base = val.cost + ecost + spine_round_trip * (total_exit - total_pass);
      enum_matrices(rows, cols, ok, true, [&](const Matrix& m) {
        std::map<std::int64_t, std::int64_t> agg;
        std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> assoc;
        std::vector<std::int64_t> used_c(cols.size(), 0);
        for (size_t r = 0; r < rows.size(); ++r) {
          for (size_t c = 0; c < cols.size(); ++c) {
            if (m[r][c] == 0) continue;
            agg[row_val[r] + col_val[c]] += m[r][c];
            used_c[c] += m[r][c];
            assoc.emplace_back(row_val[r], col_val[c], m[r][c]);
          }
        }
        for (size_t c = 0; c < cols.size(); ++c) agg[col_val[c]] += cols[c] - used_c[c];
        for (const auto& p : endings) agg[p.s] += 1;
        const SumKey skey = to_sum_key(agg);
        if (static_cast<std::int64_t>(skey.size()) > cap) return;
        RootVal rv;
        rv.cost = base;
        rv.back.leaf = false;
        rv.back.ac = ac;
        rv.back.ae = ae;
        rv.back.assoc = assoc;
        insert_min(out, skey, rv);
      });
    }
  }
  return out;
}

// --------------------------------------------- subtree configs at criticals

// Smallest value in x (sorted ascending) that is >= v, or -1.
std::int64_t round_up_to(std::int64_t v, const std::vector<std::int64_t>& x) {
  auto it = std::lower_bound(x.begin(), x.end(), v);
  if (it == x.end()) return -1;
  return *it;
}

// Aggregated rounding of a comp-root key; empty optional when a demand
// exceeds every value of X.
bool round_key(const SumKey& key, const std::vector<std::int64_t>& x,
               std::map<std::int64_t, std::int64_t>& out) {
  out.clear();
  for (const auto& p : key) {
    const std::int64_t r = round_up_to(p.s, x);
    if (r < 0) return false;
    out[r] += p.n;
  }
  return true;
}

std::vector<std::vector<std::int64_t>> x_candidates(const PtasParams& params, std::int64_t k,
                                                    const std::vector<std::int64_t>& forced) {
  if (!forced.empty()) return {forced};
  const std::int64_t lo = params.min_subtour_demand;
  const std::int64_t range = k - lo + 1;
  const std::int64_t size = std::min<std::int64_t>(params.x_set_size, range);
  switch (params.x_strategy) {
    case XStrategy::Exhaustive: {
      const std::int64_t budget = env_budget("TREECVRP_XSET_BUDGET", 200000);
      const std::int64_t count = binom_capped(range, size, budget);
      if (count > budget) {
        std::ostringstream msg;
        msg << "ptas: exhaustive X enumeration needs C(" << range << "," << size
            << ") > " << budget
            << " candidate sets; raise min_subtour_demand, lower x_set_size, switch "
               "x_strategy to from_heuristic or geometric_grid, or raise "
               "TREECVRP_XSET_BUDGET";
        throw BudgetError(msg.str());
      }
      std::vector<std::vector<std::int64_t>> all;
      std::vector<std::int64_t> idx(size);
      std::iota(idx.begin(), idx.end(), 0);
      while (true) {
        std::vector<std::int64_t> x(size);
        for (std::int64_t i = 0; i < size; ++i) x[i] = lo + idx[i];
        all.push_back(std::move(x));
        std::int64_t i = size - 1;
        while (i >= 0 && idx[i] == range - size + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (std::int64_t j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
      }
      return all;
    }
    case XStrategy::GeometricGrid: {
      std::set<std::int64_t> vals;
      std::int64_t v = lo;
      while (v < k && static_cast<std::int64_t>(vals.size()) + 1 < size) {
        vals.insert(v);
        // next = ceil(v * (1 + eps)), strictly increasing
        const std::int64_t next = sat_add(v, std::max<std::int64_t>(1, v / params.inv_eps));
        v = std::min(next, k);
      }
      vals.insert(k);
      return {std::vector<std::int64_t>(vals.begin(), vals.end())};
    }
    case XStrategy::FromHeuristic:
      throw std::logic_error("ptas: from_heuristic strategy needs a warm-start X");
  }
  throw std::logic_error("ptas: unknown x strategy");
}

ZTable compute_critical(const std::vector<std::pair<const std::map<SumKey, Cost>*, Cost>>& children,
                        std::int64_t k, const PtasParams& params,
                        const std::vector<std::int64_t>& forced_x,
                        std::int64_t* candidates_count) {
  struct Running {
    Cost cost = 0;
    ZBack back;
  };
  ZTable out;
  const auto xs = x_candidates(params, k, forced_x);
  if (candidates_count) *candidates_count += static_cast<std::int64_t>(xs.size());
  for (const auto& x : xs) {
    std::map<SumKey, Running> cur;
    cur.emplace(SumKey{}, Running{0, ZBack{x, {}}});
    for (const auto& [table, delta] : children) {
      std::map<SumKey, Running> next;
      for (const auto& [pkey, pval] : cur) {
        for (const auto& [ckey, gcost] : *table) {
          std::map<std::int64_t, std::int64_t> rounded;
          if (!round_key(ckey, x, rounded)) continue;
          const Cost add = gcost + 2 * sum_tours(ckey) * delta;
          std::vector<std::int64_t> rows, cols, row_val, col_val;
          for (const auto& p : pkey) {
            rows.push_back(p.n);
            row_val.push_back(p.s);
          }
          for (const auto& [s, n] : rounded) {
            cols.push_back(n);
            col_val.push_back(s);
          }
          std::vector<std::vector<char>> ok(rows.size(), std::vector<char>(cols.size(), 0));
          for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < cols.size(); ++c)
              ok[r][c] = row_val[r] + col_val[c] <= k;
          enum_matrices(rows, cols, ok, false, [&](const Matrix& m) {
            std::map<std::int64_t, std::int64_t> agg;
            std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> assoc;
            std::vector<std::int64_t> used_r(rows.size(), 0), used_c(cols.size(), 0);
            for (size_t r = 0; r < rows.size(); ++r) {
              for (size_t c = 0; c < cols.size(); ++c) {
                if (m[r][c] == 0) continue;
                agg[row_val[r] + col_val[c]] += m[r][c];
                used_r[r] += m[r][c];
                used_c[c] += m[r][c];
                assoc.emplace_back(row_val[r], col_val[c], m[r][c]);
              }
            }
            for (size_t r = 0; r < rows.size(); ++r) agg[row_val[r]] += rows[r] - used_r[r];
            for (size_t c = 0; c < cols.size(); ++c) agg[col_val[c]] += cols[c] - used_c[c];
            const SumKey nkey = to_sum_key(agg);
            if (static_cast<std::int64_t>(nkey.size()) > params.sum_list_cap) return;
            Running run;
            run.cost = pval.cost + add;
            run.back = pval.back;
            run.back.steps.push_back({ckey, assoc});
            auto it = next.find(nkey);
            if (it == next.end())
              next.emplace(nkey, std::move(run));
            else if (run.cost < it->second.cost)
              it->second = std::move(run);
          });
        }
      }
      cur = std::move(next);
    }
    for (const auto& [key, run] : cur) insert_min(out, key, ZVal{run.cost, run.back});
  }
  return out;
}

// ------------------------------------------------------------ orchestrator

struct GPiece {
  std::int64_t padded = 0;
  std::vector<int> claims;  // real terminals (working-tree ids)
};

struct Engine {
  const Instance& hat;
  const Decomposition& dec;
  const HatTree& info;
  PtasParams P;
  std::int64_t k;
  std::int64_t pass_cap = 0;

  std::vector<CompView> views;
  std::vector<std::map<int, LocalTable>> locals;
  std::vector<RootTable> roots;
  std::vector<char> root_done;
  std::map<int, ZTable> zs;  // per group
  std::vector<std::vector<int>> group_members;
  std::map<int, int> group_at_anchor;
  std::vector<std::int64_t> warm_x;
  std::int64_t x_total = 0;

  Engine(const Instance& h, const Decomposition& d, const HatTree& hi, const PtasParams& p)
      : hat(h), dec(d), info(hi), P(p), k(h.capacity) {
    const int m = static_cast<int>(dec.components.size());
    std::int64_t total = 0;
    for (int v = 0; v < hat.n(); ++v)
      if (hat.is_terminal(v)) ++total;
    pass_cap = std::min(P.max_tours_per_component, total);
    views.resize(m);
    locals.resize(m);
    roots.resize(m);
    root_done.assign(m, 0);
    int groups = 0;
    for (int c = 0; c < m; ++c) groups = std::max(groups, info.placement[c].group + 1);
    group_members.resize(groups);
    for (int c = 0; c < m; ++c) {
      group_members[info.placement[c].group].push_back(c);
      group_at_anchor.emplace(info.placement[c].anchor, info.placement[c].group);
      views[c] = make_comp_view(hat, dec.components[c], info.placement[c].hat_root);
    }
  }

  const std::map<int, LocalTable>& local_tables(int c) {
    if (locals[c].empty()) locals[c] = compute_local(hat, views[c], P, pass_cap);
    return locals[c];
  }

  const RootTable& root_table(int c) {
    if (root_done[c]) return roots[c];
    const Component& comp = dec.components[c];
    const LocalTable& at_root = local_tables(c).at(views[c].root);
    std::map<SumKey, Cost> exit_values;
    if (comp.kind == Component::Kind::Internal) {
      const auto git = group_at_anchor.find(comp.exit);
      if (git != group_at_anchor.end()) {
        for (const auto& [key, val] : z_table(git->second)) exit_values.emplace(key, val.cost);
      } else {
        exit_values.emplace(SumKey{}, 0);  // closed exit: nothing below
      }
    }
    roots[c] = compute_root(at_root, comp, exit_values, P, k);
    root_done[c] = 1;
    return roots[c];
  }

  const ZTable& z_table(int g) {
    auto it = zs.find(g);
    if (it != zs.end()) return it->second;
    std::vector<std::map<SumKey, Cost>> value_views;
    value_views.reserve(group_members[g].size());
    for (int c : group_members[g]) {
      std::map<SumKey, Cost> vals;
      for (const auto& [key, val] : root_table(c)) vals.emplace(key, val.cost);
      value_views.push_back(std::move(vals));
    }
    std::vector<std::pair<const std::map<SumKey, Cost>*, Cost>> children;
    for (size_t i = 0; i < group_members[g].size(); ++i)
      children.push_back({&value_views[i], info.placement[group_members[g][i]].attach_weight});
    const std::vector<std::int64_t> forced =
        P.x_strategy == XStrategy::FromHeuristic ? warm_x : std::vector<std::int64_t>{};
    ZTable table = compute_critical(children, k, P, forced, &x_total);
    return zs.emplace(g, std::move(table)).first->second;
  }

  // ------------------------------------------------------- reconstruction

  struct Piece {
    std::int64_t s = 0;
    bool passing = false;
    std::vector<int> claims;
  };

  static std::vector<Engine::Piece>::iterator take_piece(std::vector<Piece>& pool,
                                                         std::int64_t s, bool passing) {
    for (auto it = pool.begin(); it != pool.end(); ++it)
      if (it->s == s && it->passing == passing) return it;
    throw std::logic_error("ptas reconstruct: missing local subtour in pool");
  }

  std::vector<Piece> expand_local(int c, int v, const LocalKey& key) {
    const LocalTable& tab = local_tables(c).at(v);
    const LocalVal& val = tab.at(key);
    switch (val.back.kind) {
      case LocalBack::Kind::LeafSeed:
        return {Piece{1, false, {v}}};
      case LocalBack::Kind::ExitSeed: {
        std::vector<Piece> out(key.size());
        for (auto& p : out) p.passing = true;
        return out;
      }
      case LocalBack::Kind::Merge: {
        const auto& ks = views[c].kids.at(v);
        std::vector<Piece> p1 = expand_local(c, ks[0], val.back.a1);
        std::vector<Piece> p2;
        if (ks.size() == 2) {
          p2 = expand_local(c, ks[1], val.back.a2);
        } else if (!val.back.a2.empty()) {
          throw std::logic_error("ptas reconstruct: phantom child with non-empty config");
        }
        std::vector<Piece> out;
        for (const auto& [q1, q2, cnt] : val.back.matches) {
          for (std::int64_t i = 0; i < cnt; ++i) {
            auto i1 = take_piece(p1, q1.s, q1.passing);
            Piece a = std::move(*i1);
            p1.erase(i1);
            auto i2 = take_piece(p2, q2.s, q2.passing);
            Piece b = std::move(*i2);
            p2.erase(i2);
            Piece merged;
            merged.s = a.s + b.s;
            merged.passing = a.passing || b.passing;
            merged.claims = std::move(a.claims);
            merged.claims.insert(merged.claims.end(), b.claims.begin(), b.claims.end());
            out.push_back(std::move(merged));
          }
        }
        out.insert(out.end(), std::make_move_iterator(p1.begin()), std::make_move_iterator(p1.end()));
        out.insert(out.end(), std::make_move_iterator(p2.begin()), std::make_move_iterator(p2.end()));
        if (out.size() != key.size())
          throw std::logic_error("ptas reconstruct: local piece count mismatch");
        return out;
      }
    }
    throw std::logic_error("ptas reconstruct: unknown local back kind");
  }

  static std::vector<GPiece>::iterator take_gpiece(std::vector<GPiece>& pool, std::int64_t s) {
    for (auto it = pool.begin(); it != pool.end(); ++it)
      if (it->padded == s) return it;
    throw std::logic_error("ptas reconstruct: missing subtree subtour in pool");
  }

  std::vector<GPiece> expand_root(int c, const SumKey& key) {
    const RootVal& val = root_table(c).at(key);
    std::vector<Piece> loc = expand_local(c, views[c].root, val.back.ac);
    std::vector<GPiece> out;
    if (val.back.leaf) {
      for (auto& p : loc) out.push_back({p.s, std::move(p.claims)});
      return out;
    }
    std::vector<GPiece> exits = expand_exit(dec.components[c].exit, val.back.ae);
    std::vector<Piece> pass, endings;
    for (auto& p : loc)
      (p.passing ? pass : endings).push_back(std::move(p));
    for (const auto& [ps, es, cnt] : val.back.assoc) {
      for (std::int64_t i = 0; i < cnt; ++i) {
        auto ip = take_piece(pass, ps, true);
        Piece a = std::move(*ip);
        pass.erase(ip);
        auto ie = take_gpiece(exits, es);
        GPiece b = std::move(*ie);
        exits.erase(ie);
        GPiece merged;
        merged.padded = a.s + b.padded;
        merged.claims = std::move(a.claims);
        merged.claims.insert(merged.claims.end(), b.claims.begin(), b.claims.end());
        out.push_back(std::move(merged));
      }
    }
    if (!pass.empty())
      throw std::logic_error("ptas reconstruct: unassociated passing subtour");
    for (auto& e : exits) out.push_back(std::move(e));
    for (auto& p : endings) out.push_back({p.s, std::move(p.claims)});
    return out;
  }

  std::vector<GPiece> expand_exit(int vertex, const SumKey& key) {
    const auto git = group_at_anchor.find(vertex);
    if (git == group_at_anchor.end()) {
      if (!key.empty())
        throw std::logic_error("ptas reconstruct: non-empty config at a closed exit");
      return {};
    }
    return expand_z(git->second, key);
  }

  std::vector<GPiece> expand_z(int g, const SumKey& key) {
    const ZVal& val = z_table(g).at(key);
    const auto& members = group_members[g];
    if (val.back.steps.size() != members.size())
      throw std::logic_error("ptas reconstruct: step count mismatch at critical vertex");
    std::vector<GPiece> pool;
    for (size_t i = 0; i < members.size(); ++i) {
      const ZStep& step = val.back.steps[i];
      std::vector<GPiece> child = expand_root(members[i], step.child_cfg);
      for (auto& p : child) {
        const std::int64_t r = round_up_to(p.padded, val.back.x);
        if (r < 0) throw std::logic_error("ptas reconstruct: unroundable demand");
        p.padded = r;
      }
      for (const auto& [ps, cs, cnt] : step.assoc) {
        for (std::int64_t j = 0; j < cnt; ++j) {
          auto ip = take_gpiece(pool, ps);
          GPiece a = std::move(*ip);
          pool.erase(ip);
          auto ic = take_gpiece(child, cs);
          GPiece b = std::move(*ic);
          child.erase(ic);
          GPiece merged;
          merged.padded = a.padded + b.padded;
          merged.claims = std::move(a.claims);
          merged.claims.insert(merged.claims.end(), b.claims.begin(), b.claims.end());
          pool.push_back(std::move(merged));
        }
      }
      for (auto& p : child) pool.push_back(std::move(p));
    }
    // The pool must realize exactly the stored configuration.
    std::map<std::int64_t, std::int64_t> have;
    for (const auto& p : pool) ++have[p.padded];
    std::map<std::int64_t, std::int64_t> want;
    for (const auto& p : key) want[p.s] += p.n;
    if (have != want)
      throw std::logic_error("ptas reconstruct: configuration mismatch at critical vertex");
    return pool;
  }

  Solution solve(PtasMeta* meta) {
    const auto git = group_at_anchor.find(hat.root);
    if (git == group_at_anchor.end())
      throw std::logic_error("ptas: no component group anchored at the depot");
    const ZTable& final_table = z_table(git->second);
    if (final_table.empty())
      throw ValidationError(
          "ptas: no feasible configuration; caps are too tight "
          "(raise max_tours_per_component / sum_list_cap or use looser strategy)");
    const SumKey* best_key = nullptr;
    const ZVal* best_val = nullptr;
    for (const auto& [key, val] : final_table) {
      if (!best_key || val.cost < best_val->cost ||
          (val.cost == best_val->cost && sum_tours(key) < sum_tours(*best_key))) {
        best_key = &key;
        best_val = &val;
      }
    }
    std::vector<GPiece> pieces = expand_z(git->second, *best_key);
    Solution sol;
    for (auto& p : pieces) {
      if (static_cast<std::int64_t>(p.claims.size()) > p.padded ||
          static_cast<std::int64_t>(p.claims.size()) > k)
        throw std::logic_error("ptas reconstruct: tour exceeds its padded demand");
      if (p.claims.empty()) throw std::logic_error("ptas reconstruct: empty tour");
      Tour t;
      std::sort(p.claims.begin(), p.claims.end());
      for (int v : p.claims) t.claims.push_back({v, 1});
      sol.tours.push_back(std::move(t));
    }
    sol.cost = solution_cost(hat, sol);
    if (sol.cost != best_val->cost)
      throw std::logic_error("ptas: reconstructed cost differs from the table value");
    if (meta) {
      meta->x_candidates = x_total;
      meta->components = static_cast<int>(dec.components.size());
      meta->groups = static_cast<int>(group_members.size());
      meta->hat_cost = sol.cost;
    }
    return sol;
  }
};

std::vector<std::int64_t> warm_start_x(const Instance& inst, const Decomposition& dec,
                                       const PtasParams& params) {
  const Solution warm = itp(inst);
  std::map<std::int64_t, std::int64_t> freq;
  for (const auto& t : warm.tours) {
    std::map<int, std::int64_t> per_comp;
    for (const auto& cl : t.claims) per_comp[dec.edge_component[cl.v]] += cl.units;
    for (const auto& [c, cnt] : per_comp) ++freq[cnt];
  }
  const std::int64_t k = inst.capacity;
  const std::int64_t lo = params.min_subtour_demand;
  std::vector<std::pair<std::int64_t, std::int64_t>> ranked;  // (-freq, value)
  for (const auto& [v, f] : freq)
    if (v >= lo && v < k) ranked.push_back({-f, v});
  std::sort(ranked.begin(), ranked.end());
  std::set<std::int64_t> x{k};
  for (const auto& [negf, v] : ranked) {
    if (static_cast<std::int64_t>(x.size()) >= params.x_set_size) break;
    x.insert(v);
  }
  return {x.begin(), x.end()};
}

}  // namespace

PtasParams PtasParams::from_epsilon(std::int64_t inv_eps, std::int64_t capacity) {
  if (inv_eps < 1) throw ValidationError("from_epsilon: inverse epsilon must be at least 1");
  if (capacity < 1) throw ValidationError("from_epsilon: capacity must be at least 1");
  PtasParams p;
  p.inv_eps = inv_eps;
  const std::int64_t gamma = sat_mul(12, inv_eps);
  p.gamma_k = sat_mul(gamma, capacity);
  const std::int64_t inv_alpha = sat_pow(inv_eps, inv_eps + 1);  // 1/alpha
  p.min_subtour_demand =
      inv_alpha == kSat ? 1 : std::max<std::int64_t>(1, (capacity + inv_alpha - 1) / inv_alpha);
  p.max_tours_per_component = sat_add(sat_mul(2, sat_mul(gamma, inv_alpha)), 1);
  p.x_set_size = sat_mul(4, sat_pow(inv_eps, sat_add(sat_mul(4, inv_eps), 1)));  // 1/beta
  p.sum_list_cap = sat_pow(p.x_set_size, inv_alpha);
  p.x_strategy = XStrategy::Exhaustive;
  p.class_width = 0;
  return p;
}

PtasParams PtasParams::vacuous(const Instance& normalized) {
  const std::int64_t terms = static_cast<std::int64_t>(normalized.terminals().size());
  PtasParams p;
  p.inv_eps = 4;
  p.gamma_k = from_epsilon(4, normalized.capacity).gamma_k;
  p.min_subtour_demand = 1;
  p.max_tours_per_component = std::max<std::int64_t>(1, terms);
  p.x_set_size = normalized.capacity;  // the whole of [1, k]
  p.sum_list_cap = std::max<std::int64_t>({1, terms, normalized.capacity});
  p.x_strategy = XStrategy::Exhaustive;
  // Width-1 distance classes group only equal-distance roots, so every
  // re-hang in the height-reduction step crosses a zero-weight path and the
  // working tree is cost-exact, not just (1+eps)-close.
  p.class_width = 1;
  return p;
}

std::int64_t h_epsilon(std::int64_t inv_eps) {
  if (inv_eps < 1) throw ValidationError("h_epsilon: inverse epsilon must be at least 1");
  return sat_pow(inv_eps, sat_add(sat_mul(2, inv_eps), 1));
}

std::map<LocalKey, Cost> local_dp(const Instance& tree, const Component& comp,
                                  const PtasParams& params) {
  check_params(params, tree.capacity);
  std::int64_t total = 0;
  for (int v = 0; v < tree.n(); ++v)
    if (tree.is_terminal(v)) ++total;
  const CompView cv = make_comp_view(tree, comp, -1);
  const auto tables =
      compute_local(tree, cv, params, std::min(params.max_tours_per_component, total));
  std::map<LocalKey, Cost> out;
  for (const auto& [key, val] : tables.at(cv.root)) out.emplace(key, val.cost);
  return out;
}

std::map<SumKey, Cost> subtree_dp_component_root(const Instance& tree, const Component& comp,
                                                 const std::map<SumKey, Cost>& exit_values,
                                                 const PtasParams& params) {
  check_params(params, tree.capacity);
  std::int64_t total = 0;
  for (int v = 0; v < tree.n(); ++v)
    if (tree.is_terminal(v)) ++total;
  const CompView cv = make_comp_view(tree, comp, -1);
  const auto tables =
      compute_local(tree, cv, params, std::min(params.max_tours_per_component, total));
  std::map<SumKey, Cost> effective_exit = exit_values;
  if (comp.kind == Component::Kind::Internal && effective_exit.empty())
    effective_exit.emplace(SumKey{}, 0);
  const RootTable table =
      compute_root(tables.at(cv.root), comp, effective_exit, params, tree.capacity);
  std::map<SumKey, Cost> out;
  for (const auto& [key, val] : table) out.emplace(key, val.cost);
  return out;
}

std::map<SumKey, Cost> subtree_dp_critical(
    const std::vector<std::pair<std::map<SumKey, Cost>, Cost>>& children, std::int64_t capacity,
    const PtasParams& params, const std::vector<std::int64_t>& forced_x) {
  check_params(params, capacity);
  std::vector<std::pair<const std::map<SumKey, Cost>*, Cost>> views;
  views.reserve(children.size());
  for (const auto& [table, delta] : children) views.push_back({&table, delta});
  const ZTable table = compute_critical(views, capacity, params, forced_x, nullptr);
  std::map<SumKey, Cost> out;
  for (const auto& [key, val] : table) out.emplace(key, val.cost);
  return out;
}

Solution solve_ptas(const Instance& inst, const PtasParams& params, PtasMeta* meta) {
  validate(inst);
  if (!is_normalized(inst)) throw ValidationError("solve_ptas: instance is not in normal form");
  check_params(params, inst.capacity);

  const Decomposition dec = decompose(inst, params.gamma_k);
  const Cost width = params.class_width > 0 ? params.class_width
                                            : default_class_width(inst, params.inv_eps);
  const HatTree hat = build_hat_tree(inst, dec, width);

  Engine eng(hat.hat, dec, hat, params);
  if (params.x_strategy == XStrategy::FromHeuristic)
    eng.warm_x = warm_start_x(inst, dec, params);

  Solution on_hat = eng.solve(meta);
  if (meta) {
    meta->effective = params;
    meta->effective.class_width = width;
    const PtasParams faithful = PtasParams::from_epsilon(params.inv_eps, inst.capacity);
    meta->theory_guarantee = params.x_strategy == XStrategy::Exhaustive &&
                             params.gamma_k == faithful.gamma_k &&
                             params.min_subtour_demand <= faithful.min_subtour_demand &&
                             params.max_tours_per_component >= faithful.max_tours_per_component &&
                             params.x_set_size >= faithful.x_set_size &&
                             params.sum_list_cap >= faithful.sum_list_cap;
  }
  return lift_solution(hat, inst, on_hat);
}

Solution solve_ptas_any(const Instance& inst, const PtasParams& params, PtasMeta* meta) {
  validate(inst);
  if (!inst.unit_demand())
    throw ValidationError("solve_ptas: demands must be unit (use the splittable expansion)");
  auto [norm, map] = normalize(inst);
  const Solution sol = solve_ptas(norm, params, meta);
  return map_solution_to_base(map, inst, sol);
}

}  // namespace treecvrp
