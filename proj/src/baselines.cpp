#include "treecvrp/baselines.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

#include "treecvrp/bounds.hpp"

namespace treecvrp {

namespace {

std::vector<int> dfs_terminal_order(const Instance& inst) {
  auto ch = children_of(inst);
  std::vector<int> order;
  std::vector<int> stack = {inst.root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (inst.is_terminal(v)) order.push_back(v);
    for (auto it = ch[v].rbegin(); it != ch[v].rend(); ++it) stack.push_back(*it);
  }
  return order;
}

Solution blocks_to_solution(const Instance& inst, const std::vector<int>& order,
                            std::int64_t k, std::int64_t offset) {
  const std::int64_t m = static_cast<std::int64_t>(order.size());
  Solution sol;
  for (std::int64_t start = 0; start < m; start += k) {
    Tour t;
    for (std::int64_t i = start; i < std::min(start + k, m); ++i) {
      t.claims.push_back({order[(i + offset) % m], 1});
    }
    std::sort(t.claims.begin(), t.claims.end());
    sol.tours.push_back(std::move(t));
  }
  sol.cost = solution_cost(inst, sol);
  return sol;
}

void require_unit_demand(const Instance& inst, const char* who) {
  if (!inst.unit_demand()) {
    throw ValidationError(std::string(who) + " requires unit demands; expand the instance first");
  }
}

}  // namespace

Solution itp(const Instance& inst) {
  validate(inst);
  require_unit_demand(inst, "itp");
  auto order = dfs_terminal_order(inst);
  if (order.empty()) return Solution{};
  const std::int64_t m = static_cast<std::int64_t>(order.size());
  const std::int64_t k = inst.capacity;
  std::int64_t tries = m <= 10000 ? std::min<std::int64_t>(k, m) : 1;
  Solution best;
  std::int64_t best_offset = -1;
  for (std::int64_t offset = 0; offset < tries; ++offset) {
    Solution cand = blocks_to_solution(inst, order, k, offset);
    if (best_offset < 0 || cand.cost < best.cost) {
      best = std::move(cand);
      best_offset = offset;
    }
  }
  return best;
}

Cost itp_constructive_bound(const Instance& inst) {
  auto order = dfs_terminal_order(inst);
  if (order.empty()) return 0;
  auto d = distances(inst);
  Cost bound = tree_tsp_cost_scaled(inst, order);
  const std::int64_t m = static_cast<std::int64_t>(order.size());
  for (std::int64_t start = 0; start < m; start += inst.capacity) {
    std::int64_t last = std::min(start + inst.capacity, m) - 1;
    bound += d.dist[order[start]] + d.dist[order[last]];
  }
  return bound;
}

Solution exact_partition_dp(const Instance& inst) {
  validate(inst);
  require_unit_demand(inst, "exact_partition_dp");
  auto terminals = inst.terminals();
  const int m = static_cast<int>(terminals.size());
  if (m == 0) return Solution{};
  const std::int64_t budget = env_budget("TREECVRP_EXACT_BUDGET", 15);
  if (m > budget) {
    throw BudgetError("exact_partition_dp: " + std::to_string(m) +
                      " terminals exceed budget " + std::to_string(budget) +
                      " (raise TREECVRP_EXACT_BUDGET)");
  }

  const int full = (1 << m) - 1;
  // Canonical group cost per subset.
  std::vector<Cost> group_cost(full + 1, 0);
  for (int mask = 1; mask <= full; ++mask) {
    Tour t;
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) t.claims.push_back({terminals[i], 1});
    }
    group_cost[mask] = tour_cost(inst, t);
  }

  const Cost inf = std::numeric_limits<Cost>::max();
  std::vector<Cost> best(full + 1, inf);
  std::vector<int> choice(full + 1, 0);
  best[0] = 0;
  for (int mask = 1; mask <= full; ++mask) {
    // Anchor groups at the lowest remaining terminal so each partition is
    // enumerated exactly once.
    const int anchor = mask & -mask;
    for (int sub = mask; sub != 0; sub = (sub - 1) & mask) {
      if (!(sub & anchor)) continue;
      if (__builtin_popcount(static_cast<unsigned>(sub)) > inst.capacity) continue;
      if (best[mask ^ sub] == inf) continue;
      Cost cand = best[mask ^ sub] + group_cost[sub];
      if (cand < best[mask]) {
        best[mask] = cand;
        choice[mask] = sub;
      }
    }
  }

  Solution sol;
  for (int mask = full; mask != 0; mask ^= choice[mask]) {
    Tour t;
    for (int i = 0; i < m; ++i) {
      if (choice[mask] & (1 << i)) t.claims.push_back({terminals[i], 1});
    }
    sol.tours.push_back(std::move(t));
  }
  std::reverse(sol.tours.begin(), sol.tours.end());
  sol.cost = solution_cost(inst, sol);
  return sol;
}

Solution greedy(const Instance& inst) {
  validate(inst);
  require_unit_demand(inst, "greedy");
  auto terminals = inst.terminals();
  if (terminals.empty()) return Solution{};
  auto d = distances(inst);
  std::sort(terminals.begin(), terminals.end(), [&](int a, int b) {
    if (d.dist[a] != d.dist[b]) return d.dist[a] > d.dist[b];
    return a < b;
  });
  Solution sol;
  for (std::size_t at = 0; at < terminals.size(); at += inst.capacity) {
    Tour t;
    for (std::size_t i = at; i < std::min(at + inst.capacity, terminals.size()); ++i) {
      t.claims.push_back({terminals[i], 1});
    }
    std::sort(t.claims.begin(), t.claims.end());
    sol.tours.push_back(std::move(t));
  }
  sol.cost = solution_cost(inst, sol);
  return sol;
}

namespace {

// All non-negative integer matrices m with row sums <= rows[r], column sums
// <= cols[c], and m[r][c] == 0 where merging is not allowed.  Kept local to
// the oracle on purpose: it must not share code with the solver it checks.
void config_matchings(const std::vector<std::int64_t>& rows, const std::vector<std::int64_t>& cols,
                      const std::vector<std::vector<char>>& ok,
                      const std::function<void(const std::vector<std::vector<std::int64_t>>&)>& cb) {
  const int nr = static_cast<int>(rows.size());
  const int nc = static_cast<int>(cols.size());
  std::vector<std::vector<std::int64_t>> m(nr, std::vector<std::int64_t>(nc, 0));
  if (nr == 0) {
    cb(m);
    return;
  }
  std::vector<std::int64_t> col_rem = cols;
  std::function<void(int, int, std::int64_t)> rec = [&](int r, int c, std::int64_t row_rem) {
    if (c == nc) {
      if (r + 1 == nr) {
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

std::vector<std::pair<std::int64_t, std::int64_t>> group_loads(const std::vector<std::int64_t>& c) {
  std::vector<std::pair<std::int64_t, std::int64_t>> g;
  for (std::int64_t v : c) {
    if (!g.empty() && g.back().first == v)
      ++g.back().second;
    else
      g.push_back({v, 1});
  }
  return g;
}

}  // namespace

Solution exact_config_dp(const Instance& inst) {
  validate(inst);
  require_unit_demand(inst, "exact_config_dp");
  const std::vector<int> terms = inst.terminals();
  if (terms.empty()) return Solution{};
  const std::int64_t budget = env_budget("TREECVRP_CONFIG_BUDGET", 18);
  if (static_cast<std::int64_t>(terms.size()) > budget) {
    throw BudgetError("exact_config_dp: " + std::to_string(terms.size()) +
                      " terminals exceed the budget of " + std::to_string(budget) +
                      " (TREECVRP_CONFIG_BUDGET overrides)");
  }

  const std::int64_t k = inst.capacity;
  const auto ch = children_of(inst);
  using Config = std::vector<std::int64_t>;  // sorted open subtour loads
  struct Entry {
    Cost cost = 0;
    Config prev, child;
    // merged pairs by value: (load from prev, load from child, count)
    std::vector<std::array<std::int64_t, 3>> matches;
  };
  using Table = std::map<Config, Entry>;

  // Virtual child list: the vertex's own unit (phantom id -1) if it is a
  // terminal, then the real children; one table per prefix of that list so
  // the winning merges can be replayed afterwards.
  std::vector<std::vector<int>> vlist(inst.n());
  std::vector<std::vector<Table>> tabs(inst.n());

  std::vector<int> order;
  order.reserve(inst.n());
  std::vector<int> stack{inst.root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int c : ch[v]) stack.push_back(c);
  }
  std::reverse(order.begin(), order.end());

  const Table phantom{{Config{1}, Entry{}}};
  for (int v : order) {
    if (inst.is_terminal(v)) vlist[v].push_back(-1);
    for (int c : ch[v]) vlist[v].push_back(c);
    tabs[v].resize(vlist[v].size() + 1);
    tabs[v][0].emplace(Config{}, Entry{});
    for (size_t j = 0; j < vlist[v].size(); ++j) {
      const int c = vlist[v][j];
      const Table& child_tab = c < 0 ? phantom : tabs[c].back();
      const Cost w = c < 0 ? 0 : inst.weight[c];
      for (const auto& [a, ea] : tabs[v][j]) {
        const auto ga = group_loads(a);
        for (const auto& [b, eb] : child_tab) {
          const auto gb = group_loads(b);
          const Cost base = ea.cost + eb.cost + 2 * static_cast<Cost>(b.size()) * w;
          std::vector<std::int64_t> rows, cols;
          for (const auto& [val, cnt] : ga) rows.push_back(cnt);
          for (const auto& [val, cnt] : gb) cols.push_back(cnt);
          std::vector<std::vector<char>> ok(ga.size(), std::vector<char>(gb.size(), 0));
          for (size_t r = 0; r < ga.size(); ++r)
            for (size_t cc = 0; cc < gb.size(); ++cc)
              ok[r][cc] = ga[r].first + gb[cc].first <= k;
          config_matchings(rows, cols, ok, [&](const std::vector<std::vector<std::int64_t>>& m) {
            Config out;
            Entry e;
            e.cost = base;
            e.prev = a;
            e.child = b;
            std::vector<std::int64_t> used_r(ga.size(), 0), used_c(gb.size(), 0);
            for (size_t r = 0; r < ga.size(); ++r) {
              for (size_t cc = 0; cc < gb.size(); ++cc) {
                if (m[r][cc] == 0) continue;
                used_r[r] += m[r][cc];
                used_c[cc] += m[r][cc];
                e.matches.push_back({ga[r].first, gb[cc].first, m[r][cc]});
                for (std::int64_t i = 0; i < m[r][cc]; ++i)
                  out.push_back(ga[r].first + gb[cc].first);
              }
            }
            for (size_t r = 0; r < ga.size(); ++r)
              for (std::int64_t i = used_r[r]; i < ga[r].second; ++i) out.push_back(ga[r].first);
            for (size_t cc = 0; cc < gb.size(); ++cc)
              for (std::int64_t i = used_c[cc]; i < gb[cc].second; ++i) out.push_back(gb[cc].first);
            std::sort(out.begin(), out.end());
            auto it = tabs[v][j + 1].find(out);
            if (it == tabs[v][j + 1].end())
              tabs[v][j + 1].emplace(std::move(out), std::move(e));
            else if (e.cost < it->second.cost)
              it->second = std::move(e);
          });
        }
      }
    }
  }

  const Table& final_tab = tabs[inst.root].back();
  const Config* best_cfg = nullptr;
  const Entry* best = nullptr;
  for (const auto& [cfg, e] : final_tab) {
    if (!best || e.cost < best->cost) {
      best_cfg = &cfg;
      best = &e;
    }
  }
  if (!best) throw std::logic_error("exact_config_dp: empty final table");

  struct Piece {
    std::int64_t load = 0;
    std::vector<int> claims;
  };
  std::function<std::vector<Piece>(int, size_t, const Config&)> expand =
      [&](int v, size_t j, const Config& cfg) -> std::vector<Piece> {
    if (j == 0) {
      if (!cfg.empty()) throw std::logic_error("exact_config_dp: non-empty base config");
      return {};
    }
    const Entry& e = tabs[v][j].at(cfg);
    std::vector<Piece> left = expand(v, j - 1, e.prev);
    const int c = vlist[v][j - 1];
    std::vector<Piece> right;
    if (c < 0) {
      right.push_back({1, {v}});
    } else {
      right = expand(c, tabs[c].size() - 1, e.child);
    }
    std::vector<Piece> out;
    auto take = [](std::vector<Piece>& pool, std::int64_t load) {
      for (auto it = pool.begin(); it != pool.end(); ++it) {
        if (it->load == load) {
          Piece p = std::move(*it);
          pool.erase(it);
          return p;
        }
      }
      throw std::logic_error("exact_config_dp: missing subtour during replay");
    };
    for (const auto& [la, lb, cnt] : e.matches) {
      for (std::int64_t i = 0; i < cnt; ++i) {
        Piece pa = take(left, la);
        Piece pb = take(right, lb);
        Piece merged;
        merged.load = pa.load + pb.load;
        merged.claims = std::move(pa.claims);
        merged.claims.insert(merged.claims.end(), pb.claims.begin(), pb.claims.end());
        out.push_back(std::move(merged));
      }
    }
    for (auto& p : left) out.push_back(std::move(p));
    for (auto& p : right) out.push_back(std::move(p));
    if (out.size() != cfg.size())
      throw std::logic_error("exact_config_dp: replay produced a wrong subtour count");
    return out;
  };

  std::vector<Piece> pieces = expand(inst.root, tabs[inst.root].size() - 1, *best_cfg);
  Solution sol;
  for (auto& p : pieces) {
    Tour t;
    std::sort(p.claims.begin(), p.claims.end());
    for (int v : p.claims) t.claims.push_back({v, 1});
    sol.tours.push_back(std::move(t));
  }
  sol.cost = solution_cost(inst, sol);
  if (sol.cost != best->cost)
    throw std::logic_error("exact_config_dp: replayed cost differs from the table value");
  return sol;
}

Cost exact_splittable_brute(const Instance& inst) {
  validate(inst);
  const std::int64_t budget = env_budget("TREECVRP_SPLIT_BUDGET", 10);
  if (inst.total_demand() > budget) {
    throw BudgetError("exact_splittable_brute: total demand " +
                      std::to_string(inst.total_demand()) + " exceeds budget " +
                      std::to_string(budget) + " (raise TREECVRP_SPLIT_BUDGET)");
  }
  auto terminals = inst.terminals();
  const int m = static_cast<int>(terminals.size());
  if (m == 0) return 0;

  // State: remaining demand per terminal, mixed-radix encoded.
  std::vector<std::int64_t> radix(m + 1, 1);
  for (int i = 0; i < m; ++i) radix[i + 1] = radix[i] * (inst.demand[terminals[i]] + 1);

  std::map<std::int64_t, Cost> memo;
  std::vector<std::int64_t> rem(m);
  for (int i = 0; i < m; ++i) rem[i] = inst.demand[terminals[i]];

  std::function<Cost(void)> solve = [&]() -> Cost {
    std::int64_t key = 0;
    bool done = true;
    for (int i = 0; i < m; ++i) {
      key += rem[i] * radix[i];
      if (rem[i] > 0) done = false;
    }
    if (done) return 0;
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;

    Cost best = std::numeric_limits<Cost>::max();
    // Enumerate claim vectors anchored at the first unserved terminal so the
    // same tour set is not revisited in every order.
    int anchor = 0;
    while (rem[anchor] == 0) ++anchor;
    std::vector<std::int64_t> take(m, 0);
    std::function<void(int, std::int64_t)> enumerate = [&](int at, std::int64_t used) {
      if (at == m) {
        if (take[anchor] == 0) return;
        Tour t;
        for (int i = 0; i < m; ++i) {
          if (take[i] > 0) t.claims.push_back({terminals[i], take[i]});
        }
        Cost c = tour_cost(inst, t);
        for (int i = 0; i < m; ++i) rem[i] -= take[i];
        Cost rest = solve();
        for (int i = 0; i < m; ++i) rem[i] += take[i];
        if (rest != std::numeric_limits<Cost>::max() && c + rest < best) best = c + rest;
        return;
      }
      for (std::int64_t u = 0; u <= std::min(rem[at], inst.capacity - used); ++u) {
        take[at] = u;
        enumerate(at + 1, used + u);
      }
      take[at] = 0;
    };
    enumerate(0, 0);
    memo[key] = best;
    return best;
  };
  return solve();
}

}  // namespace treecvrp
