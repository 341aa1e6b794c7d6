#include "treecvrp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "treecvrp/baselines.hpp"
#include "treecvrp/bounds.hpp"
#include "treecvrp/errors.hpp"
#include "treecvrp/io.hpp"
#include "treecvrp/ptas_dp.hpp"

namespace treecvrp {

namespace {

Solution solve_by_name(const std::string& algo, const Instance& inst) {
  if (algo == "itp") return itp(inst);
  if (algo == "greedy") return greedy(inst);
  if (algo == "exact") return exact_partition_dp(inst);
  if (algo == "exact_config") return exact_config_dp(inst);
  if (algo == "ptas") {
    auto [norm, map] = normalize(inst);
    return map_solution_to_base(map, inst, solve_ptas(norm, PtasParams::vacuous(norm)));
  }
  throw ValidationError("bench: unknown algorithm '" + algo + "'");
}

BenchRow run_one(const std::string& name, const Instance& inst, const std::string& algo) {
  const auto t0 = std::chrono::steady_clock::now();
  const Solution sol = solve_by_name(algo, inst);
  const auto t1 = std::chrono::steady_clock::now();
  const VerifyReport rep = verify(inst, sol);
  if (!rep.feasible) {
    std::string msg = "bench: " + algo + " produced an infeasible solution on " + name;
    for (const auto& v : rep.violations) msg += "; " + v.message;
    throw ValidationError(msg);
  }
  BenchRow row;
  row.instance = name;
  row.algo = algo;
  row.cost = cost_to_rational(inst, sol.cost).str();
  const Rational lb = lb_edge(inst, EdgeBoundMode::Ceiling);
  row.ratio = lb == Rational(0) ? "-" : (cost_to_rational(inst, sol.cost) / lb).str();
  row.tours = static_cast<std::int64_t>(sol.tours.size());
  row.seconds = std::chrono::duration<double>(t1 - t0).count();
  return row;
}

}  // namespace

BenchReport run_bench(const std::vector<std::pair<std::string, Instance>>& corpus,
                      const std::vector<std::string>& algos, int threads) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;

  struct Job {
    const std::string* name;
    const Instance* inst;
    const std::string* algo;
  };
  std::vector<Job> jobs;
  for (const auto& [name, inst] : corpus)
    for (const auto& algo : algos) jobs.push_back({&name, &inst, &algo});

  BenchReport report;
  report.rows.resize(jobs.size());
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        report.rows[i] = run_one(*jobs[i].name, *jobs[i].inst, *jobs[i].algo);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min<int>(threads, static_cast<int>(jobs.size()));
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::sort(report.rows.begin(), report.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.instance, a.algo) < std::tie(b.instance, b.algo);
  });
  return report;
}

std::string BenchReport::text_table(bool timings) const {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {"instance", "algo", "cost", "ratio", "tours"};
  if (timings) head.push_back("seconds");
  cells.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> row = {r.instance, r.algo, r.cost, r.ratio,
                                    std::to_string(r.tours)};
    if (timings) {
      std::ostringstream s;
      s.setf(std::ios::fixed);
      s.precision(4);
      s << r.seconds;
      row.push_back(s.str());
    }
    cells.push_back(std::move(row));
  }
  std::vector<size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream out;
  for (size_t i = 0; i < cells.size(); ++i) {
    for (size_t c = 0; c < cells[i].size(); ++c) {
      if (c) out << "  ";
      out << cells[i][c];
      for (size_t pad = cells[i][c].size(); pad < width[c]; ++pad) out << ' ';
    }
    out << '\n';
    if (i == 0) {
      for (size_t c = 0; c < width.size(); ++c) {
        if (c) out << "  ";
        out << std::string(width[c], '-');
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string BenchReport::to_json(bool timings) const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["instance"] = r.instance;
    row["algo"] = r.algo;
    row["cost"] = r.cost;
    row["ratio"] = r.ratio;
    row["tours"] = r.tours;
    if (timings) row["seconds"] = r.seconds;
    arr.push_back(std::move(row));
  }
  nlohmann::ordered_json doc;
  doc["rows"] = std::move(arr);
  return doc.dump(2) + "\n";
}

}  // namespace treecvrp
