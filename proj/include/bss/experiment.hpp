#pragma once

#include <atomic>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bss/agent.hpp"
#include "bss/io.hpp"
#include "bss/model.hpp"
#include "bss/proposer.hpp"
#include "bss/rng.hpp"
#include "bss/solver.hpp"

namespace bss {

/// One method run on one region. `iterations` is solver evaluations for
/// heuristics and loop iterations for agent strategies.
struct ExperimentRow {
  int region = 0;
  std::string method;
  double coverage = 0.0;
  double cost = 0.0;
  bool feasible = false;
  double wall_ms = 0.0;
  long iterations = 0;
};

struct MethodAggregate {
  std::string method;
  double mean_coverage = 0.0;
  double mean_cost = 0.0;
  double success_rate = 0.0;
  double mean_wall_ms = 0.0;
  double mean_iterations = 0.0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;         // region-major, methods in config order
  std::vector<MethodAggregate> aggregates; // one per method, config order
};

inline const std::vector<std::string>& experiment_methods() {
  static const std::vector<std::string> methods = {"greedy", "sa",   "pso",
                                                   "pso_coverage", "laba", "claba"};
  return methods;
}

struct ExperimentConfig {
  int regions = 25;
  int region_width = 100;
  int region_height = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> methods = {"greedy", "sa", "pso"};
  int max_evaluations = 20000;
  int agent_cap = 10;
  int jobs = 1;
};

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.regions < 1) throw std::invalid_argument("experiment: regions must be >= 1");
  if (cfg.region_width < 1 || cfg.region_height < 1)
    throw std::invalid_argument("experiment: region dimensions must be positive");
  if (cfg.methods.empty()) throw std::invalid_argument("experiment: no methods given");
  for (const std::string& m : cfg.methods) {
    bool known = false;
    for (const std::string& k : experiment_methods())
      if (m == k) known = true;
    if (!known) throw std::invalid_argument("experiment: unknown method '" + m + "'");
  }
  if (cfg.max_evaluations < 1)
    throw std::invalid_argument("experiment: max_evaluations must be >= 1");
  if (cfg.agent_cap < 1) throw std::invalid_argument("experiment: agent_cap must be >= 1");
  if (cfg.jobs < 1) throw std::invalid_argument("experiment: jobs must be >= 1");
}

namespace experiment_detail {

inline ExperimentRow run_method(const ProblemInstance& region, int region_id,
                                const std::string& method, std::uint64_t seed,
                                const ExperimentConfig& cfg) {
  ExperimentRow row;
  row.region = region_id;
  row.method = method;
  const auto started = std::chrono::steady_clock::now();
  try {
    if (method == "laba" || method == "claba") {
      ScriptedProposer modeler(ScriptedProposer::Behavior::FeasibleGreedy);
      ScriptedProposer planner(ScriptedProposer::Behavior::FeasibleGreedy);
      AgentOptions opts;
      opts.cap = cfg.agent_cap;
      AgentRunResult run =
          method == "laba"
              ? run_laba(region, modeler, opts)
              : run_claba(region, ClabaProposers{&modeler, &planner}, opts);
      row.coverage = run.report.coverage_ratio;
      row.cost = run.report.cost;
      row.feasible = run.success;
      row.iterations = run.iterations_used;
    } else {
      SolverConfig solver_cfg;
      solver_cfg.seed = seed;
      solver_cfg.max_evaluations = cfg.max_evaluations;
      if (method == "greedy") solver_cfg.algorithm = Algorithm::Greedy;
      if (method == "sa") solver_cfg.algorithm = Algorithm::SA;
      if (method == "pso" || method == "pso_coverage")
        solver_cfg.algorithm = Algorithm::PSO;
      if (method == "pso_coverage")
        solver_cfg.objective_mode = ObjectiveMode::CoverageFirst;
      SolveResult solved = solve(region, solver_cfg);
      row.coverage = solved.report.coverage_ratio;
      row.cost = solved.report.cost;
      row.feasible = solved.report.feasible;
      row.iterations = solved.evaluations_used;
    }
  } catch (const std::exception&) {
    // A failing region run is reported, never fatal to the sweep.
    row.feasible = false;
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - started)
                    .count();
  return row;
}

}  // namespace experiment_detail

inline std::vector<MethodAggregate> aggregate_rows(const std::vector<ExperimentRow>& rows,
                                                   const std::vector<std::string>& methods) {
  std::vector<MethodAggregate> aggregates;
  for (const std::string& method : methods) {
    MethodAggregate agg;
    agg.method = method;
    int count = 0;
    for (const ExperimentRow& row : rows) {
      if (row.method != method) continue;
      ++count;
      agg.mean_coverage += row.coverage;
      agg.mean_cost += row.cost;
      agg.success_rate += row.feasible ? 1.0 : 0.0;
      agg.mean_wall_ms += row.wall_ms;
      agg.mean_iterations += static_cast<double>(row.iterations);
    }
    if (count > 0) {
      agg.mean_coverage /= count;
      agg.mean_cost /= count;
      agg.success_rate /= count;
      agg.mean_wall_ms /= count;
      agg.mean_iterations /= count;
    }
    aggregates.push_back(agg);
  }
  return aggregates;
}

/// Samples `cfg.regions` distinct sub-regions of the parent and runs every
/// configured method on each. Rows come back region-major in sampling
/// order with methods in config order, regardless of `jobs`; per-run seeds
/// are derived from the master seed, region id, and method index.
inline ExperimentReport run_experiment(const ProblemInstance& parent,
                                       const ExperimentConfig& cfg) {
  validate(cfg);
  const auto regions =
      sample_regions(parent, cfg.regions, cfg.region_width, cfg.region_height, cfg.seed);
  const int method_count = static_cast<int>(cfg.methods.size());

  ExperimentReport report;
  report.rows.resize(static_cast<std::size_t>(cfg.regions) * method_count);

  std::atomic<int> next_region{0};
  const auto worker = [&]() {
    for (int r = next_region.fetch_add(1); r < cfg.regions; r = next_region.fetch_add(1)) {
      for (int m = 0; m < method_count; ++m) {
        const std::uint64_t seed =
            derive_seed(cfg.seed, 0x100000ULL + static_cast<std::uint64_t>(r) * 64 + m);
        report.rows[static_cast<std::size_t>(r) * method_count + m] =
            experiment_detail::run_method(regions[r].second, r, cfg.methods[m], seed, cfg);
      }
    }
  };

  const int threads = std::min(cfg.jobs, cfg.regions);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  report.aggregates = aggregate_rows(report.rows, cfg.methods);
  return report;
}

inline constexpr const char* kReportHeader =
    "region,method,coverage,cost,feasible,wall_ms,iterations";

/// Per-region rows followed by one aggregate row per method (region "all",
/// feasible column = success rate).
inline void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << kReportHeader << "\n";
  for (const ExperimentRow& row : report.rows) {
    out << row.region << ',' << row.method << ',' << detail::format_double(row.coverage)
        << ',' << detail::format_double(row.cost) << ',' << (row.feasible ? 1 : 0) << ','
        << detail::format_double(row.wall_ms) << ',' << row.iterations << "\n";
  }
  for (const MethodAggregate& agg : report.aggregates) {
    out << "all," << agg.method << ',' << detail::format_double(agg.mean_coverage) << ','
        << detail::format_double(agg.mean_cost) << ','
        << detail::format_double(agg.success_rate) << ','
        << detail::format_double(agg.mean_wall_ms) << ','
        << detail::format_double(agg.mean_iterations) << "\n";
  }
}

inline std::string format_report_table(const ExperimentReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "method" << std::right << std::setw(12)
      << "coverage" << std::setw(10) << "cost" << std::setw(10) << "success"
      << std::setw(12) << "wall_ms" << std::setw(12) << "iterations" << "\n";
  out << std::setprecision(4) << std::fixed;
  for (const MethodAggregate& agg : report.aggregates) {
    out << std::left << std::setw(14) << agg.method << std::right << std::setw(12)
        << agg.mean_coverage << std::setw(10) << agg.mean_cost << std::setw(10)
        << agg.success_rate << std::setw(12) << agg.mean_wall_ms << std::setw(12)
        << agg.mean_iterations << "\n";
  }
  return out.str();
}

}  // namespace bss
