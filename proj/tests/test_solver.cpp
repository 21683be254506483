#include "bss/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bss/io.hpp"
#include "oracle.hpp"

namespace {

using bss::Algorithm;
using bss::Deployment;
using bss::GridCell;
using bss::GridPoint;
using bss::ObjectiveMode;
using bss::PlacedStation;
using bss::ProblemInstance;
using bss::SolveResult;
using bss::SolverConfig;
using bss::StationKind;
using bss::ViolationKind;

// All cells inside one micro disk around (10,10); optimum is one micro.
ProblemInstance single_cluster() {
  ProblemInstance inst;
  inst.width = inst.height = 30;
  inst.cells = {{10, 10, 5.0, true}, {12, 10, 3.0, true}, {10, 13, 2.0, true},
                {7, 10, 4.0, true},  {9, 7, 1.0, true},   {13, 12, 2.5, true}};
  return bss::canonicalize(inst);
}

// Two tight clusters more than a micro radius apart; optimum is two micros.
ProblemInstance two_clusters() {
  ProblemInstance inst;
  inst.width = inst.height = 20;
  inst.cells = {{4, 4, 5.0, true},   {5, 4, 3.0, true},   {4, 6, 2.0, true},
                {3, 3, 1.0, true},   {16, 16, 4.0, true}, {17, 16, 2.0, true},
                {16, 14, 3.0, true}, {15, 17, 1.5, true}};
  return bss::canonicalize(inst);
}

ProblemInstance no_weak_traffic() {
  ProblemInstance inst;
  inst.width = inst.height = 20;
  inst.cells = {{4, 4, 5.0, false}, {10, 12, 2.0, false}};
  return bss::canonicalize(inst);
}

int structural_violations(const bss::EvaluationReport& report) {
  int n = 0;
  for (const auto& v : report.violations)
    if (v.kind != ViolationKind::CoverageShortfall) ++n;
  return n;
}

bool same_deployment(const Deployment& a, const Deployment& b) {
  if (a.stations.size() != b.stations.size()) return false;
  for (std::size_t i = 0; i < a.stations.size(); ++i)
    if (!(a.stations[i] == b.stations[i])) return false;
  return true;
}

SolverConfig config_for(Algorithm a, std::uint64_t seed = 1) {
  SolverConfig cfg;
  cfg.algorithm = a;
  cfg.seed = seed;
  return cfg;
}

TEST(SolverConfigTest, ValidationRejectsBadValues) {
  SolverConfig cfg;
  cfg.max_evaluations = 0;
  EXPECT_THROW(bss::validate(cfg), std::invalid_argument);

  cfg = SolverConfig{};
  cfg.sa.alpha = 1.0;
  EXPECT_THROW(bss::validate(cfg), std::invalid_argument);

  cfg = SolverConfig{};
  cfg.penalty_weight = 0.0;
  EXPECT_THROW(bss::validate(cfg), std::invalid_argument);

  cfg = SolverConfig{};
  cfg.pso.swarm_size = 0;
  EXPECT_THROW(bss::validate(cfg), std::invalid_argument);

  cfg = SolverConfig{};
  cfg.coverage_target = 1.5;
  EXPECT_THROW(bss::validate(cfg), std::invalid_argument);
}

TEST(Greedy, SingleClusterOneMicro) {
  auto inst = single_cluster();
  auto result = bss::solve_greedy(inst, config_for(Algorithm::Greedy));
  EXPECT_TRUE(result.report.feasible);
  EXPECT_DOUBLE_EQ(result.report.coverage_ratio, 1.0);
  EXPECT_DOUBLE_EQ(result.report.cost, 1.0);
  ASSERT_EQ(result.deployment.stations.size(), 1u);
  EXPECT_EQ(result.deployment.stations[0].kind, StationKind::Micro);

  auto best = oracle::cheapest_feasible(inst, bss::candidate_sites(inst), 2);
  ASSERT_TRUE(best.has_value());
  EXPECT_DOUBLE_EQ(bss::deployment_cost(*best, inst.params), 1.0);
}

TEST(Greedy, NoWeakTrafficEmptyFeasible) {
  auto inst = no_weak_traffic();
  auto result = bss::solve_greedy(inst, config_for(Algorithm::Greedy));
  EXPECT_TRUE(result.deployment.stations.empty());
  EXPECT_TRUE(result.report.feasible);
  EXPECT_DOUBLE_EQ(result.report.coverage_ratio, 1.0);
}

TEST(Greedy, TwoClustersTwoMicros) {
  auto inst = two_clusters();
  auto result = bss::solve_greedy(inst, config_for(Algorithm::Greedy));
  EXPECT_TRUE(result.report.feasible);
  EXPECT_DOUBLE_EQ(result.report.cost, 2.0);
  EXPECT_EQ(result.deployment.stations.size(), 2u);
  for (const PlacedStation& s : result.deployment.stations)
    EXPECT_EQ(s.kind, StationKind::Micro);

  auto best = oracle::cheapest_feasible(inst, bss::candidate_sites(inst), 3);
  ASSERT_TRUE(best.has_value());
  EXPECT_DOUBLE_EQ(bss::deployment_cost(*best, inst.params), 2.0);
}

TEST(Greedy, DeterministicAndCleanTrace) {
  bss::GeneratorConfig gen;
  gen.width = gen.height = 80;
  gen.hotspots = 10;
  gen.existing_stations = 2;
  gen.seed = 17;
  auto inst = bss::generate_instance(gen);

  auto a = bss::solve_greedy(inst, config_for(Algorithm::Greedy));
  auto b = bss::solve_greedy(inst, config_for(Algorithm::Greedy));
  EXPECT_TRUE(same_deployment(a.deployment, b.deployment));
  EXPECT_EQ(a.evaluations_used, b.evaluations_used);

  EXPECT_EQ(structural_violations(a.report), 0);
  for (std::size_t i = 1; i < a.trace.size(); ++i)
    EXPECT_GE(a.trace[i].coverage, a.trace[i - 1].coverage);
}

TEST(Greedy, HonorsTieBreakTowardCheaperKind) {
  // One isolated weak cell: micro and macro have equal gain, micro is
  // cheaper, so rate and tie-break both favor micro.
  ProblemInstance inst;
  inst.width = inst.height = 10;
  inst.cells = {{5, 5, 3.0, true}};
  bss::canonicalize(inst);
  auto result = bss::solve_greedy(inst, config_for(Algorithm::Greedy));
  ASSERT_EQ(result.deployment.stations.size(), 1u);
  EXPECT_EQ(result.deployment.stations[0].kind, StationKind::Micro);
}

TEST(Greedy, FullCoverageTargetOverride) {
  bss::GeneratorConfig gen;
  gen.width = gen.height = 70;
  gen.hotspots = 8;
  gen.existing_stations = 1;
  gen.seed = 5;
  auto inst = bss::generate_instance(gen);
  ASSERT_GT(inst.total_weak_traffic(), 0.0);

  auto cfg = config_for(Algorithm::Greedy);
  cfg.coverage_target = 1.0;
  auto result = bss::solve_greedy(inst, cfg);
  EXPECT_DOUBLE_EQ(result.report.coverage_ratio, 1.0);
  EXPECT_TRUE(result.report.feasible);
}

TEST(Greedy, ReportedRatioMatchesIndependentCheck) {
  bss::GeneratorConfig gen;
  gen.width = gen.height = 60;
  gen.hotspots = 6;
  gen.seed = 23;
  auto inst = bss::generate_instance(gen);
  auto result = bss::solve_greedy(inst, config_for(Algorithm::Greedy));
  auto recheck = bss::check_constraints(inst, result.deployment);
  EXPECT_EQ(result.report.coverage_ratio, recheck.coverage_ratio);
  EXPECT_EQ(result.report.coverage_ratio, oracle::coverage_ratio(inst, result.deployment));
}

TEST(Sa, FindsCheapSolutionAcrossSeeds) {
  auto inst = two_clusters();
  double total_cost = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto result = bss::solve_sa(inst, config_for(Algorithm::SA, seed));
    EXPECT_TRUE(result.report.feasible) << "seed " << seed;
    EXPECT_EQ(structural_violations(result.report), 0);
    total_cost += result.report.cost;
  }
  EXPECT_LE(total_cost / 10.0, 3.0);
}

TEST(Sa, NoWeakTrafficConvergesEmpty) {
  auto inst = no_weak_traffic();
  auto result = bss::solve_sa(inst, config_for(Algorithm::SA));
  EXPECT_TRUE(result.deployment.stations.empty());
  EXPECT_TRUE(result.report.feasible);
  ASSERT_FALSE(result.trace.empty());
  EXPECT_DOUBLE_EQ(result.trace.back().best_energy, 0.0);
}

TEST(Sa, DeterministicForFixedSeed) {
  auto inst = two_clusters();
  auto a = bss::solve_sa(inst, config_for(Algorithm::SA, 99));
  auto b = bss::solve_sa(inst, config_for(Algorithm::SA, 99));
  EXPECT_TRUE(same_deployment(a.deployment, b.deployment));
  EXPECT_EQ(a.evaluations_used, b.evaluations_used);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i)
    EXPECT_EQ(a.trace[i].best_energy, b.trace[i].best_energy);
}

TEST(Sa, BestEnergyNonIncreasing) {
  bss::GeneratorConfig gen;
  gen.width = gen.height = 60;
  gen.hotspots = 6;
  gen.existing_stations = 1;
  gen.seed = 41;
  auto inst = bss::generate_instance(gen);
  auto cfg = config_for(Algorithm::SA, 7);
  cfg.max_evaluations = 4000;
  auto result = bss::solve_sa(inst, cfg);
  for (std::size_t i = 1; i < result.trace.size(); ++i)
    EXPECT_LE(result.trace[i].best_energy, result.trace[i - 1].best_energy);
  EXPECT_LE(result.evaluations_used, cfg.max_evaluations);
  EXPECT_EQ(structural_violations(result.report), 0);
}

TEST(Sa, BestEnergyMatchesPublicFormula) {
  auto inst = two_clusters();
  auto cfg = config_for(Algorithm::SA, 3);
  auto result = bss::solve_sa(inst, cfg);
  EXPECT_DOUBLE_EQ(result.trace.back().best_energy,
                   bss::deployment_energy(inst, result.deployment, cfg));
}

TEST(Pso, NoWeakTrafficEmptyDeployment) {
  auto inst = no_weak_traffic();
  auto result = bss::solve_pso(inst, config_for(Algorithm::PSO));
  EXPECT_TRUE(result.deployment.stations.empty());
  EXPECT_TRUE(result.report.feasible);
}

TEST(Pso, SingleClusterCheapAcrossSeeds) {
  auto inst = single_cluster();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto cfg = config_for(Algorithm::PSO, seed);
    cfg.max_evaluations = 4000;
    auto result = bss::solve_pso(inst, cfg);
    EXPECT_TRUE(result.report.feasible) << "seed " << seed;
    EXPECT_LE(result.report.cost, 2.0) << "seed " << seed;
    EXPECT_EQ(structural_violations(result.report), 0);
  }
}

TEST(Pso, DeterministicForFixedSeed) {
  auto inst = two_clusters();
  auto cfg = config_for(Algorithm::PSO, 12);
  cfg.max_evaluations = 2000;
  auto a = bss::solve_pso(inst, cfg);
  auto b = bss::solve_pso(inst, cfg);
  EXPECT_TRUE(same_deployment(a.deployment, b.deployment));
  EXPECT_EQ(a.evaluations_used, b.evaluations_used);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i)
    EXPECT_EQ(a.trace[i].best_energy, b.trace[i].best_energy);
}

TEST(Pso, RejectsEmptyCandidatesWithWeakTraffic) {
  auto inst = single_cluster();
  auto cfg = config_for(Algorithm::PSO);
  cfg.candidates.filter = bss::CandidateFilter::ExplicitList;
  cfg.candidates.sites = {};
  EXPECT_THROW(bss::solve_pso(inst, cfg), std::invalid_argument);
}

TEST(Pso, CoverageFirstTradesCostForCoverage) {
  // Dense cluster plus four scattered singles: cost-first can stop at the
  // 0.9 threshold, coverage-first keeps chasing the stragglers.
  ProblemInstance inst;
  inst.width = inst.height = 60;
  for (int i = 0; i < 8; ++i)
    inst.cells.push_back({10 + (i % 3) * 3, 10 + (i / 3) * 3, 10.0, true});
  inst.cells.push_back({50, 5, 2.0, true});
  inst.cells.push_back({5, 50, 2.0, true});
  inst.cells.push_back({52, 52, 2.0, true});
  inst.cells.push_back({30, 55, 2.0, true});
  bss::canonicalize(inst);

  double mean_cov_cost_first = 0.0, mean_cov_coverage_first = 0.0;
  double mean_cost_cost_first = 0.0, mean_cost_coverage_first = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto cfg = config_for(Algorithm::PSO, seed);
    cfg.max_evaluations = 4000;
    cfg.objective_mode = ObjectiveMode::CostFirst;
    auto cost_first = bss::solve_pso(inst, cfg);
    cfg.objective_mode = ObjectiveMode::CoverageFirst;
    auto coverage_first = bss::solve_pso(inst, cfg);
    mean_cov_cost_first += cost_first.report.coverage_ratio;
    mean_cov_coverage_first += coverage_first.report.coverage_ratio;
    mean_cost_cost_first += cost_first.report.cost;
    mean_cost_coverage_first += coverage_first.report.cost;
  }
  EXPECT_GE(mean_cov_coverage_first, mean_cov_cost_first);
  EXPECT_GE(mean_cost_coverage_first, mean_cost_cost_first);
}

TEST(AllSolvers, OracleLowerBoundsEveryHeuristic) {
  for (const ProblemInstance& inst : {single_cluster(), two_clusters()}) {
    auto candidates = bss::candidate_sites(inst);
    ASSERT_LE(candidates.size(), 12u);
    auto best = oracle::cheapest_feasible(inst, candidates, 3);
    ASSERT_TRUE(best.has_value());
    const double optimal = bss::deployment_cost(*best, inst.params);

    auto greedy = bss::solve_greedy(inst, config_for(Algorithm::Greedy));
    ASSERT_TRUE(greedy.report.feasible);
    EXPECT_GE(greedy.report.cost, optimal);

    double best_sa = 1e99, best_pso = 1e99;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto cfg = config_for(Algorithm::SA, seed);
      cfg.max_evaluations = 6000;
      auto sa = bss::solve_sa(inst, cfg);
      if (sa.report.feasible) best_sa = std::min(best_sa, sa.report.cost);
      cfg = config_for(Algorithm::PSO, seed);
      cfg.max_evaluations = 3000;
      auto pso = bss::solve_pso(inst, cfg);
      if (pso.report.feasible) best_pso = std::min(best_pso, pso.report.cost);
    }
    EXPECT_GE(best_sa, optimal);
    EXPECT_GE(best_pso, optimal);
    EXPECT_LT(best_sa, 1e99);
    EXPECT_LT(best_pso, 1e99);
  }
}

TEST(AllSolvers, StructuralConstraintsAlwaysHold) {
  bss::GeneratorConfig gen;
  gen.width = gen.height = 70;
  gen.hotspots = 8;
  gen.existing_stations = 3;
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    gen.seed = seed;
    auto inst = bss::generate_instance(gen);
    for (Algorithm alg : {Algorithm::Greedy, Algorithm::SA, Algorithm::PSO}) {
      auto cfg = config_for(alg, seed);
      cfg.max_evaluations = 3000;
      auto result = bss::solve(inst, cfg);
      auto recheck = bss::check_constraints(inst, result.deployment);
      EXPECT_EQ(structural_violations(recheck), 0)
          << to_string(alg) << " seed " << seed;
      EXPECT_LE(result.evaluations_used, cfg.max_evaluations);
    }
  }
}

TEST(AllSolvers, DispatchMatchesDirectCalls) {
  auto inst = two_clusters();
  auto cfg = config_for(Algorithm::Greedy);
  EXPECT_TRUE(same_deployment(bss::solve(inst, cfg).deployment,
                              bss::solve_greedy(inst, cfg).deployment));
  cfg.algorithm = Algorithm::SA;
  EXPECT_TRUE(same_deployment(bss::solve(inst, cfg).deployment,
                              bss::solve_sa(inst, cfg).deployment));
  cfg.algorithm = Algorithm::PSO;
  cfg.max_evaluations = 2000;
  EXPECT_TRUE(same_deployment(bss::solve(inst, cfg).deployment,
                              bss::solve_pso(inst, cfg).deployment));
}

}  // namespace
