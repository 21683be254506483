#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bss/agent.hpp"
#include "bss/coverage.hpp"
#include "bss/experiment.hpp"
#include "bss/io.hpp"
#include "bss/model.hpp"
#include "bss/proposer.hpp"
#include "bss/proposer_external.hpp"
#include "bss/rag.hpp"
#include "bss/render.hpp"
#include "bss/solver.hpp"
#include "bss/wire.hpp"

namespace bss {

/// Exit-status contract shared by all subcommands: 0 success/feasible,
/// 1 ran but infeasible/failed, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitUsage = 2;

namespace cli_detail {

struct InstanceArgs {
  std::string cells_path;
  std::string stations_path;
  std::string params_path;
  int width = 0;
  int height = 0;

  void attach(CLI::App* cmd, bool required = true) {
    auto* cells = cmd->add_option("--cells", cells_path, "cell CSV (x,y,traffic,weak)");
    auto* stations =
        cmd->add_option("--stations", stations_path, "existing-station CSV (x,y)");
    if (required) {
      cells->required();
      stations->required();
    }
    cmd->add_option("--params", params_path, "radio parameter JSON");
    cmd->add_option("--width", width, "grid width (0 = infer from cells)");
    cmd->add_option("--height", height, "grid height (0 = infer from cells)");
  }

  ProblemInstance load() const {
    RadioParams params;
    if (!params_path.empty()) params = load_params(params_path);
    return load_instance(cells_path, stations_path, params, width, height);
  }
};

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string piece;
  std::istringstream in(text);
  while (std::getline(in, piece, sep))
    if (!piece.empty()) parts.push_back(piece);
  return parts;
}

/// Loads either a saved vector store or a raw knowledge-base file,
/// distinguished by the store header line.
inline RagStore load_knowledge(const std::string& path) {
  {
    std::ifstream probe = detail::open_for_read(path);
    std::string first;
    std::getline(probe, first);
    if (first.rfind("#store", 0) == 0) return RagStore::load(path);
  }
  RagStore store;
  store.ingest_kb_file(path);
  return store;
}

inline void print_report(const EvaluationReport& report, std::ostream& out) {
  out << "feasible=" << (report.feasible ? 1 : 0)
      << " coverage=" << detail::format_double(report.coverage_ratio)
      << " cost=" << detail::format_double(report.cost)
      << " weak_traffic=" << detail::format_double(report.total_weak_traffic) << "\n";
  for (const ConstraintViolation& v : report.violations)
    out << "violation kind=" << to_string(v.kind) << " measure="
        << detail::format_double(v.measure) << " detail=\"" << v.detail << "\"\n";
}

inline void write_transcript(const std::string& path,
                             const std::vector<TranscriptEntry>& transcript) {
  std::ofstream out = detail::open_for_write(path);
  for (const TranscriptEntry& e : transcript) {
    nlohmann::json line = {{"iteration", e.iteration},
                           {"kind", to_string(e.kind)},
                           {"role", e.role},
                           {"request", nlohmann::json::parse(e.request)},
                           {"response", nlohmann::json::parse(e.response)}};
    out << line.dump() << "\n";
  }
}

}  // namespace cli_detail

/// In-process entry point behind the `bss` binary; argv-style arguments
/// without the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  using cli_detail::InstanceArgs;

  CLI::App app{"grid base-station siting toolkit"};
  app.require_subcommand(1);

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  GeneratorConfig gen_cfg;
  std::string gen_out_dir;
  std::string gen_config_path;
  std::string gen_params_path;
  gen->add_option("--out", gen_out_dir, "output directory")->required();
  gen->add_option("--config", gen_config_path, "generator config JSON (flags override)");
  gen->add_option("--params", gen_params_path, "radio parameter JSON");
  auto* gw = gen->add_option("--width", gen_cfg.width);
  auto* gh = gen->add_option("--height", gen_cfg.height);
  auto* ghs = gen->add_option("--hotspots", gen_cfg.hotspots);
  auto* gpl = gen->add_option("--peak-min", gen_cfg.peak_min);
  auto* gph = gen->add_option("--peak-max", gen_cfg.peak_max);
  auto* grl = gen->add_option("--radius-min", gen_cfg.radius_min);
  auto* grh = gen->add_option("--radius-max", gen_cfg.radius_max);
  auto* gst = gen->add_option("--stations", gen_cfg.existing_stations);
  auto* gsd = gen->add_option("--seed", gen_cfg.seed);

  // --- solve ---
  auto* solve_cmd = app.add_subcommand("solve", "run a solver on an instance");
  InstanceArgs solve_inst;
  solve_inst.attach(solve_cmd);
  std::string solve_algo = "greedy";
  std::string solve_objective = "cost_first";
  std::string solve_candidates = "weak_cells";
  std::string solve_out;
  std::string solve_trace;
  SolverConfig solve_cfg;
  double solve_target = 0.0;
  solve_cmd->add_option("--algo", solve_algo, "greedy|sa|pso");
  solve_cmd->add_option("--seed", solve_cfg.seed);
  solve_cmd->add_option("--evals", solve_cfg.max_evaluations);
  solve_cmd->add_option("--objective", solve_objective, "cost_first|coverage_first");
  solve_cmd->add_option("--candidates", solve_candidates,
                        "weak_cells|all_cells|explicit:x,y;...");
  auto* solve_target_opt =
      solve_cmd->add_option("--target", solve_target, "coverage target override");
  solve_cmd->add_option("--penalty", solve_cfg.penalty_weight);
  solve_cmd->add_option("--sa-t0", solve_cfg.sa.t0);
  solve_cmd->add_option("--sa-alpha", solve_cfg.sa.alpha);
  solve_cmd->add_option("--sa-moves", solve_cfg.sa.moves_per_temp);
  solve_cmd->add_option("--pso-swarm", solve_cfg.pso.swarm_size);
  solve_cmd->add_option("--out", solve_out, "deployment CSV to write");
  solve_cmd->add_option("--trace", solve_trace, "search trace CSV to write");

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "check a deployment against an instance");
  InstanceArgs eval_inst;
  eval_inst.attach(eval_cmd);
  std::string eval_deployment;
  eval_cmd->add_option("--deployment", eval_deployment, "deployment CSV")->required();

  // --- render ---
  auto* render_cmd = app.add_subcommand("render", "draw an instance (and deployment)");
  InstanceArgs render_inst;
  render_inst.attach(render_cmd);
  std::string render_deployment;
  std::string render_out;
  RenderOptions render_opts;
  bool render_no_disks = false;
  render_cmd->add_option("--deployment", render_deployment, "deployment CSV");
  render_cmd->add_option("--out", render_out, "output image (.ppm or .svg)")->required();
  render_cmd->add_option("--scale", render_opts.scale, "pixels per cell (raster)");
  render_cmd->add_flag("--no-disks", render_no_disks, "skip coverage outlines");

  // --- experiment ---
  auto* exp_cmd = app.add_subcommand("experiment", "sample regions and compare methods");
  InstanceArgs exp_inst;
  exp_inst.attach(exp_cmd, /*required=*/false);
  std::string exp_gen_config;
  std::string exp_methods = "greedy,sa,pso";
  std::string exp_out;
  ExperimentConfig exp_cfg;
  exp_cmd->add_option("--gen-config", exp_gen_config,
                      "generate the parent instance from this config instead of files");
  exp_cmd->add_option("--regions", exp_cfg.regions);
  exp_cmd->add_option("--region-width", exp_cfg.region_width);
  exp_cmd->add_option("--region-height", exp_cfg.region_height);
  exp_cmd->add_option("--seed", exp_cfg.seed);
  exp_cmd->add_option("--methods", exp_methods, "comma-separated method list");
  exp_cmd->add_option("--evals", exp_cfg.max_evaluations);
  exp_cmd->add_option("--cap", exp_cfg.agent_cap);
  exp_cmd->add_option("--jobs", exp_cfg.jobs);
  exp_cmd->add_option("--out", exp_out, "report CSV to write");

  // --- agent run ---
  auto* agent_cmd = app.add_subcommand("agent", "agent loop operations");
  agent_cmd->require_subcommand(1);
  auto* agent_run = agent_cmd->add_subcommand("run", "drive a proposer loop");
  InstanceArgs agent_inst;
  agent_inst.attach(agent_run);
  std::string agent_strategy = "laba";
  std::string agent_proposer = "scripted";
  std::string agent_behavior = "feasible_greedy";
  std::string agent_marker = "greedy ladder";
  std::string agent_rag_path;
  std::string agent_cmdline;
  std::string agent_transcript;
  int agent_initial_budget = 4;
  int agent_timeout_ms = 10000;
  AgentOptions agent_opts;
  agent_run->add_option("--strategy", agent_strategy, "laba|claba");
  agent_run->add_option("--proposer", agent_proposer, "scripted|external");
  agent_run->add_option(
      "--behavior", agent_behavior,
      "feasible_greedy|unreachable|budget_doubling|rag_gated|error_always");
  agent_run->add_option("--initial-budget", agent_initial_budget,
                        "first budget for budget_doubling");
  agent_run->add_option("--marker", agent_marker, "marker text for rag_gated");
  agent_run->add_option("--cap", agent_opts.cap, "iteration cap");
  agent_run->add_option("--rag", agent_rag_path, "knowledge base or saved store");
  agent_run->add_option("--topk", agent_opts.retrieve_k, "retrieved documents per request");
  agent_run->add_option("--proposer-cmd", agent_cmdline,
                        std::string("external proposer command (or env ") +
                            kProposerCommandEnv + ")");
  agent_run->add_option("--timeout-ms", agent_timeout_ms, "external proposer timeout");
  agent_run->add_option("--transcript", agent_transcript, "write transcript JSONL here");

  // --- rag ---
  auto* rag_cmd = app.add_subcommand("rag", "knowledge store operations");
  rag_cmd->require_subcommand(1);
  auto* rag_index = rag_cmd->add_subcommand("index", "build a store from a KB file");
  std::string rag_kb_path;
  std::string rag_store_out;
  rag_index->add_option("--kb", rag_kb_path, "knowledge base text file")->required();
  rag_index->add_option("--out", rag_store_out, "store file to write")->required();
  auto* rag_query = rag_cmd->add_subcommand("query", "retrieve top-k documents");
  std::string rag_store_path;
  std::string rag_query_text;
  int rag_k = 3;
  rag_query->add_option("--store", rag_store_path, "store or KB file")->required();
  rag_query->add_option("--query", rag_query_text, "query text")->required();
  rag_query->add_option("--k", rag_k, "number of hits");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("bss");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      GeneratorConfig cfg;
      if (!gen_config_path.empty()) cfg = load_generator_config(gen_config_path);
      if (!gen_params_path.empty()) cfg.params = load_params(gen_params_path);
      if (gw->count()) cfg.width = gen_cfg.width;
      if (gh->count()) cfg.height = gen_cfg.height;
      if (ghs->count()) cfg.hotspots = gen_cfg.hotspots;
      if (gpl->count()) cfg.peak_min = gen_cfg.peak_min;
      if (gph->count()) cfg.peak_max = gen_cfg.peak_max;
      if (grl->count()) cfg.radius_min = gen_cfg.radius_min;
      if (grh->count()) cfg.radius_max = gen_cfg.radius_max;
      if (gst->count()) cfg.existing_stations = gen_cfg.existing_stations;
      if (gsd->count()) cfg.seed = gen_cfg.seed;

      ProblemInstance inst = generate_instance(cfg);
      std::filesystem::create_directories(gen_out_dir);
      const std::filesystem::path dir(gen_out_dir);
      save_instance(inst, (dir / "cells.csv").string(), (dir / "stations.csv").string());
      {
        std::ofstream params_out = detail::open_for_write((dir / "params.json").string());
        params_out << to_json(cfg.params).dump(2) << "\n";
      }
      out << "cells=" << inst.cells.size() << " weak=" << inst.weak_cell_count()
          << " weak_traffic=" << detail::format_double(inst.total_weak_traffic())
          << " stations=" << inst.existing_stations.size() << " dir=" << gen_out_dir
          << "\n";
      return kExitOk;
    }

    if (solve_cmd->parsed()) {
      ProblemInstance inst = solve_inst.load();
      solve_cfg.algorithm = parse_algorithm(solve_algo);
      solve_cfg.objective_mode = parse_objective_mode(solve_objective);
      solve_cfg.candidates = parse_candidate_filter(solve_candidates);
      if (solve_target_opt->count()) solve_cfg.coverage_target = solve_target;

      SolveResult result = solve(inst, solve_cfg);
      if (!solve_out.empty()) save_deployment(result.deployment, solve_out);
      if (!solve_trace.empty()) {
        std::ofstream trace = detail::open_for_write(solve_trace);
        trace << "iteration,best_energy,coverage,cost\n";
        for (const TracePoint& p : result.trace)
          trace << p.iteration << ',' << detail::format_double(p.best_energy) << ','
                << detail::format_double(p.coverage) << ','
                << detail::format_double(p.cost) << "\n";
      }
      out << "algorithm=" << to_string(solve_cfg.algorithm)
          << " stations=" << result.deployment.stations.size()
          << " evaluations=" << result.evaluations_used
          << " wall_ms=" << detail::format_double(result.wall_ms) << "\n";
      cli_detail::print_report(result.report, out);
      return result.report.feasible ? kExitOk : kExitInfeasible;
    }

    if (eval_cmd->parsed()) {
      ProblemInstance inst = eval_inst.load();
      Deployment deployment = load_deployment(eval_deployment);
      EvaluationReport report = check_constraints(inst, deployment);
      cli_detail::print_report(report, out);
      return report.feasible ? kExitOk : kExitInfeasible;
    }

    if (render_cmd->parsed()) {
      ProblemInstance inst = render_inst.load();
      std::optional<Deployment> deployment;
      if (!render_deployment.empty()) deployment = load_deployment(render_deployment);
      render_opts.draw_disks = !render_no_disks;
      const Deployment* dep = deployment ? &*deployment : nullptr;
      const bool svg = render_out.size() >= 4 &&
                       render_out.compare(render_out.size() - 4, 4, ".svg") == 0;
      save_render(render_out,
                  svg ? render_svg(inst, dep, render_opts)
                      : render_ppm(inst, dep, render_opts));
      out << "wrote " << render_out << "\n";
      return kExitOk;
    }

    if (exp_cmd->parsed()) {
      ProblemInstance parent;
      if (!exp_gen_config.empty()) {
        parent = generate_instance(load_generator_config(exp_gen_config));
      } else if (!exp_inst.cells_path.empty() && !exp_inst.stations_path.empty()) {
        parent = exp_inst.load();
      } else {
        err << "experiment: provide --gen-config or --cells/--stations\n";
        return kExitUsage;
      }
      exp_cfg.methods = cli_detail::split(exp_methods, ',');
      ExperimentReport report = run_experiment(parent, exp_cfg);
      if (!exp_out.empty()) {
        std::ofstream csv = detail::open_for_write(exp_out);
        write_report_csv(report, csv);
      }
      out << format_report_table(report);
      return kExitOk;
    }

    if (agent_run->parsed()) {
      ProblemInstance inst = agent_inst.load();
      RagStore store;
      if (!agent_rag_path.empty()) {
        store = cli_detail::load_knowledge(agent_rag_path);
        agent_opts.knowledge = &store;
      }

      ScriptedProposer::Behavior behavior;
      if (agent_behavior == "feasible_greedy")
        behavior = ScriptedProposer::Behavior::FeasibleGreedy;
      else if (agent_behavior == "unreachable")
        behavior = ScriptedProposer::Behavior::Unreachable;
      else if (agent_behavior == "budget_doubling")
        behavior = ScriptedProposer::Behavior::BudgetDoubling;
      else if (agent_behavior == "rag_gated")
        behavior = ScriptedProposer::Behavior::RagGated;
      else if (agent_behavior == "error_always")
        behavior = ScriptedProposer::Behavior::ErrorAlways;
      else {
        err << "agent run: unknown behavior '" << agent_behavior << "'\n";
        return kExitUsage;
      }
      const auto make_scripted = [&]() {
        if (behavior == ScriptedProposer::Behavior::BudgetDoubling)
          return ScriptedProposer::budget_doubling(agent_initial_budget);
        if (behavior == ScriptedProposer::Behavior::RagGated)
          return ScriptedProposer::rag_gated(agent_marker);
        return ScriptedProposer(behavior);
      };

      std::vector<std::string> external_cmd;
      if (agent_proposer == "external") {
        std::string cmdline = agent_cmdline;
        if (cmdline.empty()) {
          const char* env = std::getenv(kProposerCommandEnv);
          if (env) cmdline = env;
        }
        external_cmd = cli_detail::split(cmdline, ' ');
        if (external_cmd.empty()) {
          err << "agent run: external proposer needs --proposer-cmd or $"
              << kProposerCommandEnv << "\n";
          return kExitUsage;
        }
      } else if (agent_proposer != "scripted") {
        err << "agent run: unknown proposer '" << agent_proposer << "'\n";
        return kExitUsage;
      }

      AgentRunResult run;
      if (agent_strategy == "laba") {
        if (agent_proposer == "scripted") {
          ScriptedProposer proposer = make_scripted();
          run = run_laba(inst, proposer, agent_opts);
        } else {
          ExternalProposer proposer(external_cmd, agent_timeout_ms);
          run = run_laba(inst, proposer, agent_opts);
        }
      } else if (agent_strategy == "claba") {
        if (agent_proposer == "scripted") {
          ScriptedProposer modeler = make_scripted();
          ScriptedProposer planner = make_scripted();
          run = run_claba(inst, ClabaProposers{&modeler, &planner}, agent_opts);
        } else {
          ExternalProposer modeler(external_cmd, agent_timeout_ms);
          ExternalProposer planner(external_cmd, agent_timeout_ms);
          run = run_claba(inst, ClabaProposers{&modeler, &planner}, agent_opts);
        }
      } else {
        err << "agent run: unknown strategy '" << agent_strategy << "'\n";
        return kExitUsage;
      }

      if (!agent_transcript.empty())
        cli_detail::write_transcript(agent_transcript, run.transcript);
      out << "success=" << (run.success ? 1 : 0) << " iterations=" << run.iterations_used
          << " stations=" << run.deployment.stations.size() << "\n";
      cli_detail::print_report(run.report, out);
      return run.success ? kExitOk : kExitInfeasible;
    }

    if (rag_index->parsed()) {
      RagStore store;
      store.ingest_kb_file(rag_kb_path);
      store.save(rag_store_out);
      out << "indexed=" << store.size() << " store=" << rag_store_out << "\n";
      return kExitOk;
    }

    if (rag_query->parsed()) {
      RagStore store = cli_detail::load_knowledge(rag_store_path);
      for (const RetrievalHit& hit : store.retrieve(rag_query_text, rag_k))
        out << hit.document.id << " " << detail::format_double(hit.score) << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  err << "no command given\n";
  return kExitUsage;
}

}  // namespace bss
