#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bss/coverage.hpp"
#include "bss/model.hpp"
#include "bss/rag.hpp"
#include "bss/solver.hpp"
#include "bss/wire.hpp"

namespace bss {

/// A proposer is anything that answers model/plan/revise requests: a
/// scripted policy, a child process bridging to an LLM, etc. Throwing is
/// treated as a transport failure by the harness.
class Proposer {
 public:
  virtual ~Proposer() = default;
  virtual ProposerResponse propose(const ProposerRequest& request) = 0;
};

enum class ExchangeKind {
  ModelExchange,
  PlanExchange,
  ReviseExchange,
  ExecutionErrorExchange,  // in-iteration plan correction after an executor error
  Execution,
  Validation,
};

inline std::string to_string(ExchangeKind kind) {
  switch (kind) {
    case ExchangeKind::ModelExchange: return "model_exchange";
    case ExchangeKind::PlanExchange: return "plan_exchange";
    case ExchangeKind::ReviseExchange: return "revise_exchange";
    case ExchangeKind::ExecutionErrorExchange: return "execution_error_exchange";
    case ExchangeKind::Execution: return "execution";
    case ExchangeKind::Validation: return "validation";
  }
  return "?";
}

struct TranscriptEntry {
  int iteration = 0;  // 0 for pre-loop modeling
  ExchangeKind kind = ExchangeKind::ModelExchange;
  std::string role;
  std::string request;   // JSON sent (or executor/validator input digest)
  std::string response;  // JSON received (or produced artifact digest)
};

/// Counts exchanges that produced (or were asked to produce) a plan for a
/// loop iteration; execution-error corrections are internal and excluded.
inline int plan_exchange_count(const std::vector<TranscriptEntry>& transcript) {
  int n = 0;
  for (const TranscriptEntry& e : transcript)
    if (e.kind == ExchangeKind::PlanExchange || e.kind == ExchangeKind::ReviseExchange)
      ++n;
  return n;
}

inline int model_exchange_count(const std::vector<TranscriptEntry>& transcript) {
  int n = 0;
  for (const TranscriptEntry& e : transcript)
    if (e.kind == ExchangeKind::ModelExchange) ++n;
  return n;
}

struct AgentRunResult {
  bool success = false;
  int iterations_used = 0;
  ModelSpec model;
  Deployment deployment;
  EvaluationReport report;
  std::vector<TranscriptEntry> transcript;
};

/// Extra acceptance checks applied by the validator on top of the
/// constraint evaluation (e.g. a stricter coverage bar).
struct ValidationPredicate {
  std::string name;
  std::function<bool(const ProblemInstance&, const Deployment&, const EvaluationReport&)>
      check;
};

struct AgentOptions {
  int cap = 10;
  std::vector<ValidationPredicate> extra_checks;
  const RagStore* knowledge = nullptr;  // when set, requests carry retrieved texts
  int retrieve_k = 3;
};

inline void validate(const AgentOptions& opts) {
  if (opts.cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (opts.knowledge && opts.retrieve_k < 1)
    throw std::invalid_argument("retrieve_k must be >= 1");
}

inline double success_rate(const std::vector<AgentRunResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("success_rate over no runs");
  int wins = 0;
  for (const AgentRunResult& r : runs)
    if (r.success) ++wins;
  return static_cast<double>(wins) / static_cast<double>(runs.size());
}

namespace agent_detail {

struct LoopState {
  const ProblemInstance& inst;
  const AgentOptions& opts;
  ProblemSummary summary;
  std::vector<std::string> retrieved;
  ModelSpec model;
  bool have_model = false;
  bool have_plan = false;
  bool have_report = false;
  std::optional<Feedback> feedback;
  AgentRunResult result;

  LoopState(const ProblemInstance& instance, const AgentOptions& options)
      : inst(instance), opts(options), summary(summarize_problem(instance)) {
    if (options.knowledge) {
      for (const RetrievalHit& hit :
           options.knowledge->retrieve(summary.task, options.retrieve_k))
        retrieved.push_back(hit.document.text);
    }
  }

  ProposerRequest make_request(const std::string& phase, const std::string& role) const {
    ProposerRequest req;
    req.phase = phase;
    req.role = role;
    req.summary = summary;
    if (have_model) req.model = model;
    req.feedback = feedback;
    req.retrieved = retrieved;
    return req;
  }

  void record(int iteration, ExchangeKind kind, const std::string& role,
              const std::string& request, const std::string& response) {
    result.transcript.push_back({iteration, kind, role, request, response});
  }

  /// Sends one request and records it. Transport failures and error
  /// replies come back as a ProtocolError for the caller to handle.
  ProposerResponse exchange(Proposer& proposer, const ProposerRequest& req, int iteration,
                            ExchangeKind kind) {
    const std::string request_text = encode_request(req).dump();
    ProposerResponse resp;
    try {
      resp = proposer.propose(req);
    } catch (const std::exception& e) {
      record(iteration, kind, req.role, request_text,
             nlohmann::json({{"error", std::string("transport: ") + e.what()}}).dump());
      throw ProtocolError(std::string("proposer failed: ") + e.what());
    }
    record(iteration, kind, req.role, request_text, encode_response(resp).dump());
    if (resp.error) throw ProtocolError("proposer error: " + *resp.error);
    return resp;
  }

  void fail_iteration(int iteration, const std::string& hint) {
    Feedback fb;
    fb.iteration = iteration;
    fb.hint = hint;
    if (have_report) {
      fb.coverage_ratio = result.report.coverage_ratio;
      fb.cost = result.report.cost;
      fb.violations = result.report.violations;
    }
    feedback = std::move(fb);
  }

  SolverConfig base_config() const {
    SolverConfig cfg;
    if (have_model) {
      cfg.objective_mode = model.objective_mode;
      cfg.coverage_target = model.theta_override;
    }
    return cfg;
  }

  /// Runs the accepted plan. Throws ProtocolError/std::exception when the
  /// plan cannot be executed (unknown tags, invalid candidates, ...).
  SolveResult execute(const SolverPlan& plan, int iteration, const std::string& role) {
    const std::string request_text = to_json(plan).dump();
    try {
      SolveResult solved = solve(inst, plan.config);
      record(iteration, ExchangeKind::Execution, role, request_text,
             nlohmann::json({{"coverage", solved.report.coverage_ratio},
                             {"cost", solved.report.cost},
                             {"evaluations", solved.evaluations_used},
                             {"stations", solved.deployment.stations.size()}})
                 .dump());
      return solved;
    } catch (const std::exception& e) {
      record(iteration, ExchangeKind::Execution, role, request_text,
             nlohmann::json({{"error", e.what()}}).dump());
      throw;
    }
  }

  /// Re-verifies the executed deployment against the model's constraint
  /// set plus any user predicates; fills feedback on failure.
  bool validate_deployment(const SolveResult& solved, int iteration,
                           const std::string& role) {
    ConstraintOptions check = constraint_options(model);
    EvaluationReport report = check_constraints(inst, solved.deployment, check);
    bool ok = report.feasible;
    std::string why;
    if (!ok && !report.violations.empty()) why = report.violations.front().detail;
    if (ok) {
      for (const ValidationPredicate& p : opts.extra_checks) {
        if (!p.check(inst, solved.deployment, report)) {
          ok = false;
          why = "check '" + p.name + "' failed";
          break;
        }
      }
    }
    record(iteration, ExchangeKind::Validation, role,
           nlohmann::json({{"stations", solved.deployment.stations.size()}}).dump(),
           nlohmann::json({{"feasible", ok},
                           {"coverage", report.coverage_ratio},
                           {"cost", report.cost},
                           {"why", why}})
               .dump());
    result.deployment = solved.deployment;
    result.report = report;
    have_report = true;
    if (ok) return true;
    Feedback fb;
    fb.iteration = iteration;
    fb.violations = report.violations;
    fb.coverage_ratio = report.coverage_ratio;
    fb.cost = report.cost;
    fb.hint = why;
    feedback = std::move(fb);
    return false;
  }
};

}  // namespace agent_detail

/// Single-agent loop: one proposer models the problem, then plans and
/// revises until the validator accepts a deployment or the iteration cap
/// is exhausted. Every unproductive exchange (protocol violation,
/// execution failure, infeasible result) consumes one iteration and is
/// turned into feedback for the next attempt.
inline AgentRunResult run_laba(const ProblemInstance& inst, Proposer& proposer,
                               const AgentOptions& opts = {}) {
  validate(opts);
  agent_detail::LoopState st(inst, opts);

  for (int it = 1; it <= opts.cap; ++it) {
    st.result.iterations_used = it;

    if (!st.have_model) {
      try {
        ProposerResponse resp = st.exchange(proposer, st.make_request("model", "solo"),
                                            it, ExchangeKind::ModelExchange);
        if (!resp.model) throw ProtocolError("model response missing model");
        st.model = *resp.model;
        st.have_model = true;
        st.result.model = st.model;
      } catch (const ProtocolError& e) {
        st.fail_iteration(it, e.what());
        continue;
      }
    }

    const bool first_plan = !st.have_plan;
    SolverPlan plan;
    try {
      ProposerResponse resp = st.exchange(
          proposer, st.make_request(first_plan ? "plan" : "revise", "solo"), it,
          first_plan ? ExchangeKind::PlanExchange : ExchangeKind::ReviseExchange);
      if (!resp.plan) throw ProtocolError("plan response missing plan");
      plan = parse_solver_plan(*resp.plan, st.base_config());
      st.have_plan = true;
    } catch (const ProtocolError& e) {
      st.fail_iteration(it, e.what());
      continue;
    }

    try {
      SolveResult solved = st.execute(plan, it, "executor");
      if (st.validate_deployment(solved, it, "validator")) {
        st.result.success = true;
        return st.result;
      }
    } catch (const std::exception& e) {
      st.fail_iteration(it, std::string("execution error: ") + e.what());
    }
  }
  return st.result;
}

struct ClabaProposers {
  Proposer* modeler = nullptr;  // agent1
  Proposer* planner = nullptr;  // agent2
  // agent3 (executor) and agent4 (validator) are built in.
};

/// Cooperative loop with role separation: agent1 produces the model once,
/// agent2 plans/revises, the built-in executor runs plans (plan-level
/// failures are routed straight back to agent2 up to 3 corrections
/// without consuming loop iterations), and the built-in validator tests
/// results. If agent1 fails, the run aborts after that single iteration.
inline AgentRunResult run_claba(const ProblemInstance& inst, const ClabaProposers& agents,
                                const AgentOptions& opts = {}) {
  validate(opts);
  if (!agents.modeler || !agents.planner)
    throw std::invalid_argument("claba requires modeler and planner proposers");
  agent_detail::LoopState st(inst, opts);

  try {
    ProposerResponse resp = st.exchange(*agents.modeler, st.make_request("model", "agent1"),
                                        0, ExchangeKind::ModelExchange);
    if (!resp.model) throw ProtocolError("model response missing model");
    st.model = *resp.model;
    st.have_model = true;
    st.result.model = st.model;
  } catch (const ProtocolError& e) {
    st.result.iterations_used = 1;
    st.fail_iteration(1, e.what());
    return st.result;
  }

  constexpr int kMaxCorrections = 3;
  for (int it = 1; it <= opts.cap; ++it) {
    st.result.iterations_used = it;

    const bool first_plan = !st.have_plan;
    ProposerResponse resp;
    try {
      resp = st.exchange(*agents.planner,
                         st.make_request(first_plan ? "plan" : "revise", "agent2"), it,
                         first_plan ? ExchangeKind::PlanExchange : ExchangeKind::ReviseExchange);
    } catch (const ProtocolError& e) {
      st.fail_iteration(it, e.what());
      continue;
    }

    if (!resp.plan) {
      st.fail_iteration(it, "plan response missing plan");
      continue;
    }

    std::optional<SolveResult> solved;
    bool iteration_dead = false;
    for (int attempt = 0; attempt <= kMaxCorrections; ++attempt) {
      try {
        SolverPlan plan;
        try {
          plan = parse_solver_plan(*resp.plan, st.base_config());
        } catch (const ProtocolError& e) {
          st.record(it, ExchangeKind::Execution, "agent3", resp.plan->dump(),
                    nlohmann::json({{"error", e.what()}}).dump());
          throw;
        }
        st.have_plan = true;
        solved = st.execute(plan, it, "agent3");
        break;
      } catch (const std::exception& e) {
        if (attempt == kMaxCorrections) {
          st.fail_iteration(it, std::string("execution error: ") + e.what());
          iteration_dead = true;
          break;
        }
        Feedback fb;
        fb.iteration = it;
        fb.hint = std::string("execution error: ") + e.what();
        ProposerRequest retry = st.make_request("revise", "agent2");
        retry.feedback = fb;
        try {
          resp = st.exchange(*agents.planner, retry, it,
                             ExchangeKind::ExecutionErrorExchange);
          if (!resp.plan) throw ProtocolError("plan response missing plan");
        } catch (const ProtocolError& pe) {
          st.fail_iteration(it, pe.what());
          iteration_dead = true;
          break;
        }
      }
    }
    if (iteration_dead || !solved) continue;

    if (st.validate_deployment(*solved, it, "agent4")) {
      st.result.success = true;
      return st.result;
    }
  }
  return st.result;
}

}  // namespace bss
