#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "bss/agent.hpp"
#include "bss/wire.hpp"

namespace bss {

/// Deterministic stand-ins for an LLM, covering the interesting loop
/// trajectories: immediate success, a target nobody can reach, budgets
/// that grow with feedback, knowledge-gated competence, and a proposer
/// that only ever errors. All behaviors are stateless across calls —
/// anything iteration-dependent is derived from the request feedback.
class ScriptedProposer : public Proposer {
 public:
  enum class Behavior {
    FeasibleGreedy,
    Unreachable,
    BudgetDoubling,
    RagGated,
    ErrorAlways,
  };

  explicit ScriptedProposer(Behavior behavior) : behavior_(behavior) {}

  static ScriptedProposer budget_doubling(int initial_budget) {
    ScriptedProposer p(Behavior::BudgetDoubling);
    p.initial_budget_ = initial_budget;
    return p;
  }

  static ScriptedProposer rag_gated(std::string marker) {
    ScriptedProposer p(Behavior::RagGated);
    p.marker_ = std::move(marker);
    return p;
  }

  ProposerResponse propose(const ProposerRequest& req) override {
    if (behavior_ == Behavior::ErrorAlways) return error("scripted failure");
    if (req.phase == "model") return model_response(req);
    if (req.phase == "plan" || req.phase == "revise") return plan_response(req);
    return error("unsupported phase '" + req.phase + "'");
  }

 private:
  static ProposerResponse error(const std::string& what) {
    ProposerResponse resp;
    resp.error = what;
    return resp;
  }

  ProposerResponse model_response(const ProposerRequest&) const {
    ProposerResponse resp;
    ModelSpec model;
    if (behavior_ == Behavior::Unreachable) {
      model.theta_override = 1.0;
      model.notes = "demand full coverage";
    }
    resp.model = model;
    return resp;
  }

  ProposerResponse plan_response(const ProposerRequest& req) const {
    SolverPlan plan;
    plan.config.seed = 1;
    switch (behavior_) {
      case Behavior::FeasibleGreedy:
        plan.algorithm = Algorithm::Greedy;
        break;
      case Behavior::Unreachable:
        // A single fixed candidate cannot reach full coverage on any
        // fixture with weak traffic outside one macro disk at (0,0).
        plan.algorithm = Algorithm::Greedy;
        plan.config.candidates.filter = CandidateFilter::ExplicitList;
        plan.config.candidates.sites = {{0, 0}};
        break;
      case Behavior::BudgetDoubling: {
        plan.algorithm = Algorithm::SA;
        const int completed = req.feedback ? req.feedback->iteration : 0;
        long budget = initial_budget_;
        for (int i = 0; i < completed && budget < (1L << 30); ++i) budget *= 2;
        plan.config.max_evaluations = static_cast<int>(budget);
        break;
      }
      case Behavior::RagGated: {
        bool informed = false;
        for (const std::string& text : req.retrieved)
          if (text.find(marker_) != std::string::npos) informed = true;
        plan.algorithm = Algorithm::Greedy;
        if (!informed) {
          // Without the playbook the planner searches nothing useful.
          plan.config.candidates.filter = CandidateFilter::ExplicitList;
          plan.config.candidates.sites = {};
        }
        break;
      }
      case Behavior::ErrorAlways:
        return error("scripted failure");
    }
    plan.config.algorithm = plan.algorithm;
    ProposerResponse resp;
    resp.plan = to_json(plan);
    return resp;
  }

  Behavior behavior_;
  int initial_budget_ = 100;
  std::string marker_;
};

}  // namespace bss
