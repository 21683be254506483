#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bss/coverage.hpp"
#include "bss/model.hpp"
#include "bss/solver.hpp"

namespace bss {

/// A malformed or incomplete proposer message. The harness converts these
/// into failed iterations (or execution-error retries) instead of crashing.
class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic instance digest handed to proposers.
struct ProblemSummary {
  std::string task;
  int width = 0;
  int height = 0;
  int weak_cells = 0;
  double total_weak_traffic = 0.0;
  int existing_stations = 0;
  int candidates = 0;
  RadioParams params;
};

inline ProblemSummary summarize_problem(const ProblemInstance& inst) {
  ProblemSummary s;
  s.width = inst.width;
  s.height = inst.height;
  s.weak_cells = inst.weak_cell_count();
  s.total_weak_traffic = inst.total_weak_traffic();
  s.existing_stations = static_cast<int>(inst.existing_stations.size());
  s.candidates = static_cast<int>(candidate_sites(inst).size());
  s.params = inst.params;
  s.task = "Place new base stations on a " + std::to_string(inst.width) + "x" +
           std::to_string(inst.height) +
           " grid so the covered share of weak-area traffic reaches " +
           std::to_string(inst.params.coverage_threshold) +
           " at minimum setup cost, keeping every pair of stations at least " +
           std::to_string(inst.params.min_distance) + " grid units apart.";
  return s;
}

/// The modeling artifact: which constraints are active, the objective
/// flavor, and an optional tightened/loosened coverage threshold.
struct ModelSpec {
  ObjectiveMode objective_mode = ObjectiveMode::CostFirst;
  std::vector<std::string> constraints = {"C1", "C2", "C3", "C4", "C5"};
  std::optional<double> theta_override;
  std::string notes;
};

inline bool has_constraint(const ModelSpec& m, const std::string& tag) {
  for (const std::string& c : m.constraints)
    if (c == tag) return true;
  return false;
}

/// Maps the model onto evaluator switches. C2 (binary placement) is
/// structural in the deployment encoding, so it has no toggle here.
inline ConstraintOptions constraint_options(const ModelSpec& m) {
  ConstraintOptions opts;
  opts.check_coverage = has_constraint(m, "C1");
  opts.check_duplicates = has_constraint(m, "C3");
  opts.check_new_new_spacing = has_constraint(m, "C4");
  opts.check_new_existing_spacing = has_constraint(m, "C5");
  opts.threshold_override = m.theta_override;
  return opts;
}

/// The planning artifact: an algorithm, its configuration, and the
/// candidate filter to search over.
struct SolverPlan {
  Algorithm algorithm = Algorithm::Greedy;
  SolverConfig config;
};

struct Feedback {
  std::vector<ConstraintViolation> violations;
  double coverage_ratio = 0.0;
  double cost = 0.0;
  int iteration = 0;
  std::string hint;
};

struct ProposerRequest {
  std::string phase;  // "model" | "plan" | "revise" | "test"
  std::string role;   // "solo" | "agent1".."agent4"
  ProblemSummary summary;
  std::optional<ModelSpec> model;
  std::optional<Feedback> feedback;
  std::vector<std::string> retrieved;
};

/// Raw proposer reply. The plan is kept as untyped JSON: whether it parses
/// into a runnable SolverPlan is decided by the executor, so bad plans can
/// be routed back as execution errors instead of transport failures.
struct ProposerResponse {
  std::optional<ModelSpec> model;
  std::optional<nlohmann::json> plan;
  std::optional<std::string> error;
};

// ---- JSON encoding ----

inline nlohmann::json to_json(const RadioParams& p) {
  return {{"d_h", p.macro_radius},   {"d_d", p.micro_radius},
          {"C_h", p.macro_cost},     {"C_d", p.micro_cost},
          {"D_min", p.min_distance}, {"theta_cp", p.coverage_threshold}};
}

inline nlohmann::json to_json(const ProblemSummary& s) {
  return {{"task", s.task},
          {"width", s.width},
          {"height", s.height},
          {"weak_cells", s.weak_cells},
          {"total_weak_traffic", s.total_weak_traffic},
          {"existing_stations", s.existing_stations},
          {"candidates", s.candidates},
          {"params", to_json(s.params)}};
}

inline nlohmann::json to_json(const ModelSpec& m) {
  nlohmann::json j = {{"objective_mode", to_string(m.objective_mode)},
                      {"constraints", m.constraints},
                      {"notes", m.notes}};
  if (m.theta_override) j["theta_override"] = *m.theta_override;
  return j;
}

inline nlohmann::json to_json(const ConstraintViolation& v) {
  nlohmann::json subjects = nlohmann::json::array();
  for (const GridPoint& p : v.subjects) subjects.push_back({p.x, p.y});
  return {{"kind", to_string(v.kind)},
          {"detail", v.detail},
          {"measure", v.measure},
          {"subjects", subjects}};
}

inline nlohmann::json to_json(const Feedback& f) {
  nlohmann::json violations = nlohmann::json::array();
  for (const ConstraintViolation& v : f.violations) violations.push_back(to_json(v));
  return {{"violations", violations},
          {"coverage_ratio", f.coverage_ratio},
          {"cost", f.cost},
          {"iteration", f.iteration},
          {"hint", f.hint}};
}

inline std::string candidate_filter_string(const CandidateSpec& spec) {
  switch (spec.filter) {
    case CandidateFilter::WeakCellsOnly: return "weak_cells";
    case CandidateFilter::AllCells: return "all_cells";
    case CandidateFilter::ExplicitList: {
      std::string out = "explicit:";
      for (std::size_t i = 0; i < spec.sites.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(spec.sites[i].x) + "," + std::to_string(spec.sites[i].y);
      }
      return out;
    }
  }
  return "weak_cells";
}

inline nlohmann::json to_json(const SolverConfig& c) {
  nlohmann::json j = {
      {"seed", c.seed},
      {"max_evaluations", c.max_evaluations},
      {"objective_mode", to_string(c.objective_mode)},
      {"penalty_weight", c.penalty_weight},
      {"sa",
       {{"t0", c.sa.t0}, {"alpha", c.sa.alpha}, {"moves_per_temp", c.sa.moves_per_temp}}},
      {"pso",
       {{"swarm_size", c.pso.swarm_size},
        {"inertia", c.pso.inertia},
        {"c1", c.pso.c1},
        {"c2", c.pso.c2},
        {"v_max", c.pso.v_max}}}};
  if (c.coverage_target) j["coverage_target"] = *c.coverage_target;
  return j;
}

inline nlohmann::json to_json(const SolverPlan& plan) {
  return {{"algorithm", to_string(plan.algorithm)},
          {"config", to_json(plan.config)},
          {"candidate_filter", candidate_filter_string(plan.config.candidates)}};
}

inline nlohmann::json encode_request(const ProposerRequest& req) {
  nlohmann::json j = {{"phase", req.phase}, {"role", req.role},
                      {"summary", to_json(req.summary)}};
  if (req.model) j["model"] = to_json(*req.model);
  if (req.feedback) j["feedback"] = to_json(*req.feedback);
  if (!req.retrieved.empty()) j["retrieved"] = req.retrieved;
  return j;
}

inline nlohmann::json encode_response(const ProposerResponse& resp) {
  nlohmann::json j = nlohmann::json::object();
  if (resp.error) j["error"] = *resp.error;
  if (resp.model) j["model"] = to_json(*resp.model);
  if (resp.plan) j["plan"] = *resp.plan;
  return j;
}

// ---- JSON decoding (lenient: unknown fields ignored, missing required
// fields or malformed values raise ProtocolError) ----

namespace wire_detail {

inline double number_field(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ProtocolError(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

inline int int_field(const nlohmann::json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    throw ProtocolError(std::string(key) + " must be an integer");
  return j.at(key).get<int>();
}

}  // namespace wire_detail

inline ObjectiveMode parse_objective_mode(const std::string& text) {
  if (text == "cost_first") return ObjectiveMode::CostFirst;
  if (text == "coverage_first") return ObjectiveMode::CoverageFirst;
  throw ProtocolError("unknown objective_mode '" + text + "'");
}

inline Algorithm parse_algorithm(const std::string& text) {
  if (text == "greedy") return Algorithm::Greedy;
  if (text == "sa") return Algorithm::SA;
  if (text == "pso") return Algorithm::PSO;
  throw ProtocolError("unknown algorithm '" + text + "'");
}

inline CandidateSpec parse_candidate_filter(const std::string& text) {
  CandidateSpec spec;
  if (text == "weak_cells") {
    spec.filter = CandidateFilter::WeakCellsOnly;
    return spec;
  }
  if (text == "all_cells") {
    spec.filter = CandidateFilter::AllCells;
    return spec;
  }
  if (text.rfind("explicit:", 0) == 0) {
    spec.filter = CandidateFilter::ExplicitList;
    std::string rest = text.substr(9);
    while (!rest.empty()) {
      const std::size_t semi = rest.find(';');
      const std::string pair = rest.substr(0, semi);
      const std::size_t comma = pair.find(',');
      if (comma == std::string::npos)
        throw ProtocolError("candidate_filter pair '" + pair + "' is not x,y");
      try {
        spec.sites.push_back(
            {std::stoi(pair.substr(0, comma)), std::stoi(pair.substr(comma + 1))});
      } catch (const std::exception&) {
        throw ProtocolError("candidate_filter pair '" + pair + "' is not x,y");
      }
      if (semi == std::string::npos) break;
      rest.erase(0, semi + 1);
    }
    return spec;
  }
  throw ProtocolError("unknown candidate_filter '" + text + "'");
}

inline ModelSpec parse_model_spec(const nlohmann::json& j) {
  if (!j.is_object()) throw ProtocolError("model must be an object");
  ModelSpec m;
  if (j.contains("objective_mode")) {
    if (!j.at("objective_mode").is_string())
      throw ProtocolError("objective_mode must be a string");
    m.objective_mode = parse_objective_mode(j.at("objective_mode").get<std::string>());
  }
  if (j.contains("constraints")) {
    if (!j.at("constraints").is_array())
      throw ProtocolError("constraints must be an array");
    m.constraints.clear();
    for (const auto& c : j.at("constraints")) {
      if (!c.is_string()) throw ProtocolError("constraint tags must be strings");
      const std::string tag = c.get<std::string>();
      if (tag != "C1" && tag != "C2" && tag != "C3" && tag != "C4" && tag != "C5")
        throw ProtocolError("unknown constraint tag '" + tag + "'");
      m.constraints.push_back(tag);
    }
  }
  if (j.contains("theta_override")) {
    if (!j.at("theta_override").is_number())
      throw ProtocolError("theta_override must be a number");
    const double theta = j.at("theta_override").get<double>();
    if (!(theta > 0.0 && theta <= 1.0))
      throw ProtocolError("theta_override must be in (0,1]");
    m.theta_override = theta;
  }
  if (j.contains("notes")) {
    if (!j.at("notes").is_string()) throw ProtocolError("notes must be a string");
    m.notes = j.at("notes").get<std::string>();
  }
  return m;
}

/// Overlays the plan JSON onto `base` (typically defaults pre-seeded from
/// the accepted ModelSpec). Unknown keys are ignored; present keys must be
/// well-formed and produce a valid SolverConfig.
inline SolverPlan parse_solver_plan(const nlohmann::json& j, const SolverConfig& base) {
  if (!j.is_object()) throw ProtocolError("plan must be an object");
  if (!j.contains("algorithm") || !j.at("algorithm").is_string())
    throw ProtocolError("plan missing algorithm");
  SolverPlan plan;
  plan.config = base;
  plan.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  plan.config.algorithm = plan.algorithm;

  if (j.contains("config")) {
    const nlohmann::json& c = j.at("config");
    if (!c.is_object()) throw ProtocolError("config must be an object");
    if (c.contains("seed")) {
      if (!c.at("seed").is_number_integer())
        throw ProtocolError("seed must be an integer");
      plan.config.seed = c.at("seed").get<std::uint64_t>();
    }
    plan.config.max_evaluations =
        wire_detail::int_field(c, "max_evaluations", plan.config.max_evaluations);
    if (c.contains("objective_mode")) {
      if (!c.at("objective_mode").is_string())
        throw ProtocolError("objective_mode must be a string");
      plan.config.objective_mode =
          parse_objective_mode(c.at("objective_mode").get<std::string>());
    }
    plan.config.penalty_weight =
        wire_detail::number_field(c, "penalty_weight", plan.config.penalty_weight);
    if (c.contains("coverage_target"))
      plan.config.coverage_target =
          wire_detail::number_field(c, "coverage_target", 0.0);
    if (c.contains("sa")) {
      const nlohmann::json& sa = c.at("sa");
      if (!sa.is_object()) throw ProtocolError("sa must be an object");
      plan.config.sa.t0 = wire_detail::number_field(sa, "t0", plan.config.sa.t0);
      plan.config.sa.alpha = wire_detail::number_field(sa, "alpha", plan.config.sa.alpha);
      plan.config.sa.moves_per_temp =
          wire_detail::int_field(sa, "moves_per_temp", plan.config.sa.moves_per_temp);
    }
    if (c.contains("pso")) {
      const nlohmann::json& pso = c.at("pso");
      if (!pso.is_object()) throw ProtocolError("pso must be an object");
      plan.config.pso.swarm_size =
          wire_detail::int_field(pso, "swarm_size", plan.config.pso.swarm_size);
      plan.config.pso.inertia =
          wire_detail::number_field(pso, "inertia", plan.config.pso.inertia);
      plan.config.pso.c1 = wire_detail::number_field(pso, "c1", plan.config.pso.c1);
      plan.config.pso.c2 = wire_detail::number_field(pso, "c2", plan.config.pso.c2);
      plan.config.pso.v_max =
          wire_detail::number_field(pso, "v_max", plan.config.pso.v_max);
    }
  }

  if (j.contains("candidate_filter")) {
    if (!j.at("candidate_filter").is_string())
      throw ProtocolError("candidate_filter must be a string");
    plan.config.candidates =
        parse_candidate_filter(j.at("candidate_filter").get<std::string>());
  }

  try {
    validate(plan.config);
  } catch (const std::invalid_argument& e) {
    throw ProtocolError(std::string("invalid solver config: ") + e.what());
  }
  return plan;
}

/// Parses one response line from an external proposer.
inline ProposerResponse parse_response(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("response must be a JSON object");
  ProposerResponse resp;
  if (j.contains("error")) {
    if (!j.at("error").is_string()) throw ProtocolError("error must be a string");
    resp.error = j.at("error").get<std::string>();
  }
  if (j.contains("model")) resp.model = parse_model_spec(j.at("model"));
  if (j.contains("plan")) resp.plan = j.at("plan");
  return resp;
}

}  // namespace bss
