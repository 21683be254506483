#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "bss/coverage.hpp"
#include "bss/model.hpp"
#include "bss/rng.hpp"

namespace bss {

enum class Algorithm { Greedy, SA, PSO };

/// CostFirst minimizes cost with an infeasibility penalty; CoverageFirst
/// maximizes covered traffic with a small cost tie-breaker.
enum class ObjectiveMode { CostFirst, CoverageFirst };

struct SaParams {
  double t0 = 0.0;  // initial temperature; 0 means 10x macro cost
  double alpha = 0.95;
  int moves_per_temp = 50;
};

struct PsoParams {
  int swarm_size = 40;
  double inertia = 0.72;
  double c1 = 1.49;
  double c2 = 1.49;
  double v_max = 4.0;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::Greedy;
  std::uint64_t seed = 1;
  int max_evaluations = 20000;
  ObjectiveMode objective_mode = ObjectiveMode::CostFirst;
  double penalty_weight = 100.0;
  SaParams sa;
  PsoParams pso;
  CandidateSpec candidates;
  std::optional<double> coverage_target;  // overrides the instance threshold
};

inline void validate(const SolverConfig& c) {
  if (c.max_evaluations <= 0)
    throw std::invalid_argument("solver config: max_evaluations must be positive");
  if (!(c.penalty_weight > 0))
    throw std::invalid_argument("solver config: penalty_weight must be positive");
  if (c.sa.t0 < 0)
    throw std::invalid_argument("solver config: sa.t0 must be >= 0 (0 = auto)");
  if (!(c.sa.alpha > 0 && c.sa.alpha < 1))
    throw std::invalid_argument("solver config: sa.alpha must be inside (0,1)");
  if (c.sa.moves_per_temp <= 0)
    throw std::invalid_argument("solver config: sa.moves_per_temp must be positive");
  if (c.pso.swarm_size <= 0)
    throw std::invalid_argument("solver config: pso.swarm_size must be positive");
  if (!(c.pso.v_max > 0))
    throw std::invalid_argument("solver config: pso.v_max must be positive");
  if (c.coverage_target &&
      !(*c.coverage_target > 0.0 && *c.coverage_target <= 1.0))
    throw std::invalid_argument("solver config: coverage_target must be in (0,1]");
}

struct TracePoint {
  int iteration = 0;
  double best_energy = 0.0;
  double coverage = 0.0;
  double cost = 0.0;
};

struct SolveResult {
  Deployment deployment;
  EvaluationReport report;
  int evaluations_used = 0;
  double wall_ms = 0.0;
  std::vector<TracePoint> trace;
};

inline double effective_target(const ProblemInstance& inst, const SolverConfig& cfg) {
  return cfg.coverage_target.value_or(inst.params.coverage_threshold);
}

/// Penalized energy shared by SA and cost-first PSO: setup cost, plus
/// penalty_weight times the coverage shortfall scaled by total weak
/// traffic, plus penalty_weight times each structural violation measure.
/// Solvers keep their states free of structural violations, so inside the
/// search only the first two terms are ever non-zero.
inline double deployment_energy(const ProblemInstance& inst, const Deployment& d,
                                const SolverConfig& cfg) {
  ConstraintOptions opts;
  opts.threshold_override = effective_target(inst, cfg);
  EvaluationReport report = check_constraints(inst, d, opts);
  double energy = report.cost;
  for (const ConstraintViolation& v : report.violations) {
    if (v.kind == ViolationKind::CoverageShortfall)
      energy += cfg.penalty_weight * v.measure * report.total_weak_traffic;
    else
      energy += cfg.penalty_weight * v.measure;
  }
  return energy;
}

/// True when `p` keeps the minimum spacing from every station in `d`
/// (except the one at skip_index) and from every existing station.
/// Coinciding coordinates fail by the same rule (distance 0).
inline bool placement_ok(const ProblemInstance& inst, GridPoint p, const Deployment& d,
                         int skip_index = -1) {
  const double min_d_sq = inst.params.min_distance * inst.params.min_distance;
  for (std::size_t i = 0; i < d.stations.size(); ++i) {
    if (static_cast<int>(i) == skip_index) continue;
    if (squared_distance(p, d.stations[i].point()) < min_d_sq) return false;
  }
  for (const GridPoint& e : inst.existing_stations)
    if (squared_distance(p, e) < min_d_sq) return false;
  return true;
}

/// Spatial index over the weak cells and the candidate sites. Disk queries
/// go through fixed-size tile buckets; covered-traffic totals are always
/// recomputed by a full pass in canonical cell order, so every ratio a
/// solver sees is bit-identical to what check_constraints reports.
class CoverageIndex {
 public:
  CoverageIndex(const ProblemInstance& inst, std::vector<GridPoint> candidates)
      : inst_(&inst), cand_(std::move(candidates)) {
    for (const GridCell& c : inst.cells) {
      if (!c.weak) continue;
      weak_pos_.push_back(c.point());
      weak_traffic_.push_back(c.traffic);
    }
    tiles_x_ = inst.width / kTile + 1;
    tiles_y_ = inst.height / kTile + 1;
    weak_tiles_.resize(static_cast<std::size_t>(tiles_x_) * tiles_y_);
    for (std::size_t i = 0; i < weak_pos_.size(); ++i)
      weak_tiles_[tile_of(weak_pos_[i])].push_back(static_cast<int>(i));
    cand_tiles_.resize(weak_tiles_.size());
    for (std::size_t i = 0; i < cand_.size(); ++i)
      cand_tiles_[tile_of(cand_[i])].push_back(static_cast<int>(i));
  }

  const ProblemInstance& instance() const { return *inst_; }
  const std::vector<GridPoint>& candidates() const { return cand_; }
  int candidate_count() const { return static_cast<int>(cand_.size()); }
  int weak_count() const { return static_cast<int>(weak_pos_.size()); }

  double total_weak_traffic() const {
    double total = 0.0;
    for (double t : weak_traffic_) total += t;
    return total;
  }

  /// Calls op(ordinal) for every weak cell within `radius` of `site`.
  template <class F>
  void for_disk(GridPoint site, double radius, F&& op) const {
    const double r_sq = radius * radius;
    const int r_ceil = static_cast<int>(radius) + 1;
    const int tx0 = std::max(0, (site.x - r_ceil) / kTile);
    const int tx1 = std::min(tiles_x_ - 1, (site.x + r_ceil) / kTile);
    const int ty0 = std::max(0, (site.y - r_ceil) / kTile);
    const int ty1 = std::min(tiles_y_ - 1, (site.y + r_ceil) / kTile);
    for (int ty = ty0; ty <= ty1; ++ty) {
      for (int tx = tx0; tx <= tx1; ++tx) {
        for (int o : weak_tiles_[static_cast<std::size_t>(ty) * tiles_x_ + tx])
          if (squared_distance(weak_pos_[o], site) <= r_sq) op(o);
      }
    }
  }

  /// Weak traffic newly covered by a station at `site` given the current
  /// per-cell hit counts.
  double added_traffic(GridPoint site, double radius, const std::vector<int>& hits) const {
    double gain = 0.0;
    for_disk(site, radius, [&](int o) {
      if (hits[o] == 0) gain += weak_traffic_[o];
    });
    return gain;
  }

  /// Total weak traffic inside the station disk, ignoring hit counts.
  double disk_strength(GridPoint site, double radius) const {
    double total = 0.0;
    for_disk(site, radius, [&](int o) { total += weak_traffic_[o]; });
    return total;
  }

  void stamp(GridPoint site, double radius, std::vector<int>& hits, int delta) const {
    for_disk(site, radius, [&](int o) { hits[o] += delta; });
  }

  /// Exact covered-traffic total: full pass in canonical cell order.
  double covered_traffic(const std::vector<int>& hits) const {
    double covered = 0.0;
    for (std::size_t o = 0; o < weak_traffic_.size(); ++o)
      if (hits[o] > 0) covered += weak_traffic_[o];
    return covered;
  }

  std::vector<int> candidates_within(GridPoint p, double radius) const {
    std::vector<int> out;
    const double r_sq = radius * radius;
    const int r_ceil = static_cast<int>(radius) + 1;
    const int tx0 = std::max(0, (p.x - r_ceil) / kTile);
    const int tx1 = std::min(tiles_x_ - 1, (p.x + r_ceil) / kTile);
    const int ty0 = std::max(0, (p.y - r_ceil) / kTile);
    const int ty1 = std::min(tiles_y_ - 1, (p.y + r_ceil) / kTile);
    for (int ty = ty0; ty <= ty1; ++ty)
      for (int tx = tx0; tx <= tx1; ++tx)
        for (int i : cand_tiles_[static_cast<std::size_t>(ty) * tiles_x_ + tx])
          if (squared_distance(cand_[i], p) <= r_sq) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr int kTile = 16;

  std::size_t tile_of(GridPoint p) const {
    return static_cast<std::size_t>(p.y / kTile) * tiles_x_ + p.x / kTile;
  }

  const ProblemInstance* inst_;
  std::vector<GridPoint> cand_;
  std::vector<GridPoint> weak_pos_;
  std::vector<double> weak_traffic_;
  std::vector<std::vector<int>> weak_tiles_;
  std::vector<std::vector<int>> cand_tiles_;
  int tiles_x_ = 0;
  int tiles_y_ = 0;
};

namespace detail {

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void sort_row_major(Deployment& d) {
  std::sort(d.stations.begin(), d.stations.end(),
            [](const PlacedStation& a, const PlacedStation& b) {
              if (a.y != b.y) return a.y < b.y;
              if (a.x != b.x) return a.x < b.x;
              return a.kind == StationKind::Macro && b.kind == StationKind::Micro;
            });
}

inline SolveResult finish(const ProblemInstance& inst, const SolverConfig& cfg,
                          Deployment deployment, int evals,
                          std::vector<TracePoint> trace, const StopWatch& watch) {
  sort_row_major(deployment);
  ConstraintOptions opts;
  opts.threshold_override = effective_target(inst, cfg);
  SolveResult result;
  result.report = check_constraints(inst, deployment, opts);
  result.deployment = std::move(deployment);
  result.evaluations_used = evals;
  result.trace = std::move(trace);
  result.wall_ms = watch.elapsed_ms();
  return result;
}

}  // namespace detail

/// Coverage-per-cost greedy. Repeatedly places the admissible (site, kind)
/// pair with the best newly-covered-traffic to cost ratio until the
/// coverage target is met or no pair helps. Ties go to the cheaper kind,
/// then to the earlier candidate. Runs lazy re-evaluation: cached gains
/// only shrink as stations are added, so a heap entry that is re-computed
/// at the current deployment size and still wins is the true maximum.
inline SolveResult solve_greedy(const ProblemInstance& inst, const SolverConfig& cfg) {
  validate(cfg);
  detail::StopWatch watch;
  const double target = effective_target(inst, cfg);
  const auto sites = candidate_sites(inst, cfg.candidates);
  CoverageIndex index(inst, sites);
  const double total_weak = index.total_weak_traffic();

  Deployment chosen;
  std::vector<int> hits(index.weak_count(), 0);
  double covered = 0.0;
  double cost = 0.0;
  int evals = 0;
  std::vector<TracePoint> trace;

  auto ratio = [&]() { return total_weak > 0.0 ? covered / total_weak : 1.0; };
  auto energy = [&]() {
    return cost + cfg.penalty_weight * std::max(0.0, target - ratio()) * total_weak;
  };
  trace.push_back({0, energy(), ratio(), cost});

  struct Entry {
    double rate;
    double cost;
    int cand;
    StationKind kind;
    int stamp;  // deployment size at rate computation
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.rate != b.rate) return a.rate < b.rate;           // max rate first
    if (a.cost != b.cost) return a.cost > b.cost;           // then min cost
    if (a.cand != b.cand) return a.cand > b.cand;           // then earlier site
    return a.kind == StationKind::Macro && b.kind == StationKind::Micro;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

  for (int i = 0; i < index.candidate_count(); ++i) {
    const GridPoint p = index.candidates()[i];
    if (!placement_ok(inst, p, chosen)) continue;
    for (StationKind kind : {StationKind::Micro, StationKind::Macro}) {
      const double gain = index.added_traffic(p, inst.params.radius(kind), hits);
      if (gain > 0.0)
        heap.push({gain / inst.params.cost(kind), inst.params.cost(kind), i, kind, 0});
    }
  }

  int iteration = 0;
  while (ratio() < target && evals < cfg.max_evaluations && !heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    const GridPoint p = index.candidates()[top.cand];
    if (!placement_ok(inst, p, chosen)) continue;  // permanently blocked
    if (top.stamp != static_cast<int>(chosen.stations.size())) {
      const double gain = index.added_traffic(p, inst.params.radius(top.kind), hits);
      if (gain <= 0.0) continue;  // gains never grow back
      heap.push({gain / top.cost, top.cost, top.cand, top.kind,
                 static_cast<int>(chosen.stations.size())});
      continue;
    }
    chosen.stations.push_back({p.x, p.y, top.kind});
    index.stamp(p, inst.params.radius(top.kind), hits, +1);
    covered = index.covered_traffic(hits);
    cost += top.cost;
    ++evals;
    ++iteration;
    trace.push_back({iteration, energy(), ratio(), cost});
  }

  return detail::finish(inst, cfg, std::move(chosen), evals, std::move(trace), watch);
}

/// Simulated annealing over station sets, starting from the empty
/// deployment. Moves: add a random admissible candidate, remove a random
/// station, relocate a station to a nearby candidate, toggle a station's
/// kind. Moves that would break spacing or duplicate a site are rejected
/// outright, so only the coverage term of the energy is ever penalized.
inline SolveResult solve_sa(const ProblemInstance& inst, const SolverConfig& cfg) {
  validate(cfg);
  detail::StopWatch watch;
  const double target = effective_target(inst, cfg);
  const auto sites = candidate_sites(inst, cfg.candidates);
  CoverageIndex index(inst, sites);
  const double total_weak = index.total_weak_traffic();
  const double t0 = cfg.sa.t0 > 0 ? cfg.sa.t0 : 10.0 * inst.params.macro_cost;
  Rng rng(derive_seed(cfg.seed, 0x5a));

  Deployment state;
  std::vector<int> hits(index.weak_count(), 0);
  double covered = 0.0;
  double cost = 0.0;
  auto energy_of = [&](double covered_now, double cost_now) {
    const double r = total_weak > 0.0 ? covered_now / total_weak : 1.0;
    return cost_now + cfg.penalty_weight * std::max(0.0, target - r) * total_weak;
  };
  double energy = energy_of(covered, cost);

  Deployment best = state;
  double best_energy = energy;
  double best_covered = covered;
  double best_cost = cost;

  int evals = 0;
  std::vector<TracePoint> trace;
  auto record = [&](int iteration) {
    const double r = total_weak > 0.0 ? best_covered / total_weak : 1.0;
    trace.push_back({iteration, best_energy, r, best_cost});
  };
  record(0);

  const bool only_noops = index.candidate_count() == 0;
  int temp_step = 0;
  for (double temp = t0; evals < cfg.max_evaluations && temp > t0 * 1e-6 && !only_noops;
       temp *= cfg.sa.alpha) {
    for (int m = 0; m < cfg.sa.moves_per_temp && evals < cfg.max_evaluations; ++m) {
      ++evals;
      const int kind_of_move = rng.below_int(4);
      // Stage the move as stamp deltas; revert on rejection.
      struct Delta {
        GridPoint site;
        double radius;
        int sign;
      };
      Delta deltas[2];
      int n_deltas = 0;
      double new_cost = cost;
      int remove_at = -1;
      PlacedStation added{};
      bool have_added = false;

      if (kind_of_move == 0) {  // add
        if (index.candidate_count() == 0) continue;
        const GridPoint p = index.candidates()[index.candidate_count() == 1
                                                   ? 0
                                                   : rng.below_int(index.candidate_count())];
        if (!placement_ok(inst, p, state)) continue;
        const StationKind k = rng.chance(0.5) ? StationKind::Macro : StationKind::Micro;
        added = {p.x, p.y, k};
        have_added = true;
        deltas[n_deltas++] = {p, inst.params.radius(k), +1};
        new_cost += inst.params.cost(k);
      } else if (kind_of_move == 1) {  // remove
        if (state.stations.empty()) continue;
        remove_at = rng.below_int(static_cast<int>(state.stations.size()));
        const PlacedStation& s = state.stations[remove_at];
        deltas[n_deltas++] = {s.point(), inst.params.radius(s.kind), -1};
        new_cost -= inst.params.cost(s.kind);
      } else if (kind_of_move == 2) {  // relocate to a nearby candidate
        if (state.stations.empty()) continue;
        remove_at = rng.below_int(static_cast<int>(state.stations.size()));
        const PlacedStation s = state.stations[remove_at];
        auto nearby = index.candidates_within(s.point(), 2.0 * inst.params.min_distance);
        std::vector<GridPoint> options;
        for (int i : nearby) {
          const GridPoint p = index.candidates()[i];
          if (p == s.point()) continue;
          if (placement_ok(inst, p, state, remove_at)) options.push_back(p);
        }
        if (options.empty()) continue;
        const GridPoint p = options[options.size() == 1
                                        ? 0
                                        : rng.below_int(static_cast<int>(options.size()))];
        added = {p.x, p.y, s.kind};
        have_added = true;
        deltas[n_deltas++] = {s.point(), inst.params.radius(s.kind), -1};
        deltas[n_deltas++] = {p, inst.params.radius(s.kind), +1};
      } else {  // toggle kind
        if (state.stations.empty()) continue;
        remove_at = rng.below_int(static_cast<int>(state.stations.size()));
        const PlacedStation s = state.stations[remove_at];
        const StationKind flipped =
            s.kind == StationKind::Macro ? StationKind::Micro : StationKind::Macro;
        added = {s.x, s.y, flipped};
        have_added = true;
        deltas[n_deltas++] = {s.point(), inst.params.radius(s.kind), -1};
        deltas[n_deltas++] = {s.point(), inst.params.radius(flipped), +1};
        new_cost += inst.params.cost(flipped) - inst.params.cost(s.kind);
      }

      for (int i = 0; i < n_deltas; ++i)
        index.stamp(deltas[i].site, deltas[i].radius, hits, deltas[i].sign);
      const double new_covered = index.covered_traffic(hits);
      const double new_energy = energy_of(new_covered, new_cost);
      const double d_e = new_energy - energy;
      const bool accept = d_e <= 0.0 || rng.next_double() < std::exp(-d_e / temp);
      if (!accept) {
        for (int i = 0; i < n_deltas; ++i)
          index.stamp(deltas[i].site, deltas[i].radius, hits, -deltas[i].sign);
        continue;
      }

      if (remove_at >= 0) {
        state.stations[remove_at] = state.stations.back();
        state.stations.pop_back();
      }
      if (have_added) state.stations.push_back(added);
      covered = new_covered;
      cost = new_cost;
      energy = new_energy;
      if (energy < best_energy) {
        best = state;
        best_energy = energy;
        best_covered = covered;
        best_cost = cost;
      }
    }
    ++temp_step;
    record(temp_step);
  }

  return detail::finish(inst, cfg, std::move(best), evals, std::move(trace), watch);
}

/// Binary PSO. Each candidate site owns two bits (macro, micro); repair
/// resolves both-bits to macro and fixes spacing by keeping the station
/// whose disk holds more weak traffic, dropping the weaker one. Repairs
/// write back into the particle (Lamarckian), so positions stay feasible.
inline SolveResult solve_pso(const ProblemInstance& inst, const SolverConfig& cfg) {
  validate(cfg);
  detail::StopWatch watch;
  const double target = effective_target(inst, cfg);
  const auto sites = candidate_sites(inst, cfg.candidates);
  CoverageIndex index(inst, sites);
  const double total_weak = index.total_weak_traffic();
  const int n = index.candidate_count();

  if (n == 0) {
    if (total_weak > 0.0)
      throw std::invalid_argument("pso: weak traffic present but no candidate sites");
    std::vector<TracePoint> trace{{0, 0.0, 1.0, 0.0}};
    return detail::finish(inst, cfg, {}, 0, std::move(trace), watch);
  }

  std::vector<double> macro_strength(n), micro_strength(n);
  for (int i = 0; i < n; ++i) {
    macro_strength[i] = index.disk_strength(index.candidates()[i], inst.params.macro_radius);
    micro_strength[i] = index.disk_strength(index.candidates()[i], inst.params.micro_radius);
  }

  const int dims = 2 * n;
  auto macro_bit = [](int site) { return 2 * site; };
  auto micro_bit = [](int site) { return 2 * site + 1; };

  struct Particle {
    std::vector<std::uint8_t> x;
    std::vector<double> v;
    Rng rng;
    std::vector<std::uint8_t> best_x;
    double best_fit = 0.0;
    explicit Particle(std::uint64_t seed) : rng(seed) {}
  };

  // Repair in place; returns the surviving stations.
  std::vector<int> order_scratch;
  auto repair = [&](std::vector<std::uint8_t>& x) {
    Deployment d;
    order_scratch.clear();
    for (int i = 0; i < n; ++i) {
      if (x[macro_bit(i)] && x[micro_bit(i)]) x[micro_bit(i)] = 0;  // macro wins
      if (x[macro_bit(i)] || x[micro_bit(i)]) order_scratch.push_back(i);
    }
    std::sort(order_scratch.begin(), order_scratch.end(), [&](int a, int b) {
      const double sa = x[macro_bit(a)] ? macro_strength[a] : micro_strength[a];
      const double sb = x[macro_bit(b)] ? macro_strength[b] : micro_strength[b];
      if (sa != sb) return sa > sb;
      return a < b;
    });
    for (int i : order_scratch) {
      const GridPoint p = index.candidates()[i];
      if (placement_ok(inst, p, d)) {
        d.stations.push_back(
            {p.x, p.y, x[macro_bit(i)] ? StationKind::Macro : StationKind::Micro});
      } else {
        x[macro_bit(i)] = 0;
        x[micro_bit(i)] = 0;
      }
    }
    return d;
  };

  std::vector<int> hits(index.weak_count(), 0);
  auto fitness = [&](const Deployment& d, double* covered_out, double* cost_out) {
    std::fill(hits.begin(), hits.end(), 0);
    for (const PlacedStation& s : d.stations)
      index.stamp(s.point(), inst.params.radius(s.kind), hits, +1);
    const double covered = index.covered_traffic(hits);
    const double cost = deployment_cost(d, inst.params);
    *covered_out = covered;
    *cost_out = cost;
    if (cfg.objective_mode == ObjectiveMode::CoverageFirst)
      return -covered + 1e-3 * cost;
    const double r = total_weak > 0.0 ? covered / total_weak : 1.0;
    return cost + cfg.penalty_weight * std::max(0.0, target - r) * total_weak;
  };

  const double p0 = std::min(0.5, 12.0 / n);
  std::vector<Particle> swarm;
  swarm.reserve(cfg.pso.swarm_size);
  for (int p = 0; p < cfg.pso.swarm_size; ++p) {
    Particle part(derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(p)));
    part.x.resize(dims);
    part.v.assign(dims, 0.0);
    for (int d = 0; d < dims; ++d) part.x[d] = part.rng.chance(p0) ? 1 : 0;
    swarm.push_back(std::move(part));
  }

  Deployment gbest_deployment;
  std::vector<std::uint8_t> gbest_x(dims, 0);
  double gbest_fit = 0.0;
  double gbest_covered = 0.0;
  double gbest_cost = 0.0;
  bool have_gbest = false;

  int evals = 0;
  std::vector<TracePoint> trace;
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };

  auto evaluate_particle = [&](Particle& part) {
    Deployment d = repair(part.x);
    double covered = 0.0, cost = 0.0;
    const double fit = fitness(d, &covered, &cost);
    ++evals;
    if (part.best_x.empty() || fit < part.best_fit) {
      part.best_x = part.x;
      part.best_fit = fit;
    }
    if (!have_gbest || fit < gbest_fit) {
      have_gbest = true;
      gbest_fit = fit;
      gbest_x = part.x;
      gbest_deployment = std::move(d);
      gbest_covered = covered;
      gbest_cost = cost;
    }
  };

  for (Particle& part : swarm) evaluate_particle(part);
  auto record = [&](int iteration) {
    const double r = total_weak > 0.0 ? gbest_covered / total_weak : 1.0;
    trace.push_back({iteration, gbest_fit, r, gbest_cost});
  };
  record(0);

  int iteration = 0;
  while (evals + cfg.pso.swarm_size <= cfg.max_evaluations) {
    ++iteration;
    for (Particle& part : swarm) {
      for (int d = 0; d < dims; ++d) {
        const double r1 = part.rng.next_double();
        const double r2 = part.rng.next_double();
        double v = cfg.pso.inertia * part.v[d] +
                   cfg.pso.c1 * r1 * (part.best_x[d] - part.x[d]) +
                   cfg.pso.c2 * r2 * (gbest_x[d] - part.x[d]);
        v = std::clamp(v, -cfg.pso.v_max, cfg.pso.v_max);
        part.v[d] = v;
        part.x[d] = part.rng.next_double() < sigmoid(v) ? 1 : 0;
      }
      evaluate_particle(part);
    }
    record(iteration);
  }

  return detail::finish(inst, cfg, std::move(gbest_deployment), evals, std::move(trace),
                        watch);
}

inline SolveResult solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::Greedy: return solve_greedy(inst, cfg);
    case Algorithm::SA: return solve_sa(inst, cfg);
    case Algorithm::PSO: return solve_pso(inst, cfg);
  }
  throw std::invalid_argument("solve: unknown algorithm");
}

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Greedy: return "greedy";
    case Algorithm::SA: return "sa";
    case Algorithm::PSO: return "pso";
  }
  return "unknown";
}

inline const char* to_string(ObjectiveMode m) {
  return m == ObjectiveMode::CostFirst ? "cost_first" : "coverage_first";
}

}  // namespace bss
