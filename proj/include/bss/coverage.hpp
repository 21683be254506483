#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bss/model.hpp"

namespace bss {

enum class ViolationKind {
  CoverageShortfall,    // covered share of weak traffic below threshold
  NewNewDistance,       // two new stations closer than min_distance
  NewExistingDistance,  // new station closer than min_distance to an existing one
  DuplicateSite,        // two new stations on the same coordinate
  OutOfBounds,          // new station outside the grid
};

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::CoverageShortfall: return "coverage_shortfall";
    case ViolationKind::NewNewDistance: return "new_new_distance";
    case ViolationKind::NewExistingDistance: return "new_existing_distance";
    case ViolationKind::DuplicateSite: return "duplicate_site";
    case ViolationKind::OutOfBounds: return "out_of_bounds";
  }
  return "unknown";
}

struct ConstraintViolation {
  ViolationKind kind = ViolationKind::CoverageShortfall;
  std::string detail;              // human-readable description
  double measure = 0.0;            // magnitude: shortfall, or min_distance - distance
  std::vector<GridPoint> subjects; // coordinates involved
};

/// Which checks run. Spacing and duplicate checks cover the structural
/// placement rules; the coverage check is the traffic constraint. Bounds
/// checking always runs. A threshold override substitutes for the
/// instance's coverage threshold when set.
struct ConstraintOptions {
  bool check_coverage = true;
  bool check_duplicates = true;
  bool check_new_new_spacing = true;
  bool check_new_existing_spacing = true;
  std::optional<double> threshold_override;
};

struct EvaluationReport {
  double coverage_ratio = 0.0;
  double covered_traffic = 0.0;
  double total_weak_traffic = 0.0;
  double cost = 0.0;
  std::vector<ConstraintViolation> violations;
  bool feasible = false;
};

/// Disk coverage test for a single station; the boundary is inclusive.
/// Compared in squared form so integer-coordinate boundaries (3-4-5,
/// 6-8-10, ...) are exact.
inline bool is_covered(GridPoint point, const PlacedStation& station,
                       const RadioParams& params) {
  const double r = params.radius(station.kind);
  return squared_distance(point, station.point()) <= r * r;
}

inline bool is_covered(GridPoint point, const Deployment& deployment,
                       const RadioParams& params) {
  for (const PlacedStation& s : deployment.stations)
    if (is_covered(point, s, params)) return true;
  return false;
}

/// Per-cell coverage flags, aligned index-for-index with instance.cells.
/// Only new stations count: weak cells are weak despite the existing
/// network, so only the deployment remediates them.
struct CoverageMap {
  std::vector<std::uint8_t> covered;  // covered[i] <=> instance.cells[i] covered
};

inline CoverageMap coverage_map(const ProblemInstance& inst,
                                const Deployment& deployment) {
  CoverageMap map;
  map.covered.resize(inst.cells.size(), 0);
  for (std::size_t i = 0; i < inst.cells.size(); ++i)
    map.covered[i] = is_covered(inst.cells[i].point(), deployment, inst.params) ? 1 : 0;
  return map;
}

/// Share of weak traffic covered by at least one new station. Defined as
/// 1.0 when the instance has no weak traffic (vacuously covered). The sum
/// runs in canonical cell order so every caller that accumulates the same
/// cells the same way gets bit-identical results.
inline double coverage_ratio(const ProblemInstance& inst,
                             const Deployment& deployment) {
  double covered = 0.0;
  double total = 0.0;
  for (const GridCell& c : inst.cells) {
    if (!c.weak) continue;
    total += c.traffic;
    if (is_covered(c.point(), deployment, inst.params)) covered += c.traffic;
  }
  return total > 0.0 ? covered / total : 1.0;
}

/// Full feasibility report. Violation order is deterministic: bounds,
/// duplicates, new-new spacing (pair index order), new-existing spacing,
/// coverage shortfall last. A pair of stations on the same coordinate is
/// reported as a duplicate only, not additionally as a spacing violation.
inline EvaluationReport check_constraints(const ProblemInstance& inst,
                                          const Deployment& deployment,
                                          const ConstraintOptions& options = {}) {
  EvaluationReport report;
  const auto& stations = deployment.stations;
  const double min_d = inst.params.min_distance;
  const double min_d_sq = min_d * min_d;

  for (const PlacedStation& s : stations) {
    if (!inst.in_bounds(s.point())) {
      report.violations.push_back(
          {ViolationKind::OutOfBounds,
           "station (" + std::to_string(s.x) + "," + std::to_string(s.y) +
               ") outside " + std::to_string(inst.width) + "x" +
               std::to_string(inst.height) + " grid",
           1.0,
           {s.point()}});
    }
  }

  if (options.check_duplicates) {
    for (std::size_t i = 0; i < stations.size(); ++i) {
      for (std::size_t j = i + 1; j < stations.size(); ++j) {
        if (stations[i].point() == stations[j].point()) {
          report.violations.push_back(
              {ViolationKind::DuplicateSite,
               "two stations share site (" + std::to_string(stations[i].x) + "," +
                   std::to_string(stations[i].y) + ")",
               1.0,
               {stations[i].point(), stations[j].point()}});
        }
      }
    }
  }

  if (options.check_new_new_spacing) {
    for (std::size_t i = 0; i < stations.size(); ++i) {
      for (std::size_t j = i + 1; j < stations.size(); ++j) {
        const GridPoint a = stations[i].point();
        const GridPoint b = stations[j].point();
        if (a == b) continue;  // reported as a duplicate
        const double d_sq = squared_distance(a, b);
        if (d_sq < min_d_sq) {
          const double d = std::sqrt(d_sq);
          report.violations.push_back(
              {ViolationKind::NewNewDistance,
               "new stations (" + std::to_string(a.x) + "," + std::to_string(a.y) +
                   ") and (" + std::to_string(b.x) + "," + std::to_string(b.y) +
                   ") are " + std::to_string(d) + " apart, need " +
                   std::to_string(min_d),
               min_d - d,
               {a, b}});
        }
      }
    }
  }

  if (options.check_new_existing_spacing) {
    for (const PlacedStation& s : stations) {
      for (const GridPoint& e : inst.existing_stations) {
        const double d_sq = squared_distance(s.point(), e);
        if (d_sq < min_d_sq) {
          const double d = std::sqrt(d_sq);
          report.violations.push_back(
              {ViolationKind::NewExistingDistance,
               "new station (" + std::to_string(s.x) + "," + std::to_string(s.y) +
                   ") is " + std::to_string(d) + " from existing station (" +
                   std::to_string(e.x) + "," + std::to_string(e.y) + "), need " +
                   std::to_string(min_d),
               min_d - d,
               {s.point(), e}});
        }
      }
    }
  }

  double covered = 0.0;
  double total = 0.0;
  for (const GridCell& c : inst.cells) {
    if (!c.weak) continue;
    total += c.traffic;
    if (is_covered(c.point(), deployment, inst.params)) covered += c.traffic;
  }
  report.covered_traffic = covered;
  report.total_weak_traffic = total;
  report.coverage_ratio = total > 0.0 ? covered / total : 1.0;
  report.cost = deployment_cost(deployment, inst.params);

  if (options.check_coverage) {
    const double threshold =
        options.threshold_override.value_or(inst.params.coverage_threshold);
    if (report.coverage_ratio < threshold) {
      report.violations.push_back(
          {ViolationKind::CoverageShortfall,
           "coverage " + std::to_string(report.coverage_ratio) + " below threshold " +
               std::to_string(threshold),
           threshold - report.coverage_ratio,
           {}});
    }
  }

  report.feasible = report.violations.empty();
  return report;
}

}  // namespace bss
