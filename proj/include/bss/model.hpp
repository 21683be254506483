#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bss {

/// Integer grid coordinate. All geometry is Euclidean in grid units.
struct GridPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Row-major order: y first, then x (row y, column x).
inline bool row_major_less(GridPoint a, GridPoint b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;
}

inline double squared_distance(GridPoint a, GridPoint b) {
  const double dx = static_cast<double>(a.x) - static_cast<double>(b.x);
  const double dy = static_cast<double>(a.y) - static_cast<double>(b.y);
  return dx * dx + dy * dy;
}

inline double distance(GridPoint a, GridPoint b) {
  return std::sqrt(squared_distance(a, b));
}

/// One populated grid cell: traffic volume plus the weak-coverage flag.
/// Coordinates absent from an instance's cell list carry zero traffic and
/// are not weak.
struct GridCell {
  int x = 0;
  int y = 0;
  double traffic = 0.0;
  bool weak = false;

  GridPoint point() const { return {x, y}; }
};

enum class StationKind { Macro, Micro };

inline const char* to_string(StationKind kind) {
  return kind == StationKind::Macro ? "macro" : "micro";
}

/// Radio and cost parameters of the placement problem.
struct RadioParams {
  double macro_radius = 30.0;        // coverage radius of a macro station
  double micro_radius = 10.0;        // coverage radius of a micro station
  double macro_cost = 10.0;          // setup cost of a macro station
  double micro_cost = 1.0;           // setup cost of a micro station
  double min_distance = 10.0;        // minimum spacing between any two stations
  double coverage_threshold = 0.9;   // required share of weak traffic covered

  double radius(StationKind kind) const {
    return kind == StationKind::Macro ? macro_radius : micro_radius;
  }
  double cost(StationKind kind) const {
    return kind == StationKind::Macro ? macro_cost : micro_cost;
  }
};

inline void validate(const RadioParams& p) {
  if (!(p.macro_radius > 0) || !(p.micro_radius > 0))
    throw std::invalid_argument("radio params: coverage radii must be positive");
  if (!(p.macro_radius > p.micro_radius))
    throw std::invalid_argument("radio params: macro radius must exceed micro radius");
  if (!(p.macro_cost > 0) || !(p.micro_cost > 0))
    throw std::invalid_argument("radio params: costs must be positive");
  if (!(p.macro_cost > p.micro_cost))
    throw std::invalid_argument("radio params: macro cost must exceed micro cost");
  if (!(p.min_distance > 0))
    throw std::invalid_argument("radio params: minimum distance must be positive");
  if (!(p.coverage_threshold > 0.0 && p.coverage_threshold <= 1.0))
    throw std::invalid_argument("radio params: coverage threshold must be in (0,1]");
}

/// A newly placed station. The kind enumeration encodes the one-station-per-
/// site rule structurally (a site is either macro or micro, never both).
struct PlacedStation {
  int x = 0;
  int y = 0;
  StationKind kind = StationKind::Micro;

  GridPoint point() const { return {x, y}; }
  friend bool operator==(const PlacedStation&, const PlacedStation&) = default;
};

/// The decision variables: the set of newly placed stations.
struct Deployment {
  std::vector<PlacedStation> stations;
};

/// Problem geometry and data. Immutable after canonicalize(); safe to share
/// across threads.
struct ProblemInstance {
  int width = 0;
  int height = 0;
  std::vector<GridCell> cells;                 // row-major, unique coordinates
  std::vector<GridPoint> existing_stations;
  RadioParams params;

  bool in_bounds(GridPoint p) const {
    return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
  }

  double total_weak_traffic() const {
    double total = 0.0;
    for (const GridCell& c : cells)
      if (c.weak) total += c.traffic;
    return total;
  }

  int weak_cell_count() const {
    int n = 0;
    for (const GridCell& c : cells)
      if (c.weak) ++n;
    return n;
  }
};

/// Sorts cells row-major and checks every instance invariant. Call once after
/// assembling an instance by hand; loaders and generators return instances
/// already in canonical form.
inline ProblemInstance& canonicalize(ProblemInstance& inst) {
  if (inst.width <= 0 || inst.height <= 0)
    throw std::invalid_argument("instance: width and height must be positive");
  validate(inst.params);
  std::sort(inst.cells.begin(), inst.cells.end(),
            [](const GridCell& a, const GridCell& b) {
              return row_major_less(a.point(), b.point());
            });
  for (std::size_t i = 0; i < inst.cells.size(); ++i) {
    const GridCell& c = inst.cells[i];
    if (!inst.in_bounds(c.point()))
      throw std::invalid_argument("instance: cell (" + std::to_string(c.x) + "," +
                                  std::to_string(c.y) + ") out of bounds");
    if (c.traffic < 0)
      throw std::invalid_argument("instance: negative traffic at (" +
                                  std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    if (i > 0 && inst.cells[i - 1].point() == c.point())
      throw std::invalid_argument("instance: duplicate cell (" + std::to_string(c.x) +
                                  "," + std::to_string(c.y) + ")");
  }
  for (const GridPoint& s : inst.existing_stations) {
    if (!inst.in_bounds(s))
      throw std::invalid_argument("instance: existing station (" + std::to_string(s.x) +
                                  "," + std::to_string(s.y) + ") out of bounds");
  }
  return inst;
}

/// Total setup cost of a deployment. Additive and order-independent.
inline double deployment_cost(const Deployment& deployment, const RadioParams& params) {
  double total = 0.0;
  for (const PlacedStation& s : deployment.stations) total += params.cost(s.kind);
  return total;
}

enum class CandidateFilter { WeakCellsOnly, AllCells, ExplicitList };

/// Selects the candidate-site set for new stations. WeakCellsOnly is the
/// default: weak cells are the remediation targets and keep the search
/// space small.
struct CandidateSpec {
  CandidateFilter filter = CandidateFilter::WeakCellsOnly;
  std::vector<GridPoint> sites;  // only used with ExplicitList
};

/// Candidate coordinates in deterministic row-major order (ExplicitList is
/// returned as given). ExplicitList entries outside the instance are an
/// input error.
inline std::vector<GridPoint> candidate_sites(const ProblemInstance& inst,
                                              const CandidateSpec& spec = {}) {
  std::vector<GridPoint> out;
  switch (spec.filter) {
    case CandidateFilter::WeakCellsOnly:
      for (const GridCell& c : inst.cells)
        if (c.weak) out.push_back(c.point());
      break;
    case CandidateFilter::AllCells:
      out.reserve(static_cast<std::size_t>(inst.width) * inst.height);
      for (int y = 0; y < inst.height; ++y)
        for (int x = 0; x < inst.width; ++x) out.push_back({x, y});
      break;
    case CandidateFilter::ExplicitList:
      for (const GridPoint& p : spec.sites) {
        if (!inst.in_bounds(p))
          throw std::invalid_argument("candidate_sites: explicit site (" +
                                      std::to_string(p.x) + "," + std::to_string(p.y) +
                                      ") out of bounds");
      }
      out = spec.sites;
      break;
  }
  return out;
}

}  // namespace bss
