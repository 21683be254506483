#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "bss/model.hpp"
#include "bss/rng.hpp"

namespace bss {

/// Input error carrying the file and 1-based line it came from.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& reason)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + reason),
        path_(path),
        line_(line) {}
  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  int line_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline int parse_int(std::string_view field, const std::string& path, int line) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.begin(), field.end(), value);
  if (ec != std::errc{} || ptr != field.end())
    throw ParseError(path, line, "expected integer, got '" + std::string(field) + "'");
  return value;
}

inline double parse_double(std::string_view field, const std::string& path, int line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.begin(), field.end(), value);
  if (ec != std::errc{} || ptr != field.end())
    throw ParseError(path, line, "expected number, got '" + std::string(field) + "'");
  return value;
}

/// Shortest decimal text that round-trips the exact double.
inline std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

inline std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

/// Reads lines tolerant of CRLF; returns false at EOF.
inline bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace detail

/// Cells CSV: header `x,y,traffic,weak`, rows `int,int,decimal,0|1`.
/// Stations CSV: header `x,y`, rows `int,int`. Grid dimensions are not part
/// of the files; pass them explicitly, or pass 0 to infer the tightest
/// bounding box.
inline ProblemInstance load_instance(const std::string& cells_path,
                                     const std::string& stations_path,
                                     const RadioParams& params, int width = 0,
                                     int height = 0) {
  ProblemInstance inst;
  inst.params = params;

  {
    auto in = detail::open_for_read(cells_path);
    std::string line;
    int line_no = 1;
    if (!detail::next_line(in, line) || line != "x,y,traffic,weak")
      throw ParseError(cells_path, 1, "expected header 'x,y,traffic,weak'");
    while (detail::next_line(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = detail::split_fields(line);
      if (fields.size() != 4)
        throw ParseError(cells_path, line_no, "expected 4 fields, got " +
                                                  std::to_string(fields.size()));
      GridCell cell;
      cell.x = detail::parse_int(fields[0], cells_path, line_no);
      cell.y = detail::parse_int(fields[1], cells_path, line_no);
      cell.traffic = detail::parse_double(fields[2], cells_path, line_no);
      if (fields[3] == "0")
        cell.weak = false;
      else if (fields[3] == "1")
        cell.weak = true;
      else
        throw ParseError(cells_path, line_no,
                         "weak flag must be 0 or 1, got '" + std::string(fields[3]) + "'");
      if (cell.traffic < 0)
        throw ParseError(cells_path, line_no, "negative traffic");
      inst.cells.push_back(cell);
    }
  }

  {
    auto in = detail::open_for_read(stations_path);
    std::string line;
    int line_no = 1;
    if (!detail::next_line(in, line) || line != "x,y")
      throw ParseError(stations_path, 1, "expected header 'x,y'");
    while (detail::next_line(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto fields = detail::split_fields(line);
      if (fields.size() != 2)
        throw ParseError(stations_path, line_no, "expected 2 fields, got " +
                                                     std::to_string(fields.size()));
      inst.existing_stations.push_back(
          {detail::parse_int(fields[0], stations_path, line_no),
           detail::parse_int(fields[1], stations_path, line_no)});
    }
  }

  if (width > 0 && height > 0) {
    inst.width = width;
    inst.height = height;
  } else {
    int max_x = 0, max_y = 0;
    for (const GridCell& c : inst.cells) {
      max_x = std::max(max_x, c.x);
      max_y = std::max(max_y, c.y);
    }
    for (const GridPoint& s : inst.existing_stations) {
      max_x = std::max(max_x, s.x);
      max_y = std::max(max_y, s.y);
    }
    inst.width = max_x + 1;
    inst.height = max_y + 1;
  }
  return canonicalize(inst);
}

inline void save_instance(const ProblemInstance& inst, const std::string& cells_path,
                          const std::string& stations_path) {
  {
    auto out = detail::open_for_write(cells_path);
    out << "x,y,traffic,weak\n";
    for (const GridCell& c : inst.cells)
      out << c.x << ',' << c.y << ',' << detail::format_double(c.traffic) << ','
          << (c.weak ? '1' : '0') << '\n';
    if (!out) throw std::runtime_error("write failed: " + cells_path);
  }
  {
    auto out = detail::open_for_write(stations_path);
    out << "x,y\n";
    for (const GridPoint& s : inst.existing_stations) out << s.x << ',' << s.y << '\n';
    if (!out) throw std::runtime_error("write failed: " + stations_path);
  }
}

/// Deployment CSV: header `x,y,kind`, kind is `macro` or `micro`.
inline Deployment load_deployment(const std::string& path) {
  Deployment d;
  auto in = detail::open_for_read(path);
  std::string line;
  int line_no = 1;
  if (!detail::next_line(in, line) || line != "x,y,kind")
    throw ParseError(path, 1, "expected header 'x,y,kind'");
  while (detail::next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != 3)
      throw ParseError(path, line_no,
                       "expected 3 fields, got " + std::to_string(fields.size()));
    PlacedStation s;
    s.x = detail::parse_int(fields[0], path, line_no);
    s.y = detail::parse_int(fields[1], path, line_no);
    if (fields[2] == "macro")
      s.kind = StationKind::Macro;
    else if (fields[2] == "micro")
      s.kind = StationKind::Micro;
    else
      throw ParseError(path, line_no,
                       "kind must be macro or micro, got '" + std::string(fields[2]) + "'");
    d.stations.push_back(s);
  }
  return d;
}

inline void save_deployment(const Deployment& d, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << "x,y,kind\n";
  for (const PlacedStation& s : d.stations)
    out << s.x << ',' << s.y << ',' << to_string(s.kind) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& doc,
                                const std::vector<std::string>& allowed,
                                const std::string& context) {
  if (!doc.is_object()) throw std::invalid_argument(context + ": expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument(context + ": unknown key '" + key + "'");
  }
}

inline void apply_radio_keys(const nlohmann::json& doc, RadioParams& p) {
  if (doc.contains("d_h")) p.macro_radius = doc.at("d_h").get<double>();
  if (doc.contains("d_d")) p.micro_radius = doc.at("d_d").get<double>();
  if (doc.contains("C_h")) p.macro_cost = doc.at("C_h").get<double>();
  if (doc.contains("C_d")) p.micro_cost = doc.at("C_d").get<double>();
  if (doc.contains("D_min")) p.min_distance = doc.at("D_min").get<double>();
  if (doc.contains("theta_cp")) p.coverage_threshold = doc.at("theta_cp").get<double>();
}

inline const std::vector<std::string>& radio_keys() {
  static const std::vector<std::string> keys = {"d_h", "d_d", "C_h", "C_d", "D_min", "theta_cp"};
  return keys;
}

}  // namespace detail

/// Parses the parameter document. Keys d_h, d_d, C_h, C_d, D_min, theta_cp
/// are all optional (defaults apply); any other key is rejected.
inline RadioParams parse_params(const nlohmann::json& doc) {
  detail::reject_unknown_keys(doc, detail::radio_keys(), "params");
  RadioParams p;
  detail::apply_radio_keys(doc, p);
  validate(p);
  return p;
}

inline RadioParams load_params(const std::string& path) {
  auto in = detail::open_for_read(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return parse_params(doc);
}

/// Synthetic-instance recipe: traffic as a sum of radially decaying
/// hotspots, existing stations by rejection sampling.
struct GeneratorConfig {
  int width = 100;
  int height = 100;
  int hotspots = 5;
  double peak_min = 5.0;
  double peak_max = 20.0;
  double radius_min = 5.0;
  double radius_max = 15.0;
  int existing_stations = 2;
  std::uint64_t seed = 1;
  RadioParams params;
};

inline void validate(const GeneratorConfig& cfg) {
  if (cfg.width <= 0 || cfg.height <= 0)
    throw std::invalid_argument("generator: width and height must be positive");
  if (cfg.hotspots < 0 || cfg.existing_stations < 0)
    throw std::invalid_argument("generator: counts must be non-negative");
  if (cfg.peak_min <= 0 || cfg.peak_max < cfg.peak_min)
    throw std::invalid_argument("generator: need 0 < peak_min <= peak_max");
  if (cfg.radius_min <= 0 || cfg.radius_max < cfg.radius_min)
    throw std::invalid_argument("generator: need 0 < radius_min <= radius_max");
  validate(cfg.params);
}

/// One JSON document carries both generator fields and the radio parameter
/// keys; everything is optional, unknown keys are rejected.
inline GeneratorConfig parse_generator_config(const nlohmann::json& doc) {
  std::vector<std::string> allowed = {"width",      "height",     "hotspots",
                                      "peak_min",   "peak_max",   "radius_min",
                                      "radius_max", "existing_stations", "seed"};
  allowed.insert(allowed.end(), detail::radio_keys().begin(), detail::radio_keys().end());
  detail::reject_unknown_keys(doc, allowed, "generator config");

  GeneratorConfig cfg;
  if (doc.contains("width")) cfg.width = doc.at("width").get<int>();
  if (doc.contains("height")) cfg.height = doc.at("height").get<int>();
  if (doc.contains("hotspots")) cfg.hotspots = doc.at("hotspots").get<int>();
  if (doc.contains("peak_min")) cfg.peak_min = doc.at("peak_min").get<double>();
  if (doc.contains("peak_max")) cfg.peak_max = doc.at("peak_max").get<double>();
  if (doc.contains("radius_min")) cfg.radius_min = doc.at("radius_min").get<double>();
  if (doc.contains("radius_max")) cfg.radius_max = doc.at("radius_max").get<double>();
  if (doc.contains("existing_stations"))
    cfg.existing_stations = doc.at("existing_stations").get<int>();
  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
  detail::apply_radio_keys(doc, cfg.params);
  validate(cfg);
  return cfg;
}

inline GeneratorConfig load_generator_config(const std::string& path) {
  auto in = detail::open_for_read(path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return parse_generator_config(doc);
}

/// Deterministic synthetic instance. Traffic at a cell is the sum over
/// hotspots of peak * (1 - distance/radius), clipped at zero; only cells
/// with positive traffic are materialized. A cell is weak when it carries
/// traffic and no existing station covers it at macro radius.
inline ProblemInstance generate_instance(const GeneratorConfig& cfg) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, 0x6e67));  // generator stream

  ProblemInstance inst;
  inst.width = cfg.width;
  inst.height = cfg.height;
  inst.params = cfg.params;

  constexpr int kMaxAttempts = 1000;
  const double min_d_sq = cfg.params.min_distance * cfg.params.min_distance;
  for (int i = 0; i < cfg.existing_stations; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      GridPoint p{rng.below_int(cfg.width), rng.below_int(cfg.height)};
      bool clash = false;
      for (const GridPoint& q : inst.existing_stations)
        if (squared_distance(p, q) < min_d_sq) clash = true;
      if (!clash) {
        inst.existing_stations.push_back(p);
        placed = true;
      }
    }
    if (!placed)
      throw std::runtime_error(
          "generator: could not place " + std::to_string(cfg.existing_stations) +
          " stations at least " + detail::format_double(cfg.params.min_distance) +
          " apart; reduce existing_stations or enlarge the grid");
  }

  struct Hotspot {
    double x, y, peak, radius;
  };
  std::vector<Hotspot> hotspots;
  for (int i = 0; i < cfg.hotspots; ++i) {
    hotspots.push_back({static_cast<double>(rng.below_int(cfg.width)),
                        static_cast<double>(rng.below_int(cfg.height)),
                        rng.uniform(cfg.peak_min, cfg.peak_max),
                        rng.uniform(cfg.radius_min, cfg.radius_max)});
  }

  // Hotspots and stations are stamped only inside their bounding boxes so
  // large sparse grids stay cheap; per-cell hotspot contributions still
  // accumulate in hotspot order.
  const std::size_t area =
      static_cast<std::size_t>(cfg.width) * static_cast<std::size_t>(cfg.height);
  std::vector<double> traffic(area, 0.0);
  for (const Hotspot& h : hotspots) {
    const int x0 = std::max(0, static_cast<int>(std::ceil(h.x - h.radius)));
    const int x1 = std::min(cfg.width - 1, static_cast<int>(std::floor(h.x + h.radius)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(h.y - h.radius)));
    const int y1 = std::min(cfg.height - 1, static_cast<int>(std::floor(h.y + h.radius)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - h.x;
        const double dy = y - h.y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        if (dist < h.radius)
          traffic[static_cast<std::size_t>(y) * cfg.width + x] +=
              h.peak * (1.0 - dist / h.radius);
      }
    }
  }

  std::vector<std::uint8_t> served(area, 0);
  const double macro_r = cfg.params.macro_radius;
  const double macro_r_sq = macro_r * macro_r;
  for (const GridPoint& s : inst.existing_stations) {
    const int x0 = std::max(0, static_cast<int>(std::ceil(s.x - macro_r)));
    const int x1 = std::min(cfg.width - 1, static_cast<int>(std::floor(s.x + macro_r)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(s.y - macro_r)));
    const int y1 = std::min(cfg.height - 1, static_cast<int>(std::floor(s.y + macro_r)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (squared_distance({x, y}, s) <= macro_r_sq)
          served[static_cast<std::size_t>(y) * cfg.width + x] = 1;
  }

  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) {
      const std::size_t at = static_cast<std::size_t>(y) * cfg.width + x;
      if (traffic[at] <= 0.0) continue;
      inst.cells.push_back({x, y, traffic[at], served[at] == 0});
    }
  }
  return canonicalize(inst);
}

struct RegionSpec {
  GridPoint origin;
  int width = 0;
  int height = 0;
};

/// Samples `count` distinct region origins uniformly without replacement
/// and cuts each region out as a standalone instance with re-based
/// coordinates. Cells keep their parent traffic and weak flags; only
/// existing stations inside the region are kept.
inline std::vector<std::pair<RegionSpec, ProblemInstance>> sample_regions(
    const ProblemInstance& parent, int count, int width, int height,
    std::uint64_t seed) {
  if (count <= 0) throw std::invalid_argument("sample_regions: count must be positive");
  if (width <= 0 || width > parent.width || height <= 0 || height > parent.height)
    throw std::invalid_argument("sample_regions: region does not fit inside instance");
  const std::uint64_t span_x = static_cast<std::uint64_t>(parent.width - width + 1);
  const std::uint64_t span_y = static_cast<std::uint64_t>(parent.height - height + 1);
  const std::uint64_t total = span_x * span_y;
  if (static_cast<std::uint64_t>(count) > total)
    throw std::invalid_argument("sample_regions: only " + std::to_string(total) +
                                " distinct origins exist");

  Rng rng(derive_seed(seed, 0x7267));  // region stream
  std::vector<std::uint64_t> picked;
  while (picked.size() < static_cast<std::size_t>(count)) {
    const std::uint64_t idx = rng.below(total);
    if (std::find(picked.begin(), picked.end(), idx) == picked.end())
      picked.push_back(idx);
  }

  std::vector<std::pair<RegionSpec, ProblemInstance>> out;
  for (std::uint64_t idx : picked) {
    RegionSpec spec;
    spec.origin = {static_cast<int>(idx % span_x), static_cast<int>(idx / span_x)};
    spec.width = width;
    spec.height = height;

    ProblemInstance sub;
    sub.width = width;
    sub.height = height;
    sub.params = parent.params;
    for (const GridCell& c : parent.cells) {
      if (c.x >= spec.origin.x && c.x < spec.origin.x + width && c.y >= spec.origin.y &&
          c.y < spec.origin.y + height)
        sub.cells.push_back({c.x - spec.origin.x, c.y - spec.origin.y, c.traffic, c.weak});
    }
    for (const GridPoint& s : parent.existing_stations) {
      if (s.x >= spec.origin.x && s.x < spec.origin.x + width && s.y >= spec.origin.y &&
          s.y < spec.origin.y + height)
        sub.existing_stations.push_back({s.x - spec.origin.x, s.y - spec.origin.y});
    }
    canonicalize(sub);
    out.emplace_back(spec, std::move(sub));
  }
  return out;
}

}  // namespace bss
