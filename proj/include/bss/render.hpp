#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bss/coverage.hpp"
#include "bss/io.hpp"
#include "bss/model.hpp"

namespace bss {

/// Deterministic plot output: weak cells shaded by traffic, served cells
/// in light gray, stations as solid glyphs (existing black, new macros
/// green, new micros orange) and their coverage disks outlined.
struct RenderOptions {
  int scale = 4;  // pixels per grid cell in raster output
  bool draw_disks = true;
};

inline void validate(const RenderOptions& opts) {
  if (opts.scale < 1) throw std::invalid_argument("render scale must be >= 1");
}

namespace render_detail {

struct Rgb {
  std::uint8_t r, g, b;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kServed{225, 225, 225};
inline constexpr Rgb kExisting{0, 0, 0};
inline constexpr Rgb kMacro{0, 128, 0};
inline constexpr Rgb kMicro{255, 140, 0};
inline constexpr Rgb kExistingDisk{140, 140, 140};

inline double max_weak_traffic(const ProblemInstance& inst) {
  double top = 0.0;
  for (const GridCell& c : inst.cells)
    if (c.weak) top = std::max(top, c.traffic);
  return top;
}

/// Weak cells fade from pale pink to saturated red with traffic volume.
inline Rgb weak_shade(double traffic, double top) {
  const double unit = top > 0.0 ? std::min(1.0, traffic / top) : 0.0;
  const int v = static_cast<int>(std::lround(55.0 + 200.0 * unit));
  return {255, static_cast<std::uint8_t>(255 - v), static_cast<std::uint8_t>(255 - v)};
}

class Raster {
 public:
  Raster(int width, int height)
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(width) * height * 3, 255) {}

  void set(int x, int y, Rgb color) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
    const std::size_t at = (static_cast<std::size_t>(y) * width_ + x) * 3;
    pixels_[at] = color.r;
    pixels_[at + 1] = color.g;
    pixels_[at + 2] = color.b;
  }

  void fill_block(int x0, int y0, int size, Rgb color) {
    for (int y = y0; y < y0 + size; ++y)
      for (int x = x0; x < x0 + size; ++x) set(x, y, color);
  }

  /// Integer midpoint circle; deterministic ring of pixels.
  void circle(int cx, int cy, int radius, Rgb color) {
    int x = radius;
    int y = 0;
    int err = 1 - radius;
    while (x >= y) {
      set(cx + x, cy + y, color);
      set(cx + y, cy + x, color);
      set(cx - y, cy + x, color);
      set(cx - x, cy + y, color);
      set(cx - x, cy - y, color);
      set(cx - y, cy - x, color);
      set(cx + y, cy - x, color);
      set(cx + x, cy - y, color);
      ++y;
      if (err < 0) {
        err += 2 * y + 1;
      } else {
        --x;
        err += 2 * (y - x) + 1;
      }
    }
  }

  std::string to_ppm() const {
    std::string out = "P6\n" + std::to_string(width_) + " " + std::to_string(height_) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(pixels_.data()), pixels_.size());
    return out;
  }

 private:
  int width_, height_;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace render_detail

inline std::string render_ppm(const ProblemInstance& inst,
                              const Deployment* deployment = nullptr,
                              const RenderOptions& opts = {}) {
  validate(opts);
  using namespace render_detail;
  const int s = opts.scale;
  Raster img(inst.width * s, inst.height * s);

  const double top = max_weak_traffic(inst);
  for (const GridCell& c : inst.cells) {
    if (c.traffic <= 0.0) continue;
    img.fill_block(c.x * s, c.y * s, s, c.weak ? weak_shade(c.traffic, top) : kServed);
  }

  const auto center = [s](int v) { return v * s + s / 2; };
  if (opts.draw_disks) {
    for (const GridPoint& p : inst.existing_stations)
      img.circle(center(p.x), center(p.y),
                 static_cast<int>(std::lround(inst.params.macro_radius * s)), kExistingDisk);
    if (deployment) {
      for (const PlacedStation& st : deployment->stations)
        img.circle(center(st.x), center(st.y),
                   static_cast<int>(std::lround(inst.params.radius(st.kind) * s)),
                   st.kind == StationKind::Macro ? kMacro : kMicro);
    }
  }
  for (const GridPoint& p : inst.existing_stations) img.fill_block(p.x * s, p.y * s, s, kExisting);
  if (deployment) {
    for (const PlacedStation& st : deployment->stations)
      img.fill_block(st.x * s, st.y * s, s,
                     st.kind == StationKind::Macro ? kMacro : kMicro);
  }
  return img.to_ppm();
}

inline std::string render_svg(const ProblemInstance& inst,
                              const Deployment* deployment = nullptr,
                              const RenderOptions& opts = {}) {
  validate(opts);
  using namespace render_detail;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
         std::to_string(inst.width) + " " + std::to_string(inst.height) + "\">\n";
  out += "<rect width=\"" + std::to_string(inst.width) + "\" height=\"" +
         std::to_string(inst.height) + "\" fill=\"#ffffff\"/>\n";

  const auto rgb = [](Rgb c) {
    return "rgb(" + std::to_string(c.r) + "," + std::to_string(c.g) + "," +
           std::to_string(c.b) + ")";
  };
  const double top = max_weak_traffic(inst);
  for (const GridCell& c : inst.cells) {
    if (c.traffic <= 0.0) continue;
    const Rgb color = c.weak ? weak_shade(c.traffic, top) : kServed;
    out += "<rect class=\"" + std::string(c.weak ? "weak" : "served") + "\" x=\"" +
           std::to_string(c.x) + "\" y=\"" + std::to_string(c.y) +
           "\" width=\"1\" height=\"1\" fill=\"" + rgb(color) + "\"/>\n";
  }

  const auto disk = [&](int x, int y, double radius, const std::string& cls, Rgb color) {
    out += "<circle class=\"" + cls + "\" cx=\"" + std::to_string(x) + ".5\" cy=\"" +
           std::to_string(y) + ".5\" r=\"" + detail::format_double(radius) +
           "\" fill=\"none\" stroke=\"" + rgb(color) + "\" stroke-width=\"0.3\"/>\n";
  };
  const auto glyph = [&](int x, int y, const std::string& cls, Rgb color) {
    out += "<circle class=\"" + cls + "\" cx=\"" + std::to_string(x) + ".5\" cy=\"" +
           std::to_string(y) + ".5\" r=\"1.2\" fill=\"" + rgb(color) + "\"/>\n";
  };

  if (opts.draw_disks) {
    for (const GridPoint& p : inst.existing_stations)
      disk(p.x, p.y, inst.params.macro_radius, "disk-existing", kExistingDisk);
    if (deployment) {
      for (const PlacedStation& st : deployment->stations)
        disk(st.x, st.y, inst.params.radius(st.kind),
             st.kind == StationKind::Macro ? "disk-macro" : "disk-micro",
             st.kind == StationKind::Macro ? kMacro : kMicro);
    }
  }
  for (const GridPoint& p : inst.existing_stations) glyph(p.x, p.y, "existing", kExisting);
  if (deployment) {
    for (const PlacedStation& st : deployment->stations)
      glyph(st.x, st.y, st.kind == StationKind::Macro ? "new-macro" : "new-micro",
            st.kind == StationKind::Macro ? kMacro : kMicro);
  }
  out += "</svg>\n";
  return out;
}

inline void save_render(const std::string& path, const std::string& content) {
  std::ofstream out = detail::open_for_write(path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed to write " + path);
}

}  // namespace bss
