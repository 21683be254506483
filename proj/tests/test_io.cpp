#include "bss/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "bss/coverage.hpp"
#include "bss/rng.hpp"
#include "oracle.hpp"

namespace {

using bss::Deployment;
using bss::GeneratorConfig;
using bss::GridCell;
using bss::GridPoint;
using bss::ProblemInstance;
using bss::RadioParams;
using bss::StationKind;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("bss_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write_file(const std::string& name, const std::string& content) {
    std::ofstream out(path(name));
    out << content;
  }
  std::string read_file(const std::string& name) const {
    std::ifstream in(path(name));
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  }

  std::filesystem::path dir_;
};

using IoTest = TempDir;

bool same_instance(const ProblemInstance& a, const ProblemInstance& b) {
  if (a.width != b.width || a.height != b.height) return false;
  if (a.cells.size() != b.cells.size()) return false;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    if (a.cells[i].x != b.cells[i].x || a.cells[i].y != b.cells[i].y ||
        a.cells[i].traffic != b.cells[i].traffic || a.cells[i].weak != b.cells[i].weak)
      return false;
  }
  if (a.existing_stations.size() != b.existing_stations.size()) return false;
  for (std::size_t i = 0; i < a.existing_stations.size(); ++i)
    if (!(a.existing_stations[i] == b.existing_stations[i])) return false;
  return true;
}

TEST_F(IoTest, LoadSmallInstance) {
  write_file("cells.csv", "x,y,traffic,weak\n1,2,3.5,1\n4,5,0.25,0\n0,0,7,1\n");
  write_file("stations.csv", "x,y\n9,9\n");
  auto inst = bss::load_instance(path("cells.csv"), path("stations.csv"), RadioParams{});
  EXPECT_EQ(inst.cells.size(), 3u);
  ASSERT_EQ(inst.existing_stations.size(), 1u);
  EXPECT_EQ(inst.existing_stations[0], (GridPoint{9, 9}));
  EXPECT_EQ(inst.width, 10);  // inferred from max coordinate
  EXPECT_EQ(inst.height, 10);
  EXPECT_EQ(inst.cells[0].point(), (GridPoint{0, 0}));  // canonical order
}

TEST_F(IoTest, ParseErrorsNameTheLine) {
  write_file("cells.csv", "x,y,traffic,weak\n1,2,3.5,1\n2,2,-1.0,0\n");
  write_file("stations.csv", "x,y\n");
  try {
    bss::load_instance(path("cells.csv"), path("stations.csv"), RadioParams{});
    FAIL() << "expected ParseError";
  } catch (const bss::ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("negative traffic"), std::string::npos);
  }

  write_file("bad_header.csv", "x,y,traffic\n");
  EXPECT_THROW(bss::load_instance(path("bad_header.csv"), path("stations.csv"), RadioParams{}),
               bss::ParseError);

  write_file("bad_flag.csv", "x,y,traffic,weak\n1,1,2.0,yes\n");
  EXPECT_THROW(bss::load_instance(path("bad_flag.csv"), path("stations.csv"), RadioParams{}),
               bss::ParseError);

  write_file("bad_int.csv", "x,y,traffic,weak\n1.5,1,2.0,1\n");
  EXPECT_THROW(bss::load_instance(path("bad_int.csv"), path("stations.csv"), RadioParams{}),
               bss::ParseError);

  write_file("cells_ok.csv", "x,y,traffic,weak\n");
  write_file("dup.csv", "x,y,traffic,weak\n1,1,2.0,1\n1,1,3.0,0\n");
  EXPECT_THROW(bss::load_instance(path("dup.csv"), path("stations.csv"), RadioParams{}),
               std::invalid_argument);
}

TEST_F(IoTest, EmptyInstanceWritesHeadersOnly) {
  ProblemInstance inst;
  inst.width = inst.height = 5;
  bss::canonicalize(inst);
  bss::save_instance(inst, path("cells.csv"), path("stations.csv"));
  EXPECT_EQ(read_file("cells.csv"), "x,y,traffic,weak\n");
  EXPECT_EQ(read_file("stations.csv"), "x,y\n");
}

TEST_F(IoTest, SingleCellSingleRow) {
  ProblemInstance inst;
  inst.width = inst.height = 5;
  inst.cells = {{2, 3, 1.5, true}};
  bss::canonicalize(inst);
  bss::save_instance(inst, path("cells.csv"), path("stations.csv"));
  EXPECT_EQ(read_file("cells.csv"), "x,y,traffic,weak\n2,3,1.5,1\n");
}

TEST_F(IoTest, RandomInstancesRoundTrip) {
  bss::Rng rng(6021);
  for (int trial = 0; trial < 25; ++trial) {
    ProblemInstance inst;
    inst.width = 30 + rng.below_int(40);
    inst.height = 30 + rng.below_int(40);
    const int cells = rng.below_int(60);
    for (int i = 0; i < cells; ++i) {
      GridCell c{rng.below_int(inst.width), rng.below_int(inst.height),
                 rng.uniform(0.0, 50.0), rng.chance(0.5)};
      bool dup = false;
      for (const GridCell& prev : inst.cells)
        if (prev.point() == c.point()) dup = true;
      if (!dup) inst.cells.push_back(c);
    }
    const int stations = rng.below_int(5);
    for (int i = 0; i < stations; ++i)
      inst.existing_stations.push_back(
          {rng.below_int(inst.width), rng.below_int(inst.height)});
    bss::canonicalize(inst);

    bss::save_instance(inst, path("c.csv"), path("s.csv"));
    auto loaded = bss::load_instance(path("c.csv"), path("s.csv"), inst.params,
                                     inst.width, inst.height);
    EXPECT_TRUE(same_instance(inst, loaded)) << "trial " << trial;
  }
}

TEST_F(IoTest, DeploymentRoundTrip) {
  Deployment d;
  d.stations = {{3, 4, StationKind::Macro}, {15, 4, StationKind::Micro}};
  bss::save_deployment(d, path("deploy.csv"));
  EXPECT_EQ(read_file("deploy.csv"), "x,y,kind\n3,4,macro\n15,4,micro\n");
  auto loaded = bss::load_deployment(path("deploy.csv"));
  ASSERT_EQ(loaded.stations.size(), 2u);
  EXPECT_EQ(loaded.stations[0], d.stations[0]);
  EXPECT_EQ(loaded.stations[1], d.stations[1]);

  write_file("bad.csv", "x,y,kind\n1,1,huge\n");
  EXPECT_THROW(bss::load_deployment(path("bad.csv")), bss::ParseError);
}

TEST_F(IoTest, ParamsJson) {
  write_file("params.json", R"({"d_h": 25, "theta_cp": 0.8})");
  auto p = bss::load_params(path("params.json"));
  EXPECT_DOUBLE_EQ(p.macro_radius, 25.0);
  EXPECT_DOUBLE_EQ(p.coverage_threshold, 0.8);
  EXPECT_DOUBLE_EQ(p.micro_radius, 10.0);  // default retained

  write_file("unknown.json", R"({"d_h": 25, "dh": 30})");
  EXPECT_THROW(bss::load_params(path("unknown.json")), std::invalid_argument);

  write_file("invalid.json", R"({"theta_cp": 0})");
  EXPECT_THROW(bss::load_params(path("invalid.json")), std::invalid_argument);

  write_file("broken.json", "{");
  EXPECT_THROW(bss::load_params(path("broken.json")), std::invalid_argument);
}

TEST_F(IoTest, GeneratorConfigJson) {
  write_file("gen.json",
             R"({"width": 80, "height": 60, "hotspots": 3, "seed": 42, "theta_cp": 0.85})");
  auto cfg = bss::load_generator_config(path("gen.json"));
  EXPECT_EQ(cfg.width, 80);
  EXPECT_EQ(cfg.height, 60);
  EXPECT_EQ(cfg.hotspots, 3);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_DOUBLE_EQ(cfg.params.coverage_threshold, 0.85);

  write_file("bad.json", R"({"width": 80, "hotspot_count": 3})");
  EXPECT_THROW(bss::load_generator_config(path("bad.json")), std::invalid_argument);
}

TEST(Generator, ZeroHotspotsMeansNoTraffic) {
  GeneratorConfig cfg;
  cfg.hotspots = 0;
  cfg.existing_stations = 0;
  auto inst = bss::generate_instance(cfg);
  EXPECT_TRUE(inst.cells.empty());
  EXPECT_EQ(inst.weak_cell_count(), 0);
}

TEST(Generator, DeterministicPerSeed) {
  GeneratorConfig cfg;
  cfg.seed = 777;
  auto a = bss::generate_instance(cfg);
  auto b = bss::generate_instance(cfg);
  EXPECT_TRUE(same_instance(a, b));

  cfg.seed = 778;
  auto c = bss::generate_instance(cfg);
  EXPECT_FALSE(same_instance(a, c));
}

TEST(Generator, PlacementRespectsSpacingAndWeakRule) {
  GeneratorConfig cfg;
  cfg.width = cfg.height = 120;
  cfg.hotspots = 8;
  cfg.existing_stations = 4;
  cfg.seed = 31337;
  auto inst = bss::generate_instance(cfg);

  for (std::size_t i = 0; i < inst.existing_stations.size(); ++i)
    for (std::size_t j = i + 1; j < inst.existing_stations.size(); ++j)
      EXPECT_GE(bss::distance(inst.existing_stations[i], inst.existing_stations[j]),
                cfg.params.min_distance);

  // Weakness is exactly "has traffic and no existing station reaches it".
  for (const GridCell& c : inst.cells) {
    bool reached = false;
    for (const GridPoint& s : inst.existing_stations)
      if (std::hypot(double(c.x - s.x), double(c.y - s.y)) <= cfg.params.macro_radius)
        reached = true;
    EXPECT_EQ(c.weak, !reached) << "(" << c.x << "," << c.y << ")";
    EXPECT_GT(c.traffic, 0.0);
  }
}

TEST(Generator, ImpossiblePlacementFails) {
  GeneratorConfig cfg;
  cfg.width = cfg.height = 3;
  cfg.existing_stations = 2;  // grid diameter < min_distance
  EXPECT_THROW(bss::generate_instance(cfg), std::runtime_error);
}

TEST(Regions, SamplesDistinctAndDeterministic) {
  GeneratorConfig cfg;
  cfg.width = cfg.height = 200;
  cfg.hotspots = 20;
  cfg.seed = 9;
  auto parent = bss::generate_instance(cfg);

  auto regions = bss::sample_regions(parent, 25, 50, 50, 123);
  ASSERT_EQ(regions.size(), 25u);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j)
      EXPECT_FALSE(regions[i].first.origin == regions[j].first.origin);
    EXPECT_LE(regions[i].first.origin.x + 50, parent.width);
    EXPECT_LE(regions[i].first.origin.y + 50, parent.height);
  }

  auto again = bss::sample_regions(parent, 25, 50, 50, 123);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    EXPECT_EQ(regions[i].first.origin, again[i].first.origin);
    EXPECT_TRUE(same_instance(regions[i].second, again[i].second));
  }
}

TEST(Regions, IdentityRegion) {
  GeneratorConfig cfg;
  cfg.width = cfg.height = 60;
  cfg.seed = 4;
  auto parent = bss::generate_instance(cfg);
  auto regions = bss::sample_regions(parent, 1, 60, 60, 5);
  ASSERT_EQ(regions.size(), 1u);
  EXPECT_EQ(regions[0].first.origin, (GridPoint{0, 0}));
  EXPECT_TRUE(same_instance(parent, regions[0].second));
}

TEST(Regions, TooManyRegionsRejected) {
  GeneratorConfig cfg;
  cfg.width = cfg.height = 60;
  auto parent = bss::generate_instance(cfg);
  EXPECT_THROW(bss::sample_regions(parent, 5, 60, 60, 1), std::invalid_argument);
  EXPECT_THROW(bss::sample_regions(parent, 1, 61, 60, 1), std::invalid_argument);
}

TEST(Regions, RebasedEvaluationMatchesParentSlice) {
  GeneratorConfig cfg;
  cfg.width = cfg.height = 150;
  cfg.hotspots = 15;
  cfg.existing_stations = 3;
  cfg.seed = 2718;
  auto parent = bss::generate_instance(cfg);
  auto regions = bss::sample_regions(parent, 5, 60, 60, 99);

  bss::Rng rng(555);
  for (const auto& [spec, sub] : regions) {
    Deployment d;
    for (int i = 0; i < 3; ++i)
      d.stations.push_back({rng.below_int(sub.width), rng.below_int(sub.height),
                            rng.chance(0.5) ? StationKind::Macro : StationKind::Micro});

    // Recompute coverage directly against the parent's cells in the region,
    // with the deployment translated back to parent coordinates.
    double covered = 0.0, total = 0.0;
    for (const GridCell& c : parent.cells) {
      if (c.x < spec.origin.x || c.x >= spec.origin.x + spec.width ||
          c.y < spec.origin.y || c.y >= spec.origin.y + spec.height || !c.weak)
        continue;
      total += c.traffic;
      bool hit = false;
      for (const bss::PlacedStation& s : d.stations) {
        bss::PlacedStation shifted{s.x + spec.origin.x, s.y + spec.origin.y, s.kind};
        if (oracle::point_in_disk(c.point(), shifted, parent.params)) hit = true;
      }
      if (hit) covered += c.traffic;
    }
    const double expected = total > 0.0 ? covered / total : 1.0;
    EXPECT_DOUBLE_EQ(bss::coverage_ratio(sub, d), expected);
  }
}

}  // namespace
