#include <gtest/gtest.h>

#include <random>
#include <set>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "viewnav/distance_field.hpp"
#include "viewnav/grid_io.hpp"
#include "viewnav/kinematics.hpp"

using namespace viewnav;

namespace {

std::set<std::size_t> as_set(const OccupancyGrid& g, const std::vector<CellIndex>& cells) {
  std::set<std::size_t> out;
  for (const auto& c : cells) out.insert(g.linear(c));
  return out;
}

Pose2D random_free_pose(std::mt19937_64& rng, const OccupancyGrid& g) {
  std::uniform_real_distribution<double> ux(g.origin().x, g.origin().x + g.width() * g.resolution());
  std::uniform_real_distribution<double> uy(g.origin().y, g.origin().y + g.height() * g.resolution());
  std::uniform_real_distribution<double> ut(-kPi, kPi);
  while (true) {
    const Point2 p{ux(rng), uy(rng)};
    if (!g.occupied(*g.cell_at(p))) return {p, ut(rng)};
  }
}

}  // namespace

TEST(Pose, HeadingIsNormalised) {
  EXPECT_DOUBLE_EQ(Pose2D(0, 0, 3 * kPi).theta, kPi);
  EXPECT_DOUBLE_EQ(Pose2D(0, 0, -kPi).theta, kPi);
  EXPECT_NEAR(Pose2D(0, 0, -3 * kPi / 2).theta, kPi / 2, 1e-12);
  EXPECT_NEAR(normalize_angle(7.0), 7.0 - 2 * kPi, 1e-12);
}

TEST(FovSector, RejectsBadShapes) {
  EXPECT_THROW(FovSector({}, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(FovSector({}, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(FovSector({}, 0.5, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(FovSector({}, kPi / 2, 1.0));
}

TEST(Grid, OutOfBoundsLookupThrows) {
  OccupancyGrid g({0, 0}, 0.1, 4, 3);
  EXPECT_THROW(g.occupied({4, 0}), std::out_of_range);
  EXPECT_THROW(g.occupied({0, -1}), std::out_of_range);
  EXPECT_FALSE(g.cell_at({0.45, 0.1}).has_value());
  EXPECT_EQ(*g.cell_at({0.35, 0.25}), (CellIndex{3, 2}));
}

TEST(Grid, WindowMarksOutsideOccupied) {
  OccupancyGrid g({0, 0}, 0.5, 4, 4);
  g.set_occupied({1, 1}, true);
  const auto w = g.window({0.25, 0.25}, 2.0);
  EXPECT_EQ(w.width(), 4);
  EXPECT_TRUE(w.occupied({0, 0}));  // left of the source grid
  EXPECT_TRUE(w.occupied({3, 3}));  // the obstacle at (1,1)
  EXPECT_FALSE(w.occupied({2, 2}));
}

TEST(CellsInFov, RangeShorterThanACell) {
  OccupancyGrid g({0, 0}, 1.0, 5, 5);
  const auto cells = cells_in_fov(g, FovSector({2.5, 2.5, 0.0}, kPi / 4, 0.4), true);
  ASSERT_LE(cells.size(), 1u);
  if (!cells.empty()) EXPECT_EQ(cells[0], (CellIndex{2, 2}));
}

TEST(CellsInFov, WallBlocksTarget) {
  OccupancyGrid g({0, 0}, 1.0, 10, 10);
  for (int r = 0; r < 10; ++r) g.set_occupied({5, r}, true);
  const FovSector fov({2.5, 5.5, 0.0}, kPi / 4, 6.0);
  const auto with = as_set(g, cells_in_fov(g, fov, true));
  const auto without = as_set(g, cells_in_fov(g, fov, false));
  EXPECT_EQ(with.count(g.linear({7, 5})), 0u);
  EXPECT_EQ(without.count(g.linear({7, 5})), 1u);
}

TEST(CellsInFov, MatchesBruteForceOnRandomSectors) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> half(0.1, kPi / 2), range(0.3, 1.2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = oracle::random_grid(rng, 10, 10, 0.2);
    const Pose2D apex = random_free_pose(rng, g);
    const double h = half(rng), r = range(rng);
    for (const bool occl : {false, true}) {
      const auto got = as_set(g, cells_in_fov(g, FovSector(apex, h, r), occl));
      ASSERT_EQ(got, oracle::fov_cells(g, apex, h, r, occl)) << "trial " << trial << " occl " << occl;
    }
  }
}

TEST(CellsInFov, OcclusionAwareIsSubset) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = oracle::random_grid(rng, 20, 20, 0.15);
    const FovSector fov(random_free_pose(rng, g), kPi / 4, 1.5);
    const auto a = as_set(g, cells_in_fov(g, fov, true));
    const auto b = as_set(g, cells_in_fov(g, fov, false));
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST(Raycast, ZeroLengthRayIsClear) {
  OccupancyGrid g({0, 0}, 0.1, 5, 5);
  EXPECT_FALSE(raycast(g, {0.25, 0.25}, {0.25, 0.25}).has_value());
}

TEST(Raycast, CorridorObstacle) {
  OccupancyGrid g({0, 0}, 1.0, 10, 1);
  g.set_occupied({6, 0}, true);
  EXPECT_EQ(*raycast(g, {0.5, 0.5}, {9.5, 0.5}), (CellIndex{6, 0}));
  EXPECT_FALSE(raycast(g, {0.5, 0.5}, {5.5, 0.5}).has_value());
}

TEST(Raycast, NearlyAxisAlignedRayIsBlocked) {
  // Cell centres computed two ways differ in the last bit, leaving a
  // direction component of ~1e-16.
  OccupancyGrid g({0, 0}, 0.1, 60, 60);
  g.set_occupied({31, 22}, true);
  const Point2 from{3.1500000000000004, 2.0500000000000003};
  for (const Point2 to : {g.cell_center({31, 25}), Point2{3.15, 2.55}, Point2{3.1500000000000008, 2.55}}) {
    EXPECT_EQ(raycast(g, from, to), (CellIndex{31, 22}));
    EXPECT_EQ(raycast(g, {from.y, from.x}, {to.y, to.x}), std::nullopt);
  }
  g.set_occupied({22, 31}, true);
  EXPECT_EQ(raycast(g, {2.0500000000000003, 3.1500000000000004}, {2.55, 3.15}), (CellIndex{22, 31}));
}

TEST(Raycast, OutOfBoundsEndpointThrows) {
  OccupancyGrid g({0, 0}, 1.0, 3, 3);
  EXPECT_THROW(raycast(g, {0.5, 0.5}, {3.5, 0.5}), std::out_of_range);
}

TEST(Raycast, MatchesExactSlabOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto g = oracle::random_grid(rng, 12, 12, 0.1);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    ASSERT_EQ(raycast(g, a, b), oracle::first_hit(g, a, b)) << "trial " << trial;
  }
}

TEST(Raycast, AgreesWithSupersampling) {
  // Dense sampling at resolution/10 can step over a corner sliver shorter
  // than its step; any disagreement must be such a sliver.
  std::mt19937_64 rng(22);
  std::size_t slivers = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto g = oracle::random_grid(rng, 12, 12, 0.1);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const double step = g.resolution() / 10;
    const auto hit = raycast(g, a, b);
    const auto sampled = oracle::first_hit_sampled(g, a, b, step);
    if (hit == sampled) continue;
    ASSERT_TRUE(hit.has_value());
    const auto span = oracle::segment_in_cell(g, *hit, a, b);
    ASSERT_TRUE(span.has_value());
    EXPECT_LT((span->second - span->first) * distance(a, b), step + 1e-12);
    ++slivers;
  }
  EXPECT_LT(slivers, 40u);
}

TEST(Raycast, SwappedEndpointsAgreeOnBlocking) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = oracle::random_grid(rng, 12, 12, 0.1);
    std::uniform_real_distribution<double> u(0.0, 1.2);
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    EXPECT_EQ(line_of_sight(g, a, b), line_of_sight(g, b, a));
  }
}

TEST(FovOverlap, SelfOverlapAndDisjoint) {
  OccupancyGrid g({0, 0}, 0.1, 40, 40);
  const FovSector a({2.0, 2.0, 0.0}, kPi / 4, 1.5);
  const std::vector<FovSector> same{a};
  EXPECT_EQ(fov_overlap_area(a, same, g, true), cells_in_fov(g, a, true).size());
  const std::vector<FovSector> away{FovSector({1.9, 2.0, kPi}, kPi / 4, 1.5)};
  EXPECT_EQ(fov_overlap_area(a, away, g, true), 0u);
  EXPECT_THROW(fov_overlap_area(a, std::vector<FovSector>{}, g, true), std::invalid_argument);
}

TEST(FovOverlap, SixtyDegreeFanMatchesSetArithmetic) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = oracle::random_grid(rng, 30, 30, 0.05);
    Pose2D p = random_free_pose(rng, g);
    std::vector<FovSector> fan;
    std::vector<Pose2D> poses;
    for (int k = 0; k < 3; ++k) {
      poses.emplace_back(p.x, p.y, p.theta + k * kPi / 3);
      fan.emplace_back(poses.back(), kPi / 4, 1.5);
    }
    const auto a = oracle::fov_cells(g, poses[0], kPi / 4, 1.5, true);
    std::set<std::size_t> rest;
    for (int k = 1; k < 3; ++k) {
      const auto s = oracle::fov_cells(g, poses[k], kPi / 4, 1.5, true);
      rest.insert(s.begin(), s.end());
    }
    std::size_t want = 0;
    for (const auto c : a) want += rest.count(c);
    const std::vector<FovSector> others{fan[1], fan[2]};
    const std::vector<FovSector> swapped{fan[2], fan[1]};
    EXPECT_EQ(fov_overlap_area(fan[0], others, g, true), want);
    EXPECT_EQ(fov_overlap_area(fan[0], swapped, g, true), want);
  }
}

TEST(Kinematics, StraightAndArc) {
  const Pose2D p = integrate_unicycle({0, 0, 0}, {1.0, 0.0}, 1.0);
  EXPECT_NEAR(p.x, 1.0, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
  const Pose2D q = integrate_unicycle({0, 0, 0}, {1.0, 1.0}, kPi);
  EXPECT_NEAR(q.x, 0.0, 1e-12);
  EXPECT_NEAR(q.y, 2.0, 1e-12);
  EXPECT_NEAR(std::abs(q.theta), kPi, 1e-12);
}

TEST(DistanceField, MatchesBruteForce) {
  std::mt19937_64 rng(41);
  const auto g = oracle::random_grid(rng, 25, 18, 0.05);
  const DistanceField f(g);
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) {
      double best = 1e18;
      for (int r2 = 0; r2 < g.height(); ++r2)
        for (int c2 = 0; c2 < g.width(); ++c2)
          if (g.occupied({c2, r2})) best = std::min(best, distance(g.cell_center({c, r}), g.cell_center({c2, r2})));
      ASSERT_NEAR(f.at({c, r}), best, 1e-9);
    }
}

TEST(GridIo, PgmRoundTrip) {
  std::mt19937_64 rng(51);
  const auto g = oracle::random_grid(rng, 17, 9, 0.3, 0.05);
  const auto dir = std::filesystem::temp_directory_path() / "viewnav_grid_io";
  std::filesystem::create_directories(dir);
  save_grid(g, dir / "g.yaml");
  const auto back = load_grid(dir / "g.yaml");
  EXPECT_EQ(back, g);

  // Top image row is the grid's highest row; occupied cells are black.
  std::ifstream in(dir / "g.pgm", std::ios::binary);
  int w = 0, h = 0;
  const auto px = read_pgm(in, w, h);
  ASSERT_EQ(w, 17);
  ASSERT_EQ(h, 9);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      EXPECT_EQ(px[static_cast<std::size_t>((h - 1 - r) * w + c)], g.occupied({c, r}) ? 0 : 254);
}

TEST(GridIo, HeaderLayout) {
  std::ostringstream out;
  const std::vector<std::uint8_t> px{0, 254, 254, 0};
  write_pgm(out, 2, 2, px);
  EXPECT_EQ(out.str(), std::string("P5\n2 2\n255\n") + std::string("\x00\xfe\xfe\x00", 4));
}
