#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "viewnav/centering.hpp"

using namespace viewnav;

namespace {

const CameraModel kCam{};

// 20 m x 20 m with no obstacles: clearance is large everywhere inside.
const DistanceField& open_field() {
  static const DistanceField f(OccupancyGrid({-10, -10}, 0.1, 200, 200));
  return f;
}

BoundingBoxState box_of(const Pose2D& pose, Point2 target) {
  BoundingBoxState b;
  b.center_u = oracle::reproject_u(pose, target, kCam);
  b.depth_estimate = distance(pose.position(), target);
  return b;
}

TrajectoryRollout constant(const Pose2D& start, Control u, std::size_t n, double h = 0.1) {
  const std::vector<Control> seq(n, u);
  return make_rollout(start, seq, h, open_field(), CollisionModel{});
}

}  // namespace

TEST(Camera, FovRelation) {
  EXPECT_NEAR(kCam.horizontal_fov(), 2 * std::atan(640.0 / 640.0), 1e-15);
  const auto c = CameraModel::from_horizontal_fov(640, 480, kPi / 2);
  EXPECT_NEAR(c.focal_px, 320.0, 1e-9);
  EXPECT_NEAR(kCam.pixel_of_bearing(kCam.bearing_of_pixel(123.0)), 123.0, 1e-9);
}

TEST(PredictBox, ZeroMotionIsIdentity) {
  const BoundingBoxState b{40, -3, 50, 60, 2.0};
  EXPECT_EQ(predict_box(b, {0, 0}, 0.1, kCam), b);
  EXPECT_THROW(predict_box({0, 0, 1, 1, 0.0}, {0.1, 0}, 0.1, kCam), std::invalid_argument);
}

TEST(PredictBox, PureRotationMatchesFiniteDifferenceReprojection) {
  // Turning left (omega > 0) moves a centred object to the right of the image.
  const Pose2D pose(0, 0, 0);
  const Point2 target{2, 0};
  const double h = 0.01, w = 0.5;
  const auto pred = predict_box(box_of(pose, target), {0, w}, h, kCam);
  const double truth = oracle::reproject_u(oracle::arc(pose, 0, w, h), target, kCam);
  EXPECT_NEAR(pred.center_u, truth, 1e-6);
  EXPECT_NEAR(pred.center_u, kCam.focal_px * w * h, 0.01);
  EXPECT_GT(pred.center_u, 0.0);
}

TEST(PredictBox, RandomControlsWithinFivePercentOfWidth) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1), depth(0.5, 5.0), hs(0.01, 0.1), th(-kPi, kPi);
  const double half_fov = kCam.horizontal_fov() / 2;
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const Pose2D pose(u(rng) * 3, u(rng) * 3, th(rng));
    const double bearing = u(rng) * half_fov, d = depth(rng);
    const Point2 target{pose.x + d * std::cos(pose.theta + bearing), pose.y + d * std::sin(pose.theta + bearing)};
    const Control c{u(rng), u(rng)};
    const double h = hs(rng);
    const auto pred = predict_box(box_of(pose, target), c, h, kCam);
    const double truth = oracle::reproject_u(oracle::arc(pose, c.v, c.omega, h), target, kCam);
    worst = std::max(worst, std::abs(pred.center_u - truth));
  }
  EXPECT_LT(worst, 0.05 * kCam.image_width);
}

TEST(OrientCost, StationaryIsZero) {
  EXPECT_EQ(orient_cost(constant({0, 0, 0}, {0, 0}, 10), {80, 0, 1, 1, 2}, kCam), 0.0);
}

TEST(OrientCost, HundredToFiftyPixels) {
  const double h = 0.1;
  const double w = (std::atan(50.0 / kCam.focal_px) - std::atan(100.0 / kCam.focal_px)) / h;
  const auto r = constant({0, 0, 0}, {0, w}, 1, h);
  EXPECT_NEAR(orient_cost(r, {100, 0, 10, 10, 2.0}, kCam), 2500.0 - 10000.0, 1e-6);
}

TEST(OrientCost, Telescopes) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const BoundingBoxState box{u(rng) * 300, 0, 20, 20, 1.0 + std::abs(u(rng)) * 3};
    const auto r = constant({0, 0, 0}, {0.5 * std::abs(u(rng)), u(rng)}, 10);
    BoundingBoxState b = box;
    for (const auto& c : r.controls) b = predict_box(b, c, r.h, kCam);
    const double want = b.center_u * b.center_u - box.center_u * box.center_u;
    EXPECT_NEAR(orient_cost(r, box, kCam), want, 1e-6 * std::max(1.0, std::abs(want)));
  }
}

TEST(ZoomCost, Examples) {
  const ZoomParams z{0.5, 3.0};
  EXPECT_NEAR(zoom_cost(0.5, 0.0, 0.1, 2.0, z), -0.025, 1e-15);
  EXPECT_EQ(zoom_cost(0.5, kPi, 0.1, 2.0, z), 0.0);
  EXPECT_EQ(zoom_cost(0.5, 0.0, 0.1, 0.4, z), 0.0);
  EXPECT_THROW((ZoomParams{1.0, 1.0}).validate(), std::invalid_argument);
  EXPECT_THROW((ZoomParams{0.0, 1.0}).validate(), std::invalid_argument);
}

TEST(ZoomCost, NeverPositive) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  const ZoomParams z{1.0, 3.0};
  for (int t = 0; t < 1000; ++t) {
    const double v = u(rng), th = u(rng) * 2, d = std::abs(u(rng)) * 3;
    const double c = zoom_cost(v, th, 0.1, d, z);
    EXPECT_LE(c, 0.0);
    if (v <= 0 || std::cos(th) <= 0 || d <= z.d_thresh) EXPECT_EQ(c, 0.0);
  }
}

TEST(Rollout, SurvivalNonIncreasing) {
  OccupancyGrid g({0, 0}, 0.05, 60, 60);
  for (int r = 0; r < 60; ++r) g.set_occupied({40, r}, true);
  const DistanceField f(g);
  const std::vector<Control> seq(10, Control{0.5, 0.2});
  const auto r = make_rollout({1.4, 1.5, 0.0}, seq, 0.1, f, CollisionModel{});
  ASSERT_EQ(r.poses.size(), 11u);
  ASSERT_EQ(r.survival.size(), 10u);
  for (std::size_t i = 1; i < r.survival.size(); ++i) EXPECT_LE(r.survival[i], r.survival[i - 1]);
  EXPECT_LT(r.survival.back(), 1.0);
}

TEST(RolloutCost, StationaryCostsNothing) {
  const auto r = constant({0, 0, 0}, {0, 0}, 10);
  EXPECT_EQ(rollout_cost(r, {3, 0, 0}, std::nullopt, kCam, CostWeights{}, ZoomParams{}), 0.0);
  const BoundingBoxState centred{0, 0, 10, 10, 2.0};
  EXPECT_EQ(rollout_cost(r, {3, 0, 0}, centred, kCam, CostWeights{}, ZoomParams{}),
            rollout_cost(r, {3, 0, 0}, std::nullopt, kCam, CostWeights{}, ZoomParams{}));
}

TEST(RolloutCost, ProgressOnlyWithoutBox) {
  CostWeights w;
  w.action_v = w.action_omega = 0.0;
  const auto r = constant({0, 0, 0}, {0.5, 0}, 10);
  EXPECT_NEAR(rollout_cost(r, {3, 0, 0}, std::nullopt, kCam, w, ZoomParams{}), -0.5, 1e-12);
  // A centred box adds only the approach reward.
  const double with = rollout_cost(r, {3, 0, 0}, BoundingBoxState{0, 0, 10, 10, 2.5}, kCam, w, ZoomParams{});
  EXPECT_LT(with, -0.5);
}

TEST(SelectControl, GoalStraightAhead) {
  const auto c = select_control({0, 0, 0}, std::nullopt, {3, 0, 0}, open_field(), kCam, PlannerConfig{});
  EXPECT_FALSE(c.fallback);
  EXPECT_GT(c.control.v, 0.0);
  EXPECT_EQ(c.control.omega, 0.0);
}

TEST(SelectControl, FullyBlockedRotatesInPlace) {
  OccupancyGrid g({0, 0}, 0.05, 20, 20);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 20; ++c)
      if (std::abs(r - 10) > 1 || std::abs(c - 10) > 1) g.set_occupied({c, r}, true);
  const DistanceField f(g);
  const auto c = select_control({0.525, 0.525, 0}, std::nullopt, {0.525, 0.9, 0}, f, kCam, PlannerConfig{});
  EXPECT_TRUE(c.fallback);
  EXPECT_EQ(c.control.v, 0.0);
  EXPECT_GT(c.control.omega, 0.0);
}

TEST(SelectControl, TurnsTowardBoxAndReducesError) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> b(0.1, 0.7), d(1.0, 3.0);
  for (int t = 0; t < 50; ++t) {
    const Pose2D pose(0, 0, 0);
    const double bearing = (t % 2 ? 1 : -1) * b(rng), dist = d(rng);
    const Point2 target{dist * std::cos(bearing), dist * std::sin(bearing)};
    const auto box = box_of(pose, target);
    const auto c = select_control(pose, box, pose, open_field(), kCam, PlannerConfig{});
    // Object to the right (u > 0) needs a right turn (omega < 0).
    EXPECT_LT(c.control.omega * box.center_u, 0.0);
    const Pose2D next = oracle::arc(pose, c.control.v, c.control.omega, 0.1);
    EXPECT_LT(std::abs(oracle::reproject_u(next, target, kCam)), std::abs(box.center_u));
  }
}

TEST(SelectControl, ConvergesBelowTenPixels) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> b(-0.7, 0.7), d(1.0, 3.0), th(-kPi, kPi);
  for (int t = 0; t < 30; ++t) {
    Pose2D pose(0, 0, th(rng));
    const double dist = d(rng), bearing = b(rng);
    const Point2 target{dist * std::cos(pose.theta + bearing), dist * std::sin(pose.theta + bearing)};
    const Pose2D hold = pose;
    double err = 1e9;
    for (int step = 0; step < 100 && err >= 10.0; ++step) {
      const auto box = box_of(pose, target);
      const auto c = select_control(pose, box, hold, open_field(), kCam, PlannerConfig{});
      pose = oracle::arc(pose, c.control.v, c.control.omega, 0.1);
      err = std::abs(oracle::reproject_u(pose, target, kCam));
    }
    EXPECT_LT(err, 10.0) << "start " << t;
  }
}

TEST(SelectControl, SerialAndParallelAgree) {
  OccupancyGrid g({0, 0}, 0.05, 80, 80);
  for (int r = 30; r < 50; ++r) g.set_occupied({50, r}, true);
  const DistanceField f(g);
  PlannerConfig cfg;
  const auto lattice = cfg.control_lattice();
  EXPECT_EQ(lattice.size(), 77u);
  const BoundingBoxState box{60, 0, 10, 10, 1.5};
  std::vector<bool> a, b;
  const auto s = score_lattice({1, 2, 0.2}, box, {3, 2, 0}, f, kCam, cfg, lattice, &a, Execution::serial);
  const auto p = score_lattice({1, 2, 0.2}, box, {3, 2, 0}, f, kCam, cfg, lattice, &b, Execution::parallel);
  EXPECT_EQ(s, p);
  EXPECT_EQ(a, b);
}
