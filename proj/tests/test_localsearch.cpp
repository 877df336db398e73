#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "viewnav/localsearch.hpp"

using namespace viewnav;

namespace {

OccupancyGrid room(int w = 40, int h = 40, double res = 0.1) {
  OccupancyGrid g({0, 0}, res, w, h);
  for (int c = 0; c < w; ++c) {
    g.set_occupied({c, 0}, true);
    g.set_occupied({c, h - 1}, true);
  }
  for (int r = 0; r < h; ++r) {
    g.set_occupied({0, r}, true);
    g.set_occupied({w - 1, r}, true);
  }
  return g;
}

// Direct evaluation of the three cost terms.
double cost_oracle(const ProbabilityMap& m, const Pose2D& s, const Pose2D& robot, const DistanceField& f,
                   const SearchConfig& cfg) {
  const double dt = normalize_angle(s.theta - robot.theta);
  const double dist = (s.x - robot.x) * (s.x - robot.x) + (s.y - robot.y) * (s.y - robot.y) + dt * dt;
  const FovSector view = cfg.fov.at(s);
  const double res = m.geometry.resolution();
  const int span = static_cast<int>(std::ceil(cfg.fov.range / res)) + 2;
  const CellIndex mid = m.geometry.lattice_cell(s.position());
  double sector = 0;
  for (int r = mid.row - span; r <= mid.row + span; ++r)
    for (int c = mid.col - span; c <= mid.col + span; ++c) sector += view.contains(m.geometry.cell_center({c, r}));
  double seen = 0;
  for (const auto i : oracle::fov_cells(m.geometry, s, cfg.fov)) seen += 1.0 - m.p_nl[i];
  const double d = f.clearance(s.position());
  return cfg.w_d * dist + cfg.w_q * (sector - seen) + cfg.w_obs * std::exp(-d * d);
}

class MockAgent : public SearchAgent {
 public:
  explicit MockAgent(std::size_t found_on) : found_on_(found_on) {}
  Pose2D pose() const override { return pose_; }
  NavResult navigate_to(const Pose2D& target) override {
    ++calls;
    pose_ = target;
    return NavResult::arrived;
  }
  bool detect() override { return calls == found_on_; }
  std::size_t calls = 0;

 private:
  Pose2D pose_{2, 2, 0};
  std::size_t found_on_;
};

}  // namespace

TEST(ProbabilityMap, Init) {
  OccupancyGrid g({0, 0}, 0.1, 3, 2);
  g.set_occupied({1, 1}, true);
  const auto m = init_probability_map(g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(m.p_nl[i], i == g.linear({1, 1}) ? 1.0 : 0.9);
  EXPECT_DOUBLE_EQ(m.p_l({0, 0}), 0.1);
}

TEST(ClusterViews, OneAndTwoViews) {
  const OccupancyGrid g({0, 0}, 0.1, 30, 30);
  const FovParams fov{kPi / 4, 1.0, true};
  const Pose2D a(0.05, 1.55, 0);
  const CellIndex probe = g.cell_at({0.55, 1.55}).value();
  auto one = init_probability_map(g);
  apply_cluster_views(one, std::vector<Pose2D>{a}, g, fov, 0.5);
  EXPECT_DOUBLE_EQ(one.at(probe), 0.45);
  auto two = init_probability_map(g);
  apply_cluster_views(two, std::vector<Pose2D>{a, Pose2D(0.05, 1.55, 0.1)}, g, fov, 0.5);
  EXPECT_DOUBLE_EQ(two.at(probe), 0.225);
  EXPECT_EQ(two.at({29, 29}), 0.9);
}

TEST(ClusterViews, OccupiedCellsStayOne) {
  OccupancyGrid g({0, 0}, 0.1, 30, 30);
  g.set_occupied({10, 15}, true);
  auto m = init_probability_map(g);
  apply_cluster_views(m, std::vector<Pose2D>{Pose2D(0.55, 1.55, 0)}, g, FovParams{}, 0.5);
  EXPECT_EQ(m.at({10, 15}), 1.0);
  EXPECT_THROW(apply_cluster_views(m, {}, g, FovParams{}, 1.0), std::invalid_argument);
  EXPECT_THROW(apply_cluster_views(m, {}, g, FovParams{}, 0.0), std::invalid_argument);
}

TEST(ClusterViews, RandomMapsMatchCellwiseOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 2), th(-kPi, kPi), p(0.05, 0.95);
  const FovParams fov{kPi / 4, 1.5, true};
  for (int t = 0; t < 40; ++t) {
    const auto g = oracle::random_grid(rng, 20, 20, 0.15);
    std::vector<Pose2D> views;
    for (int k = 0; k < 1 + t % 5; ++k) views.emplace_back(u(rng), u(rng), th(rng));
    const double ps = p(rng);
    auto m = init_probability_map(g);
    apply_cluster_views(m, views, g, fov, ps);
    const auto want = oracle::cluster_view_map(g, views, fov, ps);
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_NEAR(m.p_nl[i], want[i], 1e-12) << t << " " << i;

    auto shuffled = views;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto m2 = init_probability_map(g);
    apply_cluster_views(m2, shuffled, g, fov, ps, Execution::parallel);
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_NEAR(m2.p_nl[i], m.p_nl[i], 1e-12);
  }
}

TEST(Decay, ShrinksLikelihoodInsideView) {
  const OccupancyGrid g({0, 0}, 0.1, 30, 30);
  auto m = init_probability_map(g);
  std::fill(m.p_nl.begin(), m.p_nl.end(), 0.225);
  const FovSector view({0.05, 1.55, 0}, kPi / 4, 1.0);
  decay_viewed_region(m, view, 0.2);
  EXPECT_NEAR(m.p_l(g.cell_at({0.55, 1.55}).value()), 0.155, 1e-12);
  EXPECT_EQ(m.at({29, 29}), 0.225);
  EXPECT_THROW(decay_viewed_region(m, view, 1.0), std::invalid_argument);
  EXPECT_THROW(decay_viewed_region(m, view, -0.1), std::invalid_argument);
}

TEST(Decay, RepeatedDecayIsGeometric) {
  const OccupancyGrid g({0, 0}, 0.1, 30, 30);
  auto m = init_probability_map(g);
  const FovSector view({0.05, 1.55, 0}, kPi / 4, 1.0);
  const CellIndex probe = g.cell_at({0.55, 1.55}).value();
  for (int k = 1; k <= 6; ++k) {
    decay_viewed_region(m, view, 0.3);
    EXPECT_NEAR(m.p_l(probe), 0.1 * std::pow(0.3, k), 1e-14);
  }
}

TEST(Sampling, SingleFreeCell) {
  OccupancyGrid g({0, 0}, 0.1, 5, 5);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) g.set_occupied({c, r}, !(c == 2 && r == 3));
  const auto m = init_probability_map(g);
  const Pose2D robot(0.1, 0.1, 0.3);
  const auto s = sample_viewpoints(m, robot, 8, 7);
  ASSERT_EQ(s.size(), 9u);
  EXPECT_EQ(s[0], robot);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_EQ(s[i].position(), g.cell_center({2, 3}));
  EXPECT_THROW(sample_viewpoints(m, robot, 0, 7), std::invalid_argument);
  EXPECT_THROW(sample_viewpoints(m, robot, 8, 7, 1.0), std::runtime_error);
}

TEST(Sampling, DeterministicAndFree) {
  const auto g = room();
  const DistanceField f(g);
  auto m = init_probability_map(g);
  apply_cluster_views(m, std::vector<Pose2D>{Pose2D(1, 1, 0.7)}, g, FovParams{}, 0.5);
  const auto a = sample_viewpoints(m, {2, 2, 0}, 64, 11, 0.25);
  EXPECT_EQ(a, sample_viewpoints(m, {2, 2, 0}, 64, 11, 0.25));
  EXPECT_NE(a, sample_viewpoints(m, {2, 2, 0}, 64, 12, 0.25));
  const Point2 centre = likelihood_centroid(m).value();
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto c = g.cell_at(a[i].position()).value();
    EXPECT_FALSE(g.occupied(c));
    EXPECT_GE(f.clearance(a[i].position()), 0.25);
    EXPECT_NEAR(normalize_angle(a[i].theta - std::atan2(centre.y - a[i].y, centre.x - a[i].x)), 0.0, 1e-12);
  }
}

TEST(Sampling, FacesMassWithinRange) {
  const OccupancyGrid g({0, 0}, 0.1, 60, 20);
  auto m = init_probability_map(g);
  // Mass at both ends of a 6 m corridor: a 2 m camera at one end sees only its own.
  std::fill(m.p_nl.begin(), m.p_nl.end(), 1.0);
  for (int r = 0; r < 20; ++r) {
    m.p_nl[g.linear({1, r})] = 0.1;
    m.p_nl[g.linear({58, r})] = 0.05;
  }
  EXPECT_NEAR(likelihood_centroid(m, {0.15, 1.0}, 2.0)->x, 0.15, 1e-12);
  EXPECT_FALSE(likelihood_centroid(m, {3.0, 1.0}, 0.5).has_value());
  const Point2 global = likelihood_centroid(m).value();
  const auto s = sample_viewpoints(m, {3, 1, 0}, 64, 3, 0.0, 2.0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto local = likelihood_centroid(m, s[i].position(), 2.0);
    const Point2 t = local.value_or(global);
    EXPECT_NEAR(normalize_angle(s[i].theta - std::atan2(t.y - s[i].y, t.x - s[i].x)), 0.0, 1e-12);
    if (s[i].x > 0.5 && s[i].x < 2.0) EXPECT_LT(std::cos(s[i].theta), 0.0);
    if (s[i].x > 4.0 && s[i].x < 5.5) EXPECT_GT(std::cos(s[i].theta), 0.0);
  }
}

TEST(Replan, NearerSampleWinsOnFlatMap) {
  const OccupancyGrid g({0, 0}, 0.1, 60, 60);
  auto m = init_probability_map(g);
  std::fill(m.p_nl.begin(), m.p_nl.end(), 1.0);
  const DistanceField f(g);
  const Pose2D robot(3.05, 3.05, 0);
  const std::vector<Pose2D> s{{3.85, 3.05, 0}, {3.25, 3.05, 0}, {2.45, 3.05, 0}};
  const auto c = replan_viewpoint(m, s, robot, f, SearchConfig{});
  EXPECT_EQ(c.index, 1u);
  EXPECT_NEAR(c.costs[1].distance, 0.2 * 0.2, 1e-12);
}

TEST(Replan, ObstacleTermBounds) {
  const auto g = room();
  const DistanceField f(g);
  const auto m = init_probability_map(g);
  const Pose2D robot(2, 2, 0);
  const auto wall = viewpoint_cost(m, {0.1, 2, 0}, robot, f, SearchConfig{});
  const auto open = viewpoint_cost(m, {2, 2, 0}, robot, f, SearchConfig{});
  const double d = f.clearance({0.1, 2});
  EXPECT_NEAR(wall.obstacle, std::exp(-d * d), 1e-15);
  EXPECT_GT(wall.obstacle, 0.99);
  EXPECT_LT(open.obstacle, wall.obstacle);
  EXPECT_GT(open.obstacle, 0.0);
  EXPECT_EQ(open.distance, 0.0);
}

TEST(Replan, MatchesIndependentEvaluator) {
  std::mt19937_64 rng(3);
  const SearchConfig cfg;
  for (int t = 0; t < 20; ++t) {
    const auto g = oracle::random_grid(rng, 60, 60, 0.1);
    const DistanceField f(g);
    auto m = init_probability_map(g);
    // The robot stands on a free cell; from inside an obstacle nothing is visible.
    CellIndex home{30, 30};
    while (g.occupied(home)) ++home.col;
    const Pose2D robot(g.cell_center(home), 0.4);
    apply_cluster_views(m, std::vector<Pose2D>{Pose2D(2, 3, 0.2), Pose2D(4, 4, -2)}, g, cfg.fov, cfg.p_l_star);
    const auto samples = sample_viewpoints(m, robot, 20, static_cast<std::uint64_t>(t));
    const auto c = replan_viewpoint(m, samples, robot, f, cfg);
    std::size_t best = 0;
    std::vector<double> want(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      want[i] = cost_oracle(m, samples[i], robot, f, cfg);
      EXPECT_NEAR(c.costs[i].total, want[i], 1e-9);
      if (want[i] < want[best] - 1e-9) best = i;
    }
    EXPECT_NEAR(want[c.index], want[best], 1e-9);
    EXPECT_EQ(c.pose, samples[c.index]);
    const auto par = replan_viewpoint(m, samples, robot, f, cfg, Execution::parallel);
    EXPECT_EQ(par.index, c.index);
  }
}

TEST(Replan, WeightScalingKeepsChoice) {
  std::mt19937_64 rng(4);
  const auto g = oracle::random_grid(rng, 60, 60, 0.1);
  const DistanceField f(g);
  const auto m = init_probability_map(g);
  const Pose2D robot(3, 3, 0);
  const auto samples = sample_viewpoints(m, robot, 64, 5);
  SearchConfig cfg;
  const auto a = replan_viewpoint(m, samples, robot, f, cfg);
  cfg.w_d *= 4;
  cfg.w_q *= 4;
  cfg.w_obs *= 4;
  EXPECT_EQ(replan_viewpoint(m, samples, robot, f, cfg).index, a.index);
  EXPECT_THROW(replan_viewpoint(m, {}, robot, f, cfg), std::invalid_argument);
}

TEST(SearchLoop, FoundAfterFirstIteration) {
  const auto g = room();
  const DistanceField f(g);
  auto m = init_probability_map(g);
  MockAgent agent(1);
  std::size_t seen = 0;
  const auto out = local_search_loop(m, agent, f, SearchConfig{}, 1,
                                     [&](const SearchIteration& it, const ProbabilityMap&) {
                                       ++seen;
                                       EXPECT_EQ(it.iteration, seen);
                                     });
  EXPECT_TRUE(out.found);
  EXPECT_EQ(out.replans, 1u);
  EXPECT_EQ(seen, 1u);
}

TEST(SearchLoop, ExhaustsAfterMaxReplans) {
  const auto g = room();
  const DistanceField f(g);
  auto m = init_probability_map(g);
  MockAgent agent(99);
  SearchConfig cfg;
  cfg.max_replans = 3;
  const auto out = local_search_loop(m, agent, f, cfg, 1);
  EXPECT_FALSE(out.found);
  EXPECT_EQ(out.replans, 3u);
  EXPECT_EQ(agent.calls, 3u);
  cfg.decay = 1.0;
  EXPECT_THROW(local_search_loop(m, agent, f, cfg, 1), std::invalid_argument);
}
