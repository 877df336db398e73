#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "viewnav/bench/suite.hpp"
#include "viewnav/sim/detector.hpp"

using namespace viewnav;

namespace {

std::vector<Point4> blobs(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::normal_distribution<double> d(0.0, 0.35);
  std::vector<Point4> centres(1 + rng() % 4);
  for (auto& c : centres)
    for (auto& x : c) x = u(rng);
  std::vector<Point4> pts(n);
  for (auto& p : pts) {
    if (rng() % 5 == 0) {
      for (auto& x : p) x = u(rng);
    } else {
      const auto& c = centres[rng() % centres.size()];
      for (int k = 0; k < 4; ++k) p[k] = c[k] + d(rng);
    }
  }
  return pts;
}

double dist4(const Point4& a, const Point4& b) {
  double s = 0;
  for (int k = 0; k < 4; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// Same core flags, same noise set, same partition of core points; border
// points sit in the cluster of some core neighbour.
void expect_equivalent(const std::vector<Point4>& pts, const DbscanResult& got, const oracle::NaiveDbscan& want,
                       double eps) {
  const std::size_t n = pts.size();
  ASSERT_EQ(got.labels.size(), n);
  std::map<int, int> map_label;
  for (std::size_t i = 0; i < n; ++i) {
    ASSERT_EQ(got.core[i], want.core[i]) << i;
    ASSERT_EQ(got.labels[i] == kNoise, want.labels[i] == -1) << i;
    if (!want.core[i]) continue;
    const auto [it, fresh] = map_label.emplace(want.labels[i], got.labels[i]);
    ASSERT_EQ(it->second, got.labels[i]) << "core partition differs at " << i;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (want.core[i] || got.labels[i] == kNoise) continue;
    bool reached = false;
    for (std::size_t j = 0; j < n; ++j)
      reached = reached || (got.core[j] && got.labels[j] == got.labels[i] && dist4(pts[i], pts[j]) <= eps);
    ASSERT_TRUE(reached) << "border point " << i;
  }
  EXPECT_EQ(got.cluster_count, static_cast<int>(map_label.size()));
}

ViewpointCluster random_cluster(std::mt19937_64& rng, const OccupancyGrid& g) {
  std::uniform_real_distribution<double> ux(0.3, g.width() * g.resolution() - 0.3);
  std::uniform_real_distribution<double> ut(-kPi, kPi);
  ViewpointCluster c;
  const std::size_t n = 1 + rng() % 10;
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  while (c.members.size() < n) {
    const Point2 p{ux(rng), ux(rng)};
    if (g.occupied(*g.cell_at(p))) continue;
    // Snap headings to eighths so equal-overlap ties actually happen.
    const double th = rng() % 2 ? std::round(ut(rng) / (kPi / 4)) * (kPi / 4) : ut(rng);
    c.members.push_back({ids[c.members.size()], Pose2D(p, th), 0.5});
  }
  if (rng() % 4 == 0 && n > 1) c.members[1].pose = c.members[0].pose;  // duplicates
  return c;
}

}  // namespace

TEST(Lift, CardinalHeadingsAndWrap) {
  const auto a = lift(3, {1, 2, 0.0}, 2.0);
  EXPECT_EQ(a.source, 3);
  EXPECT_EQ(a.coords, (Point4{1, 2, 2.0, 0.0}));
  const auto b = lift(0, {1, 2, kPi}, 2.0);
  EXPECT_NEAR(b.coords[2], -2.0, 1e-15);
  EXPECT_NEAR(b.coords[3], 0.0, 1e-15);
  const auto c = lift(0, {1, 2, -kPi}, 2.0);
  EXPECT_EQ(b.coords, c.coords);
  const auto d = lift(0, {0, 0, 0.7});
  EXPECT_NEAR(d.coords[2] * d.coords[2] + d.coords[3] * d.coords[3], 1.0, 1e-9);
}

TEST(Dbscan, IdenticalPointsFormOneCluster) {
  const std::vector<Point4> pts(7, Point4{1, 1, 1, 1});
  const auto r = dbscan(pts, 0.1, 7);
  EXPECT_EQ(r.cluster_count, 1);
  for (const int l : r.labels) EXPECT_EQ(l, 0);
}

TEST(Dbscan, SinglePointIsNoise) {
  const std::vector<Point4> pts{Point4{0, 0, 0, 0}};
  const auto r = dbscan(pts, 1.0, 2);
  EXPECT_EQ(r.labels[0], kNoise);
  EXPECT_EQ(r.cluster_count, 0);
}

TEST(Dbscan, MatchesNaiveReference) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto pts = blobs(rng, 1 + rng() % 200);
    const double eps = 0.4 + 0.1 * (rng() % 6);
    const std::size_t min_pts = 1 + rng() % 6;
    const auto want = oracle::naive_dbscan(pts, eps, min_pts);
    const auto serial = dbscan(pts, eps, min_pts, Execution::serial);
    expect_equivalent(pts, serial, want, eps);
    const auto par = dbscan(pts, eps, min_pts, Execution::parallel);
    EXPECT_EQ(par.labels, serial.labels);
    EXPECT_EQ(par.core, serial.core);
  }
}

TEST(Dbscan, PartitionStableUnderPermutation) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    auto pts = blobs(rng, 120);
    const auto a = dbscan(pts, 0.6, 3);
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Point4> shuffled(pts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = pts[perm[i]];
    const auto b = dbscan(shuffled, 0.6, 3);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      EXPECT_EQ(b.core[i], a.core[perm[i]]);
      EXPECT_EQ(b.labels[i] == kNoise, a.labels[perm[i]] == kNoise);
    }
  }
}

TEST(Dbscan, Validation) {
  const std::vector<Point4> pts(3, Point4{});
  EXPECT_THROW(dbscan(pts, 0.0, 2), std::invalid_argument);
  EXPECT_THROW(dbscan(pts, 1.0, 0), std::invalid_argument);
}

TEST(BestGuess, SingletonAndDuplicates) {
  OccupancyGrid g({0, 0}, 0.1, 40, 40);
  const FovParams fov;
  ViewpointCluster one{0, {{9, {2, 2, 0}, 1.0}}};
  EXPECT_EQ(best_guess(one, g, fov).id, 9);
  ViewpointCluster two{0, {{5, {2, 2, 0}, 1.0}, {3, {2, 2, 0}, 0.1}}};
  EXPECT_EQ(best_guess(two, g, fov).id, 3);
  EXPECT_THROW(best_guess(ViewpointCluster{}, g, fov), std::invalid_argument);
}

TEST(BestGuess, FivePosesMatchExhaustiveEvaluation) {
  OccupancyGrid g({0, 0}, 0.1, 50, 50);
  for (int r = 20; r < 30; ++r) g.set_occupied({30, r}, true);
  ViewpointCluster c;
  NodeId id = 0;
  for (const double x : {1.0, 1.5, 2.0})
    for (const double y : {2.0, 2.5}) {
      if (c.members.size() == 5) break;
      c.members.push_back({id++, Pose2D(x, y, 0.3 * id), 0.5});
    }
  const FovParams fov{kPi / 4, 3.0, true};
  EXPECT_EQ(best_guess(c, g, fov).id, c.members[oracle::best_guess_index(c, g, fov)].id);
}

TEST(BestGuess, RandomClustersMatchExhaustiveEvaluation) {
  std::mt19937_64 rng(9);
  const FovParams fov{kPi / 4, 1.2, true};
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::random_grid(rng, 30, 30, 0.08);
    const auto c = random_cluster(rng, g);
    const auto& got = best_guess(c, g, fov, t % 2 ? Execution::parallel : Execution::serial);
    EXPECT_EQ(got.id, c.members[oracle::best_guess_index(c, g, fov)].id) << "cluster " << t;
  }
}

TEST(InitialViewpoint, DenseClusterWins) {
  const SyntheticEmbeddingProvider p(64);
  OccupancyGrid g({0, 0}, 0.1, 60, 60);
  Vlpg graph(1.0);
  // Five similar views of the oven near (1, 1) and scattered weak views.
  for (int i = 0; i < 5; ++i)
    graph.record_node({1.0 + 0.1 * i, 1.0, 0.05 * i}, p.embed_image({{{"oven", 0.5 - 0.02 * i}}}), i);
  graph.record_node({5, 5, 2.0}, p.embed_image({{{"oven", 0.05}, {"sofa", 0.5}}}), 6);
  graph.record_node({4, 1, -2.0}, p.embed_image({{{"oven", 0.06}, {"lamp", 0.5}}}), 7);
  ViewpointConfig cfg;
  const auto plan = initial_viewpoint(graph, "oven", p, g, cfg);
  ASSERT_TRUE(plan.has_prior());
  EXPECT_LT(plan.best->id, 5);
  for (const auto& m : plan.chosen_cluster().members) EXPECT_LT(m.id, 5);
}

TEST(InitialViewpoint, AllBackgroundHasNoPrior) {
  const SyntheticEmbeddingProvider p(64);
  OccupancyGrid g({0, 0}, 0.1, 20, 20);
  Vlpg graph(1.0);
  for (int i = 0; i < 5; ++i) graph.record_node({0.2 * i, 0, 0}, p.embed_image({}), i);
  const auto plan = initial_viewpoint(graph, "oven", p, g, ViewpointConfig{});
  EXPECT_FALSE(plan.has_prior());
  EXPECT_TRUE(plan.candidates.empty());
}

TEST(InitialViewpoint, ScalingScoresKeepsChoice) {
  std::mt19937_64 rng(10);
  OccupancyGrid g({0, 0}, 0.1, 60, 60);
  Vlpg graph(1.0);
  std::uniform_real_distribution<double> u(0.5, 5.5), th(-kPi, kPi), s(0.1, 1.0);
  std::vector<NodeScore> scores;
  for (int i = 0; i < 40; ++i) {
    const double x = i < 20 ? 1.0 + 0.05 * i : u(rng);
    graph.record_node({x, i < 20 ? 1.0 : u(rng), i < 20 ? 0.0 : th(rng)}, EmbeddingVector({1.0, double(i)}), i);
    scores.push_back({i, s(rng), 0.0, false});
  }
  const auto base = plan_from_scores(graph, scores, g, ViewpointConfig{});
  auto scaled = scores;
  for (auto& x : scaled) x.positive *= 3.7;
  const auto other = plan_from_scores(graph, scaled, g, ViewpointConfig{});
  ASSERT_TRUE(base.has_prior());
  EXPECT_EQ(base.best->id, other.best->id);
  EXPECT_EQ(base.labels, other.labels);
}

TEST(InitialViewpoint, TwoPlantsInTheHouse) {
  const auto world = sim::WorldModel::load(std::string(VIEWNAV_WORLDS) + "/house2br/house2br.json");
  ASSERT_GE(world.instances_of("plant").size(), 2u);
  const auto cfg = sim::default_config();
  const SyntheticEmbeddingProvider p(cfg.embedding.dimension, cfg.embedding.background_weight);
  const Vlpg graph = bench::build_vlpg(world, cfg, p);
  const auto plan = initial_viewpoint(graph, "plant", p, world.grid(), cfg.viewpoint);
  ASSERT_TRUE(plan.has_prior());
  bool sees_one = false;
  for (const auto i : world.instances_of("plant"))
    sees_one = sees_one || !sim::visible_cells(world, cfg.fov.at(plan.best->pose), i).empty();
  EXPECT_TRUE(sees_one);
}
