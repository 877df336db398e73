// Serial reference vs OpenMP for the hot kernels. The second argument of
// each benchmark selects the policy: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "viewnav/centering.hpp"
#include "viewnav/dbscan.hpp"
#include "viewnav/localsearch.hpp"
#include "viewnav/pose_graph.hpp"
#include "viewnav/viewpoint.hpp"

using namespace viewnav;

namespace {

Execution policy(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

OccupancyGrid cluttered(int side, std::uint64_t seed) {
  OccupancyGrid g({0, 0}, 0.05, side, side);
  std::mt19937_64 rng(seed);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c)
      if (r == 0 || c == 0 || r == side - 1 || c == side - 1 || rng() % 12 == 0) g.set_occupied({c, r}, true);
  return g;
}

std::vector<Pose2D> free_poses(const OccupancyGrid& g, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, g.width() * g.resolution() - 0.1), th(-kPi, kPi);
  std::vector<Pose2D> out;
  while (out.size() < n) {
    const Point2 p{u(rng), u(rng)};
    if (!g.occupied(*g.cell_at(p))) out.emplace_back(p, th(rng));
  }
  return out;
}

void BM_FovCellSets(benchmark::State& state) {
  const auto g = cluttered(200, 1);
  const auto poses = free_poses(g, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(fov_cell_sets(g, poses, FovParams{}, policy(state)));
}
BENCHMARK(BM_FovCellSets)->ArgsProduct({{16, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ScoreLattice(benchmark::State& state) {
  const DistanceField field(cluttered(120, 3));
  PlannerConfig cfg;
  const auto lattice = cfg.control_lattice();
  const BoundingBoxState box{80, 0, 40, 40, 2.0};
  std::vector<bool> ok;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        score_lattice({3, 3, 0.4}, box, {4, 4, 0}, field, CameraModel{}, cfg, lattice, &ok, policy(state)));
}
BENCHMARK(BM_ScoreLattice)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_ReplanViewpoint(benchmark::State& state) {
  const auto g = cluttered(120, 4);
  const DistanceField field(g);
  SearchConfig cfg;
  auto map = init_probability_map(g);
  apply_cluster_views(map, free_poses(g, 5, 5), g, cfg.fov, cfg.p_l_star);
  const Pose2D robot = free_poses(g, 1, 6).front();
  const auto samples = sample_viewpoints(map, robot, static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(replan_viewpoint(map, samples, robot, field, cfg, policy(state)));
}
BENCHMARK(BM_ReplanViewpoint)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Dbscan(benchmark::State& state) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d(0.0, 0.5);
  std::vector<Point4> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts)
    for (auto& x : p) x = d(rng) + static_cast<double>(rng() % 4);
  for (auto _ : state) benchmark::DoNotOptimize(dbscan(pts, 0.5, 4, policy(state)));
}
BENCHMARK(BM_Dbscan)->ArgsProduct({{500, 2000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_VlpgMaxSimilarity(benchmark::State& state) {
  const SyntheticEmbeddingProvider p(512);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  Vlpg graph(1.0);
  const std::vector<std::string> labels{"oven", "sofa", "lamp", "bed", "plant", "tv"};
  while (graph.size() < static_cast<std::size_t>(state.range(0))) {
    Observation o;
    for (const auto& l : labels) o.labels.push_back({l, u(rng)});
    graph.record_node({}, p.embed_image(o), 0.0);
  }
  const auto probe = p.embed_image({{{"oven", 0.3}}});
  for (auto _ : state) benchmark::DoNotOptimize(graph.max_similarity(probe, policy(state)));
}
BENCHMARK(BM_VlpgMaxSimilarity)->ArgsProduct({{1000, 4000}, {0, 1}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
