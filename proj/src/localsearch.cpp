#include "viewnav/localsearch.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace viewnav {

ProbabilityMap init_probability_map(const OccupancyGrid& local_occ) {
  ProbabilityMap map{local_occ, std::vector<double>(local_occ.size())};
  const auto cells = local_occ.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) map.p_nl[i] = cells[i] != 0 ? 1.0 : 0.9;
  return map;
}

void apply_cluster_views(ProbabilityMap& map, std::span<const Pose2D> views,
                         const OccupancyGrid& visibility, const FovParams& fov, double p_l_star,
                         Execution exec) {
  if (!(p_l_star > 0.0 && p_l_star < 1.0))
    throw std::invalid_argument("apply_cluster_views: p_l_star must be in (0, 1)");
  const auto sets = [&] {
    FovParams occluded = fov;
    occluded.occlusion_aware = true;
    std::vector<Pose2D> poses(views.begin(), views.end());
    std::vector<std::vector<CellIndex>> out(poses.size());
    for_each_index(poses.size(), exec, [&](std::size_t i) {
      out[i] = cells_in_fov(visibility, occluded.at(poses[i]), true);
    });
    return out;
  }();

  // Counting hits first makes the update independent of view order.
  std::vector<int> hits(map.geometry.size(), 0);
  for (const auto& set : sets) {
    for (const auto& c : set) {
      if (const auto m = map.geometry.cell_at(visibility.cell_center(c))) ++hits[map.geometry.linear(*m)];
    }
  }
  const double keep = 1.0 - p_l_star;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] == 0 || map.p_nl[i] == 1.0) continue;
    for (int k = 0; k < hits[i]; ++k) map.p_nl[i] *= keep;
  }
}

void decay_viewed_region(ProbabilityMap& map, const FovSector& view, double decay) {
  if (!(decay >= 0.0 && decay < 1.0))
    throw std::invalid_argument("decay_viewed_region: decay must be in [0, 1)");
  for (const auto& c : cells_in_fov(map.geometry, view, true)) {
    double& p = map.p_nl[map.geometry.linear(c)];
    p = 1.0 - decay * (1.0 - p);
  }
}

std::optional<Point2> likelihood_centroid(const ProbabilityMap& map, Point2 around, double radius) {
  double w = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < map.p_nl.size(); ++i) {
    const double pl = 1.0 - map.p_nl[i];
    if (pl <= 0.0) continue;
    const Point2 c = map.geometry.cell_center(map.geometry.from_linear(i));
    if (distance(c, around) > radius) continue;
    w += pl;
    sx += pl * c.x;
    sy += pl * c.y;
  }
  if (w <= 0.0) return std::nullopt;
  return Point2{sx / w, sy / w};
}

std::vector<Pose2D> sample_viewpoints(const ProbabilityMap& map, const Pose2D& robot,
                                      std::size_t count, std::uint64_t seed,
                                      double min_clearance, double range) {
  if (count == 0) throw std::invalid_argument("sample_viewpoints: count must be >= 1");
  const OccupancyGrid& g = map.geometry;
  std::vector<std::size_t> free;
  {
    const DistanceField field = min_clearance > 0.0 ? DistanceField(g) : DistanceField();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.cells()[i] != 0) continue;
      if (min_clearance > 0.0 && field.clearance(g.cell_center(g.from_linear(i))) < min_clearance)
        continue;
      free.push_back(i);
    }
  }
  if (free.empty()) throw std::runtime_error("sample_viewpoints: no free cell to sample");

  const auto centroid = likelihood_centroid(map);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
  std::vector<Pose2D> out;
  out.reserve(count + 1);
  out.push_back(robot);
  for (std::size_t n = 0; n < count; ++n) {
    const Point2 p = g.cell_center(g.from_linear(free[pick(rng)]));
    // Mass beyond camera range cannot be seen from p, so it does not steer it.
    auto target = std::isinf(range) ? centroid : likelihood_centroid(map, p, range);
    if (!target) target = centroid;
    double theta = robot.theta;
    if (target && distance(*target, p) > 1e-9) theta = std::atan2(target->y - p.y, target->x - p.x);
    out.emplace_back(p, theta);
  }
  return out;
}

void SearchConfig::validate() const {
  if (!(p_l_star > 0.0 && p_l_star < 1.0)) throw std::invalid_argument("search: p_l_star not in (0,1)");
  if (w_d < 0.0 || w_q < 0.0 || w_obs < 0.0) throw std::invalid_argument("search: negative weight");
  if (sample_count < 1) throw std::invalid_argument("search: sample_count must be >= 1");
  if (max_replans < 1) throw std::invalid_argument("search: max_replans must be >= 1");
  if (!(decay >= 0.0 && decay < 1.0)) throw std::invalid_argument("search: decay not in [0,1)");
  if (!(window_size > 0.0)) throw std::invalid_argument("search: window_size must be > 0");
}

double quality_cost(const ProbabilityMap& map, const FovSector& view) {
  const OccupancyGrid& g = map.geometry;
  const Point2 apex = view.apex().position();
  const CellIndex lo = g.lattice_cell({apex.x - view.range(), apex.y - view.range()});
  const CellIndex hi = g.lattice_cell({apex.x + view.range(), apex.y + view.range()});
  std::size_t sector = 0;
  for (int r = lo.row; r <= hi.row; ++r)
    for (int c = lo.col; c <= hi.col; ++c) sector += view.contains(g.cell_center({c, r})) ? 1 : 0;
  double seen = 0.0;
  for (const auto& c : cells_in_fov(g, view, true)) seen += 1.0 - map.p_nl[g.linear(c)];
  return static_cast<double>(sector) - seen;
}

ViewpointCost viewpoint_cost(const ProbabilityMap& map, const Pose2D& sample, const Pose2D& robot,
                             const DistanceField& field, const SearchConfig& config) {
  ViewpointCost c;
  const double dx = sample.x - robot.x;
  const double dy = sample.y - robot.y;
  const double dt = normalize_angle(sample.theta - robot.theta);
  c.distance = dx * dx + dy * dy + dt * dt;
  c.quality = quality_cost(map, config.fov.at(sample));
  const double d_o = field.clearance(sample.position());
  c.obstacle = std::exp(-d_o * d_o);
  c.total = config.w_d * c.distance + config.w_q * c.quality + config.w_obs * c.obstacle;
  return c;
}

ReplanChoice replan_viewpoint(const ProbabilityMap& map, std::span<const Pose2D> samples,
                              const Pose2D& robot, const DistanceField& field,
                              const SearchConfig& config, Execution exec) {
  if (samples.empty()) throw std::invalid_argument("replan_viewpoint: no samples");
  ReplanChoice out;
  out.costs.resize(samples.size());
  for_each_index(samples.size(), exec, [&](std::size_t i) {
    out.costs[i] = viewpoint_cost(map, samples[i], robot, field, config);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& a = out.costs[i];
    const auto& b = out.costs[best];
    if (a.total < b.total || (a.total == b.total && a.distance < b.distance)) best = i;
  }
  out.index = best;
  out.pose = samples[best];
  return out;
}

SearchOutcome local_search_loop(
    ProbabilityMap& map, SearchAgent& agent, const DistanceField& field,
    const SearchConfig& config, std::uint64_t seed,
    const std::function<void(const SearchIteration&, const ProbabilityMap&)>& observer,
    Execution exec) {
  config.validate();
  for (std::size_t it = 1; it <= config.max_replans; ++it) {
    SearchIteration rec;
    rec.iteration = it;
    rec.from = agent.pose();
    decay_viewed_region(map, config.fov.at(rec.from), config.decay);
    const auto samples =
        sample_viewpoints(map, rec.from, config.sample_count, seed + it, config.min_clearance, config.fov.range);
    rec.choice = replan_viewpoint(map, samples, rec.from, field, config, exec);
    rec.nav = agent.navigate_to(rec.choice.pose);
    rec.found = rec.nav == NavResult::detected || (rec.nav == NavResult::arrived && agent.detect());
    if (observer) observer(rec, map);
    if (rec.found) return {true, it};
  }
  return {false, config.max_replans};
}

}  // namespace viewnav
