#include "viewnav/viewpoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viewnav {

LiftedViewpoint lift(NodeId source, const Pose2D& pose, double angle_scale) {
  return {source,
          {pose.x, pose.y, angle_scale * std::cos(pose.theta), angle_scale * std::sin(pose.theta)}};
}

double ViewpointCluster::mean_score() const {
  if (members.empty()) return 0.0;
  double s = 0.0;
  for (const auto& m : members) s += m.score;
  return s / static_cast<double>(members.size());
}

std::vector<Pose2D> ViewpointCluster::poses() const {
  std::vector<Pose2D> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.pose);
  return out;
}

std::vector<std::vector<CellIndex>> fov_cell_sets(const OccupancyGrid& grid,
                                                  std::span<const Pose2D> poses,
                                                  const FovParams& fov, Execution exec) {
  std::vector<std::vector<CellIndex>> sets(poses.size());
  for_each_index(poses.size(), exec, [&](std::size_t i) {
    sets[i] = cells_in_fov(grid, fov.at(poses[i]), fov.occlusion_aware);
  });
  return sets;
}

std::vector<MemberCoverage> member_coverage(const ViewpointCluster& cluster,
                                            const OccupancyGrid& grid, const FovParams& fov,
                                            Execution exec) {
  const auto poses = cluster.poses();
  const auto sets = fov_cell_sets(grid, poses, fov, exec);
  std::vector<std::uint32_t> count(grid.size(), 0);
  for (const auto& s : sets)
    for (const auto& c : s) ++count[grid.linear(c)];

  std::vector<MemberCoverage> out(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    out[i].own = sets[i].size();
    for (const auto& c : sets[i]) out[i].overlap += count[grid.linear(c)] >= 2 ? 1 : 0;
  }
  return out;
}

const ClusterMember& best_guess(const ViewpointCluster& cluster, const OccupancyGrid& grid,
                                const FovParams& fov, Execution exec) {
  if (cluster.members.empty()) throw std::invalid_argument("best_guess: empty cluster");
  if (cluster.members.size() == 1) return cluster.members.front();
  const auto cov = member_coverage(cluster, grid, fov, exec);
  std::size_t best = 0;
  for (std::size_t i = 1; i < cov.size(); ++i) {
    const auto& a = cov[i];
    const auto& b = cov[best];
    if (a.overlap != b.overlap) {
      if (a.overlap > b.overlap) best = i;
    } else if (a.own != b.own) {
      if (a.own > b.own) best = i;
    } else if (cluster.members[i].id < cluster.members[best].id) {
      best = i;
    }
  }
  return cluster.members[best];
}

ViewpointPlan plan_from_scores(const Vlpg& graph, std::span<const NodeScore> scores,
                               const OccupancyGrid& grid, const ViewpointConfig& config,
                               Execution exec) {
  ViewpointPlan plan;
  plan.candidates = top_k(scores, config.top_k);
  if (plan.candidates.empty()) return plan;

  std::vector<Point4> points;
  points.reserve(plan.candidates.size());
  for (const auto& c : plan.candidates)
    points.push_back(lift(c.id, graph.node(c.id).pose, config.angle_scale).coords);
  const auto clustering = dbscan(points, config.dbscan_eps, config.dbscan_min_pts, exec);
  plan.labels = clustering.labels;
  if (clustering.cluster_count == 0) return plan;

  plan.clusters.resize(static_cast<std::size_t>(clustering.cluster_count));
  for (int k = 0; k < clustering.cluster_count; ++k) plan.clusters[static_cast<std::size_t>(k)].label = k;
  for (std::size_t i = 0; i < plan.candidates.size(); ++i) {
    const int label = clustering.labels[i];
    if (label == kNoise) continue;
    const auto& c = plan.candidates[i];
    plan.clusters[static_cast<std::size_t>(label)].members.push_back(
        {c.id, graph.node(c.id).pose, c.positive});
  }

  std::size_t chosen = 0;
  for (std::size_t k = 1; k < plan.clusters.size(); ++k) {
    const auto& a = plan.clusters[k];
    const auto& b = plan.clusters[chosen];
    if (a.members.size() != b.members.size()) {
      if (a.members.size() > b.members.size()) chosen = k;
    } else if (a.mean_score() > b.mean_score()) {
      chosen = k;
    }
  }
  plan.chosen = chosen;
  plan.best = best_guess(plan.clusters[chosen], grid, config.fov, exec);
  return plan;
}

ViewpointPlan initial_viewpoint(const Vlpg& graph, std::string_view object,
                                const EmbeddingProvider& provider, const OccupancyGrid& grid,
                                const ViewpointConfig& config, Execution exec) {
  if (graph.empty()) return {};
  const auto scores = score_nodes(graph, PromptPair::for_object(object), provider, exec);
  return plan_from_scores(graph, scores, grid, config, exec);
}

}  // namespace viewnav
