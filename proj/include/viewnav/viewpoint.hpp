#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "viewnav/dbscan.hpp"
#include "viewnav/geometry.hpp"
#include "viewnav/parallel.hpp"
#include "viewnav/pose_graph.hpp"

namespace viewnav {

/// Pose mapped to (x, y, s cos theta, s sin theta) so headings near ±pi are
/// neighbours.
struct LiftedViewpoint {
  NodeId source = 0;
  Point4 coords{};
};

LiftedViewpoint lift(NodeId source, const Pose2D& pose, double angle_scale = 1.0);

struct ClusterMember {
  NodeId id = 0;
  Pose2D pose;
  double score = 0.0;
};

struct ViewpointCluster {
  int label = 0;
  std::vector<ClusterMember> members;

  double mean_score() const;
  std::vector<Pose2D> poses() const;
};

struct ViewpointConfig {
  std::size_t top_k = 20;
  double angle_scale = 1.0;
  double dbscan_eps = 0.8;
  std::size_t dbscan_min_pts = 3;
  FovParams fov;
};

/// Member whose FOV covers the most cells also seen by the other members.
/// Ties go to the larger own FOV, then the lower node id.
/// Throws std::invalid_argument for an empty cluster.
const ClusterMember& best_guess(const ViewpointCluster& cluster, const OccupancyGrid& grid,
                                const FovParams& fov, Execution exec = Execution::serial);

/// Per-member overlap counts used by best_guess (exposed for tracing).
struct MemberCoverage {
  std::size_t overlap = 0;
  std::size_t own = 0;
};
std::vector<MemberCoverage> member_coverage(const ViewpointCluster& cluster,
                                            const OccupancyGrid& grid, const FovParams& fov,
                                            Execution exec = Execution::serial);

/// Everything computed while picking the initial viewpoint.
struct ViewpointPlan {
  std::vector<NodeScore> candidates;  ///< top-k, best first
  std::vector<int> labels;            ///< DBSCAN label per candidate
  std::vector<ViewpointCluster> clusters;
  std::optional<std::size_t> chosen;  ///< index into clusters
  std::optional<ClusterMember> best;

  bool has_prior() const { return best.has_value(); }
  const ViewpointCluster& chosen_cluster() const { return clusters.at(chosen.value()); }
};

/// top-k -> lift -> DBSCAN -> largest cluster (ties: higher mean score, then
/// lower label) -> best_guess. No prior when top-k is empty or all noise.
ViewpointPlan plan_from_scores(const Vlpg& graph, std::span<const NodeScore> scores,
                               const OccupancyGrid& grid, const ViewpointConfig& config,
                               Execution exec = Execution::serial);

ViewpointPlan initial_viewpoint(const Vlpg& graph, std::string_view object,
                                const EmbeddingProvider& provider, const OccupancyGrid& grid,
                                const ViewpointConfig& config, Execution exec = Execution::serial);

/// FOV cell sets for a batch of poses (OpenMP kernel over poses).
std::vector<std::vector<CellIndex>> fov_cell_sets(const OccupancyGrid& grid,
                                                  std::span<const Pose2D> poses,
                                                  const FovParams& fov, Execution exec);

}  // namespace viewnav
