#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "viewnav/distance_field.hpp"
#include "viewnav/geometry.hpp"
#include "viewnav/parallel.hpp"

namespace viewnav {

/// Per-cell probability of not localizing the object over a local window.
/// Occupied cells hold exactly 1.
struct ProbabilityMap {
  OccupancyGrid geometry;
  std::vector<double> p_nl;

  double at(CellIndex c) const { return p_nl[geometry.checked_linear(c)]; }
  double p_l(CellIndex c) const { return 1.0 - at(c); }
};

/// Occupied cells -> 1.0, everything else -> 0.9.
ProbabilityMap init_probability_map(const OccupancyGrid& local_occ);

/// Every map cell inside the occlusion-aware FOV of k of the given views
/// (and with p_nl != 1) is multiplied by (1 - p_l_star)^k. FOVs are traced
/// on `visibility`, which may be any grid sharing the map's world frame;
/// pass map.geometry to use the map itself.
void apply_cluster_views(ProbabilityMap& map, std::span<const Pose2D> views,
                         const OccupancyGrid& visibility, const FovParams& fov, double p_l_star,
                         Execution exec = Execution::serial);

/// p_l <- decay * p_l on the cells of the occlusion-aware FOV of `view`.
void decay_viewed_region(ProbabilityMap& map, const FovSector& view, double decay);

/// p_l-weighted centroid of the cells whose centres lie within `radius` of
/// `around` (the whole map by default); nullopt when that mass is 0.
std::optional<Point2> likelihood_centroid(const ProbabilityMap& map, Point2 around = {},
                                          double radius = std::numeric_limits<double>::infinity());

/// `robot` followed by `count` seeded uniform draws over free cells with at
/// least `min_clearance` to the nearest obstacle. Each sample sits at a cell
/// centre and faces the p_l-weighted centroid of the cells within `range`
/// of it, or of the whole map when that mass is 0. Throws
/// std::runtime_error when no cell qualifies.
std::vector<Pose2D> sample_viewpoints(const ProbabilityMap& map, const Pose2D& robot,
                                      std::size_t count, std::uint64_t seed,
                                      double min_clearance = 0.0,
                                      double range = std::numeric_limits<double>::infinity());

struct SearchConfig {
  double p_l_star = 0.5;
  double w_d = 0.3;
  double w_q = 1.0;
  double w_obs = 0.5;
  std::size_t sample_count = 64;
  std::size_t max_replans = 5;
  double decay = 0.2;
  double window_size = 6.0;    ///< side of the local map, metres
  double min_clearance = 0.25; ///< for sampled viewpoints
  FovParams fov;

  void validate() const;
};

struct ViewpointCost {
  double distance = 0.0;  ///< ||x_vp - x_r||^2 over (x, y, theta)
  double quality = 0.0;   ///< sum over sector cells of 1 - p_l
  double obstacle = 0.0;  ///< exp(-d_o^2)
  double total = 0.0;
};

/// Quality term for one viewpoint: sector cells that are outside the map,
/// occupied or occluded from the viewpoint count 1; the rest count p_nl.
double quality_cost(const ProbabilityMap& map, const FovSector& view);

ViewpointCost viewpoint_cost(const ProbabilityMap& map, const Pose2D& sample, const Pose2D& robot,
                             const DistanceField& field, const SearchConfig& config);

struct ReplanChoice {
  std::size_t index = 0;
  Pose2D pose;
  std::vector<ViewpointCost> costs;  ///< one per sample
};

/// Sample minimising w_d J_distance + w_q J_quality + w_obs J_obstacle.
/// Ties go to the lower distance term, then the earlier sample.
ReplanChoice replan_viewpoint(const ProbabilityMap& map, std::span<const Pose2D> samples,
                              const Pose2D& robot, const DistanceField& field,
                              const SearchConfig& config, Execution exec = Execution::serial);

enum class NavResult { arrived, detected, failed };

/// What the search loop needs from the robot.
class SearchAgent {
 public:
  virtual ~SearchAgent() = default;
  virtual Pose2D pose() const = 0;
  /// Drives toward `target`; may stop early once the object is detected.
  virtual NavResult navigate_to(const Pose2D& target) = 0;
  virtual bool detect() = 0;
};

struct SearchIteration {
  std::size_t iteration = 0;  ///< 1-based
  Pose2D from;
  ReplanChoice choice;
  NavResult nav = NavResult::failed;
  bool found = false;
};

struct SearchOutcome {
  bool found = false;
  std::size_t replans = 0;
};

/// decay current FOV -> sample -> replan -> navigate -> detect, until the
/// object is found or max_replans iterations have run. A failed navigation
/// still uses up its iteration. `observer` sees every iteration and the map
/// after it.
SearchOutcome local_search_loop(
    ProbabilityMap& map, SearchAgent& agent, const DistanceField& field,
    const SearchConfig& config, std::uint64_t seed,
    const std::function<void(const SearchIteration&, const ProbabilityMap&)>& observer = {},
    Execution exec = Execution::serial);

}  // namespace viewnav
