#pragma once

#include <optional>
#include <vector>

#include "viewnav/centering.hpp"
#include "viewnav/distance_field.hpp"

namespace viewnav::sim {

struct NavConfig {
  double inflation = 0.3;        ///< planning clearance, metres
  double lookahead = 0.6;        ///< carrot distance along the path
  double goal_tolerance = 0.15;
  double heading_tolerance = 0.05;  ///< rad
  double heading_gain = 2.0;
  double turn_in_place = 1.0;    ///< rad; larger carrot bearings rotate before driving
  double replan_period = 3.0;    ///< s between global replans
  double stuck_window = 6.0;     ///< s
  double stuck_progress = 0.1;   ///< m of progress required per window
  std::size_t stuck_limit = 3;   ///< windows without progress before giving up
  double snap_radius = 0.6;      ///< how far blocked endpoints may be moved
};

enum class NavStatus { moving, arrived, failed };

/// Global path following: plans on an inflated grid, tracks a lookahead
/// point with the sampling local planner, then turns in place to the goal
/// heading when asked.
class Navigator {
 public:
  Navigator(NavConfig nav, PlannerConfig planner, CameraModel cam);

  void set_goal(const Pose2D& goal, bool align_heading);
  void clear();
  bool has_goal() const { return goal_.has_value(); }
  /// Goal position after snapping out of inflated obstacles.
  std::optional<Pose2D> target() const { return target_; }
  const std::vector<Point2>& path() const { return path_; }

  /// One control period. `inflated` is the planning grid; set
  /// `map_changed` when it differs from the previous call.
  NavStatus tick(const Pose2D& pose, double time, const OccupancyGrid& inflated, bool map_changed,
                 const DistanceField& field, Control& out, Execution exec = Execution::serial);

  const NavConfig& config() const { return nav_; }

 private:
  bool replan(const Pose2D& pose, const OccupancyGrid& inflated);
  Point2 carrot(const Pose2D& pose, double lookahead) const;

  NavConfig nav_;
  PlannerConfig planner_;
  CameraModel cam_;
  std::optional<Pose2D> goal_;
  std::optional<Pose2D> target_;
  bool align_ = false;
  bool aligning_ = false;
  std::vector<Point2> path_;
  double last_plan_ = -1e9;
  double window_start_ = 0.0;
  double window_best_ = 0.0;
  std::size_t stuck_windows_ = 0;
  std::size_t plan_failures_ = 0;
};

}  // namespace viewnav::sim
