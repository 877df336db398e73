#include "viewnav/sim/navigator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "viewnav/sim/planner.hpp"

namespace viewnav::sim {

Navigator::Navigator(NavConfig nav, PlannerConfig planner, CameraModel cam)
    : nav_(nav), planner_(std::move(planner)), cam_(cam) {}

void Navigator::set_goal(const Pose2D& goal, bool align_heading) {
  goal_ = goal;
  target_ = goal;
  align_ = align_heading;
  aligning_ = false;
  path_.clear();
  last_plan_ = -1e9;
  stuck_windows_ = 0;
  plan_failures_ = 0;
  window_start_ = -1.0;
}

void Navigator::clear() {
  goal_.reset();
  target_.reset();
  path_.clear();
}

bool Navigator::replan(const Pose2D& pose, const OccupancyGrid& inflated) {
  Point2 from = pose.position();
  const auto from_cell = inflated.cell_at(from);
  if (!from_cell || inflated.occupied(*from_cell)) {
    const auto snapped = nearest_free(inflated, from, nav_.snap_radius);
    if (!snapped) return false;
    from = inflated.cell_center(*snapped);
  }
  Point2 to = goal_->position();
  const auto to_cell = inflated.cell_at(to);
  if (!to_cell || inflated.occupied(*to_cell)) {
    const auto snapped = nearest_free(inflated, to, nav_.snap_radius);
    if (!snapped) return false;
    to = inflated.cell_center(*snapped);
  }
  auto path = try_plan(inflated, from, to);
  if (!path) return false;
  if (distance(from, pose.position()) > 1e-12) path->insert(path->begin(), pose.position());
  path_ = std::move(*path);
  target_ = Pose2D(to, goal_->theta);
  return true;
}

Point2 Navigator::carrot(const Pose2D& pose, double lookahead) const {
  if (path_.size() < 2) return target_->position();
  const Point2 p = pose.position();
  // Closest point on the polyline, then walk `lookahead` further along it.
  std::size_t seg = 0;
  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  for (std::size_t i = 0; i + 1 < path_.size(); ++i) {
    const Point2 a = path_[i];
    const Point2 d = path_[i + 1] - a;
    const double len2 = d.x * d.x + d.y * d.y;
    const double t = len2 > 0 ? std::clamp(((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2, 0.0, 1.0) : 0.0;
    const double dist = distance(p, a + t * d);
    if (dist < best - 1e-12) {
      best = dist;
      seg = i;
      best_t = t;
    }
  }
  double left = lookahead;
  Point2 at = path_[seg] + best_t * (path_[seg + 1] - path_[seg]);
  for (std::size_t i = seg; i + 1 < path_.size(); ++i) {
    const double rem = distance(at, path_[i + 1]);
    if (rem >= left) return at + (left / rem) * (path_[i + 1] - at);
    left -= rem;
    at = path_[i + 1];
  }
  return path_.back();
}

NavStatus Navigator::tick(const Pose2D& pose, double time, const OccupancyGrid& inflated,
                          bool map_changed, const DistanceField& field, Control& out, Execution exec) {
  out = {};
  if (!goal_) return NavStatus::arrived;

  const double d = distance(pose.position(), target_->position());
  if (aligning_ && d > 2.0 * nav_.goal_tolerance) aligning_ = false;
  if (aligning_ || d < nav_.goal_tolerance) {
    aligning_ = true;
    if (!align_) return NavStatus::arrived;
    const double err = normalize_angle(goal_->theta - pose.theta);
    if (std::abs(err) < nav_.heading_tolerance) return NavStatus::arrived;
    out.omega = std::clamp(nav_.heading_gain * err, -planner_.omega_max, planner_.omega_max);
    return NavStatus::moving;
  }

  if (path_.empty() || map_changed || time - last_plan_ >= nav_.replan_period) {
    last_plan_ = time;
    if (!replan(pose, inflated)) {
      if (++plan_failures_ >= 2) return NavStatus::failed;
    } else {
      plan_failures_ = 0;
    }
    if (path_.empty()) return NavStatus::moving;
  }

  if (window_start_ < 0.0) {
    window_start_ = time;
    window_best_ = d;
  } else if (time - window_start_ >= nav_.stuck_window) {
    if (window_best_ - d < nav_.stuck_progress) {
      if (++stuck_windows_ >= nav_.stuck_limit) return NavStatus::failed;
      last_plan_ = -1e9;
    } else {
      stuck_windows_ = 0;
    }
    window_start_ = time;
    window_best_ = d;
  }

  // Near a door jamb the full lookahead cuts the corner and every forward
  // rollout enters the safety band; a closer carrot pulls back onto the path.
  Control turn{};
  for (const double scale : {1.0, 0.5, 0.25}) {
    const Point2 c = carrot(pose, scale * nav_.lookahead);
    const double b = distance(pose.position(), c) > 1e-6 ? relative_bearing(pose, c) : 0.0;
    turn = {0.0, std::clamp(nav_.heading_gain * b, -planner_.omega_max, planner_.omega_max)};
    // The short rollout horizon cannot see past a large turn, so face the
    // carrot first.
    if (std::abs(b) > nav_.turn_in_place) break;
    const ControlChoice choice =
        select_control(pose, std::nullopt, Pose2D(c, goal_->theta), field, cam_, planner_, exec);
    if (!choice.fallback && choice.control.v > 0.0) {
      out = choice.control;
      return NavStatus::moving;
    }
  }
  // A rollout that stands still cannot beat turning toward the path.
  out = turn;
  return NavStatus::moving;
}

}  // namespace viewnav::sim
