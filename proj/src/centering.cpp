#include "viewnav/centering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viewnav {
namespace {

// Keeps tan() finite when a prediction swings past the image plane.
constexpr double kMaxBearing = 1.55;
constexpr double kMinDepth = 1e-3;

double bearing_of(const BoundingBoxState& box, const CameraModel& cam) {
  return std::atan(box.center_u / cam.focal_px);
}

}  // namespace

CameraModel CameraModel::from_horizontal_fov(int width, int height, double horizontal_fov) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("CameraModel: empty image");
  if (!(horizontal_fov > 0.0 && horizontal_fov < kPi))
    throw std::invalid_argument("CameraModel: horizontal_fov must be in (0, pi)");
  return {0.5 * width / std::tan(0.5 * horizontal_fov), width, height};
}

double CameraModel::horizontal_fov() const {
  return 2.0 * std::atan(image_width / (2.0 * focal_px));
}

double CameraModel::pixel_of_bearing(double bearing_right) const {
  return focal_px * std::tan(bearing_right);
}

double CameraModel::bearing_of_pixel(double u) const { return std::atan(u / focal_px); }

BoundingBoxState predict_box(const BoundingBoxState& box, Control u, double h,
                             const CameraModel& cam) {
  if (!(box.depth_estimate > 0.0)) throw std::invalid_argument("predict_box: depth must be > 0");
  if (u.v == 0.0 && u.omega == 0.0) return box;
  const double psi = bearing_of(box, cam);
  const double r = box.depth_estimate;
  const double psi1 =
      std::clamp(psi + h * (u.omega + u.v * std::sin(psi) / r), -kMaxBearing, kMaxBearing);
  const double r1 = std::max(kMinDepth, r - h * u.v * std::cos(psi));
  BoundingBoxState out = box;
  out.center_u = cam.pixel_of_bearing(psi1);
  out.depth_estimate = r1;
  out.width = box.width * r / r1;
  out.height = box.height * r / r1;
  return out;
}

double CollisionModel::segment_factor(double clearance) const {
  if (clearance < robot_radius) return 0.0;
  return std::exp(-sharpness * std::max(0.0, robot_radius + safety_margin - clearance));
}

TrajectoryRollout make_rollout(const Pose2D& start, std::span<const Control> controls, double h,
                               const DistanceField& field, const CollisionModel& collision) {
  if (!(h > 0.0)) throw std::invalid_argument("make_rollout: h must be > 0");
  TrajectoryRollout out;
  out.controls.assign(controls.begin(), controls.end());
  out.h = h;
  out.poses.reserve(controls.size() + 1);
  out.survival.reserve(controls.size());
  out.poses.push_back(start);
  double p = 1.0;
  for (const auto& c : controls) {
    const Pose2D next = integrate_unicycle(out.poses.back(), c, h);
    p *= collision.segment_factor(field.clearance(next.position()));
    out.poses.push_back(next);
    out.survival.push_back(p);
  }
  return out;
}

double orient_cost(const TrajectoryRollout& rollout, const BoundingBoxState& box,
                   const CameraModel& cam) {
  double total = 0.0;
  BoundingBoxState b = box;
  for (const auto& c : rollout.controls) {
    const BoundingBoxState next = predict_box(b, c, rollout.h, cam);
    total += next.center_u * next.center_u - b.center_u * b.center_u;
    b = next;
  }
  return total;
}

void ZoomParams::validate() const {
  if (!(d_thresh > 0.0 && d_thresh < d_max))
    throw std::invalid_argument("ZoomParams: need 0 < d_thresh < d_max");
}

double zoom_cost(double v, double theta_c, double h, double d_obs, const ZoomParams& params) {
  if (!(h > 0.0)) throw std::invalid_argument("zoom_cost: h must be > 0");
  const double rho = std::max(d_obs - params.d_thresh, 0.0) / params.d_max;
  return -std::max(v, 0.0) * std::max(std::cos(theta_c), 0.0) * h * rho;
}

double rollout_cost(const TrajectoryRollout& rollout, const Pose2D& goal,
                    const std::optional<BoundingBoxState>& box, const CameraModel& cam,
                    const CostWeights& weights, const ZoomParams& zoom) {
  const Point2 g = goal.position();
  const double f2 = cam.focal_px * cam.focal_px;
  std::optional<BoundingBoxState> b = box;
  double total = 0.0;
  for (std::size_t i = 0; i < rollout.segments(); ++i) {
    const Control& c = rollout.controls[i];
    const double ps = rollout.survival[i];
    double gain = weights.progress *
                  (distance(rollout.poses[i + 1].position(), g) - distance(rollout.poses[i].position(), g));
    if (b) {
      const BoundingBoxState next = predict_box(*b, c, rollout.h, cam);
      gain += weights.orient * (next.center_u * next.center_u - b->center_u * b->center_u) / f2;
      gain += weights.zoom * zoom_cost(c.v, bearing_of(*b, cam), rollout.h, b->depth_estimate, zoom);
      b = next;
    }
    const double action = (weights.action_v * c.v * c.v + weights.action_omega * c.omega * c.omega) * rollout.h;
    total += ps * gain + action + (1.0 - ps) * weights.collision;
  }
  return total;
}

std::vector<Control> PlannerConfig::control_lattice() const {
  if (linear_samples == 0 || angular_samples == 0 || segments == 0)
    throw std::invalid_argument("PlannerConfig: sample counts and segments must be >= 1");
  std::vector<Control> out;
  out.reserve(linear_samples * angular_samples);
  for (std::size_t i = 0; i < linear_samples; ++i) {
    const double v = linear_samples == 1 ? 0.0 : v_max * static_cast<double>(i) / (linear_samples - 1);
    for (std::size_t j = 0; j < angular_samples; ++j) {
      const double s = angular_samples == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(j) / (angular_samples - 1);
      out.push_back({v, omega_max * s * s * s});
    }
  }
  return out;
}

std::vector<double> score_lattice(const Pose2D& current, const std::optional<BoundingBoxState>& box,
                                  const Pose2D& goal, const DistanceField& field,
                                  const CameraModel& cam, const PlannerConfig& config,
                                  std::span<const Control> lattice, std::vector<bool>* collision_free,
                                  Execution exec) {
  std::vector<double> costs(lattice.size());
  std::vector<char> free(lattice.size(), 0);
  for_each_index(lattice.size(), exec, [&](std::size_t i) {
    const std::vector<Control> seq(config.segments, lattice[i]);
    const TrajectoryRollout r = make_rollout(current, seq, config.h, field, config.collision);
    costs[i] = rollout_cost(r, goal, box, cam, config.weights, config.zoom);
    free[i] = r.collision_free() ? 1 : 0;
  });
  if (collision_free) collision_free->assign(free.begin(), free.end());
  return costs;
}

ControlChoice select_control(const Pose2D& current, const std::optional<BoundingBoxState>& box,
                             const Pose2D& goal, const DistanceField& field,
                             const CameraModel& cam, const PlannerConfig& config,
                             Execution exec) {
  const std::vector<Control> lattice = config.control_lattice();
  std::vector<bool> ok;
  const std::vector<double> costs =
      score_lattice(current, box, goal, field, cam, config, lattice, &ok, exec);

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (!ok[i]) continue;
    if (!best) {
      best = i;
      continue;
    }
    const double a = costs[i];
    const double b = costs[*best];
    const double tol = 1e-12 * std::max(1.0, std::abs(b));
    if (a < b - tol) {
      best = i;
    } else if (std::abs(a - b) <= tol) {
      const Control& ci = lattice[i];
      const Control& cb = lattice[*best];
      if (std::abs(ci.omega) < std::abs(cb.omega) ||
          (std::abs(ci.omega) == std::abs(cb.omega) && std::abs(ci.v) < std::abs(cb.v)))
        best = i;
    }
  }
  if (best) return {lattice[*best], costs[*best], false};

  const double bearing = distance(current.position(), goal.position()) > 1e-9
                             ? relative_bearing(current, goal.position())
                             : normalize_angle(goal.theta - current.theta);
  return {{0.0, bearing < 0.0 ? -0.5 * config.omega_max : 0.5 * config.omega_max}, 0.0, true};
}

}  // namespace viewnav
