#pragma once

#include <optional>
#include <span>
#include <vector>

#include "viewnav/distance_field.hpp"
#include "viewnav/geometry.hpp"
#include "viewnav/kinematics.hpp"
#include "viewnav/parallel.hpp"

namespace viewnav {

/// Pinhole camera looking along the robot heading.
struct CameraModel {
  double focal_px = 320.0;
  int image_width = 640;
  int image_height = 480;

  static CameraModel from_horizontal_fov(int width, int height, double horizontal_fov);
  double horizontal_fov() const;
  /// Pixel column (0 at the centre, + right) of a point `bearing_right` rad
  /// to the right of the optical axis.
  double pixel_of_bearing(double bearing_right) const;
  double bearing_of_pixel(double u) const;
};

/// Detected box in image space. center_u is + to the right of the image
/// centre; depth_estimate is the range to the object along the box bearing.
struct BoundingBoxState {
  double center_u = 0.0;
  double center_v = 0.0;
  double width = 1.0;
  double height = 1.0;
  double depth_estimate = 1.0;

  friend bool operator==(const BoundingBoxState&, const BoundingBoxState&) = default;
};

/// Propagates the box centre through one control step with the planar image
/// Jacobian for (v, omega): in bearing form psi = atan(u/f),
///   dpsi/dt = omega + v sin(psi) / depth,   d depth/dt = -v cos(psi),
/// advanced by one Euler step of h and mapped back to pixels. The predicted
/// centre may leave the image. Throws std::invalid_argument for depth <= 0.
BoundingBoxState predict_box(const BoundingBoxState& box, Control u, double h,
                             const CameraModel& cam);

struct CollisionModel {
  double robot_radius = 0.18;
  double safety_margin = 0.10;
  double sharpness = 6.0;  ///< per metre of clearance deficit

  /// Probability factor for ending a segment with the given clearance.
  double segment_factor(double clearance) const;
};

/// Constant-control rollout split into N segments of h seconds.
struct TrajectoryRollout {
  std::vector<Control> controls;  ///< one per segment
  double h = 0.1;
  std::vector<Pose2D> poses;      ///< N + 1 poses, poses[0] is the start
  std::vector<double> survival;   ///< p_s per segment, non-increasing

  std::size_t segments() const { return controls.size(); }
  bool collision_free() const { return survival.empty() || survival.back() > 0.0; }
};

TrajectoryRollout make_rollout(const Pose2D& start, std::span<const Control> controls, double h,
                               const DistanceField& field, const CollisionModel& collision);

/// Sum over segments of u_end^2 - u_start^2 (pixels^2) with the box centre
/// chained through predict_box; negative when centring improves.
double orient_cost(const TrajectoryRollout& rollout, const BoundingBoxState& box,
                   const CameraModel& cam);

struct ZoomParams {
  double d_thresh = 1.0;
  double d_max = 3.0;

  /// Throws unless 0 < d_thresh < d_max.
  void validate() const;
};

/// -max(v,0) * max(cos theta_c, 0) * h * max(d_obs - d_thresh, 0) / d_max.
/// Negative (a reward) while moving toward a far object.
double zoom_cost(double v, double theta_c, double h, double d_obs, const ZoomParams& params);

struct CostWeights {
  double progress = 1.0;
  double orient = 5.0;  ///< applied to orient_cost / focal^2
  double zoom = 10.0;
  double action_v = 0.05;
  double action_omega = 0.05;
  double collision = 5.0;
};

/// Per segment: p_s (progress + orient + zoom) + action + (1 - p_s) collision.
/// Progress is the change in distance to `goal`; orient and zoom are dropped
/// when no box is given.
double rollout_cost(const TrajectoryRollout& rollout, const Pose2D& goal,
                    const std::optional<BoundingBoxState>& box, const CameraModel& cam,
                    const CostWeights& weights, const ZoomParams& zoom);

struct PlannerConfig {
  double v_max = 0.5;
  double omega_max = 1.0;
  std::size_t linear_samples = 7;
  std::size_t angular_samples = 11;
  std::size_t segments = 10;
  double h = 0.1;
  CollisionModel collision;
  CostWeights weights;
  ZoomParams zoom;

  /// Constant-control lattice: linear speeds evenly spaced on [0, v_max],
  /// yaw rates on [-omega_max, omega_max] with cubic spacing so small
  /// corrections are available near zero.
  std::vector<Control> control_lattice() const;
};

struct ControlChoice {
  Control control;
  double cost = 0.0;
  bool fallback = false;  ///< no collision-free rollout existed
};

/// Scores every lattice rollout and returns the first control of the
/// cheapest one (ties: lower |omega|, then lower |v|). Without any
/// collision-free rollout, rotates in place toward the goal bearing.
ControlChoice select_control(const Pose2D& current, const std::optional<BoundingBoxState>& box,
                             const Pose2D& goal, const DistanceField& field,
                             const CameraModel& cam, const PlannerConfig& config,
                             Execution exec = Execution::serial);

/// Costs of every lattice rollout, in lattice order (the parallel kernel
/// behind select_control).
std::vector<double> score_lattice(const Pose2D& current, const std::optional<BoundingBoxState>& box,
                                  const Pose2D& goal, const DistanceField& field,
                                  const CameraModel& cam, const PlannerConfig& config,
                                  std::span<const Control> lattice, std::vector<bool>* collision_free,
                                  Execution exec);

}  // namespace viewnav
