#pragma once

#include <random>

#include "viewnav/distance_field.hpp"
#include "viewnav/kinematics.hpp"

namespace viewnav::sim {

struct RobotParams {
  double radius = 0.18;
  double v_max = 0.5;
  double omega_max = 1.0;
  double sigma_xy = 0.0;     ///< position noise, m per sqrt(s)
  double sigma_theta = 0.0;  ///< heading noise, rad per sqrt(s)
};

struct RobotState {
  Pose2D pose;
  double v = 0.0;
  double omega = 0.0;
  bool contact = false;
};

/// Advances the unicycle by dt along the exact arc, with controls clamped to
/// the limits. Noise is drawn only when `rng` is given and a sigma is set.
/// A move that ends closer than `radius` to an obstacle, and closer than
/// where it started, keeps the old position (the rotation still applies)
/// and sets `contact`.
RobotState step(const DistanceField& field, const RobotState& state, Control u, double dt,
                const RobotParams& params, std::mt19937_64* rng = nullptr);

}  // namespace viewnav::sim
