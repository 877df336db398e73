#pragma once

#include <span>

#include "viewnav/geometry.hpp"

namespace viewnav::bench {

/// |angle between the heading and the line of sight to `target`|, in
/// [0, pi]. Throws std::invalid_argument when the points coincide.
double angular_error(const Pose2D& robot, Point2 target);

struct SaeSample {
  bool success = false;
  double delta_theta = 0.0;
};

/// (1/N) sum S_i exp(-(dtheta_i / dtheta_max)^2). Throws for an empty list.
double sae(std::span<const SaeSample> samples, double delta_theta_max = kPi / 2.0);

}  // namespace viewnav::bench
