#pragma once

#include "viewnav/geometry.hpp"

namespace viewnav {

struct Control {
  double v = 0.0;      ///< forward speed, m/s
  double omega = 0.0;  ///< yaw rate, rad/s

  friend bool operator==(const Control&, const Control&) = default;
};

/// Unicycle motion under constant (v, omega) for dt seconds, integrated along
/// the exact arc (reduces to x += v cos(theta) dt for omega = 0).
Pose2D integrate_unicycle(const Pose2D& pose, Control u, double dt);

}  // namespace viewnav
