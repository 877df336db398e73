#include "viewnav/kinematics.hpp"

#include <cmath>

namespace viewnav {

Pose2D integrate_unicycle(const Pose2D& pose, Control u, double dt) {
  const double dtheta = u.omega * dt;
  if (std::abs(dtheta) < 1e-9) {
    // Second-order expansion avoids dividing by a vanishing omega.
    const double mid = pose.theta + 0.5 * dtheta;
    return {pose.x + u.v * dt * std::cos(mid), pose.y + u.v * dt * std::sin(mid),
            pose.theta + dtheta};
  }
  const double r = u.v / u.omega;
  const double th1 = pose.theta + dtheta;
  return {pose.x + r * (std::sin(th1) - std::sin(pose.theta)),
          pose.y - r * (std::cos(th1) - std::cos(pose.theta)), th1};
}

}  // namespace viewnav
