#include "viewnav/sim/robot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viewnav::sim {

RobotState step(const DistanceField& field, const RobotState& state, Control u, double dt,
                const RobotParams& params, std::mt19937_64* rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  u.v = std::clamp(u.v, -params.v_max, params.v_max);
  u.omega = std::clamp(u.omega, -params.omega_max, params.omega_max);
  Pose2D next = integrate_unicycle(state.pose, u, dt);
  if (rng && (params.sigma_xy > 0.0 || params.sigma_theta > 0.0)) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s = std::sqrt(dt);
    const double nx = gauss(*rng) * params.sigma_xy * s;
    const double ny = gauss(*rng) * params.sigma_xy * s;
    const double nt = gauss(*rng) * params.sigma_theta * s;
    // Noise only perturbs actual motion, so a parked robot stays put.
    const double moving = (u.v != 0.0 || u.omega != 0.0) ? 1.0 : 0.0;
    next = Pose2D(next.x + moving * nx, next.y + moving * ny, next.theta + moving * nt);
  }
  RobotState out{next, u.v, u.omega, false};
  const double before = field.clearance(state.pose.position());
  const double after = field.clearance(next.position());
  if (after < params.radius && after < before) {
    out.pose = Pose2D(state.pose.x, state.pose.y, next.theta);
    out.v = 0.0;
    out.contact = true;
  }
  return out;
}

}  // namespace viewnav::sim
