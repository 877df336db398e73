#include "viewnav/bench/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace viewnav::bench {

double angular_error(const Pose2D& robot, Point2 target) {
  if (distance(robot.position(), target) < 1e-12)
    throw std::invalid_argument("angular_error: robot and target coincide");
  return std::abs(relative_bearing(robot, target));
}

double sae(std::span<const SaeSample> samples, double delta_theta_max) {
  if (samples.empty()) throw std::invalid_argument("sae: no results");
  if (!(delta_theta_max > 0.0)) throw std::invalid_argument("sae: delta_theta_max must be > 0");
  double sum = 0.0;
  for (const auto& s : samples) {
    if (!s.success) continue;
    const double r = s.delta_theta / delta_theta_max;
    sum += std::exp(-r * r);
  }
  return sum / static_cast<double>(samples.size());
}

}  // namespace viewnav::bench
