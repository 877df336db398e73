#include "viewnav/sim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace viewnav::sim {
namespace {

struct Span {
  double lo = 0.0;  ///< bearing to the right, radians
  double hi = 0.0;
};

// Bearing interval (right positive) covered by the given cells, widened by
// half a cell's angular size at each end.
Span bearing_span(const OccupancyGrid& grid, const Pose2D& pose, const std::vector<CellIndex>& cells) {
  Span s{kPi, -kPi};
  for (const auto& c : cells) {
    const Point2 p = grid.cell_center(c);
    const double b = -relative_bearing(pose, p);
    const double half = std::atan2(0.5 * grid.resolution(), std::max(distance(pose.position(), p), 1e-6));
    s.lo = std::min(s.lo, b - half);
    s.hi = std::max(s.hi, b + half);
  }
  return s;
}

}  // namespace

std::vector<CellIndex> visible_cells(const WorldModel& world, const FovSector& fov, std::size_t object) {
  const OccupancyGrid& grid = world.grid();
  const Point2 apex = fov.apex().position();
  std::vector<CellIndex> out;
  if (!grid.contains(apex)) return out;
  for (const auto& c : world.objects().at(object).footprint) {
    const Point2 p = grid.cell_center(c);
    if (!fov.contains(p)) continue;
    const auto hit = raycast(grid, apex, p);
    if (hit && *hit == c) out.push_back(c);
  }
  return out;
}

std::optional<Detection> project_object(const WorldModel& world, const Pose2D& pose,
                                        const CameraModel& cam, const FovParams& fov,
                                        std::size_t object, const DetectorConfig& config) {
  const auto cells = visible_cells(world, fov.at(pose), object);
  if (cells.empty() || cells.size() < config.min_visible_cells) return std::nullopt;
  const OccupancyGrid& grid = world.grid();
  Point2 mean;
  for (const auto& c : cells) mean = mean + grid.cell_center(c);
  mean = (1.0 / static_cast<double>(cells.size())) * mean;

  const WorldObject& o = world.objects()[object];
  const double depth = std::max(distance(pose.position(), mean), 1e-3);
  const Span span = bearing_span(grid, pose, cells);
  const double limit = 0.5 * cam.image_width;
  const bool elevated = o.height_class == HeightClass::elevated;
  const double base = elevated ? config.elevated_object_base : 0.0;
  const double tall = elevated ? config.elevated_object_height : config.floor_object_height;

  Detection d;
  d.label = o.label;
  d.object = object;
  d.visible_cells = cells.size();
  d.confidence = 1.0 - std::exp(-static_cast<double>(cells.size()) / 5.0);
  d.box.center_u = std::clamp(cam.pixel_of_bearing(-relative_bearing(pose, mean)), -limit, limit);
  d.box.center_v = cam.focal_px * (config.camera_height - (base + 0.5 * tall)) / depth;
  d.box.width = std::max(1.0, std::clamp(cam.pixel_of_bearing(span.hi), -limit, limit) -
                                  std::clamp(cam.pixel_of_bearing(span.lo), -limit, limit));
  d.box.height = std::max(1.0, cam.focal_px * tall / depth);
  d.box.depth_estimate = depth;
  return d;
}

std::optional<Detection> render_detection(const WorldModel& world, const Pose2D& pose,
                                          const CameraModel& cam, const FovParams& fov,
                                          std::string_view query, const DetectorConfig& config,
                                          std::mt19937_64* rng) {
  std::optional<Detection> best;
  for (const auto i : world.instances_of(query)) {
    auto d = project_object(world, pose, cam, fov, i, config);
    if (d && (!best || d->visible_cells > best->visible_cells)) best = std::move(d);
  }
  if (!best || !rng) return best;
  if (config.false_negative_rate > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(*rng) < config.false_negative_rate) return std::nullopt;
  }
  if (config.pixel_noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, config.pixel_noise);
    const double limit = 0.5 * cam.image_width;
    best->box.center_u = std::clamp(best->box.center_u + gauss(*rng), -limit, limit);
  }
  return best;
}

Observation observe(const WorldModel& world, const Pose2D& pose, const CameraModel& cam,
                    const FovParams& fov, const DetectorConfig& config) {
  const FovSector sector = fov.at(pose);
  const double limit_u = 0.5 * cam.image_width;
  const double limit_v = 0.5 * cam.image_height;
  const double image_area = static_cast<double>(cam.image_width) * cam.image_height;
  std::map<std::string, double> share;
  for (std::size_t i = 0; i < world.objects().size(); ++i) {
    const auto cells = visible_cells(world, sector, i);
    if (cells.empty()) continue;
    const WorldObject& o = world.objects()[i];
    const Span s = bearing_span(world.grid(), pose, cells);
    const double width = std::clamp(cam.pixel_of_bearing(s.hi), -limit_u, limit_u) -
                         std::clamp(cam.pixel_of_bearing(s.lo), -limit_u, limit_u);
    // Vertical extent seen from the nearest visible cell (image v grows downward).
    double near = std::numeric_limits<double>::infinity();
    for (const auto& c : cells) near = std::min(near, distance(pose.position(), world.grid().cell_center(c)));
    near = std::max(near, 1e-3);
    const bool elevated = o.height_class == HeightClass::elevated;
    const double base = elevated ? config.elevated_object_base : 0.0;
    const double tall = elevated ? config.elevated_object_height : config.floor_object_height;
    const double top = std::clamp(cam.focal_px * (config.camera_height - base - tall) / near, -limit_v, limit_v);
    const double bottom = std::clamp(cam.focal_px * (config.camera_height - base) / near, -limit_v, limit_v);
    share[o.label] += width * (bottom - top) / image_area;
  }
  Observation out;
  for (const auto& [label, f] : share) out.labels.push_back({label, std::min(1.0, f)});
  return out;
}

}  // namespace viewnav::sim
