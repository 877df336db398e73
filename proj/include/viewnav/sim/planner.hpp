#pragma once

#include <optional>
#include <span>
#include <vector>

#include "viewnav/geometry.hpp"

namespace viewnav::sim {

/// Marks every cell whose centre lies within `radius` of an occupied cell
/// centre.
OccupancyGrid inflate(const OccupancyGrid& grid, double radius);

/// Nearest free cell to `p` (by centre distance) within `max_radius`.
std::optional<CellIndex> nearest_free(const OccupancyGrid& grid, Point2 p, double max_radius);

/// Any-angle path (lazy Theta* over the 8-connected lattice, no corner
/// cutting). Waypoints start at `from` and end at `to`; every consecutive
/// pair has line of sight. nullopt when an endpoint is blocked or the goal is
/// unreachable.
std::optional<std::vector<Point2>> try_plan(const OccupancyGrid& grid, Point2 from, Point2 to);

/// try_plan that throws std::runtime_error instead of returning nullopt.
std::vector<Point2> plan_global_path(const OccupancyGrid& grid, const Pose2D& from, const Pose2D& to);

double path_length(std::span<const Point2> path);

}  // namespace viewnav::sim
