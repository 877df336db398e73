#pragma once

#include <vector>

#include "viewnav/geometry.hpp"

namespace viewnav {

/// Euclidean distance from every cell centre to the nearest occupied cell
/// centre (exact squared EDT, Felzenszwalb & Huttenlocher).
class DistanceField {
 public:
  DistanceField() = default;
  explicit DistanceField(const OccupancyGrid& grid);

  /// Distance in metres from the cell centre to the nearest occupied centre.
  /// Grids without any occupied cell report a large sentinel.
  double at(CellIndex c) const { return dist_[grid_.linear(c)]; }

  /// Free space between a point and the nearest obstacle edge. Zero outside
  /// the grid or inside an occupied cell.
  double clearance(Point2 p) const;

  const OccupancyGrid& grid() const { return grid_; }

 private:
  OccupancyGrid grid_;
  std::vector<double> dist_;
};

}  // namespace viewnav
