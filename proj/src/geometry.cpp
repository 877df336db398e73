#include "viewnav/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace viewnav {

double normalize_angle(double angle) {
  if (!std::isfinite(angle)) return angle;
  double a = std::fmod(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double relative_bearing(const Pose2D& pose, Point2 target) {
  return normalize_angle(std::atan2(target.y - pose.y, target.x - pose.x) - pose.theta);
}

FovSector::FovSector(Pose2D apex, double half_angle, double range)
    : apex_(apex), half_angle_(half_angle), range_(range) {
  if (!(half_angle > 0.0 && half_angle <= kPi / 2.0 + 1e-12))
    throw std::invalid_argument("FovSector: half_angle must be in (0, pi/2]");
  if (!(range > 0.0)) throw std::invalid_argument("FovSector: range must be positive");
}

bool FovSector::contains(Point2 p) const {
  const double dx = p.x - apex_.x;
  const double dy = p.y - apex_.y;
  const double d = std::hypot(dx, dy);
  constexpr double kEps = 1e-9;
  if (d > range_ + kEps) return false;
  if (d < 1e-12) return true;
  const double off = std::abs(normalize_angle(std::atan2(dy, dx) - apex_.theta));
  return off <= half_angle_ + kEps;
}

OccupancyGrid::OccupancyGrid(Point2 origin, double resolution, int width, int height)
    : origin_(origin), resolution_(resolution), width_(width), height_(height) {
  if (!(resolution > 0.0)) throw std::invalid_argument("OccupancyGrid: resolution must be > 0");
  if (width <= 0 || height <= 0) throw std::invalid_argument("OccupancyGrid: empty grid");
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t OccupancyGrid::checked_linear(CellIndex c) const {
  if (!contains(c)) throw std::out_of_range("OccupancyGrid: cell outside grid");
  return linear(c);
}

std::optional<CellIndex> OccupancyGrid::cell_at(Point2 p) const {
  const CellIndex c = lattice_cell(p);
  if (!contains(c)) return std::nullopt;
  return c;
}

std::size_t OccupancyGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

OccupancyGrid OccupancyGrid::window(Point2 center, double size_m) const {
  const int cells = std::max(1, static_cast<int>(std::lround(size_m / resolution_)));
  const CellIndex mid = lattice_cell(center);
  const int col0 = mid.col - cells / 2;
  const int row0 = mid.row - cells / 2;
  OccupancyGrid out({origin_.x + col0 * resolution_, origin_.y + row0 * resolution_}, resolution_,
                    cells, cells);
  for (int r = 0; r < cells; ++r) {
    for (int c = 0; c < cells; ++c) {
      const CellIndex src{col0 + c, row0 + r};
      const bool occ = !contains(src) || cells_[linear(src)] != 0;
      out.cells_[out.linear({c, r})] = occ ? 1 : 0;
    }
  }
  return out;
}

std::vector<CellIndex> traverse(const OccupancyGrid& grid, Point2 from, Point2 to) {
  std::vector<CellIndex> out;
  walk_segment(grid, from, to, [&](CellIndex c) {
    out.push_back(c);
    return true;
  });
  return out;
}

std::optional<CellIndex> raycast(const OccupancyGrid& grid, Point2 from, Point2 to) {
  std::optional<CellIndex> hit;
  walk_segment(grid, from, to, [&](CellIndex c) {
    if (grid.occupied(c)) {
      hit = c;
      return false;
    }
    return true;
  });
  return hit;
}

bool line_of_sight(const OccupancyGrid& grid, Point2 from, Point2 to) {
  return !raycast(grid, from, to).has_value();
}

std::vector<CellIndex> cells_in_fov(const OccupancyGrid& grid, const FovSector& fov,
                                    bool occlusion_aware) {
  std::vector<CellIndex> out;
  const Point2 apex = fov.apex().position();
  const CellIndex lo = grid.lattice_cell({apex.x - fov.range(), apex.y - fov.range()});
  const CellIndex hi = grid.lattice_cell({apex.x + fov.range(), apex.y + fov.range()});
  const int c0 = std::max(0, lo.col);
  const int r0 = std::max(0, lo.row);
  const int c1 = std::min(grid.width() - 1, hi.col);
  const int r1 = std::min(grid.height() - 1, hi.row);
  const bool apex_inside = grid.contains(apex);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const CellIndex cell{c, r};
      if (grid.occupied(cell)) continue;
      const Point2 center = grid.cell_center(cell);
      if (!fov.contains(center)) continue;
      if (occlusion_aware) {
        // An apex outside the grid sees nothing through unknown space.
        if (!apex_inside || !line_of_sight(grid, apex, center)) continue;
      }
      out.push_back(cell);
    }
  }
  return out;
}

std::size_t fov_overlap_area(const FovSector& a, std::span<const FovSector> union_of,
                             const OccupancyGrid& grid, bool occlusion_aware) {
  if (union_of.empty()) throw std::invalid_argument("fov_overlap_area: empty union");
  std::vector<std::uint8_t> covered(grid.size(), 0);
  for (const auto& b : union_of) {
    for (const auto& c : cells_in_fov(grid, b, occlusion_aware)) covered[grid.linear(c)] = 1;
  }
  std::size_t n = 0;
  for (const auto& c : cells_in_fov(grid, a, occlusion_aware)) n += covered[grid.linear(c)];
  return n;
}

}  // namespace viewnav
