#pragma once

#include <algorithm>
#include <compare>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace viewnav {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

/// Planar pose. The heading is kept in (-pi, pi] by every constructor.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2D() = default;
  Pose2D(double x_, double y_, double theta_)
      : x(x_), y(y_), theta(normalize_angle(theta_)) {}
  Pose2D(Point2 p, double theta_) : Pose2D(p.x, p.y, theta_) {}

  Point2 position() const { return {x, y}; }
  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

/// Bearing of `target` seen from `pose`, relative to its heading (+ is left).
double relative_bearing(const Pose2D& pose, Point2 target);

/// Circular camera sector. 0 < half_angle <= pi/2, range > 0.
class FovSector {
 public:
  FovSector(Pose2D apex, double half_angle, double range);

  const Pose2D& apex() const { return apex_; }
  double half_angle() const { return half_angle_; }
  double range() const { return range_; }

  /// Angle/range test on a point; points on the boundary are inside.
  bool contains(Point2 p) const;

 private:
  Pose2D apex_;
  double half_angle_;
  double range_;
};

/// Sector shape shared by every pose that looks through the same camera.
struct FovParams {
  double half_angle = kPi / 4.0;
  double range = 3.0;
  bool occlusion_aware = true;

  FovSector at(const Pose2D& pose) const { return {pose, half_angle, range}; }
};

struct CellIndex {
  int col = 0;
  int row = 0;

  auto operator<=>(const CellIndex&) const = default;
};

/// Row-major occupancy flags. Cell (0,0) has its lower-left corner at origin;
/// columns run along +x, rows along +y.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(Point2 origin, double resolution, int width, int height);

  Point2 origin() const { return origin_; }
  double resolution() const { return resolution_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  bool contains(CellIndex c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  bool contains(Point2 p) const { return cell_at(p).has_value(); }

  /// Throws std::out_of_range outside the grid.
  bool occupied(CellIndex c) const { return cells_[checked_linear(c)] != 0; }
  void set_occupied(CellIndex c, bool occupied) { cells_[checked_linear(c)] = occupied ? 1 : 0; }

  std::size_t linear(CellIndex c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.col);
  }
  CellIndex from_linear(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }
  std::size_t checked_linear(CellIndex c) const;

  Point2 cell_center(CellIndex c) const {
    return {origin_.x + (c.col + 0.5) * resolution_, origin_.y + (c.row + 0.5) * resolution_};
  }
  /// Cell containing `p`; nullopt when `p` is outside the grid.
  std::optional<CellIndex> cell_at(Point2 p) const;
  /// Lattice cell containing `p`, possibly outside the grid bounds.
  CellIndex lattice_cell(Point2 p) const {
    return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
            static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
  }

  std::span<const std::uint8_t> cells() const { return cells_; }
  std::size_t occupied_count() const;

  /// Cell-aligned sub-grid of roughly `size_m` x `size_m` centred on `center`.
  /// Cells that fall outside this grid are marked occupied.
  OccupancyGrid window(Point2 center, double size_m) const;

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  Point2 origin_{};
  double resolution_ = 1.0;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// Visits, in order, every cell the segment from -> to passes through.
/// When the segment crosses a cell corner exactly, both side cells are
/// visited before the diagonal one. `visit` returns false to stop early.
/// Both endpoints must be inside the grid (std::out_of_range otherwise).
template <typename Visitor>
void walk_segment(const OccupancyGrid& grid, Point2 from, Point2 to, Visitor&& visit);

/// All cells touched by the segment, in traversal order.
std::vector<CellIndex> traverse(const OccupancyGrid& grid, Point2 from, Point2 to);

/// First occupied cell on the segment, or nullopt when the segment is clear.
std::optional<CellIndex> raycast(const OccupancyGrid& grid, Point2 from, Point2 to);

/// True when no occupied cell lies on the segment.
bool line_of_sight(const OccupancyGrid& grid, Point2 from, Point2 to);

/// Free cells whose centres are inside the sector. With occlusion_aware, a
/// cell is dropped when the ray from the apex to its centre hits an occupied
/// cell. Result is sorted by linear index.
std::vector<CellIndex> cells_in_fov(const OccupancyGrid& grid, const FovSector& fov,
                                    bool occlusion_aware);

/// |cells_in_fov(a) ∩ ⋃ cells_in_fov(b)| on the grid discretisation.
std::size_t fov_overlap_area(const FovSector& a, std::span<const FovSector> union_of,
                             const OccupancyGrid& grid, bool occlusion_aware);

// ---------------------------------------------------------------------------

template <typename Visitor>
void walk_segment(const OccupancyGrid& grid, Point2 from, Point2 to, Visitor&& visit) {
  const auto start = grid.cell_at(from);
  const auto end = grid.cell_at(to);
  if (!start || !end) throw std::out_of_range("walk_segment: endpoint outside grid");

  CellIndex cell = *start;
  if (!visit(cell)) return;
  if (cell == *end) return;

  const double res = grid.resolution();
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const double cell_x0 = grid.origin().x + cell.col * res;
  const double cell_y0 = grid.origin().y + cell.row * res;
  double t_max_x = step_x > 0 ? (cell_x0 + res - from.x) / dx
                   : step_x < 0 ? (cell_x0 - from.x) / dx
                                : kInf;
  double t_max_y = step_y > 0 ? (cell_y0 + res - from.y) / dy
                   : step_y < 0 ? (cell_y0 - from.y) / dy
                                : kInf;
  const double t_delta_x = step_x != 0 ? res / std::abs(dx) : kInf;
  const double t_delta_y = step_y != 0 ? res / std::abs(dy) : kInf;

  // Manhattan distance bounds the number of steps even with corner ties.
  const int max_steps = std::abs(end->col - start->col) + std::abs(end->row - start->row) + 2;
  // The segment parameter runs over [0, 1], so an absolute tolerance is
  // enough; a relative one would treat near-axis rays as permanent ties.
  constexpr double kTie = 1e-12;
  for (int i = 0; i < max_steps && cell != *end; ++i) {
    if (std::abs(t_max_x - t_max_y) <= kTie) {
      if (t_max_x > 1.0) break;
      const CellIndex side_x{cell.col + step_x, cell.row};
      const CellIndex side_y{cell.col, cell.row + step_y};
      if (grid.contains(side_x) && !visit(side_x)) return;
      if (grid.contains(side_y) && !visit(side_y)) return;
      cell = {cell.col + step_x, cell.row + step_y};
      t_max_x += t_delta_x;
      t_max_y += t_delta_y;
    } else if (t_max_x < t_max_y) {
      if (t_max_x > 1.0) break;
      cell.col += step_x;
      t_max_x += t_delta_x;
    } else {
      if (t_max_y > 1.0) break;
      cell.row += step_y;
      t_max_y += t_delta_y;
    }
    if (!grid.contains(cell)) break;
    if (!visit(cell)) return;
  }
  // Rounding can stop the walk one cell short of the end point.
  if (cell != *end) visit(*end);
}

}  // namespace viewnav
