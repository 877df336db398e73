#include "viewnav/sim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "viewnav/distance_field.hpp"

namespace viewnav::sim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};

// Diagonal steps need both side cells free.
bool can_step(const OccupancyGrid& g, CellIndex a, int k) {
  const CellIndex b{a.col + kDc[k], a.row + kDr[k]};
  if (!g.contains(b) || g.occupied(b)) return false;
  if (k >= 4) {
    if (g.occupied({a.col + kDc[k], a.row}) || g.occupied({a.col, a.row + kDr[k]})) return false;
  }
  return true;
}

}  // namespace

OccupancyGrid inflate(const OccupancyGrid& grid, double radius) {
  const DistanceField field(grid);
  OccupancyGrid out = grid;
  for (int r = 0; r < grid.height(); ++r)
    for (int c = 0; c < grid.width(); ++c)
      if (field.at({c, r}) < radius) out.set_occupied({c, r}, true);
  return out;
}

std::optional<CellIndex> nearest_free(const OccupancyGrid& grid, Point2 p, double max_radius) {
  const CellIndex mid = grid.lattice_cell(p);
  const int reach = static_cast<int>(std::ceil(max_radius / grid.resolution())) + 1;
  std::optional<CellIndex> best;
  double best_d = kInf;
  for (int r = mid.row - reach; r <= mid.row + reach; ++r) {
    for (int c = mid.col - reach; c <= mid.col + reach; ++c) {
      const CellIndex cell{c, r};
      if (!grid.contains(cell) || grid.occupied(cell)) continue;
      const double d = distance(grid.cell_center(cell), p);
      if (d <= max_radius && d < best_d) {
        best_d = d;
        best = cell;
      }
    }
  }
  return best;
}

namespace {

// Cell-centre chain from start to goal, or empty when unreachable. With
// `any_angle` the search is lazy Theta*; otherwise plain 8-connected A*.
std::vector<Point2> search(const OccupancyGrid& grid, CellIndex start, CellIndex goal, bool any_angle) {
  const std::size_t n = grid.size();
  std::vector<double> g(n, kInf);
  std::vector<std::size_t> parent(n, n);
  std::vector<char> closed(n, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const std::size_t s0 = grid.linear(start);
  const std::size_t goal_i = grid.linear(goal);
  const Point2 goal_c = grid.cell_center(goal);
  auto center = [&](std::size_t i) { return grid.cell_center(grid.from_linear(i)); };
  auto h = [&](std::size_t i) { return distance(center(i), goal_c); };

  g[s0] = 0.0;
  parent[s0] = s0;
  open.push({h(s0), s0});
  bool found = false;
  while (!open.empty()) {
    const auto [f, s] = open.top();
    open.pop();
    if (closed[s]) continue;
    const CellIndex sc = grid.from_linear(s);
    // Lazy step: the parent was assumed visible when s was queued.
    if (any_angle && parent[s] != s && !line_of_sight(grid, center(parent[s]), center(s))) {
      g[s] = kInf;
      for (int k = 0; k < 8; ++k) {
        if (!can_step(grid, sc, k)) continue;
        const std::size_t nb = grid.linear({sc.col + kDc[k], sc.row + kDr[k]});
        if (!closed[nb]) continue;
        const double cand = g[nb] + distance(center(nb), center(s));
        if (cand < g[s]) {
          g[s] = cand;
          parent[s] = nb;
        }
      }
    }
    closed[s] = 1;
    if (s == goal_i) {
      found = true;
      break;
    }
    const std::size_t ps = any_angle ? parent[s] : s;
    for (int k = 0; k < 8; ++k) {
      if (!can_step(grid, sc, k)) continue;
      const std::size_t nb = grid.linear({sc.col + kDc[k], sc.row + kDr[k]});
      if (closed[nb]) continue;
      const double cand = g[ps] + distance(center(ps), center(nb));
      if (cand < g[nb]) {
        g[nb] = cand;
        parent[nb] = ps;
        open.push({cand + h(nb), nb});
      }
    }
  }
  std::vector<Point2> cells;
  if (!found) return cells;
  for (std::size_t i = goal_i;; i = parent[i]) {
    cells.push_back(center(i));
    if (i == s0) break;
  }
  std::reverse(cells.begin(), cells.end());
  return cells;
}

// Exact endpoints in place of the end cell centres, then greedy string
// pulling: from each kept point jump to the farthest visible one.
std::vector<Point2> smooth(const OccupancyGrid& grid, const std::vector<Point2>& cells, Point2 from, Point2 to) {
  std::vector<Point2> chain{from};
  chain.insert(chain.end(), cells.begin(), cells.end());
  chain.push_back(to);
  std::vector<Point2> out{from};
  std::size_t i = 0;
  while (i + 1 < chain.size()) {
    std::size_t j = chain.size() - 1;
    while (j > i + 1 && !line_of_sight(grid, chain[i], chain[j])) --j;
    out.push_back(chain[j]);
    i = j;
  }
  return out;
}

}  // namespace

std::optional<std::vector<Point2>> try_plan(const OccupancyGrid& grid, Point2 from, Point2 to) {
  const auto start = grid.cell_at(from);
  const auto goal = grid.cell_at(to);
  if (!start || !goal || grid.occupied(*start) || grid.occupied(*goal)) return std::nullopt;
  if (distance(from, to) < 1e-12) return std::vector<Point2>{to};
  if (line_of_sight(grid, from, to)) return std::vector<Point2>{from, to};

  const auto theta = search(grid, *start, *goal, true);
  if (theta.empty()) return std::nullopt;
  // Lazy Theta* can settle on a longer corridor than the grid optimum in
  // clutter; keep whichever smoothed path is shorter.
  auto best = smooth(grid, theta, from, to);
  auto grid_path = smooth(grid, search(grid, *start, *goal, false), from, to);
  if (path_length(grid_path) < path_length(best)) best = std::move(grid_path);
  return best;
}

std::vector<Point2> plan_global_path(const OccupancyGrid& grid, const Pose2D& from, const Pose2D& to) {
  auto path = try_plan(grid, from.position(), to.position());
  if (!path) throw std::runtime_error("plan_global_path: goal unreachable");
  return *path;
}

double path_length(std::span<const Point2> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += distance(path[i - 1], path[i]);
  return total;
}

}  // namespace viewnav::sim
