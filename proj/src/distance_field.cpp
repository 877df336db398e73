#include "viewnav/distance_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace viewnav {
namespace {

constexpr double kFar = 1e12;

// 1-D squared distance transform of sampled function f (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + q * static_cast<double>(q)) - (f[p] + p * static_cast<double>(p))) /
          (2.0 * q - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
      k = 0;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace

DistanceField::DistanceField(const OccupancyGrid& grid) : grid_(grid) {
  const int w = grid.width();
  const int h = grid.height();
  dist_.assign(grid.size(), kFar);
  if (grid.occupied_count() == 0) return;

  std::vector<double> sq(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) sq[i] = grid.cells()[i] ? 0.0 : kFar;

  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  f.resize(h);
  d.resize(h);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) f[r] = sq[grid.linear({c, r})];
    edt_1d(f, d, v, z);
    for (int r = 0; r < h; ++r) sq[grid.linear({c, r})] = d[r];
  }
  f.resize(w);
  d.resize(w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) f[c] = sq[grid.linear({c, r})];
    edt_1d(f, d, v, z);
    for (int c = 0; c < w; ++c) sq[grid.linear({c, r})] = d[c];
  }
  for (std::size_t i = 0; i < grid.size(); ++i) dist_[i] = std::sqrt(sq[i]) * grid.resolution();
}

double DistanceField::clearance(Point2 p) const {
  const auto cell = grid_.cell_at(p);
  if (!cell) return 0.0;
  if (grid_.occupied(*cell)) return 0.0;
  return std::max(0.0, dist_[grid_.linear(*cell)] - 0.5 * grid_.resolution());
}

}  // namespace viewnav
