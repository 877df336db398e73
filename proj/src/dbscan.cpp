#include "viewnav/dbscan.hpp"

#include <cmath>
#include <stdexcept>

namespace viewnav {
namespace {

double squared_distance(const Point4& a, const Point4& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

DbscanResult dbscan(std::span<const Point4> points, double eps, std::size_t min_pts,
                    Execution exec) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan: eps must be > 0");
  if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");

  const std::size_t n = points.size();
  const double eps2 = eps * eps;
  std::vector<std::vector<std::size_t>> neighbours(n);
  for_each_index(n, exec, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j)
      if (squared_distance(points[i], points[j]) <= eps2) neighbours[i].push_back(j);
  });

  DbscanResult out;
  out.labels.assign(n, kNoise);
  out.core.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) out.core[i] = neighbours[i].size() >= min_pts;

  constexpr int kUnassigned = -2;
  std::vector<int> label(n, kUnassigned);
  int next = 0;
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnassigned || !out.core[i]) continue;
    const int id = next++;
    label[i] = id;
    frontier.assign(1, i);
    while (!frontier.empty()) {
      const std::size_t p = frontier.back();
      frontier.pop_back();
      if (!out.core[p]) continue;
      for (const std::size_t q : neighbours[p]) {
        if (label[q] != kUnassigned) continue;
        label[q] = id;
        frontier.push_back(q);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = label[i] == kUnassigned ? kNoise : label[i];
  out.cluster_count = next;
  return out;
}

}  // namespace viewnav
