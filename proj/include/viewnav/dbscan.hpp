#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "viewnav/parallel.hpp"

namespace viewnav {

using Point4 = std::array<double, 4>;

inline constexpr int kNoise = -1;

struct DbscanResult {
  std::vector<int> labels;  ///< cluster id per point, kNoise for noise
  std::vector<bool> core;   ///< |N_eps(p)| >= min_pts, p counted in its own neighbourhood
  int cluster_count = 0;
};

/// Density-based clustering on Euclidean distance (neighbour iff d <= eps).
/// Clusters are numbered in order of their first core point; a border point
/// joins the first cluster that reaches it. Deterministic for a given order.
DbscanResult dbscan(std::span<const Point4> points, double eps, std::size_t min_pts,
                    Execution exec = Execution::serial);

}  // namespace viewnav
