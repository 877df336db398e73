#pragma once

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "viewnav/centering.hpp"
#include "viewnav/embedding.hpp"
#include "viewnav/sim/world.hpp"

namespace viewnav::sim {

struct DetectorConfig {
  std::size_t min_visible_cells = 2;
  double pixel_noise = 0.0;          ///< std-dev added to center_u, px
  double false_negative_rate = 0.0;
  double camera_height = 0.5;        ///< metres above the floor
  double floor_object_height = 0.6;
  double elevated_object_base = 0.5;
  double elevated_object_height = 0.4;
};

struct Detection {
  std::string label;
  std::size_t object = 0;  ///< index into WorldModel::objects()
  BoundingBoxState box;
  double confidence = 0.0;
  std::size_t visible_cells = 0;
};

/// Cells of `object` inside the sector whose ray from the apex first hits
/// that very cell (front faces only).
std::vector<CellIndex> visible_cells(const WorldModel& world, const FovSector& fov, std::size_t object);

/// Box of one object seen from `pose`; nullopt with fewer than
/// min_visible_cells visible cells. Noise-free.
std::optional<Detection> project_object(const WorldModel& world, const Pose2D& pose,
                                        const CameraModel& cam, const FovParams& fov,
                                        std::size_t object, const DetectorConfig& config);

/// Most visible instance of `query`. Pixel noise and false negatives are
/// applied only when `rng` is given.
std::optional<Detection> render_detection(const WorldModel& world, const Pose2D& pose,
                                          const CameraModel& cam, const FovParams& fov,
                                          std::string_view query, const DetectorConfig& config,
                                          std::mt19937_64* rng = nullptr);

/// Labels in view with the share of the image area they cover, the input
/// of the synthetic embedding provider. Every object counts; heights come
/// from the detector's object model.
Observation observe(const WorldModel& world, const Pose2D& pose, const CameraModel& cam,
                    const FovParams& fov, const DetectorConfig& config = {});

}  // namespace viewnav::sim
