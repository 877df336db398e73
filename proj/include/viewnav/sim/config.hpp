#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "viewnav/centering.hpp"
#include "viewnav/localsearch.hpp"
#include "viewnav/sim/detector.hpp"
#include "viewnav/sim/explore.hpp"
#include "viewnav/sim/navigator.hpp"
#include "viewnav/sim/robot.hpp"
#include "viewnav/viewpoint.hpp"

namespace viewnav::sim {

struct EmbeddingSettings {
  std::size_t dimension = 512;
  double background_weight = 0.02;
  std::uint64_t seed = 0;
};

struct TaskSettings {
  double dt = 0.1;
  double timeout = 300.0;               ///< simulated seconds per task
  std::size_t stability_window = 10;    ///< steps the box must stay centred
  double center_threshold_px = 5.0;
  std::size_t lost_limit = 30;          ///< steps without detection before giving up centring
  double approach_distance = 1.5;       ///< frontier baseline stand-off from the object
  double start_jitter = 0.3;            ///< metres, uniform per axis
  bool random_start_heading = true;
  double delta_theta_max = kPi / 2.0;
};

/// Every tunable of the stack in one place. The JSON form mirrors the field
/// names; missing keys keep their defaults and unknown keys are rejected.
struct StackConfig {
  FovParams fov;
  CameraModel camera;
  RobotParams robot;
  DetectorConfig detector;
  NavConfig nav;
  PlannerConfig planner;
  ExploreConfig explore;
  ViewpointConfig viewpoint;
  SearchConfig search;
  double vlpg_epsilon = 0.97;
  EmbeddingSettings embedding;
  TaskSettings task;

  /// Copies shared values (FOV, robot limits, time step) into the module
  /// blocks that use them. Called by the JSON loader.
  void sync();
  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  ExploreSetup explore_setup() const;
};

StackConfig default_config();
nlohmann::json config_to_json(const StackConfig& config);
StackConfig config_from_json(const nlohmann::json& j);
StackConfig load_config(const std::filesystem::path& path);

}  // namespace viewnav::sim
