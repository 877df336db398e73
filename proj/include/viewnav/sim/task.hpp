#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "viewnav/embedding.hpp"
#include "viewnav/localsearch.hpp"
#include "viewnav/pose_graph.hpp"
#include "viewnav/sim/config.hpp"
#include "viewnav/sim/world.hpp"
#include "viewnav/viewpoint.hpp"

namespace viewnav::sim {

enum class Mode { frontier, vlpg, vlpg_center, full };

std::string_view to_string(Mode mode);
/// Accepts "frontier", "vlpg", "vlpg+center", "full".
Mode parse_mode(std::string_view text);

enum class Reason {
  centered,         ///< box held near the image centre for the stability window
  arrived_visible,  ///< reached the goal pose with the object in view
  not_visible,      ///< reached the goal pose, object not in view
  exhausted,        ///< local search or exploration ran out of options
  timeout,
  wrong_object,
  unreachable,      ///< no path to the goal pose
};

std::string_view to_string(Reason reason);

struct TaskSpec {
  std::string scenario;
  std::string query;
  std::optional<Pose2D> start;     ///< world start when absent
  std::vector<WorldEvent> events;  ///< in addition to the world's own
};

struct ScenarioResult {
  std::string scenario;
  Mode mode = Mode::frontier;
  std::uint64_t seed = 0;
  bool success = false;
  int pixel_error = -1;        ///< rounded mean |center_u| over the last window; -1 without detections
  double delta_theta = kPi;    ///< line-of-sight deviation at termination
  std::size_t replans = 0;
  Reason reason = Reason::timeout;
  double sim_time = 0.0;
  double wall_time = 0.0;      ///< seconds; not part of the deterministic output
  std::string object_id;       ///< instance used for delta_theta
  Pose2D final_pose;
};

/// Receives the run trace. Calls arrive in simulation order from one thread.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const nlohmann::json& line) = 0;
  virtual void snapshot(const std::string& name, const ProbabilityMap& map) = 0;
  virtual void artifact(const std::string& name, const nlohmann::json& content) = 0;
};

/// Candidates, clusters and the chosen viewpoint as written to run traces.
nlohmann::json plan_to_json(const ViewpointPlan& plan);

/// Runs one object-navigation task in a private copy of `world`. The graph
/// must come from exploring `world` in its initial state (it is unused in
/// frontier mode).
ScenarioResult run_task(const WorldModel& world, const Vlpg& graph, const TaskSpec& spec, Mode mode,
                        const StackConfig& config, std::uint64_t seed,
                        const EmbeddingProvider& provider, TraceSink* trace = nullptr);

}  // namespace viewnav::sim
