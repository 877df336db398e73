#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "viewnav/bench/metrics.hpp"
#include "viewnav/sim/explore.hpp"
#include "viewnav/sim/task.hpp"

namespace viewnav::bench {

struct SuiteScenario {
  sim::TaskSpec task;
  std::vector<std::string> tags;

  bool has_tag(std::string_view tag) const;
};

/// Suite file (JSON):
///   {"world": "<world json, relative to the suite>",
///    "vlpg": "<optional graph file>",
///    "modes": ["frontier", ...], "seeds": [0, ...],
///    "scenarios": [{"id", "query", "start"?: [x,y,theta], "tags"?: [...],
///                   "events"?: [...]}]}
struct SuiteFile {
  std::filesystem::path world;
  std::optional<std::filesystem::path> vlpg;
  std::vector<sim::Mode> modes;
  std::vector<std::uint64_t> seeds;
  std::vector<SuiteScenario> scenarios;

  static SuiteFile load(const std::filesystem::path& path);
  static SuiteFile from_json(const nlohmann::json& j, const std::filesystem::path& base);
};

struct ModeSummary {
  sim::Mode mode = sim::Mode::frontier;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double sae = 0.0;
  double mean_pixel_error = 0.0;  ///< over successful runs; 0 when none
  double mean_delta_theta = 0.0;  ///< over successful runs; 0 when none
};

struct SuiteReport {
  std::vector<sim::ScenarioResult> results;  ///< scenario-major, then mode, then seed
  std::vector<ModeSummary> modes;
  double wall_time = 0.0;

  const ModeSummary& summary(sim::Mode mode) const;
  nlohmann::json to_json(const SuiteFile& suite) const;
};

struct SuiteOptions {
  Execution exec = Execution::parallel;        ///< across runs
  std::optional<std::filesystem::path> trace_dir;  ///< one sub-directory per run
};

ModeSummary summarize(sim::Mode mode, std::span<const sim::ScenarioResult> results,
                      double delta_theta_max);

/// Runs every scenario x mode x seed. Each run owns its world copy and
/// random stream, so the results do not depend on scheduling.
SuiteReport run_suite(const SuiteFile& suite, const sim::WorldModel& world, const Vlpg& graph,
                      const sim::StackConfig& config, const EmbeddingProvider& provider,
                      const SuiteOptions& options = {});

/// One header line plus one row per result; floats in fixed notation.
std::string results_csv(std::span<const sim::ScenarioResult> results);

/// Builds the prior graph by exploring the world from its start pose.
Vlpg build_vlpg(const sim::WorldModel& world, const sim::StackConfig& config,
                const EmbeddingProvider& provider, sim::ExploreResult* exploration = nullptr);

/// Writes a run trace to a directory: trace.ndjson, one PGM per probability
/// map snapshot (bright = likely) and one JSON file per artifact.
class DirectoryTrace final : public sim::TraceSink {
 public:
  explicit DirectoryTrace(std::filesystem::path dir);
  void record(const nlohmann::json& line) override;
  void snapshot(const std::string& name, const ProbabilityMap& map) override;
  void artifact(const std::string& name, const nlohmann::json& content) override;

 private:
  std::filesystem::path dir_;
  std::ofstream out_;
};

}  // namespace viewnav::bench
