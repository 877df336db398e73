#include "viewnav/bench/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "viewnav/grid_io.hpp"

namespace viewnav::bench {

bool SuiteScenario::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

SuiteFile SuiteFile::from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  SuiteFile s;
  s.world = base / j.at("world").get<std::string>();
  if (j.contains("vlpg")) s.vlpg = base / j.at("vlpg").get<std::string>();
  for (const auto& m : j.at("modes")) s.modes.push_back(sim::parse_mode(m.get<std::string>()));
  if (s.modes.empty()) throw std::runtime_error("suite: empty mode list");
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (s.seeds.empty()) throw std::runtime_error("suite: empty seed list");
  for (const auto& sc : j.at("scenarios")) {
    SuiteScenario scenario;
    scenario.task.scenario = sc.at("id").get<std::string>();
    scenario.task.query = sc.at("query").get<std::string>();
    if (sc.contains("start")) {
      const auto& p = sc.at("start");
      scenario.task.start = Pose2D(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    }
    if (sc.contains("events"))
      for (const auto& e : sc.at("events")) scenario.task.events.push_back(sim::event_from_json(e));
    if (sc.contains("tags")) scenario.tags = sc.at("tags").get<std::vector<std::string>>();
    s.scenarios.push_back(std::move(scenario));
  }
  if (s.scenarios.empty()) throw std::runtime_error("suite: no scenarios");
  return s;
}

SuiteFile SuiteFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open suite file " + path.string());
  return from_json(nlohmann::json::parse(in), path.parent_path());
}

const ModeSummary& SuiteReport::summary(sim::Mode mode) const {
  for (const auto& m : modes)
    if (m.mode == mode) return m;
  throw std::out_of_range("suite report: mode not run");
}

ModeSummary summarize(sim::Mode mode, std::span<const sim::ScenarioResult> results,
                      double delta_theta_max) {
  ModeSummary out;
  out.mode = mode;
  std::vector<SaeSample> samples;
  for (const auto& r : results) {
    if (r.mode != mode) continue;
    samples.push_back({r.success, r.delta_theta});
    ++out.runs;
    if (!r.success) continue;
    ++out.successes;
    out.mean_pixel_error += r.pixel_error;
    out.mean_delta_theta += r.delta_theta;
  }
  if (out.successes > 0) {
    out.mean_pixel_error /= static_cast<double>(out.successes);
    out.mean_delta_theta /= static_cast<double>(out.successes);
  }
  if (!samples.empty()) out.sae = sae(samples, delta_theta_max);
  return out;
}

SuiteReport run_suite(const SuiteFile& suite, const sim::WorldModel& world, const Vlpg& graph,
                      const sim::StackConfig& config, const EmbeddingProvider& provider,
                      const SuiteOptions& options) {
  if (suite.modes.empty()) throw std::invalid_argument("run_suite: empty mode list");
  struct Job {
    const SuiteScenario* scenario;
    sim::Mode mode;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& sc : suite.scenarios)
    for (const auto mode : suite.modes)
      for (const auto seed : suite.seeds) jobs.push_back({&sc, mode, seed});

  const auto wall0 = std::chrono::steady_clock::now();
  SuiteReport report;
  report.results.resize(jobs.size());
  for_each_index(jobs.size(), options.exec, [&](std::size_t i) {
    const Job& job = jobs[i];
    std::optional<DirectoryTrace> trace;
    if (options.trace_dir) {
      char name[64];
      std::snprintf(name, sizeof name, "%03zu_", i);
      trace.emplace(*options.trace_dir / (name + job.scenario->task.scenario + "_" +
                                          std::string(sim::to_string(job.mode)) + "_s" +
                                          std::to_string(job.seed)));
    }
    report.results[i] = sim::run_task(world, graph, job.scenario->task, job.mode, config, job.seed, provider,
                                      trace ? &*trace : nullptr);
  });
  for (const auto mode : suite.modes)
    report.modes.push_back(summarize(mode, report.results, config.task.delta_theta_max));
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return report;
}

nlohmann::json SuiteReport::to_json(const SuiteFile& suite) const {
  nlohmann::json j;
  auto modes_j = nlohmann::json::object();
  for (const auto& m : modes)
    modes_j[std::string(sim::to_string(m.mode))] = {{"runs", m.runs},
                                                     {"successes", m.successes},
                                                     {"sae", m.sae},
                                                     {"mean_pixel_error", m.mean_pixel_error},
                                                     {"mean_delta_theta", m.mean_delta_theta}};
  j["modes"] = modes_j;

  // Per object and mode: mean pixel / angular error over successful runs.
  auto objects = nlohmann::json::object();
  for (const auto& sc : suite.scenarios) {
    auto per_mode = nlohmann::json::object();
    for (const auto mode : suite.modes) {
      std::size_t n = 0;
      std::size_t ok = 0;
      double px = 0.0;
      double dt = 0.0;
      for (const auto& r : results) {
        if (r.scenario != sc.task.scenario || r.mode != mode) continue;
        ++n;
        if (!r.success) continue;
        ++ok;
        px += r.pixel_error;
        dt += r.delta_theta;
      }
      per_mode[std::string(sim::to_string(mode))] = {
          {"runs", n},
          {"successes", ok},
          {"mean_pixel_error", ok ? nlohmann::json(px / ok) : nlohmann::json(nullptr)},
          {"mean_delta_theta", ok ? nlohmann::json(dt / ok) : nlohmann::json(nullptr)}};
    }
    objects[sc.task.scenario] = {{"query", sc.task.query}, {"tags", sc.tags}, {"modes", per_mode}};
  }
  j["scenarios"] = objects;
  j["run_count"] = results.size();
  return j;
}

std::string results_csv(std::span<const sim::ScenarioResult> results) {
  std::ostringstream out;
  out << "scenario,mode,seed,success,pixel_error,delta_theta,replans,reason,sim_time,object\n";
  char buf[64];
  for (const auto& r : results) {
    out << r.scenario << ',' << sim::to_string(r.mode) << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',';
    if (r.pixel_error >= 0) out << r.pixel_error;
    std::snprintf(buf, sizeof buf, ",%.6f,", r.delta_theta);
    out << buf << r.replans << ',' << sim::to_string(r.reason);
    std::snprintf(buf, sizeof buf, ",%.1f,", r.sim_time);
    out << buf << r.object_id << '\n';
  }
  return out.str();
}

Vlpg build_vlpg(const sim::WorldModel& world, const sim::StackConfig& config,
                const EmbeddingProvider& provider, sim::ExploreResult* exploration) {
  Vlpg graph(config.vlpg_epsilon);
  auto result = sim::frontier_explore(world, world.start(), config.explore_setup(), &provider, &graph);
  if (exploration) *exploration = std::move(result);
  return graph;
}

DirectoryTrace::DirectoryTrace(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  out_.open(dir_ / "trace.ndjson");
  if (!out_) throw std::runtime_error("cannot write trace in " + dir_.string());
}

void DirectoryTrace::record(const nlohmann::json& line) { out_ << line.dump() << '\n'; }

void DirectoryTrace::snapshot(const std::string& name, const ProbabilityMap& map) {
  std::vector<double> p_l(map.p_nl.size());
  for (std::size_t i = 0; i < p_l.size(); ++i) p_l[i] = 1.0 - map.p_nl[i];
  save_field_pgm(map.geometry, p_l, dir_ / (name + ".pgm"));
}

void DirectoryTrace::artifact(const std::string& name, const nlohmann::json& content) {
  std::ofstream out(dir_ / (name + ".json"));
  out << content.dump(2) << '\n';
}

}  // namespace viewnav::bench
