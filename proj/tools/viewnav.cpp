// viewnav: command-line front end for exploration, single queries, the
// ablation suite and artifact inspection.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "viewnav/bench/suite.hpp"
#include "viewnav/grid_io.hpp"
#include "viewnav/localsearch.hpp"
#include "viewnav/remote_embedding.hpp"
#include "viewnav/viewpoint.hpp"

namespace fs = std::filesystem;
using namespace viewnav;

namespace {

struct Common {
  std::string world;
  std::string vlpg;
  std::string config;
  std::string out;
  std::string endpoint;
  std::string mode = "full";
  std::optional<std::uint64_t> seed;
};

sim::StackConfig load_stack_config(const Common& c) {
  return c.config.empty() ? sim::default_config() : sim::load_config(c.config);
}

std::unique_ptr<EmbeddingProvider> make_provider(const Common& c, const sim::StackConfig& cfg) {
  if (!c.endpoint.empty()) return std::make_unique<RemoteEmbeddingProvider>(c.endpoint);
  return std::make_unique<SyntheticEmbeddingProvider>(cfg.embedding.dimension, cfg.embedding.background_weight,
                                                      cfg.embedding.seed);
}

Vlpg read_vlpg(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path.string());
  return Vlpg::load(in);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw CLI::RequiredError(flag);
}

/// The graph from --vlpg, or a fresh one from exploring `world`.
Vlpg obtain_graph(const Common& c, const std::optional<fs::path>& fallback, const sim::WorldModel& world,
                  const sim::StackConfig& cfg, const EmbeddingProvider& provider) {
  if (!c.vlpg.empty()) return read_vlpg(c.vlpg);
  if (fallback && fs::exists(*fallback)) return read_vlpg(*fallback);
  std::cerr << "no graph given; exploring " << world.name() << " first\n";
  return bench::build_vlpg(world, cfg, provider);
}

int cmd_explore(const Common& c) {
  require(c.world, "--world");
  const auto cfg = load_stack_config(c);
  const auto provider = make_provider(c, cfg);
  const auto world = sim::WorldModel::load(c.world);
  sim::ExploreResult exploration;
  const Vlpg graph = bench::build_vlpg(world, cfg, *provider, &exploration);

  const fs::path out = c.out.empty() ? fs::path("vlpg.ndjson") : fs::path(c.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream file(out);
  if (!file) throw std::runtime_error("cannot write " + out.string());
  graph.save(file);

  const nlohmann::json summary{{"world", world.name()},
                               {"nodes", graph.size()},
                               {"sim_time", exploration.sim_time},
                               {"coverage", exploration.coverage},
                               {"finished", exploration.finished},
                               {"graph", out.string()}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_query(const Common& c, const std::string& query) {
  require(c.world, "--world");
  const auto cfg = load_stack_config(c);
  const auto provider = make_provider(c, cfg);
  const auto world = sim::WorldModel::load(c.world);
  const Vlpg graph = obtain_graph(c, std::nullopt, world, cfg, *provider);

  sim::TaskSpec spec;
  spec.scenario = query;
  spec.query = query;
  std::optional<bench::DirectoryTrace> trace;
  if (!c.out.empty()) trace.emplace(c.out);
  const auto r = sim::run_task(world, graph, spec, sim::parse_mode(c.mode), cfg, c.seed.value_or(0), *provider,
                               trace ? &*trace : nullptr);

  const nlohmann::json j{{"query", query},
                         {"mode", sim::to_string(r.mode)},
                         {"seed", r.seed},
                         {"success", r.success},
                         {"reason", sim::to_string(r.reason)},
                         {"pixel_error", r.pixel_error},
                         {"delta_theta", r.delta_theta},
                         {"replans", r.replans},
                         {"object", r.object_id},
                         {"sim_time", r.sim_time},
                         {"wall_time", r.wall_time},
                         {"pose", {r.final_pose.x, r.final_pose.y, r.final_pose.theta}}};
  std::cout << j.dump(2) << '\n';
  return r.success ? 0 : 2;
}

int cmd_suite(const Common& c, const std::string& suite_path, bool serial) {
  const auto cfg = load_stack_config(c);
  const auto provider = make_provider(c, cfg);
  auto suite = bench::SuiteFile::load(suite_path);
  if (!c.world.empty()) suite.world = c.world;
  if (c.seed) suite.seeds = {*c.seed};
  if (!c.mode.empty() && c.mode != "all") suite.modes = {sim::parse_mode(c.mode)};

  const auto world = sim::WorldModel::load(suite.world);
  const Vlpg graph = obtain_graph(c, suite.vlpg, world, cfg, *provider);

  const fs::path out = c.out.empty() ? fs::path("suite_out") : fs::path(c.out);
  fs::create_directories(out);
  if (c.vlpg.empty()) {
    std::ofstream g(out / "vlpg.ndjson");
    graph.save(g);
  }

  bench::SuiteOptions options;
  options.exec = serial ? Execution::serial : Execution::parallel;
  options.trace_dir = out / "traces";
  const auto report = bench::run_suite(suite, world, graph, cfg, *provider, options);

  write_text(out / "results.csv", bench::results_csv(report.results));
  auto j = report.to_json(suite);
  j["graph_nodes"] = graph.size();
  write_text(out / "report.json", j.dump(2) + "\n");

  std::printf("%-12s %5s %5s %7s %9s %9s\n", "mode", "runs", "ok", "SAE", "px_err", "dtheta");
  for (const auto& m : report.modes)
    std::printf("%-12s %5zu %5zu %7.3f %9.2f %9.3f\n", std::string(sim::to_string(m.mode)).c_str(), m.runs,
                m.successes, m.sae, m.mean_pixel_error, m.mean_delta_theta);
  std::printf("wall time %.1f s, results in %s\n", report.wall_time, out.string().c_str());
  return 0;
}

int cmd_inspect(const Common& c, const std::string& query) {
  const auto cfg = load_stack_config(c);
  if (c.world.empty() && c.vlpg.empty()) {
    std::cout << sim::config_to_json(cfg).dump(2) << '\n';
    return 0;
  }
  nlohmann::json j;
  std::optional<Vlpg> graph;
  if (!c.vlpg.empty()) {
    graph = read_vlpg(c.vlpg);
    j["graph"] = {{"nodes", graph->size()},
                  {"edges", graph->edges().size()},
                  {"epsilon", graph->epsilon()},
                  {"embedding_length", graph->embedding_length()}};
  }
  std::optional<sim::WorldModel> world;
  if (!c.world.empty()) {
    world = sim::WorldModel::load(c.world);
    auto objects = nlohmann::json::array();
    for (const auto& o : world->objects())
      objects.push_back({{"id", o.id}, {"label", o.label}, {"centroid", {o.centroid.x, o.centroid.y}}});
    j["world"] = {{"name", world->name()},
                  {"width", world->grid().width()},
                  {"height", world->grid().height()},
                  {"resolution", world->grid().resolution()},
                  {"objects", objects}};
  }

  if (!query.empty()) {
    if (!graph || !world) throw std::runtime_error("inspect with a query needs --world and --vlpg");
    const auto provider = make_provider(c, cfg);
    const auto plan = initial_viewpoint(*graph, query, *provider, world->grid(), cfg.viewpoint, Execution::parallel);
    j["viewpoint"] = sim::plan_to_json(plan);
    if (!c.out.empty() && plan.chosen) {
      fs::create_directories(c.out);
      auto map = init_probability_map(world->grid());
      const auto views = plan.chosen_cluster().poses();
      apply_cluster_views(map, views, world->grid(), cfg.fov, cfg.search.p_l_star, Execution::parallel);
      std::vector<double> p_l(map.p_nl.size());
      for (std::size_t i = 0; i < p_l.size(); ++i) p_l[i] = 1.0 - map.p_nl[i];
      save_field_pgm(map.geometry, p_l, fs::path(c.out) / "prior_map.pgm");
      write_text(fs::path(c.out) / "viewpoint.json", j["viewpoint"].dump(2) + "\n");
    }
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object navigation with a vision-language pose graph"};
  app.require_subcommand(1);
  Common c;
  std::string query;
  std::string suite_path;
  bool serial = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--world", c.world, "World JSON file");
    sub->add_option("--vlpg", c.vlpg, "Prior graph (ndjson)");
    sub->add_option("--config", c.config, "Stack configuration JSON");
    sub->add_option("--out", c.out, "Output file or directory");
    sub->add_option("--embed-endpoint", c.endpoint, "Base URL of a remote embedding service");
  };

  auto* explore = app.add_subcommand("explore", "Explore a world and write its prior graph");
  add_common(explore);

  auto* q = app.add_subcommand("query", "Run one object-navigation task");
  add_common(q);
  q->add_option("object", query, "Object to find")->required();
  q->add_option("--mode", c.mode, "frontier | vlpg | vlpg+center | full")->capture_default_str();
  q->add_option("--seed", c.seed, "Random seed");

  auto* suite = app.add_subcommand("suite", "Run the ablation suite");
  add_common(suite);
  suite->add_option("suite", suite_path, "Suite JSON file")->required();
  suite->add_option("--mode", c.mode, "Restrict to one mode (default: the suite's list)");
  suite->add_option("--seed", c.seed, "Restrict to one seed");
  suite->add_flag("--serial", serial, "Run scenarios one after another");

  auto* inspect = app.add_subcommand("inspect", "Dump graph, world, cluster and probability-map artifacts");
  add_common(inspect);
  inspect->add_option("object", query, "Query whose viewpoint clusters to dump");

  CLI11_PARSE(app, argc, argv);
  if (suite->parsed() && suite->count("--mode") == 0) c.mode = "all";

  try {
    if (explore->parsed()) return cmd_explore(c);
    if (q->parsed()) return cmd_query(c, query);
    if (suite->parsed()) return cmd_suite(c, suite_path, serial);
    return cmd_inspect(c, query);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
