#include "viewnav/sim/task.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

#include "viewnav/bench/metrics.hpp"
#include "viewnav/sim/detector.hpp"
#include "viewnav/sim/explore.hpp"
#include "viewnav/sim/planner.hpp"
#include "viewnav/viewpoint.hpp"

namespace viewnav::sim {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::frontier: return "frontier";
    case Mode::vlpg: return "vlpg";
    case Mode::vlpg_center: return "vlpg+center";
    case Mode::full: return "full";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "frontier") return Mode::frontier;
  if (text == "vlpg") return Mode::vlpg;
  if (text == "vlpg+center") return Mode::vlpg_center;
  if (text == "full") return Mode::full;
  throw std::invalid_argument("unknown mode: " + std::string(text));
}

std::string_view to_string(Reason reason) {
  switch (reason) {
    case Reason::centered: return "centered";
    case Reason::arrived_visible: return "arrived_visible";
    case Reason::not_visible: return "not_visible";
    case Reason::exhausted: return "exhausted";
    case Reason::timeout: return "timeout";
    case Reason::wrong_object: return "wrong_object";
    case Reason::unreachable: return "unreachable";
  }
  return "?";
}

namespace {

struct Timeout {};

nlohmann::json pose_json(const Pose2D& p) { return {p.x, p.y, p.theta}; }

class Runner {
 public:
  Runner(const WorldModel& world, const Vlpg& graph, const TaskSpec& spec, Mode mode,
         const StackConfig& config, std::uint64_t seed, const EmbeddingProvider& provider,
         TraceSink* trace)
      : world_(world),
        prior_(world.grid()),
        graph_(graph),
        spec_(spec),
        mode_(mode),
        cfg_(config),
        seed_(seed),
        provider_(provider),
        trace_(trace),
        rng_(seed),
        nav_(config.nav, config.planner, config.camera) {
    for (const auto& e : world.events())
      if (!e.at_query) timed_.push_back(e);
    for (const auto& e : spec.events)
      if (!e.at_query) timed_.push_back(e);
    fired_.assign(timed_.size(), 0);
  }

  ScenarioResult run();

  // Used by the local-search agent.
  NavResult navigate_for_search(const Pose2D& target) {
    const auto r = navigate(target, true, true);
    return r;
  }
  bool detect_now() { return sense().has_value(); }
  const Pose2D& pose() const { return robot_.pose; }

 private:
  void refresh();
  std::optional<Detection> sense();
  void advance(Control u, const std::optional<Detection>& det);
  void note_pixel(const Detection& det);
  NavResult navigate(const Pose2D& goal, bool align, bool stop_on_detect);
  void dwell(std::size_t steps);
  Reason center();
  Reason explore_and_find();
  bool identified();
  Reason approach(const Detection& det);
  Reason viewpoint_pipeline(const ViewpointPlan& plan);
  void place_start();
  void set_phase(std::string phase);

  WorldModel world_;
  OccupancyGrid prior_;
  const Vlpg& graph_;
  const TaskSpec& spec_;
  Mode mode_;
  const StackConfig& cfg_;
  std::uint64_t seed_;
  const EmbeddingProvider& provider_;
  TraceSink* trace_;
  std::mt19937_64 rng_;
  Navigator nav_;

  RobotState robot_;
  double time_ = 0.0;
  std::vector<WorldEvent> timed_;
  std::vector<char> fired_;
  std::size_t field_revision_ = static_cast<std::size_t>(-1);
  DistanceField field_;
  OccupancyGrid inflated_;
  bool map_changed_ = true;
  std::deque<double> pixels_;
  std::string phase_ = "start";
  std::size_t replans_ = 0;
};

class Agent final : public SearchAgent {
 public:
  explicit Agent(Runner& runner) : runner_(runner) {}
  Pose2D pose() const override { return runner_.pose(); }
  NavResult navigate_to(const Pose2D& target) override { return runner_.navigate_for_search(target); }
  bool detect() override { return runner_.detect_now(); }

 private:
  Runner& runner_;
};

void Runner::refresh() {
  if (world_.revision() == field_revision_) return;
  field_revision_ = world_.revision();
  field_ = DistanceField(world_.grid());
  inflated_ = inflate(world_.grid(), cfg_.nav.inflation);
  map_changed_ = true;
}

void Runner::set_phase(std::string phase) {
  phase_ = std::move(phase);
  if (trace_) trace_->record({{"t", time_}, {"event", "phase"}, {"phase", phase_}});
}

std::optional<Detection> Runner::sense() {
  return render_detection(world_, robot_.pose, cfg_.camera, cfg_.fov, spec_.query, cfg_.detector, &rng_);
}

void Runner::advance(Control u, const std::optional<Detection>& det) {
  if (trace_) {
    nlohmann::json line{{"t", time_}, {"phase", phase_}, {"pose", pose_json(robot_.pose)}, {"cmd", {u.v, u.omega}}};
    line["det"] = det ? nlohmann::json{{"u", det->box.center_u}, {"width", det->box.width},
                                       {"depth", det->box.depth_estimate}, {"object", world_.objects()[det->object].id}}
                      : nlohmann::json(nullptr);
    trace_->record(line);
  }
  robot_ = step(field_, robot_, u, cfg_.task.dt, cfg_.robot, &rng_);
  time_ += cfg_.task.dt;
  for (std::size_t i = 0; i < timed_.size(); ++i) {
    if (fired_[i] || timed_[i].time > time_ + 1e-9) continue;
    fired_[i] = 1;
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, AddObstacleAction>) world_.add_obstacle(a.polygon);
          else if constexpr (std::is_same_v<T, RemoveObjectAction>) world_.remove_object(a.id);
          else if constexpr (std::is_same_v<T, MoveObjectAction>) world_.move_object(a.id, a.offset);
        },
        timed_[i].action);
    if (trace_) trace_->record({{"t", time_}, {"event", "world"}, {"action", event_to_json(timed_[i])}});
  }
  refresh();
  if (time_ >= cfg_.task.timeout - 1e-9) throw Timeout{};
}

void Runner::note_pixel(const Detection& det) {
  pixels_.push_back(std::abs(det.box.center_u));
  while (pixels_.size() > cfg_.task.stability_window) pixels_.pop_front();
}

NavResult Runner::navigate(const Pose2D& goal, bool align, bool stop_on_detect) {
  nav_.set_goal(goal, align);
  if (trace_) trace_->record({{"t", time_}, {"event", "goal"}, {"pose", pose_json(goal)}});
  while (true) {
    const auto det = sense();
    if (stop_on_detect && det) return NavResult::detected;
    Control u;
    const NavStatus st = nav_.tick(robot_.pose, time_, inflated_, map_changed_, field_, u);
    map_changed_ = false;
    if (st == NavStatus::arrived) return NavResult::arrived;
    if (st == NavStatus::failed) return NavResult::failed;
    advance(u, det);
  }
}

void Runner::dwell(std::size_t steps) {
  for (std::size_t i = 0; i < steps; ++i) {
    const auto det = sense();
    if (det) note_pixel(*det);
    advance({}, det);
  }
}

Reason Runner::center() {
  set_phase("center");
  const Pose2D hold = robot_.pose;
  std::size_t stable = 0;
  std::size_t lost = 0;
  double last_bearing = 0.0;  // right of the optical axis
  Control last{};
  bool pivot = false;
  while (true) {
    auto det = sense();
    if (!det && !pivot && (last.v != 0.0 || last.omega != 0.0)) {
      // A small step can put a thin obstacle between camera and target: undo
      // it and finish by turning in place, which keeps the line of sight.
      pivot = true;
      advance({-last.v, -last.omega}, det);
      det = sense();
    }
    Control u;
    if (det) {
      lost = 0;
      note_pixel(*det);
      last_bearing = cfg_.camera.bearing_of_pixel(det->box.center_u);
      stable = std::abs(det->box.center_u) < cfg_.task.center_threshold_px ? stable + 1 : 0;
      if (stable >= cfg_.task.stability_window) return Reason::centered;
      u = pivot ? Control{0.0, std::clamp(-cfg_.nav.heading_gain * last_bearing, -cfg_.robot.omega_max,
                                          cfg_.robot.omega_max)}
                : select_control(robot_.pose, det->box, hold, field_, cfg_.camera, cfg_.planner).control;
    } else {
      stable = 0;
      if (++lost > cfg_.task.lost_limit) return Reason::not_visible;
      u = {0.0, std::clamp(-cfg_.nav.heading_gain * last_bearing, -cfg_.robot.omega_max, cfg_.robot.omega_max)};
    }
    last = u;
    advance(u, det);
  }
}

Reason Runner::approach(const Detection& det) {
  set_phase("approach");
  const double b = -cfg_.camera.bearing_of_pixel(det.box.center_u);
  const Pose2D& p = robot_.pose;
  const Point2 dir{std::cos(p.theta + b), std::sin(p.theta + b)};
  const Point2 est = p.position() + det.box.depth_estimate * dir;
  const double d = det.box.depth_estimate;
  const Point2 stand = d > cfg_.task.approach_distance ? p.position() + (d - cfg_.task.approach_distance) * dir
                                                       : p.position();
  navigate(Pose2D(stand, std::atan2(est.y - stand.y, est.x - stand.x)), true, false);
  // Modes with centering apply it however the object was found.
  if (mode_ == Mode::vlpg_center || mode_ == Mode::full) return sense() ? center() : Reason::not_visible;
  set_phase("dwell");
  dwell(cfg_.task.stability_window);
  return sense().has_value() ? Reason::arrived_visible : Reason::not_visible;
}

// Exploration has no detector of its own: the live view must pass the same
// prompt-pair test the graph uses before the simulator box is trusted.
bool Runner::identified() {
  const auto prompts = PromptPair::for_object(spec_.query);
  const EmbeddingVector view = provider_.embed_image(observe(world_, robot_.pose, cfg_.camera, cfg_.fov, cfg_.detector));
  return cosine_similarity(view, provider_.embed_text(prompts.positive)) >
         cosine_similarity(view, provider_.embed_text(prompts.negative));
}

Reason Runner::explore_and_find() {
  set_phase("explore");
  FrontierExplorer explorer(KnownMap(world_.grid()), cfg_.explore, cfg_.nav, cfg_.planner, cfg_.camera,
                            cfg_.fov, cfg_.robot.radius);
  while (true) {
    const auto det = sense();
    if (det && identified()) return approach(*det);
    const Control u = explorer.tick(world_, robot_.pose, time_, field_);
    if (explorer.done()) return Reason::exhausted;
    advance(u, det);
  }
}

Reason Runner::viewpoint_pipeline(const ViewpointPlan& plan) {
  set_phase("navigate");
  const Pose2D goal = plan.best->pose;
  const NavResult nav = navigate(goal, true, false);
  if (nav == NavResult::failed) return Reason::unreachable;

  if (mode_ == Mode::vlpg) {
    set_phase("dwell");
    dwell(cfg_.task.stability_window);
    return sense().has_value() ? Reason::arrived_visible : Reason::not_visible;
  }
  if (sense()) return center();
  if (mode_ == Mode::vlpg_center) return Reason::not_visible;

  set_phase("search");
  ProbabilityMap map = init_probability_map(world_.grid().window(robot_.pose.position(), cfg_.search.window_size));
  const auto views = plan.chosen_cluster().poses();
  apply_cluster_views(map, views, prior_, cfg_.fov, cfg_.search.p_l_star);
  if (trace_) trace_->snapshot("search_00", map);
  Agent agent(*this);
  const auto outcome = local_search_loop(
      map, agent, field_, cfg_.search, seed_ ^ 0x9e3779b97f4a7c15ULL,
      [&](const SearchIteration& it, const ProbabilityMap& m) {
        replans_ = it.iteration;
        if (!trace_) return;
        const auto& c = it.choice.costs[it.choice.index];
        trace_->record({{"t", time_},
                        {"event", "replan"},
                        {"iteration", it.iteration},
                        {"from", pose_json(it.from)},
                        {"chosen", pose_json(it.choice.pose)},
                        {"sample", it.choice.index},
                        {"cost", {{"distance", c.distance}, {"quality", c.quality}, {"obstacle", c.obstacle}, {"total", c.total}}},
                        {"nav", it.nav == NavResult::arrived ? "arrived" : it.nav == NavResult::detected ? "detected" : "failed"},
                        {"found", it.found}});
        char name[32];
        std::snprintf(name, sizeof name, "search_%02zu", it.iteration);
        trace_->snapshot(name, m);
      });
  replans_ = outcome.replans;
  if (!outcome.found) return Reason::exhausted;
  return center();
}

void Runner::place_start() {
  const Pose2D base = spec_.start.value_or(world_.start());
  robot_ = RobotState{base};
  std::uniform_real_distribution<double> jitter(-cfg_.task.start_jitter, cfg_.task.start_jitter);
  std::uniform_real_distribution<double> heading(-kPi, kPi);
  for (int attempt = 0; attempt < 20; ++attempt) {
    const double dx = cfg_.task.start_jitter > 0.0 ? jitter(rng_) : 0.0;
    const double dy = cfg_.task.start_jitter > 0.0 ? jitter(rng_) : 0.0;
    const double th = cfg_.task.random_start_heading ? heading(rng_) : base.theta;
    const Pose2D cand(base.x + dx, base.y + dy, th);
    if (field_.clearance(cand.position()) >= cfg_.robot.radius + 0.05) {
      robot_.pose = cand;
      return;
    }
  }
}

ScenarioResult Runner::run() {
  const auto wall0 = std::chrono::steady_clock::now();
  refresh();
  place_start();
  if (trace_)
    trace_->record({{"t", 0.0}, {"event", "start"}, {"scenario", spec_.scenario}, {"query", spec_.query},
                    {"mode", to_string(mode_)}, {"seed", seed_}, {"pose", pose_json(robot_.pose)}});

  ViewpointPlan plan;
  if (!graph_.empty())
    plan = initial_viewpoint(graph_, spec_.query, provider_, prior_, cfg_.viewpoint);
  if (trace_) trace_->artifact("viewpoint", plan_to_json(plan));

  auto query_events = world_.events();
  query_events.insert(query_events.end(), spec_.events.begin(), spec_.events.end());
  for (const auto& e : query_events) {
    if (!e.at_query) continue;
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, OccludeAction>) {
            if (!plan.has_prior()) return;
            const auto poly = world_.occlude(a, plan.best->pose);
            if (trace_) {
              auto pj = nlohmann::json::array();
              for (const auto& q : poly) pj.push_back({q.x, q.y});
              trace_->record({{"t", time_}, {"event", "occlude"}, {"polygon", pj}});
            }
          } else if constexpr (std::is_same_v<T, AddObstacleAction>) {
            world_.add_obstacle(a.polygon);
          } else if constexpr (std::is_same_v<T, RemoveObjectAction>) {
            world_.remove_object(a.id);
          } else {
            world_.move_object(a.id, a.offset);
          }
        },
        e.action);
  }
  refresh();

  Reason reason = Reason::timeout;
  try {
    if (mode_ == Mode::frontier || !plan.has_prior())
      reason = explore_and_find();
    else
      reason = viewpoint_pipeline(plan);
  } catch (const Timeout&) {
    reason = Reason::timeout;
  }

  ScenarioResult r;
  r.scenario = spec_.scenario;
  r.mode = mode_;
  r.seed = seed_;
  r.reason = reason;
  r.replans = replans_;
  r.sim_time = time_;
  r.final_pose = robot_.pose;
  const auto final_det =
      render_detection(world_, robot_.pose, cfg_.camera, cfg_.fov, spec_.query, cfg_.detector, nullptr);
  r.success = final_det && (reason == Reason::centered || reason == Reason::arrived_visible);
  std::optional<std::size_t> target;
  if (final_det) {
    target = final_det->object;
  } else {
    for (const auto i : world_.instances_of(spec_.query))
      if (!target || distance(world_.objects()[i].centroid, robot_.pose.position()) <
                         distance(world_.objects()[*target].centroid, robot_.pose.position()))
        target = i;
  }
  if (target) {
    r.object_id = world_.objects()[*target].id;
    const Point2 c = world_.objects()[*target].centroid;
    if (distance(c, robot_.pose.position()) > 1e-12) r.delta_theta = bench::angular_error(robot_.pose, c);
  }
  if (!pixels_.empty()) {
    double sum = 0.0;
    for (double p : pixels_) sum += p;
    r.pixel_error = static_cast<int>(std::lround(sum / static_cast<double>(pixels_.size())));
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  if (trace_)
    trace_->record({{"t", time_}, {"event", "result"}, {"success", r.success}, {"reason", to_string(r.reason)},
                    {"pixel_error", r.pixel_error}, {"delta_theta", r.delta_theta}, {"replans", r.replans},
                    {"object", r.object_id}, {"pose", pose_json(r.final_pose)}});
  return r;
}

}  // namespace

ScenarioResult run_task(const WorldModel& world, const Vlpg& graph, const TaskSpec& spec, Mode mode,
                        const StackConfig& config, std::uint64_t seed,
                        const EmbeddingProvider& provider, TraceSink* trace) {
  Runner runner(world, graph, spec, mode, config, seed, provider, trace);
  return runner.run();
}

nlohmann::json plan_to_json(const ViewpointPlan& plan) {
  nlohmann::json j;
  auto cands = nlohmann::json::array();
  for (std::size_t i = 0; i < plan.candidates.size(); ++i)
    cands.push_back({{"id", plan.candidates[i].id},
                     {"score", plan.candidates[i].positive},
                     {"label", plan.labels.at(i)}});
  j["candidates"] = cands;
  auto clusters = nlohmann::json::array();
  for (const auto& c : plan.clusters) {
    auto members = nlohmann::json::array();
    for (const auto& m : c.members)
      members.push_back({{"id", m.id}, {"pose", pose_json(m.pose)}, {"score", m.score}});
    clusters.push_back({{"label", c.label}, {"mean_score", c.mean_score()}, {"members", members}});
  }
  j["clusters"] = clusters;
  j["chosen"] = plan.chosen ? nlohmann::json(plan.clusters[*plan.chosen].label) : nlohmann::json(nullptr);
  j["best"] = plan.best ? nlohmann::json{{"id", plan.best->id}, {"pose", pose_json(plan.best->pose)}}
                        : nlohmann::json(nullptr);
  return j;
}

}  // namespace viewnav::sim
