#include "viewnav/sim/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace viewnav::sim {
namespace {

// One field list drives both directions; Reader and Writer share the
// call shape io(key, field) and io.section(key, fn).
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw std::runtime_error("config: " + where_ + " must be an object");
  }

  template <typename T>
  void operator()(const char* key, T& field) {
    used_.insert(key);
    if (j_.contains(key)) {
      try {
        field = j_.at(key).get<T>();
      } catch (const nlohmann::json::exception&) {
        throw std::runtime_error("config: bad value for " + where_ + key);
      }
    }
  }

  template <typename F>
  void section(const char* key, F&& fn) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    Reader inner(j_.at(key), where_ + key + ".");
    fn(inner);
    inner.finish();
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) throw std::runtime_error("config: unknown key " + where_ + item.key());
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> used_;
};

class Writer {
 public:
  explicit Writer(nlohmann::json& j) : j_(j) { j_ = nlohmann::json::object(); }

  template <typename T>
  void operator()(const char* key, T& field) {
    j_[key] = field;
  }

  template <typename F>
  void section(const char* key, F&& fn) {
    nlohmann::json inner;
    Writer w(inner);
    fn(w);
    j_[key] = inner;
  }

 private:
  nlohmann::json& j_;
};

template <typename IO>
void visit(IO& io, StackConfig& c) {
  io.section("fov", [&](IO& s) {
    s("half_angle", c.fov.half_angle);
    s("range", c.fov.range);
    s("occlusion_aware", c.fov.occlusion_aware);
  });
  io.section("camera", [&](IO& s) {
    s("focal_px", c.camera.focal_px);
    s("image_width", c.camera.image_width);
    s("image_height", c.camera.image_height);
  });
  io.section("robot", [&](IO& s) {
    s("radius", c.robot.radius);
    s("v_max", c.robot.v_max);
    s("omega_max", c.robot.omega_max);
    s("sigma_xy", c.robot.sigma_xy);
    s("sigma_theta", c.robot.sigma_theta);
  });
  io.section("detector", [&](IO& s) {
    s("min_visible_cells", c.detector.min_visible_cells);
    s("pixel_noise", c.detector.pixel_noise);
    s("false_negative_rate", c.detector.false_negative_rate);
    s("camera_height", c.detector.camera_height);
    s("floor_object_height", c.detector.floor_object_height);
    s("elevated_object_base", c.detector.elevated_object_base);
    s("elevated_object_height", c.detector.elevated_object_height);
  });
  io.section("navigation", [&](IO& s) {
    s("inflation", c.nav.inflation);
    s("lookahead", c.nav.lookahead);
    s("goal_tolerance", c.nav.goal_tolerance);
    s("heading_tolerance", c.nav.heading_tolerance);
    s("heading_gain", c.nav.heading_gain);
    s("turn_in_place", c.nav.turn_in_place);
    s("replan_period", c.nav.replan_period);
    s("stuck_window", c.nav.stuck_window);
    s("stuck_progress", c.nav.stuck_progress);
    s("stuck_limit", c.nav.stuck_limit);
    s("snap_radius", c.nav.snap_radius);
  });
  io.section("centering", [&](IO& s) {
    s("linear_samples", c.planner.linear_samples);
    s("angular_samples", c.planner.angular_samples);
    s("segments", c.planner.segments);
    s("h", c.planner.h);
    s.section("collision", [&](IO& t) {
      t("safety_margin", c.planner.collision.safety_margin);
      t("sharpness", c.planner.collision.sharpness);
    });
    s.section("weights", [&](IO& t) {
      t("progress", c.planner.weights.progress);
      t("orient", c.planner.weights.orient);
      t("zoom", c.planner.weights.zoom);
      t("action_v", c.planner.weights.action_v);
      t("action_omega", c.planner.weights.action_omega);
      t("collision", c.planner.weights.collision);
    });
    s.section("zoom", [&](IO& t) {
      t("d_thresh", c.planner.zoom.d_thresh);
      t("d_max", c.planner.zoom.d_max);
    });
  });
  io.section("exploration", [&](IO& s) {
    s("budget", c.explore.budget);
    s("min_frontier", c.explore.min_frontier);
    s("reselect_period", c.explore.reselect_period);
    s("blacklist_radius", c.explore.blacklist_radius);
    s("spin_rate", c.explore.spin_rate);
    s("record_period", c.explore.record_period);
  });
  io.section("vlpg", [&](IO& s) { s("epsilon", c.vlpg_epsilon); });
  io.section("embedding", [&](IO& s) {
    s("dimension", c.embedding.dimension);
    s("background_weight", c.embedding.background_weight);
    s("seed", c.embedding.seed);
  });
  io.section("viewpoint", [&](IO& s) {
    s("top_k", c.viewpoint.top_k);
    s("angle_scale", c.viewpoint.angle_scale);
    s("dbscan_eps", c.viewpoint.dbscan_eps);
    s("dbscan_min_pts", c.viewpoint.dbscan_min_pts);
  });
  io.section("localsearch", [&](IO& s) {
    s("p_l_star", c.search.p_l_star);
    s("w_d", c.search.w_d);
    s("w_q", c.search.w_q);
    s("w_obs", c.search.w_obs);
    s("sample_count", c.search.sample_count);
    s("max_replans", c.search.max_replans);
    s("decay", c.search.decay);
    s("window_size", c.search.window_size);
    s("min_clearance", c.search.min_clearance);
  });
  io.section("task", [&](IO& s) {
    s("dt", c.task.dt);
    s("timeout", c.task.timeout);
    s("stability_window", c.task.stability_window);
    s("center_threshold_px", c.task.center_threshold_px);
    s("lost_limit", c.task.lost_limit);
    s("approach_distance", c.task.approach_distance);
    s("start_jitter", c.task.start_jitter);
    s("random_start_heading", c.task.random_start_heading);
    s("delta_theta_max", c.task.delta_theta_max);
  });
}

}  // namespace

void StackConfig::sync() {
  planner.v_max = robot.v_max;
  planner.omega_max = robot.omega_max;
  planner.collision.robot_radius = robot.radius;
  viewpoint.fov = fov;
  search.fov = fov;
  explore.dt = task.dt;
}

void StackConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + what);
  };
  require(fov.half_angle > 0.0 && fov.half_angle <= kPi / 2.0, "fov.half_angle must be in (0, pi/2]");
  require(fov.range > 0.0, "fov.range must be > 0");
  require(camera.focal_px > 0.0 && camera.image_width > 0 && camera.image_height > 0, "camera invalid");
  require(robot.radius > 0.0 && robot.v_max > 0.0 && robot.omega_max > 0.0, "robot limits must be > 0");
  require(task.dt > 0.0 && task.timeout > 0.0, "task.dt and task.timeout must be > 0");
  require(task.stability_window >= 1, "task.stability_window must be >= 1");
  require(vlpg_epsilon > 0.0 && vlpg_epsilon <= 1.0, "vlpg.epsilon must be in (0, 1]");
  require(viewpoint.top_k >= 1 && viewpoint.dbscan_eps > 0.0 && viewpoint.dbscan_min_pts >= 1,
          "viewpoint settings invalid");
  require(embedding.dimension >= 1, "embedding.dimension must be >= 1");
  require(task.delta_theta_max > 0.0, "task.delta_theta_max must be > 0");
  require(nav.turn_in_place > 0.0 && nav.lookahead > 0.0 && nav.goal_tolerance > 0.0, "navigation settings invalid");
  planner.zoom.validate();
  search.validate();
  (void)planner.control_lattice();
}

ExploreSetup StackConfig::explore_setup() const {
  return {explore, nav, planner, camera, fov, robot, detector};
}

StackConfig default_config() {
  StackConfig c;
  c.sync();
  return c;
}

nlohmann::json config_to_json(const StackConfig& config) {
  StackConfig copy = config;
  nlohmann::json j;
  Writer w(j);
  visit(w, copy);
  return j;
}

StackConfig config_from_json(const nlohmann::json& j) {
  StackConfig c;
  Reader r(j, "");
  visit(r, c);
  r.finish();
  c.sync();
  c.validate();
  return c;
}

StackConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return config_from_json(nlohmann::json::parse(in));
}

}  // namespace viewnav::sim
