#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "viewnav/embedding.hpp"
#include "viewnav/pose_graph.hpp"
#include "viewnav/sim/detector.hpp"
#include "viewnav/sim/navigator.hpp"
#include "viewnav/sim/robot.hpp"
#include "viewnav/sim/world.hpp"

namespace viewnav::sim {

enum class CellState : std::uint8_t { unknown, free, occupied };

/// What the robot has seen so far, on the world grid's geometry.
class KnownMap {
 public:
  KnownMap() = default;
  explicit KnownMap(const OccupancyGrid& geometry);
  static KnownMap fully_known(const OccupancyGrid& truth);

  /// Casts rays across the sector: cells up to and including the first
  /// occupied one become known.
  void sense(const OccupancyGrid& truth, const FovSector& fov);
  /// The robot's own footprint is free by definition.
  void mark_free_disc(Point2 center, double radius);

  CellState state(CellIndex c) const { return states_[geometry_.checked_linear(c)]; }
  const OccupancyGrid& geometry() const { return geometry_; }
  /// Unknown cells treated as free.
  OccupancyGrid optimistic() const;
  /// Share of the truth's free cells that are known free.
  double coverage(const OccupancyGrid& truth) const;
  std::size_t known_cells() const;

 private:
  OccupancyGrid geometry_;
  std::vector<CellState> states_;
};

struct Frontier {
  std::vector<CellIndex> cells;  ///< known-free cells bordering unknown ones
  Point2 centroid;
  Point2 outward;  ///< mean direction from the cells into unknown space
};

/// 8-connected clusters of frontier cells with at least `min_size` cells,
/// ordered by their lowest linear index.
std::vector<Frontier> find_frontiers(const KnownMap& map, std::size_t min_size);

struct ExploreConfig {
  double budget = 1200.0;        ///< simulated seconds
  double dt = 0.1;
  std::size_t min_frontier = 6;  ///< cells
  double reselect_period = 4.0;  ///< s between frontier re-selections
  double blacklist_radius = 0.5;
  double spin_rate = 0.8;        ///< rad/s for the initial look-around
  double record_period = 0.1;    ///< s between VLPG insertion attempts
};

/// Frontier exploration as a per-tick controller.
class FrontierExplorer {
 public:
  FrontierExplorer(KnownMap known, ExploreConfig config, NavConfig nav, PlannerConfig planner,
                   CameraModel cam, FovParams fov, double robot_radius);

  /// Senses, (re)selects a frontier when due and returns the control for
  /// this tick. Once no frontier is left, done() turns true.
  Control tick(const WorldModel& world, const Pose2D& pose, double time, const DistanceField& field,
               Execution exec = Execution::serial);
  bool done() const { return done_; }
  const KnownMap& known() const { return known_; }
  std::optional<Pose2D> current_target() const;

 private:
  bool select(const Pose2D& pose, double time);

  KnownMap known_;
  ExploreConfig config_;
  Navigator nav_;
  FovParams fov_;
  double robot_radius_;
  OccupancyGrid inflated_;
  double next_inflate_ = 0.0;
  bool started_ = false;
  bool done_ = false;
  double spin_left_ = 0.0;
  double next_select_ = 0.0;
  std::vector<Point2> blacklist_;
};

struct ExploreResult {
  std::vector<Pose2D> trace;  ///< pose per tick
  double sim_time = 0.0;
  double coverage = 0.0;
  bool finished = false;      ///< ran out of frontiers before the budget
  KnownMap known;
};

struct ExploreSetup {
  ExploreConfig explore;
  NavConfig nav;
  PlannerConfig planner;
  CameraModel cam;
  FovParams fov;
  RobotParams robot;
  DetectorConfig detector;
};

/// Explores from `start` until no frontier remains or the budget runs out,
/// offering one VLPG node per record period when `graph` is given.
/// `initial` defaults to an all-unknown map.
ExploreResult frontier_explore(const WorldModel& world, const Pose2D& start, const ExploreSetup& setup,
                               const EmbeddingProvider* provider, Vlpg* graph,
                               std::optional<KnownMap> initial = std::nullopt,
                               std::mt19937_64* rng = nullptr, Execution exec = Execution::serial);

}  // namespace viewnav::sim
