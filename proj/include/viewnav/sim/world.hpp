#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "viewnav/geometry.hpp"

namespace viewnav::sim {

enum class HeightClass { floor, elevated };

struct WorldObject {
  std::string id;     ///< unique instance name
  std::string label;  ///< class name used in queries
  HeightClass height_class = HeightClass::floor;
  std::vector<Point2> polygon;
  std::vector<CellIndex> footprint;  ///< rasterised polygon, sorted
  Point2 centroid;                   ///< mean of footprint cell centres
};

/// Rectangle across the line of sight from a viewpoint to an object.
struct OccludeAction {
  std::string label;        ///< object class to hide (nearest instance to the viewpoint)
  double gap = 0.25;        ///< metres between the object and the barrier
  double margin = 0.15;     ///< extra half-length beyond the object's half-width
  double thickness = 0.1;
};
struct AddObstacleAction {
  std::vector<Point2> polygon;
};
struct RemoveObjectAction {
  std::string id;
};
struct MoveObjectAction {
  std::string id;
  Point2 offset;
};
using EventAction = std::variant<AddObstacleAction, RemoveObjectAction, MoveObjectAction, OccludeAction>;

/// Fires once simulated task time reaches `time`, or at task start (after
/// the initial viewpoint is known) when `at_query` is set.
struct WorldEvent {
  bool at_query = false;
  double time = 0.0;
  EventAction action;
};

/// Static walls plus object footprints and added obstacles. Objects occupy
/// their cells. Instance ids are unique; labels repeat across instances.
class WorldModel {
 public:
  static constexpr int kNoOwner = -1;
  static constexpr int kObstacle = -2;

  WorldModel() = default;
  WorldModel(std::string name, OccupancyGrid walls, std::vector<WorldObject> objects, Pose2D start,
             std::vector<WorldEvent> events = {});

  /// Reads the JSON world file; the grid side-car path is relative to it.
  static WorldModel load(const std::filesystem::path& path);

  const std::string& name() const { return name_; }
  const OccupancyGrid& walls() const { return walls_; }
  /// Walls, objects and added obstacles.
  const OccupancyGrid& grid() const { return grid_; }
  const std::vector<WorldObject>& objects() const { return objects_; }
  const std::vector<WorldEvent>& events() const { return events_; }
  const Pose2D& start() const { return start_; }
  /// Bumped by every change to grid().
  std::size_t revision() const { return revision_; }

  /// Object index occupying `c`, kObstacle, or kNoOwner.
  int owner(CellIndex c) const { return owner_[grid_.checked_linear(c)]; }
  std::vector<std::size_t> instances_of(std::string_view label) const;
  std::optional<std::size_t> find_id(std::string_view id) const;
  std::vector<std::string> labels() const;  ///< sorted, unique

  void add_obstacle(const std::vector<Point2>& polygon);
  void remove_object(std::string_view id);
  void move_object(std::string_view id, Point2 offset);
  /// Places the barrier of `action` between `viewpoint` and the nearest
  /// instance of its label. Returns the barrier polygon (empty when the
  /// label has no instance).
  std::vector<Point2> occlude(const OccludeAction& action, const Pose2D& viewpoint);

 private:
  void rebuild();

  std::string name_;
  OccupancyGrid walls_;
  OccupancyGrid grid_;
  std::vector<WorldObject> objects_;
  std::vector<std::vector<Point2>> obstacles_;
  std::vector<int> owner_;
  std::vector<WorldEvent> events_;
  Pose2D start_;
  std::size_t revision_ = 0;
};

/// Cells whose centres lie inside the polygon (even-odd rule); falls back to
/// the cell holding the vertex mean for slivers thinner than a cell.
std::vector<CellIndex> rasterize_polygon(const OccupancyGrid& grid, const std::vector<Point2>& polygon);

/// {"at": "query" | seconds, "action": "add_obstacle" | "remove_object" |
/// "move_object" | "occlude", ...action fields}
WorldEvent event_from_json(const nlohmann::json& j);
nlohmann::json event_to_json(const WorldEvent& event);

std::string_view to_string(HeightClass h);
HeightClass parse_height_class(std::string_view text);

}  // namespace viewnav::sim
