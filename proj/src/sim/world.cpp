#include "viewnav/sim/world.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "viewnav/grid_io.hpp"

namespace viewnav::sim {
namespace {

std::vector<Point2> polygon_from_json(const nlohmann::json& j) {
  std::vector<Point2> out;
  for (const auto& p : j) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  if (out.size() < 3) throw std::runtime_error("world: polygon needs at least 3 vertices");
  return out;
}

nlohmann::json polygon_to_json(const std::vector<Point2>& poly) {
  auto out = nlohmann::json::array();
  for (const auto& p : poly) out.push_back({p.x, p.y});
  return out;
}

Point2 footprint_centroid(const OccupancyGrid& grid, const std::vector<CellIndex>& cells) {
  Point2 sum;
  for (const auto& c : cells) sum = sum + grid.cell_center(c);
  return (1.0 / static_cast<double>(cells.size())) * sum;
}

}  // namespace

std::vector<CellIndex> rasterize_polygon(const OccupancyGrid& grid, const std::vector<Point2>& polygon) {
  if (polygon.size() < 3) throw std::invalid_argument("rasterize_polygon: need 3 vertices");
  double x0 = polygon[0].x, x1 = x0, y0 = polygon[0].y, y1 = y0;
  Point2 mean;
  for (const auto& p : polygon) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
    mean = mean + p;
  }
  mean = (1.0 / static_cast<double>(polygon.size())) * mean;
  const CellIndex lo = grid.lattice_cell({x0, y0});
  const CellIndex hi = grid.lattice_cell({x1, y1});
  std::vector<CellIndex> out;
  for (int r = std::max(0, lo.row); r <= std::min(grid.height() - 1, hi.row); ++r) {
    for (int c = std::max(0, lo.col); c <= std::min(grid.width() - 1, hi.col); ++c) {
      const Point2 q = grid.cell_center({c, r});
      bool inside = false;
      for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
        const Point2& a = polygon[i];
        const Point2& b = polygon[j];
        if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x)
          inside = !inside;
      }
      if (inside) out.push_back({c, r});
    }
  }
  if (out.empty()) {
    if (const auto c = grid.cell_at(mean)) out.push_back(*c);
  }
  std::sort(out.begin(), out.end(), [](CellIndex a, CellIndex b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return out;
}

WorldModel::WorldModel(std::string name, OccupancyGrid walls, std::vector<WorldObject> objects,
                       Pose2D start, std::vector<WorldEvent> events)
    : name_(std::move(name)),
      walls_(std::move(walls)),
      objects_(std::move(objects)),
      events_(std::move(events)),
      start_(start) {
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (objects_[j].id == objects_[i].id)
        throw std::invalid_argument("WorldModel: duplicate object id " + objects_[i].id);
    auto& o = objects_[i];
    if (o.label.empty()) throw std::invalid_argument("WorldModel: object without label");
    o.footprint = rasterize_polygon(walls_, o.polygon);
    if (o.footprint.empty()) throw std::invalid_argument("WorldModel: object outside grid: " + o.id);
    o.centroid = footprint_centroid(walls_, o.footprint);
  }
  rebuild();
}

void WorldModel::rebuild() {
  grid_ = walls_;
  owner_.assign(grid_.size(), kNoOwner);
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    for (const auto& c : objects_[i].footprint) {
      grid_.set_occupied(c, true);
      owner_[grid_.linear(c)] = static_cast<int>(i);
    }
  }
  for (const auto& poly : obstacles_) {
    for (const auto& c : rasterize_polygon(grid_, poly)) {
      grid_.set_occupied(c, true);
      owner_[grid_.linear(c)] = kObstacle;
    }
  }
  ++revision_;
}

std::vector<std::size_t> WorldModel::instances_of(std::string_view label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < objects_.size(); ++i)
    if (objects_[i].label == label) out.push_back(i);
  return out;
}

std::optional<std::size_t> WorldModel::find_id(std::string_view id) const {
  for (std::size_t i = 0; i < objects_.size(); ++i)
    if (objects_[i].id == id) return i;
  return std::nullopt;
}

std::vector<std::string> WorldModel::labels() const {
  std::vector<std::string> out;
  for (const auto& o : objects_) out.push_back(o.label);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void WorldModel::add_obstacle(const std::vector<Point2>& polygon) {
  obstacles_.push_back(polygon);
  rebuild();
}

void WorldModel::remove_object(std::string_view id) {
  const auto i = find_id(id);
  if (!i) throw std::invalid_argument("remove_object: unknown id " + std::string(id));
  objects_.erase(objects_.begin() + static_cast<std::ptrdiff_t>(*i));
  rebuild();
}

void WorldModel::move_object(std::string_view id, Point2 offset) {
  const auto i = find_id(id);
  if (!i) throw std::invalid_argument("move_object: unknown id " + std::string(id));
  auto& o = objects_[*i];
  for (auto& p : o.polygon) p = p + offset;
  o.footprint = rasterize_polygon(walls_, o.polygon);
  if (o.footprint.empty()) throw std::invalid_argument("move_object: object left the grid");
  o.centroid = footprint_centroid(walls_, o.footprint);
  rebuild();
}

std::vector<Point2> WorldModel::occlude(const OccludeAction& action, const Pose2D& viewpoint) {
  const auto ids = instances_of(action.label);
  if (ids.empty()) return {};
  const Point2 vp = viewpoint.position();
  std::size_t best = ids.front();
  for (const auto i : ids)
    if (distance(objects_[i].centroid, vp) < distance(objects_[best].centroid, vp)) best = i;
  const WorldObject& o = objects_[best];

  Point2 u = vp - o.centroid;
  const double len = u.norm();
  u = len > 1e-9 ? (1.0 / len) * u : Point2{1.0, 0.0};
  const Point2 n{-u.y, u.x};
  double half_width = 0.0;
  double depth = 0.0;
  const double half_cell = 0.5 * grid_.resolution();
  for (const auto& c : o.footprint) {
    const Point2 d = grid_.cell_center(c) - o.centroid;
    half_width = std::max(half_width, std::abs(d.x * n.x + d.y * n.y) + half_cell);
    depth = std::max(depth, d.x * u.x + d.y * u.y + half_cell);
  }
  const double half_len = half_width + action.margin;
  const Point2 near = o.centroid + (depth + action.gap) * u;
  const Point2 far = near + action.thickness * u;
  std::vector<Point2> poly{near + half_len * n, near - half_len * n, far - half_len * n,
                           far + half_len * n};
  add_obstacle(poly);
  return poly;
}

std::string_view to_string(HeightClass h) { return h == HeightClass::floor ? "floor" : "elevated"; }

HeightClass parse_height_class(std::string_view text) {
  if (text == "floor") return HeightClass::floor;
  if (text == "elevated") return HeightClass::elevated;
  throw std::invalid_argument("unknown height_class: " + std::string(text));
}

WorldEvent event_from_json(const nlohmann::json& j) {
  WorldEvent ev;
  const auto& at = j.at("at");
  if (at.is_string()) {
    if (at.get<std::string>() != "query") throw std::runtime_error("event: 'at' must be \"query\" or seconds");
    ev.at_query = true;
  } else {
    ev.time = at.get<double>();
  }
  const auto action = j.at("action").get<std::string>();
  if (action == "add_obstacle") {
    ev.action = AddObstacleAction{polygon_from_json(j.at("polygon"))};
  } else if (action == "remove_object") {
    ev.action = RemoveObjectAction{j.at("id").get<std::string>()};
  } else if (action == "move_object") {
    const auto& off = j.at("offset");
    ev.action = MoveObjectAction{j.at("id").get<std::string>(),
                                 {off.at(0).get<double>(), off.at(1).get<double>()}};
  } else if (action == "occlude") {
    OccludeAction o;
    o.label = j.at("label").get<std::string>();
    o.gap = j.value("gap", o.gap);
    o.margin = j.value("margin", o.margin);
    o.thickness = j.value("thickness", o.thickness);
    if (!ev.at_query) throw std::runtime_error("event: occlude must fire at \"query\"");
    ev.action = o;
  } else {
    throw std::runtime_error("event: unknown action " + action);
  }
  return ev;
}

nlohmann::json event_to_json(const WorldEvent& ev) {
  nlohmann::json j;
  if (ev.at_query)
    j["at"] = "query";
  else
    j["at"] = ev.time;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, AddObstacleAction>) {
          j["action"] = "add_obstacle";
          j["polygon"] = polygon_to_json(a.polygon);
        } else if constexpr (std::is_same_v<T, RemoveObjectAction>) {
          j["action"] = "remove_object";
          j["id"] = a.id;
        } else if constexpr (std::is_same_v<T, MoveObjectAction>) {
          j["action"] = "move_object";
          j["id"] = a.id;
          j["offset"] = {a.offset.x, a.offset.y};
        } else {
          j["action"] = "occlude";
          j["label"] = a.label;
          j["gap"] = a.gap;
          j["margin"] = a.margin;
          j["thickness"] = a.thickness;
        }
      },
      ev.action);
  return j;
}

WorldModel WorldModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file " + path.string());
  const auto j = nlohmann::json::parse(in);
  OccupancyGrid walls = load_grid(path.parent_path() / j.at("grid").get<std::string>());
  std::vector<WorldObject> objects;
  for (const auto& o : j.at("objects")) {
    WorldObject obj;
    obj.id = o.at("id").get<std::string>();
    obj.label = o.at("label").get<std::string>();
    obj.height_class = parse_height_class(o.value("height_class", std::string("floor")));
    obj.polygon = polygon_from_json(o.at("polygon"));
    objects.push_back(std::move(obj));
  }
  const auto& s = j.at("start");
  std::vector<WorldEvent> events;
  if (j.contains("events"))
    for (const auto& e : j.at("events")) events.push_back(event_from_json(e));
  return WorldModel(j.value("name", path.stem().string()), std::move(walls), std::move(objects),
                    Pose2D(s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()),
                    std::move(events));
}

}  // namespace viewnav::sim
