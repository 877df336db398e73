#include "viewnav/sim/explore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "viewnav/sim/detector.hpp"
#include "viewnav/sim/planner.hpp"

namespace viewnav::sim {
namespace {

constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};

// Shortens a ray so its end stays strictly inside the grid.
Point2 clip_to_grid(const OccupancyGrid& g, Point2 a, Point2 b) {
  const double eps = 1e-9;
  const double x0 = g.origin().x + eps;
  const double y0 = g.origin().y + eps;
  const double x1 = g.origin().x + g.width() * g.resolution() - eps;
  const double y1 = g.origin().y + g.height() * g.resolution() - eps;
  double t = 1.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  if (b.x < x0) t = std::min(t, (x0 - a.x) / dx);
  if (b.x > x1) t = std::min(t, (x1 - a.x) / dx);
  if (b.y < y0) t = std::min(t, (y0 - a.y) / dy);
  if (b.y > y1) t = std::min(t, (y1 - a.y) / dy);
  return {a.x + t * dx, a.y + t * dy};
}

// Path distance over free cells of `g` from `start` (8-connected, no corner
// cutting). Unreached cells stay at infinity.
std::vector<double> grid_distances(const OccupancyGrid& g, CellIndex start) {
  std::vector<double> dist(g.size(), std::numeric_limits<double>::infinity());
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  dist[g.linear(start)] = 0.0;
  open.push({0.0, g.linear(start)});
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > dist[i]) continue;
    const CellIndex c = g.from_linear(i);
    for (int k = 0; k < 8; ++k) {
      const CellIndex n{c.col + kDc[k], c.row + kDr[k]};
      if (!g.contains(n) || g.occupied(n)) continue;
      if (k >= 4 && (g.occupied({n.col, c.row}) || g.occupied({c.col, n.row}))) continue;
      const double nd = d + (k >= 4 ? std::sqrt(2.0) : 1.0) * g.resolution();
      const std::size_t j = g.linear(n);
      if (nd < dist[j]) {
        dist[j] = nd;
        open.push({nd, j});
      }
    }
  }
  return dist;
}

}  // namespace

KnownMap::KnownMap(const OccupancyGrid& geometry)
    : geometry_(geometry), states_(geometry.size(), CellState::unknown) {}

KnownMap KnownMap::fully_known(const OccupancyGrid& truth) {
  KnownMap m(truth);
  for (std::size_t i = 0; i < truth.size(); ++i)
    m.states_[i] = truth.cells()[i] != 0 ? CellState::occupied : CellState::free;
  return m;
}

void KnownMap::sense(const OccupancyGrid& truth, const FovSector& fov) {
  const Point2 apex = fov.apex().position();
  if (!truth.contains(apex)) return;
  const double step = 0.5 * truth.resolution() / fov.range();
  const int rays = static_cast<int>(std::ceil(2.0 * fov.half_angle() / step)) + 1;
  for (int k = 0; k < rays; ++k) {
    const double a = fov.apex().theta - fov.half_angle() + 2.0 * fov.half_angle() * k / (rays - 1);
    const Point2 end = clip_to_grid(truth, apex, {apex.x + fov.range() * std::cos(a),
                                                  apex.y + fov.range() * std::sin(a)});
    walk_segment(truth, apex, end, [&](CellIndex c) {
      const bool occ = truth.occupied(c);
      states_[truth.linear(c)] = occ ? CellState::occupied : CellState::free;
      return !occ;
    });
  }
}

void KnownMap::mark_free_disc(Point2 center, double radius) {
  const CellIndex lo = geometry_.lattice_cell({center.x - radius, center.y - radius});
  const CellIndex hi = geometry_.lattice_cell({center.x + radius, center.y + radius});
  for (int r = lo.row; r <= hi.row; ++r)
    for (int c = lo.col; c <= hi.col; ++c)
      if (geometry_.contains(CellIndex{c, r}) && distance(geometry_.cell_center({c, r}), center) <= radius &&
          states_[geometry_.linear({c, r})] == CellState::unknown)
        states_[geometry_.linear({c, r})] = CellState::free;
}

OccupancyGrid KnownMap::optimistic() const {
  OccupancyGrid out(geometry_.origin(), geometry_.resolution(), geometry_.width(), geometry_.height());
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i] == CellState::occupied) out.set_occupied(geometry_.from_linear(i), true);
  return out;
}

double KnownMap::coverage(const OccupancyGrid& truth) const {
  std::size_t total = 0;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth.cells()[i] != 0) continue;
    ++total;
    seen += states_[i] == CellState::free ? 1 : 0;
  }
  return total == 0 ? 1.0 : static_cast<double>(seen) / static_cast<double>(total);
}

std::size_t KnownMap::known_cells() const {
  return static_cast<std::size_t>(
      std::count_if(states_.begin(), states_.end(), [](CellState s) { return s != CellState::unknown; }));
}

std::vector<Frontier> find_frontiers(const KnownMap& map, std::size_t min_size) {
  const OccupancyGrid& g = map.geometry();
  std::vector<char> is_frontier(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const CellIndex c = g.from_linear(i);
    if (map.state(c) != CellState::free) continue;
    for (int k = 0; k < 4; ++k) {
      const CellIndex n{c.col + kDc[k], c.row + kDr[k]};
      if (g.contains(n) && map.state(n) == CellState::unknown) {
        is_frontier[i] = 1;
        break;
      }
    }
  }
  std::vector<Frontier> out;
  std::vector<char> seen(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!is_frontier[i] || seen[i]) continue;
    Frontier f;
    std::vector<std::size_t> stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      stack.pop_back();
      const CellIndex c = g.from_linear(j);
      f.cells.push_back(c);
      for (int k = 0; k < 8; ++k) {
        const CellIndex n{c.col + kDc[k], c.row + kDr[k]};
        if (!g.contains(n)) continue;
        const std::size_t m = g.linear(n);
        if (is_frontier[m] && !seen[m]) {
          seen[m] = 1;
          stack.push_back(m);
        }
      }
    }
    if (f.cells.size() < min_size) continue;
    std::sort(f.cells.begin(), f.cells.end(), [&](CellIndex a, CellIndex b) { return g.linear(a) < g.linear(b); });
    Point2 sum;
    Point2 dir;
    for (const auto& c : f.cells) {
      sum = sum + g.cell_center(c);
      for (int k = 0; k < 4; ++k) {
        const CellIndex n{c.col + kDc[k], c.row + kDr[k]};
        if (g.contains(n) && map.state(n) == CellState::unknown) dir = dir + Point2{double(kDc[k]), double(kDr[k])};
      }
    }
    f.centroid = (1.0 / static_cast<double>(f.cells.size())) * sum;
    f.outward = dir.norm() > 1e-9 ? (1.0 / dir.norm()) * dir : Point2{1.0, 0.0};
    out.push_back(std::move(f));
  }
  return out;
}

FrontierExplorer::FrontierExplorer(KnownMap known, ExploreConfig config, NavConfig nav,
                                   PlannerConfig planner, CameraModel cam, FovParams fov,
                                   double robot_radius)
    : known_(std::move(known)),
      config_(config),
      nav_(nav, std::move(planner), cam),
      fov_(fov),
      robot_radius_(robot_radius) {}

std::optional<Pose2D> FrontierExplorer::current_target() const { return nav_.target(); }

bool FrontierExplorer::select(const Pose2D& pose, double time) {
  next_select_ = time + config_.reselect_period;
  const auto frontiers = find_frontiers(known_, config_.min_frontier);
  if (frontiers.empty()) return false;
  inflated_ = inflate(known_.optimistic(), nav_.config().inflation);
  next_inflate_ = time + nav_.config().replan_period;

  auto start = inflated_.cell_at(pose.position());
  if (!start || inflated_.occupied(*start)) start = nearest_free(inflated_, pose.position(), nav_.config().snap_radius);
  if (!start) return false;
  const auto dist = grid_distances(inflated_, *start);

  double best_cost = std::numeric_limits<double>::infinity();
  std::optional<Pose2D> best;
  for (const auto& f : frontiers) {
    std::optional<CellIndex> target;
    double target_d = std::numeric_limits<double>::infinity();
    for (const auto& c : f.cells) {
      const auto free = nearest_free(inflated_, inflated_.cell_center(c), 0.4);
      if (!free || !std::isfinite(dist[inflated_.linear(*free)])) continue;
      const double d = distance(inflated_.cell_center(*free), f.centroid);
      if (d < target_d) {
        target_d = d;
        target = free;
      }
    }
    if (!target) continue;
    const Point2 p = inflated_.cell_center(*target);
    const bool banned = std::any_of(blacklist_.begin(), blacklist_.end(), [&](Point2 b) {
      return distance(b, p) < config_.blacklist_radius;
    });
    if (banned) continue;
    const double cost = dist[inflated_.linear(*target)];
    if (cost < best_cost) {
      best_cost = cost;
      best = Pose2D(p, std::atan2(f.outward.y, f.outward.x));
    }
  }
  if (!best) return false;
  // Re-selecting the same frontier keeps the navigator's progress tracking.
  const auto current = nav_.target();
  if (!current || distance(current->position(), best->position()) > 0.3) nav_.set_goal(*best, true);
  return true;
}

Control FrontierExplorer::tick(const WorldModel& world, const Pose2D& pose, double time,
                               const DistanceField& field, Execution exec) {
  if (done_) return {};
  known_.sense(world.grid(), fov_.at(pose));
  known_.mark_free_disc(pose.position(), robot_radius_);

  if (!started_) {
    started_ = true;
    if (find_frontiers(known_, config_.min_frontier).empty()) {
      done_ = true;
      return {};
    }
    spin_left_ = 2.0 * kPi;
  }
  if (spin_left_ > 0.0) {
    spin_left_ -= config_.spin_rate * config_.dt;
    return {0.0, config_.spin_rate};
  }

  bool changed = false;
  if (!nav_.has_goal() || time >= next_select_) {
    if (!select(pose, time)) {
      done_ = true;
      return {};
    }
    changed = true;
  }
  if (time >= next_inflate_) {
    inflated_ = inflate(known_.optimistic(), nav_.config().inflation);
    next_inflate_ = time + nav_.config().replan_period;
    changed = true;
  }
  Control out;
  NavStatus st = nav_.tick(pose, time, inflated_, changed, field, out, exec);
  if (st != NavStatus::moving) {
    // Reached or unreachable: either way this spot has nothing more to give.
    blacklist_.push_back(nav_.target()->position());
    nav_.clear();
    if (!select(pose, time)) {
      done_ = true;
      return {};
    }
    st = nav_.tick(pose, time, inflated_, true, field, out, exec);
    if (st != NavStatus::moving) {
      blacklist_.push_back(nav_.target()->position());
      nav_.clear();
    }
  }
  return out;
}

ExploreResult frontier_explore(const WorldModel& world, const Pose2D& start, const ExploreSetup& setup,
                               const EmbeddingProvider* provider, Vlpg* graph,
                               std::optional<KnownMap> initial, std::mt19937_64* rng, Execution exec) {
  FrontierExplorer explorer(initial ? std::move(*initial) : KnownMap(world.grid()), setup.explore,
                            setup.nav, setup.planner, setup.cam, setup.fov, setup.robot.radius);
  const DistanceField field(world.grid());
  ExploreResult result{{}, 0.0, 0.0, false, KnownMap(world.grid())};
  RobotState state{start};
  double time = 0.0;
  double next_record = 0.0;
  while (time < setup.explore.budget) {
    const Control u = explorer.tick(world, state.pose, time, field, exec);
    if (explorer.done()) {
      result.finished = true;
      break;
    }
    if (graph && provider && time + 1e-9 >= next_record) {
      const auto emb = provider->embed_image(observe(world, state.pose, setup.cam, setup.fov, setup.detector));
      graph->record_node(state.pose, emb, time, exec);
      next_record += setup.explore.record_period;
    }
    result.trace.push_back(state.pose);
    state = step(field, state, u, setup.explore.dt, setup.robot, rng);
    time += setup.explore.dt;
  }
  result.sim_time = time;
  result.coverage = explorer.known().coverage(world.grid());
  result.known = explorer.known();
  return result;
}

}  // namespace viewnav::sim
