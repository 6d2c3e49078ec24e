// Copyright 2026 The terasim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "terasim/road_network.hpp"

#include "terasim/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace terasim
{

namespace
{
constexpr double kStationTolerance = 1e-9;
constexpr double kPhaseTolerance = 1e-9;

using Cursor = JsonCursor<ConfigError>;

std::string lane_path(std::size_t i) { return "lanes[" + std::to_string(i) + "]"; }
std::string signal_path(std::size_t i) { return "signals[" + std::to_string(i) + "]"; }

Json number_pair(double a, double b) { return Json::array({a, b}); }
}  // namespace

std::string_view to_string(SignalState state)
{
  switch (state) {
    case SignalState::kGreen:
      return "GREEN";
    case SignalState::kYellow:
      return "YELLOW";
    case SignalState::kRed:
      return "RED";
  }
  return "RED";
}

SignalState parse_signal_state(std::string_view text)
{
  if (text == "GREEN") return SignalState::kGreen;
  if (text == "YELLOW") return SignalState::kYellow;
  if (text == "RED") return SignalState::kRed;
  throw std::invalid_argument("unknown signal state '" + std::string(text) + "'");
}

double lane_length(const Lane & lane)
{
  return polyline_length<double>(lane.centerline);
}

LanePose longitudinal_to_world(const Lane & lane, double s, double lateral)
{
  const auto stations = cumulative_length<double>(lane.centerline);
  const double total = stations.back();
  if (s < -kStationTolerance || s > total + kStationTolerance) {
    throw std::out_of_range("s=" + std::to_string(s) + " outside lane '" + lane.id + "' [0, " + std::to_string(total) + "]");
  }
  const auto pose = locate_on_polyline<double>(lane.centerline, stations, s, lateral);
  return {pose.position, pose.heading};
}

SignalState TrafficSignal::state() const
{
  return override_state.value_or(program[current_phase].state);
}

void TrafficSignal::advance(double dt)
{
  phase_elapsed += dt;
  // Tolerance keeps accumulated micro-steps from missing an exact boundary.
  while (phase_elapsed >= program[current_phase].duration - kPhaseTolerance) {
    phase_elapsed -= program[current_phase].duration;
    current_phase = (current_phase + 1) % program.size();
  }
  if (phase_elapsed < 0.0) phase_elapsed = 0.0;
}

double TrafficSignal::period() const
{
  double total = 0.0;
  for (const auto & p : program) total += p.duration;
  return total;
}

RoadNetwork::RoadNetwork(
  std::vector<Lane> lanes, std::vector<TrafficSignal> signals, std::vector<SpawnPoint> spawn_points)
: lanes_(std::move(lanes)), signals_(std::move(signals)), spawn_points_(std::move(spawn_points))
{
  build_index();
}

void RoadNetwork::build_index()
{
  const std::size_t n = lanes_.size();
  index_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const Lane & l = lanes_[i];
    const std::string p = lane_path(i);
    if (l.id.empty()) throw ConfigError(p + ".id", "must be non-empty");
    if (!index_.emplace(l.id, static_cast<LaneIndex>(i)).second) throw ConfigError(p + ".id", "duplicate lane id '" + l.id + "'");
    if (l.centerline.size() < 2) throw ConfigError(p + ".centerline", "needs at least 2 points");
    for (std::size_t k = 0; k < l.centerline.size(); ++k) {
      if (!l.centerline[k].allFinite()) throw ConfigError(p + ".centerline[" + std::to_string(k) + "]", "non-finite point");
      if (k > 0 && (l.centerline[k] - l.centerline[k - 1]).norm() == 0.0) {
        throw ConfigError(p + ".centerline[" + std::to_string(k) + "]", "repeats the previous point");
      }
    }
    if (!(l.width > 0.0)) throw ConfigError(p + ".width", "must be > 0");
    if (!(l.speed_limit > 0.0)) throw ConfigError(p + ".speed_limit", "must be > 0");
  }

  stations_.assign(n, {});
  lengths_.assign(n, 0.0);
  successors_.assign(n, {});
  predecessors_.assign(n, {});
  left_.assign(n, kNoLane);
  right_.assign(n, kNoLane);

  auto resolve = [&](const std::string & id, const std::string & path) {
    auto it = index_.find(id);
    if (it == index_.end()) throw ConfigError(path, "dangling reference to lane '" + id + "'");
    return it->second;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const Lane & l = lanes_[i];
    const std::string p = lane_path(i);
    stations_[i] = cumulative_length<double>(l.centerline);
    lengths_[i] = stations_[i].back();
    for (std::size_t k = 0; k < l.successors.size(); ++k) {
      const LaneIndex s = resolve(l.successors[k], p + ".successors[" + std::to_string(k) + "]");
      successors_[i].push_back(s);
      predecessors_[static_cast<std::size_t>(s)].push_back(static_cast<LaneIndex>(i));
    }
    if (l.left_neighbor) left_[i] = resolve(*l.left_neighbor, p + ".left_neighbor");
    if (l.right_neighbor) right_[i] = resolve(*l.right_neighbor, p + ".right_neighbor");

    auto sorted = l.closed_intervals;
    std::sort(sorted.begin(), sorted.end(), [](const auto & a, const auto & b) { return a.start_s < b.start_s; });
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      const auto & c = sorted[k];
      if (!(c.start_s >= 0.0 && c.end_s <= lengths_[i] + kStationTolerance && c.start_s < c.end_s)) {
        throw ConfigError(p + ".closed_intervals", "interval outside [0, lane_length] or empty");
      }
      if (k > 0 && sorted[k - 1].end_s > c.start_s) throw ConfigError(p + ".closed_intervals", "intervals overlap");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = lane_path(i);
    if (left_[i] != kNoLane && right_[static_cast<std::size_t>(left_[i])] != static_cast<LaneIndex>(i)) {
      throw ConfigError(p + ".left_neighbor", "asymmetric neighbors: '" + lanes_[static_cast<std::size_t>(left_[i])].id + "' does not name '" + lanes_[i].id + "' as right neighbor");
    }
    if (right_[i] != kNoLane && left_[static_cast<std::size_t>(right_[i])] != static_cast<LaneIndex>(i)) {
      throw ConfigError(p + ".right_neighbor", "asymmetric neighbors: '" + lanes_[static_cast<std::size_t>(right_[i])].id + "' does not name '" + lanes_[i].id + "' as left neighbor");
    }
  }

  lane_signal_.assign(n, -1);
  for (std::size_t g = 0; g < signals_.size(); ++g) {
    const TrafficSignal & sig = signals_[g];
    const std::string p = signal_path(g);
    if (sig.id.empty()) throw ConfigError(p + ".id", "must be non-empty");
    for (std::size_t h = 0; h < g; ++h) {
      if (signals_[h].id == sig.id) throw ConfigError(p + ".id", "duplicate signal id '" + sig.id + "'");
    }
    if (sig.program.empty()) throw ConfigError(p + ".program", "must be non-empty");
    for (std::size_t k = 0; k < sig.program.size(); ++k) {
      if (!(sig.program[k].duration > 0.0)) throw ConfigError(p + ".program[" + std::to_string(k) + "].duration", "must be > 0");
    }
    if (sig.current_phase >= sig.program.size()) throw ConfigError(p + ".phase_index", "out of range");
    if (!(sig.phase_elapsed >= 0.0 && sig.phase_elapsed < sig.program[sig.current_phase].duration)) {
      throw ConfigError(p + ".phase_elapsed", "must lie in [0, current phase duration)");
    }
    for (std::size_t k = 0; k < sig.controlled_lane_ids.size(); ++k) {
      const auto li = static_cast<std::size_t>(resolve(sig.controlled_lane_ids[k], p + ".controlled_lanes[" + std::to_string(k) + "]"));
      if (lane_signal_[li] != -1) throw ConfigError(p + ".controlled_lanes[" + std::to_string(k) + "]", "lane already controlled by another signal");
      lane_signal_[li] = static_cast<std::int32_t>(g);
    }
  }

  for (std::size_t k = 0; k < spawn_points_.size(); ++k) {
    const std::string p = "spawn_points[" + std::to_string(k) + "]";
    const LaneIndex li = resolve(spawn_points_[k].lane_id, p + ".lane");
    if (spawn_points_[k].s < 0.0 || spawn_points_[k].s > lengths_[static_cast<std::size_t>(li)]) throw ConfigError(p + ".s", "outside lane");
  }
}

RoadNetwork RoadNetwork::from_json(const Json & doc)
{
  const Cursor root(doc, "");
  root.only_keys({"lanes", "signals", "spawn_points"});

  std::vector<Lane> lanes;
  for (const auto & lc : root.at("lanes").elements()) {
    lc.only_keys({"id", "centerline", "width", "speed_limit", "successors", "left_neighbor", "right_neighbor", "closed_intervals"});
    Lane lane;
    lane.id = lc.at("id").string();
    for (const auto & pt : lc.at("centerline").elements()) {
      const auto xy = pt.elements();
      if (xy.size() != 2) pt.fail("point must be [x, y]");
      lane.centerline.emplace_back(xy[0].number(), xy[1].number());
    }
    lane.width = lc.at("width").number();
    lane.speed_limit = lc.at("speed_limit").number();
    if (auto s = lc.maybe("successors")) lane.successors = s->strings();
    if (auto s = lc.maybe("left_neighbor")) lane.left_neighbor = s->string();
    if (auto s = lc.maybe("right_neighbor")) lane.right_neighbor = s->string();
    if (auto ci = lc.maybe("closed_intervals")) {
      for (const auto & iv : ci->elements()) {
        const auto ab = iv.elements();
        if (ab.size() != 2) iv.fail("interval must be [start_s, end_s]");
        lane.closed_intervals.push_back({ab[0].number(), ab[1].number()});
      }
    }
    lanes.push_back(std::move(lane));
  }

  std::vector<TrafficSignal> signals;
  if (auto sc = root.maybe("signals")) {
    for (const auto & s : sc->elements()) {
      s.only_keys({"id", "controlled_lanes", "program", "phase_index", "phase_elapsed"});
      TrafficSignal sig;
      sig.id = s.at("id").string();
      sig.controlled_lane_ids = s.at("controlled_lanes").strings();
      for (const auto & ph : s.at("program").elements()) {
        ph.only_keys({"state", "duration"});
        SignalPhase phase;
        const auto st = ph.at("state");
        try {
          phase.state = parse_signal_state(st.string());
        } catch (const std::invalid_argument & e) {
          st.fail(e.what());
        }
        phase.duration = ph.at("duration").number();
        sig.program.push_back(phase);
      }
      if (auto pi = s.maybe("phase_index")) {
        const auto v = pi->integer();
        if (v < 0) pi->fail("must be >= 0");
        sig.current_phase = static_cast<std::size_t>(v);
      }
      if (auto pe = s.maybe("phase_elapsed")) sig.phase_elapsed = pe->number();
      signals.push_back(std::move(sig));
    }
  }

  std::vector<SpawnPoint> spawns;
  if (auto sp = root.maybe("spawn_points")) {
    for (const auto & p : sp->elements()) {
      p.only_keys({"lane", "s"});
      spawns.push_back({p.at("lane").string(), p.at("s").number()});
    }
  }
  return RoadNetwork(std::move(lanes), std::move(signals), std::move(spawns));
}

Json RoadNetwork::to_json() const
{
  Json lanes = Json::array();
  for (const auto & l : lanes_) {
    Json pts = Json::array();
    for (const auto & p : l.centerline) pts.push_back(number_pair(p.x(), p.y()));
    Json closed = Json::array();
    for (const auto & c : l.closed_intervals) closed.push_back(number_pair(c.start_s, c.end_s));
    lanes.push_back({
      {"id", l.id},
      {"centerline", std::move(pts)},
      {"width", l.width},
      {"speed_limit", l.speed_limit},
      {"successors", l.successors},
      {"left_neighbor", l.left_neighbor ? Json(*l.left_neighbor) : Json(nullptr)},
      {"right_neighbor", l.right_neighbor ? Json(*l.right_neighbor) : Json(nullptr)},
      {"closed_intervals", std::move(closed)},
    });
  }
  Json signals = Json::array();
  for (const auto & s : signals_) {
    Json program = Json::array();
    for (const auto & p : s.program) program.push_back({{"state", to_string(p.state)}, {"duration", p.duration}});
    signals.push_back({
      {"id", s.id},
      {"controlled_lanes", s.controlled_lane_ids},
      {"program", std::move(program)},
      {"phase_index", s.current_phase},
      {"phase_elapsed", s.phase_elapsed},
    });
  }
  Json spawns = Json::array();
  for (const auto & sp : spawn_points_) spawns.push_back({{"lane", sp.lane_id}, {"s", sp.s}});
  return {{"lanes", std::move(lanes)}, {"signals", std::move(signals)}, {"spawn_points", std::move(spawns)}};
}

std::optional<LaneIndex> RoadNetwork::find_lane(std::string_view id) const
{
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LaneIndex RoadNetwork::lane_index(std::string_view id) const
{
  auto found = find_lane(id);
  if (!found) throw std::out_of_range("unknown lane '" + std::string(id) + "'");
  return *found;
}

LanePose RoadNetwork::pose(LaneIndex i, double s, double lateral) const
{
  const auto & l = lanes_[static_cast<std::size_t>(i)];
  const auto p = locate_on_polyline<double>(l.centerline, stations_[static_cast<std::size_t>(i)], s, lateral);
  return {p.position, p.heading};
}

PolylineProjection<double> RoadNetwork::project(LaneIndex i, const Vec2d & p) const
{
  const auto & l = lanes_[static_cast<std::size_t>(i)];
  return project_onto_polyline<double>(l.centerline, stations_[static_cast<std::size_t>(i)], p);
}

std::optional<std::size_t> RoadNetwork::find_signal(std::string_view id) const
{
  for (std::size_t i = 0; i < signals_.size(); ++i) {
    if (signals_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> RoadNetwork::signal_for_lane(LaneIndex i) const
{
  const auto g = lane_signal_[static_cast<std::size_t>(i)];
  if (g < 0) return std::nullopt;
  return static_cast<std::size_t>(g);
}

std::optional<SignalState> RoadNetwork::signal_state(LaneIndex i) const
{
  const auto g = signal_for_lane(i);
  if (!g) return std::nullopt;
  return signals_[*g].state();
}

void RoadNetwork::advance_signals(double dt)
{
  for (auto & s : signals_) s.advance(dt);
}

void RoadNetwork::add_closure(LaneIndex i, ClosedInterval interval)
{
  auto & lane = lanes_[static_cast<std::size_t>(i)];
  if (!(interval.start_s >= 0.0 && interval.end_s <= lengths_[static_cast<std::size_t>(i)] + kStationTolerance && interval.start_s < interval.end_s)) {
    throw ConfigError("closed_intervals", "interval outside lane '" + lane.id + "'");
  }
  for (const auto & c : lane.closed_intervals) {
    if (c.start_s < interval.end_s && interval.start_s < c.end_s) throw ConfigError("closed_intervals", "overlaps an existing closure on '" + lane.id + "'");
  }
  lane.closed_intervals.push_back(interval);
}

void RoadNetwork::remove_closure(LaneIndex i, const ClosedInterval & interval)
{
  auto & v = lanes_[static_cast<std::size_t>(i)].closed_intervals;
  v.erase(std::remove(v.begin(), v.end(), interval), v.end());
}

bool RoadNetwork::is_connected_route(std::span<const LaneIndex> route) const
{
  if (route.empty()) return false;
  for (std::size_t k = 1; k < route.size(); ++k) {
    const auto succ = successors(route[k - 1]);
    if (std::find(succ.begin(), succ.end(), route[k]) == succ.end()) return false;
  }
  return true;
}

std::vector<std::string> RoadNetwork::route_ids(std::span<const LaneIndex> route) const
{
  std::vector<std::string> ids;
  ids.reserve(route.size());
  for (auto li : route) ids.push_back(lane(li).id);
  return ids;
}

bool RoadNetwork::operator==(const RoadNetwork & other) const
{
  return lanes_ == other.lanes_ && signals_ == other.signals_ && spawn_points_ == other.spawn_points_;
}

RoadNetwork load_network(std::string_view map_document)
{
  Json doc;
  try {
    doc = Json::parse(map_document);
  } catch (const Json::parse_error & e) {
    throw ConfigError("", std::string("malformed map document: ") + e.what());
  }
  return RoadNetwork::from_json(doc);
}

std::string serialize_network(const RoadNetwork & network)
{
  return network.to_json().dump(2);
}

void advance_signals(RoadNetwork & network, double dt)
{
  network.advance_signals(dt);
}

RoadNetwork make_highway(int num_lanes, double length, double speed_limit)
{
  constexpr double kWidth = 3.5;
  std::vector<Lane> lanes;
  std::vector<SpawnPoint> spawns;
  for (int k = 0; k < num_lanes; ++k) {
    Lane l;
    l.id = "hw_" + std::to_string(k);
    l.centerline = {Vec2d(0.0, k * kWidth), Vec2d(length, k * kWidth)};
    l.width = kWidth;
    l.speed_limit = speed_limit;
    if (k + 1 < num_lanes) l.left_neighbor = "hw_" + std::to_string(k + 1);
    if (k > 0) l.right_neighbor = "hw_" + std::to_string(k - 1);
    spawns.push_back({l.id, 0.0});
    lanes.push_back(std::move(l));
  }
  return RoadNetwork(std::move(lanes), {}, std::move(spawns));
}

RoadNetwork make_ring(int num_lanes, double radius, double speed_limit, int segments)
{
  constexpr double kWidth = 3.5;
  std::vector<Lane> lanes;
  std::vector<SpawnPoint> spawns;
  for (int k = 0; k < num_lanes; ++k) {
    Lane l;
    l.id = "ring_" + std::to_string(k);
    const double r = radius - k * kWidth;
    for (int i = 0; i < segments; ++i) {
      const double a = 2.0 * M_PI * i / segments;
      l.centerline.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    l.centerline.push_back(l.centerline.front());
    l.width = kWidth;
    l.speed_limit = speed_limit;
    l.successors = {l.id};
    if (k + 1 < num_lanes) l.left_neighbor = "ring_" + std::to_string(k + 1);
    if (k > 0) l.right_neighbor = "ring_" + std::to_string(k - 1);
    spawns.push_back({l.id, 0.0});
    lanes.push_back(std::move(l));
  }
  return RoadNetwork(std::move(lanes), {}, std::move(spawns));
}

namespace
{
struct Heading
{
  char name;
  Vec2d dir;
};

const std::array<Heading, 4> kHeadings{{{'E', Vec2d(1, 0)}, {'N', Vec2d(0, 1)}, {'W', Vec2d(-1, 0)}, {'S', Vec2d(0, -1)}}};

// Right of travel: E -> S, S -> W, W -> N, N -> E.
const Heading & right_of(const Heading & h)
{
  for (const auto & c : kHeadings) {
    if (c.dir.isApprox(Vec2d(h.dir.y(), -h.dir.x()))) return c;
  }
  return kHeadings[0];
}

std::string node_name(int i, int j) { return std::to_string(i) + "_" + std::to_string(j); }
}  // namespace

RoadNetwork make_grid(int cols, int rows, double block, double speed_limit)
{
  constexpr double kWidth = 3.5;
  constexpr double kHalfBox = 8.0;
  const double off = kWidth / 2.0;
  auto exists = [&](int i, int j) { return i >= 0 && j >= 0 && i < cols && j < rows; };
  auto node = [&](int i, int j) { return Vec2d(i * block, j * block); };
  auto right_normal = [](const Vec2d & d) { return Vec2d(d.y(), -d.x()); };
  auto out_id = [](int i, int j, char d) { return "L_" + node_name(i, j) + "_" + d; };
  auto in_id = [&](int i, int j, const Heading & h) {
    const int pi = i - static_cast<int>(h.dir.x());
    const int pj = j - static_cast<int>(h.dir.y());
    if (exists(pi, pj)) return out_id(pi, pj, h.name);
    return "IN_" + node_name(i, j) + "_" + h.name;
  };

  std::vector<Lane> lanes;
  std::vector<TrafficSignal> signals;
  std::vector<SpawnPoint> spawns;

  auto make_lane = [&](std::string id, std::vector<Vec2d> pts, std::vector<std::string> succ) {
    Lane l;
    l.id = std::move(id);
    l.centerline = std::move(pts);
    l.width = kWidth;
    l.speed_limit = speed_limit;
    l.successors = std::move(succ);
    lanes.push_back(std::move(l));
  };

  for (int i = 0; i < cols; ++i) {
    for (int j = 0; j < rows; ++j) {
      const Vec2d p = node(i, j);
      std::vector<std::string> ns_lanes;
      std::vector<std::string> ew_lanes;
      for (const auto & h : kHeadings) {
        const Vec2d d = h.dir;
        const Vec2d r = right_normal(d);
        const int ni = i + static_cast<int>(d.x());
        const int nj = j + static_cast<int>(d.y());
        const Vec2d start = p + d * kHalfBox + r * off;
        const Vec2d end = (exists(ni, nj) ? Vec2d(node(ni, nj) - d * kHalfBox) : Vec2d(p + d * block)) + r * off;
        std::vector<std::string> succ;
        if (exists(ni, nj)) {
          const std::string nn = node_name(ni, nj);
          succ = {"X_" + nn + "_" + h.name + h.name, "X_" + nn + "_" + h.name + right_of(h).name};
        }
        make_lane(out_id(i, j, h.name), {start, end}, std::move(succ));

        const int pi = i - static_cast<int>(d.x());
        const int pj = j - static_cast<int>(d.y());
        if (!exists(pi, pj)) {
          const std::string id = "IN_" + node_name(i, j) + "_" + h.name;
          make_lane(id, {p - d * block + r * off, p - d * kHalfBox + r * off},
            {"X_" + node_name(i, j) + "_" + h.name + h.name, "X_" + node_name(i, j) + "_" + h.name + right_of(h).name});
          spawns.push_back({id, 0.0});
        }

        // Connectors inside the intersection box for traffic arriving in direction h.
        const Vec2d entry = p - d * kHalfBox + r * off;
        make_lane("X_" + node_name(i, j) + "_" + h.name + h.name, {entry, p + d * kHalfBox + r * off}, {out_id(i, j, h.name)});
        const Heading & rh = right_of(h);
        const Vec2d exit = p + rh.dir * kHalfBox + right_normal(rh.dir) * off;
        const Vec2d center = p - d * kHalfBox + r * kHalfBox;
        const double radius = kHalfBox - off;
        const double a0 = std::atan2(entry.y() - center.y(), entry.x() - center.x());
        const double a1 = std::atan2(exit.y() - center.y(), exit.x() - center.x());
        double sweep = wrap_angle(a1 - a0);
        std::vector<Vec2d> arc;
        constexpr int kArcSegments = 6;
        for (int k = 0; k <= kArcSegments; ++k) {
          const double a = a0 + sweep * k / kArcSegments;
          arc.emplace_back(center.x() + radius * std::cos(a), center.y() + radius * std::sin(a));
        }
        arc.front() = entry;
        arc.back() = exit;
        make_lane("X_" + node_name(i, j) + "_" + h.name + rh.name, std::move(arc), {out_id(i, j, rh.name)});

        (h.name == 'N' || h.name == 'S' ? ns_lanes : ew_lanes).push_back(in_id(i, j, h));
      }
      // Two-phase program with 3 s all-red clearance between phases.
      TrafficSignal ns;
      ns.id = "S_" + node_name(i, j) + "_NS";
      ns.controlled_lane_ids = ns_lanes;
      ns.program = {{SignalState::kGreen, 24.0}, {SignalState::kYellow, 3.0}, {SignalState::kRed, 33.0}};
      TrafficSignal ew;
      ew.id = "S_" + node_name(i, j) + "_EW";
      ew.controlled_lane_ids = ew_lanes;
      ew.program = {{SignalState::kRed, 30.0}, {SignalState::kGreen, 24.0}, {SignalState::kYellow, 3.0}, {SignalState::kRed, 3.0}};
      signals.push_back(std::move(ns));
      signals.push_back(std::move(ew));
    }
  }
  return RoadNetwork(std::move(lanes), std::move(signals), std::move(spawns));
}

RoadNetwork make_template(std::string_view name)
{
  if (name == "highway2") return make_highway(2, 2000.0, 30.0);
  if (name == "ring") return make_ring(2, 200.0, 30.0);
  if (name == "grid3x3") return make_grid(3, 3, 200.0, 13.9);
  throw ConfigError("map.generator", "unknown map template '" + std::string(name) + "'");
}

namespace
{
// counts[d][lane] = number of routes of at most d lanes starting at `lane`.
std::vector<std::vector<double>> route_counts(const RoadNetwork & net, std::size_t max_lanes)
{
  const std::size_t n = net.lane_count();
  std::vector<std::vector<double>> counts(max_lanes + 1, std::vector<double>(n, 1.0));
  for (std::size_t d = 2; d <= max_lanes; ++d) {
    for (std::size_t l = 0; l < n; ++l) {
      const auto succ = net.successors(static_cast<LaneIndex>(l));
      if (succ.empty()) continue;
      double total = 0.0;
      for (auto s : succ) total += counts[d - 1][static_cast<std::size_t>(s)];
      counts[d][l] = total;
    }
  }
  return counts;
}
}  // namespace

double count_routes(const RoadNetwork & network, LaneIndex from, std::size_t max_lanes)
{
  if (max_lanes == 0) return 0.0;
  return route_counts(network, max_lanes)[max_lanes][static_cast<std::size_t>(from)];
}

Route sample_route(const RoadNetwork & network, LaneIndex from, std::size_t max_lanes, CounterRng & rng)
{
  Route route{from};
  if (max_lanes <= 1) return route;
  const auto counts = route_counts(network, max_lanes);
  LaneIndex cur = from;
  for (std::size_t d = max_lanes; d > 1; --d) {
    const auto succ = network.successors(cur);
    if (succ.empty()) break;
    const double total = counts[d][static_cast<std::size_t>(cur)];
    double u = rng.uniform() * total;
    LaneIndex pick = succ.back();
    for (auto s : succ) {
      const double c = counts[d - 1][static_cast<std::size_t>(s)];
      if (u < c) {
        pick = s;
        break;
      }
      u -= c;
    }
    route.push_back(pick);
    cur = pick;
  }
  return route;
}

}  // namespace terasim
