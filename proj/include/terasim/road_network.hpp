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

#ifndef TERASIM_ROAD_NETWORK_HPP
#define TERASIM_ROAD_NETWORK_HPP

#include "terasim/geometry.hpp"
#include "terasim/json_util.hpp"
#include "terasim/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace terasim
{

using LaneIndex = std::int32_t;
inline constexpr LaneIndex kNoLane = -1;

/// Ordered lane indices; consecutive entries are connected through successors.
using Route = std::vector<LaneIndex>;

enum class SignalState { kGreen, kYellow, kRed };

std::string_view to_string(SignalState state);
SignalState parse_signal_state(std::string_view text);

struct ClosedInterval
{
  double start_s{0.0};
  double end_s{0.0};
  bool operator==(const ClosedInterval &) const = default;
};

struct Lane
{
  std::string id;
  std::vector<Vec2d> centerline;
  double width{3.5};
  double speed_limit{13.9};
  std::vector<std::string> successors;
  std::optional<std::string> left_neighbor;
  std::optional<std::string> right_neighbor;
  std::vector<ClosedInterval> closed_intervals;

  bool operator==(const Lane &) const = default;
};

/// Sum of centerline segment lengths.
double lane_length(const Lane & lane);

struct LanePose
{
  Vec2d position;
  double heading;
};

/// World pose at arc length `s` and signed lateral offset (positive = left).
/// Throws std::out_of_range when s lies outside [0, lane_length].
LanePose longitudinal_to_world(const Lane & lane, double s, double lateral);

struct SignalPhase
{
  SignalState state{SignalState::kRed};
  double duration{1.0};
  bool operator==(const SignalPhase &) const = default;
};

struct TrafficSignal
{
  std::string id;
  std::vector<std::string> controlled_lane_ids;
  std::vector<SignalPhase> program;
  std::size_t current_phase{0};
  double phase_elapsed{0.0};
  /// Set while a signal-override adversity holds the head.
  std::optional<SignalState> override_state;

  SignalState state() const;
  SignalState programmed_state() const { return program[current_phase].state; }
  void advance(double dt);
  double period() const;

  bool operator==(const TrafficSignal &) const = default;
};

struct SpawnPoint
{
  std::string lane_id;
  double s{0.0};
  bool operator==(const SpawnPoint &) const = default;
};

/// Directed lane graph. Geometry and topology are fixed after construction;
/// signal phases and closed intervals are the only mutable state.
class RoadNetwork
{
public:
  RoadNetwork() = default;
  /// Validates every invariant; throws ConfigError naming the offending field.
  RoadNetwork(std::vector<Lane> lanes, std::vector<TrafficSignal> signals, std::vector<SpawnPoint> spawn_points);

  static RoadNetwork from_json(const Json & doc);
  Json to_json() const;

  std::size_t lane_count() const { return lanes_.size(); }
  const Lane & lane(LaneIndex i) const { return lanes_[static_cast<std::size_t>(i)]; }
  std::span<const Lane> lanes() const { return lanes_; }
  std::optional<LaneIndex> find_lane(std::string_view id) const;
  /// Throws std::out_of_range for unknown ids.
  LaneIndex lane_index(std::string_view id) const;

  double length(LaneIndex i) const { return lengths_[static_cast<std::size_t>(i)]; }
  std::span<const LaneIndex> successors(LaneIndex i) const { return successors_[static_cast<std::size_t>(i)]; }
  std::span<const LaneIndex> predecessors(LaneIndex i) const { return predecessors_[static_cast<std::size_t>(i)]; }
  LaneIndex left(LaneIndex i) const { return left_[static_cast<std::size_t>(i)]; }
  LaneIndex right(LaneIndex i) const { return right_[static_cast<std::size_t>(i)]; }

  /// Pose with `s` clamped into the lane.
  LanePose pose(LaneIndex i, double s, double lateral) const;
  PolylineProjection<double> project(LaneIndex i, const Vec2d & p) const;

  std::span<const TrafficSignal> signals() const { return signals_; }
  TrafficSignal & signal(std::size_t i) { return signals_[i]; }
  std::optional<std::size_t> find_signal(std::string_view id) const;
  std::optional<std::size_t> signal_for_lane(LaneIndex i) const;
  /// State of the stop line at the end of lane `i`, if that lane is signal-controlled.
  std::optional<SignalState> signal_state(LaneIndex i) const;
  void advance_signals(double dt);

  std::span<const SpawnPoint> spawn_points() const { return spawn_points_; }

  /// Throws ConfigError when the interval leaves the lane or overlaps an existing one.
  void add_closure(LaneIndex i, ClosedInterval interval);
  void remove_closure(LaneIndex i, const ClosedInterval & interval);
  std::span<const ClosedInterval> closures(LaneIndex i) const { return lanes_[static_cast<std::size_t>(i)].closed_intervals; }

  bool is_connected_route(std::span<const LaneIndex> route) const;
  std::vector<std::string> route_ids(std::span<const LaneIndex> route) const;

  bool operator==(const RoadNetwork & other) const;

private:
  void build_index();

  std::vector<Lane> lanes_;
  std::vector<TrafficSignal> signals_;
  std::vector<SpawnPoint> spawn_points_;

  std::unordered_map<std::string, LaneIndex> index_;
  std::vector<std::vector<double>> stations_;
  std::vector<double> lengths_;
  std::vector<std::vector<LaneIndex>> successors_;
  std::vector<std::vector<LaneIndex>> predecessors_;
  std::vector<LaneIndex> left_;
  std::vector<LaneIndex> right_;
  std::vector<std::int32_t> lane_signal_;
};

/// Parses and validates a map document.
RoadNetwork load_network(std::string_view map_document);
std::string serialize_network(const RoadNetwork & network);

void advance_signals(RoadNetwork & network, double dt);

/// Straight parallel lanes along +x; lane 0 is the rightmost.
RoadNetwork make_highway(int num_lanes, double length, double speed_limit);
/// Concentric counter-clockwise loops; lane 0 is the outer (rightmost) one.
RoadNetwork make_ring(int num_lanes, double radius, double speed_limit, int segments = 128);
/// Signalised grid of two-way single-lane streets with through and right-turn connectors.
RoadNetwork make_grid(int cols, int rows, double block, double speed_limit);
/// Built-in templates: "highway2", "ring", "grid3x3".
RoadNetwork make_template(std::string_view name);

/// Number of distinct routes from `from` that end at a sink lane or reach `max_lanes`.
double count_routes(const RoadNetwork & network, LaneIndex from, std::size_t max_lanes);
/// Uniform draw over the routes counted by count_routes().
Route sample_route(const RoadNetwork & network, LaneIndex from, std::size_t max_lanes, CounterRng & rng);

}  // namespace terasim

#endif  // TERASIM_ROAD_NETWORK_HPP
