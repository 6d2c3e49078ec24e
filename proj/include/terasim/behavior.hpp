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

#ifndef TERASIM_BEHAVIOR_HPP
#define TERASIM_BEHAVIOR_HPP

#include "terasim/road_network.hpp"
#include "terasim/rng.hpp"

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace terasim
{

enum class AgentKind { kCar, kTruck, kCyclist, kPedestrian, kAv };

std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view text);
bool is_motor_vehicle(AgentKind kind);

struct Dimensions
{
  double length;
  double width;
};
Dimensions default_dimensions(AgentKind kind);

/// IDM + MOBIL parameters of one driver.
struct BehaviorParams
{
  double desired_speed{30.0};
  double max_accel{2.0};
  double comfortable_decel{3.0};
  double min_gap{2.0};
  double time_headway{1.5};
  double accel_exponent{4.0};
  double politeness{0.3};
  double lane_change_threshold{0.2};
  double reaction_noise_sd{0.0};

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
  bool operator==(const BehaviorParams &) const = default;
};

/// Engine-wide model constants shared by every driver.
struct ModelLimits
{
  double safe_decel{4.0};
  double emergency_decel{8.0};
  double lane_change_duration{3.0};
};

struct TruncatedNormal
{
  double mean{0.0};
  double sd{0.0};
  double min{0.0};
  double max{0.0};

  static TruncatedNormal fixed(double v) { return {v, 0.0, v, v}; }
  double sample(CounterRng & rng) const;
  /// Analytic mean of the truncated distribution.
  double expected_value() const;
};

/// Per-kind parameter distributions. An empty desired_speed means "lane speed limit".
struct KindDistribution
{
  std::optional<TruncatedNormal> desired_speed;
  TruncatedNormal max_accel{TruncatedNormal::fixed(2.0)};
  TruncatedNormal comfortable_decel{TruncatedNormal::fixed(3.0)};
  TruncatedNormal min_gap{TruncatedNormal::fixed(2.0)};
  TruncatedNormal time_headway{TruncatedNormal::fixed(1.5)};
  TruncatedNormal accel_exponent{TruncatedNormal::fixed(4.0)};
  TruncatedNormal politeness{TruncatedNormal::fixed(0.3)};
  TruncatedNormal lane_change_threshold{TruncatedNormal::fixed(0.2)};
  std::optional<TruncatedNormal> reaction_noise_sd;

  static KindDistribution defaults(AgentKind kind);
};

struct NdeConfig
{
  std::map<AgentKind, KindDistribution> kinds;
  /// Vehicles per second per spawn point.
  double spawn_rate{0.0};
  /// Default per-step acceleration noise sd when a kind does not override it.
  double maneuver_noise{0.0};
  /// Relative spawn frequency of each kind; defaults to cars only.
  std::map<AgentKind, double> kind_mix{{AgentKind::kCar, 1.0}};
  int initial_vehicles{0};
  std::size_t route_length{24};
  ModelLimits limits;

  const KindDistribution & distribution(AgentKind kind) const;
  /// Throws ConfigError on any violated bound.
  void validate() const;
};

struct LaneChangeAnimation
{
  double start_offset{0.0};
  double elapsed{0.0};
  double duration{3.0};
  LaneIndex from_lane{kNoLane};
};

/// Kinematic and lane-position state of one traffic participant.
struct VehicleState
{
  std::string id;
  AgentKind kind{AgentKind::kCar};
  LaneIndex lane{kNoLane};
  double s{0.0};
  double lateral_offset{0.0};
  double speed{0.0};
  double accel{0.0};
  double heading{0.0};
  double length{4.8};
  double width{1.9};
  Route route;
  std::size_t route_index{0};
  BehaviorParams behavior;
  std::optional<std::string> active_adversity;

  std::optional<LaneChangeAnimation> lane_change;
  /// Free-space polyline for path-bound agents (pedestrians); lane is kNoLane then.
  std::vector<Vec2d> path;
  std::optional<std::size_t> walk_signal;
  Vec2d position{Vec2d::Zero()};
  double odometer{0.0};

  bool on_lane() const { return lane != kNoLane; }
  double front() const { return s + length / 2.0; }
  double rear() const { return s - length / 2.0; }
};

/// Recomputes world position/heading from (lane, s, lateral_offset) or the path.
void update_pose(VehicleState & v, const RoadNetwork & network);

struct Neighbor
{
  /// Bumper-to-bumper distance; +inf when absent.
  double gap{std::numeric_limits<double>::infinity()};
  double speed{0.0};
  double length{0.0};
  BehaviorParams params;
};

struct LaneNeighbors
{
  std::optional<Neighbor> leader;
  std::optional<Neighbor> follower;
};

/// Surroundings of one vehicle. `left`/`right` are empty when that lane does not exist.
struct NeighborSnapshot
{
  LaneNeighbors current;
  std::optional<LaneNeighbors> left;
  std::optional<LaneNeighbors> right;
};

struct StopLine
{
  /// From the front bumper to the stop line.
  double distance{0.0};
  SignalState state{SignalState::kRed};
};

struct Perception
{
  NeighborSnapshot neighbors;
  std::optional<StopLine> stop_line;
  /// Signal governing a path-bound agent's crossing, when it has one.
  std::optional<SignalState> walk_signal;
};

/// IDM acceleration. `gap` = +inf means free road. Result is clamped to
/// [-emergency_decel, max_accel]; a non-positive gap returns -emergency_decel.
double idm_accel(const BehaviorParams & p, double ego_speed, double gap, double lead_speed, const ModelLimits & limits = {});

/// Gap where IDM acceleration vanishes at equal speeds. Throws std::domain_error when
/// speed is outside [0, desired_speed).
double equilibrium_gap(const BehaviorParams & p, double speed);

enum class LaneChange { kKeep, kLeft, kRight };
std::string_view to_string(LaneChange lc);

/// MOBIL incentive of moving to `target`; nullopt when the change is unsafe or impossible.
std::optional<double> mobil_incentive(const BehaviorParams & ego, double ego_speed, double ego_length,
  const LaneNeighbors & current, const LaneNeighbors & target, const ModelLimits & limits);

/// MOBIL decision. Equal incentives on both sides resolve to LEFT.
LaneChange mobil_lane_change(const VehicleState & ego, const NeighborSnapshot & neighbors, const ModelLimits & limits = {});

/// Draws every BehaviorParams field from its truncated normal.
BehaviorParams sample_behavior(const NdeConfig & config, AgentKind kind, CounterRng & rng, double speed_limit = 30.0);

struct StepContext
{
  const RoadNetwork & network;
  const ModelLimits & limits;
  double dt{0.1};
  bool allow_lane_change{true};
  bool ignore_signals{false};
  bool ignore_leader{false};
  std::size_t route_horizon{24};
};

struct StepResult
{
  VehicleState state;
  bool despawn{false};
  bool changed_lane{false};
};

/// IDM acceleration the vehicle would apply this step (stop line as a stationary leader).
double longitudinal_command(const VehicleState & v, const Perception & perception, const StepContext & ctx);

/// Semi-implicit Euler longitudinal integration with lane transitions along the route.
/// Returns true when the route is exhausted.
bool integrate_longitudinal(VehicleState & v, double accel, const StepContext & ctx);

/// Advances an in-progress lane-change animation by one step.
void advance_lateral(VehicleState & v, double dt);

/// Moves `v` into the neighbouring lane (atomic lane assignment, animated offset).
void begin_lane_change(VehicleState & v, LaneIndex target, double duration, const RoadNetwork & network, CounterRng & rng, std::size_t route_horizon);

/// One naturalistic step: IDM + gaussian maneuver noise, optional MOBIL, route following.
StepResult nde_step(const VehicleState & vehicle, const Perception & perception, const StepContext & ctx, CounterRng & rng);

}  // namespace terasim

#endif  // TERASIM_BEHAVIOR_HPP
