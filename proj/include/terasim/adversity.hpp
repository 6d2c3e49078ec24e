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

#ifndef TERASIM_ADVERSITY_HPP
#define TERASIM_ADVERSITY_HPP

#include "terasim/behavior.hpp"
#include "terasim/perception.hpp"
#include "terasim/road_network.hpp"
#include "terasim/rng.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace terasim
{

enum class TriggerKind {
  kLeadGapAndSpeedDiff,
  kApproachingIntersection,
  kSharedLaneWithCyclist,
  kPedestrianCrossingWindow,
  kTimeWindow,
  kAlways,
};

enum class BehaviorKind {
  kHardBrake,
  kCutIn,
  kFailToYield,
  kJaywalk,
  kCyclistSwerve,
  kLaneClosure,
  kSignalOverride,
};

enum class TakeoverMode { kTrajectory, kHighLevelCommand };
enum class AdversityScope { kStatic, kDynamic };

std::string_view to_string(TriggerKind k);
std::string_view to_string(BehaviorKind k);
std::string_view to_string(TakeoverMode m);
std::string_view to_string(AdversityScope s);
TriggerKind parse_trigger_kind(std::string_view text);
BehaviorKind parse_behavior_kind(std::string_view text);
TakeoverMode parse_takeover_mode(std::string_view text);
AdversityScope parse_scope(std::string_view text);

struct TriggerCondition
{
  TriggerKind kind{TriggerKind::kAlways};
  double max_gap{20.0};
  double min_speed_diff{5.0};
  double max_distance_to_conflict{30.0};
  double start_time{0.0};
  double end_time{std::numeric_limits<double>::infinity()};
};

struct ActivatedBehavior
{
  BehaviorKind kind{BehaviorKind::kHardBrake};
  TakeoverMode takeover{TakeoverMode::kTrajectory};
  /// Empty selects the kind's default duration.
  std::optional<double> duration;

  // HARD_BRAKE
  double decel{6.0};
  // CUT_IN
  double aggressive_gap{5.0};
  double lateral_duration{1.0};
  double brake_decel{0.0};
  double brake_duration{0.0};
  // FAIL_TO_YIELD
  bool ignore_leader{false};
  // JAYWALK
  double speed{2.5};
  std::vector<Vec2d> crossing_path;
  // CYCLIST_SWERVE
  double amplitude{0.8};
  double period{2.0};
  // LANE_CLOSURE
  std::vector<std::string> lanes;
  double start_s{0.0};
  double end_s{0.0};
  double cone_spacing{10.0};
  // SIGNAL_OVERRIDE
  std::string signal_id;
  SignalState state{SignalState::kRed};
};

struct AdversitySpec
{
  std::string id;
  AdversityScope scope{AdversityScope::kDynamic};
  std::vector<AgentKind> eligible_kinds;
  TriggerCondition trigger;
  ActivatedBehavior behavior;
  double natural_prob{0.0};
  double proposal_prob{0.0};
  int max_concurrent{1};
  double cooldown{30.0};

  bool is_eligible_kind(AgentKind kind) const;
  /// Throws ConfigError (path "adversities[<index>]...") on any violated invariant.
  void validate(bool nade_enabled, const RoadNetwork * network, std::size_t index = 0) const;
};

struct ActiveAdversity
{
  std::string spec_id;
  std::size_t spec_index{0};
  std::string subject_id;
  double started_at{0.0};
  double expires_at{0.0};
  BehaviorParams saved_behavior;
  double saved_lateral_offset{0.0};
  bool started{false};
  LaneIndex target_lane{kNoLane};
};

/// Snapshot the triggers and behaviors read. Valid for one step.
struct WorldView
{
  double time{0.0};
  const RoadNetwork & network;
  std::span<const VehicleState> agents;
  const PerceptionIndex & perception;
  std::optional<std::size_t> av;
};

/// Pure predicate over the perceiving agent's surroundings. `agent` is empty for
/// static specs evaluated without a subject; agent-relative kinds then use the AV.
bool evaluate_trigger(const AdversitySpec & spec, std::optional<std::size_t> agent, const WorldView & world);

/// Whether the activated behavior can physically start for this subject right now.
bool behavior_applicable(const AdversitySpec & spec, std::optional<std::size_t> agent, const WorldView & world, const ModelLimits & limits);

struct RollOutcome
{
  bool activated{false};
  double weight_factor{1.0};
};

/// Bernoulli draw with p (natural) or q (proposal). Under the proposal the
/// likelihood-ratio factor is p/q on activation, (1-p)/(1-q) otherwise.
RollOutcome roll_activation(const AdversitySpec & spec, CounterRng & rng, bool nade_enabled);

/// Default lifetime of a behavior started at `now` for `agent`.
double behavior_duration(const ActivatedBehavior & b, const VehicleState * agent, const RoadNetwork & network);

/// Overrides the naturalistic step for the subject of an active dynamic adversity.
StepResult apply_behavior(ActiveAdversity & active, const AdversitySpec & spec, const VehicleState & agent,
  std::size_t agent_index, const WorldView & world, const StepContext & ctx, CounterRng & rng);

/// Puts `agent` back on its nominal behavior once `now` passes the expiry.
VehicleState expire_and_restore(const ActiveAdversity & active, const VehicleState & agent, double now);

struct StaticActor
{
  std::string id;
  std::string type;
  Vec2d position;
  double heading{0.0};
  double length{0.5};
  double width{0.5};
};

struct AdversityEvent
{
  enum class Type { kActivation, kExpiry, kRetired } type;
  std::string spec_id;
  std::string subject_id;
  double time;
};

/// Per-episode bookkeeping of active adversities, cooldowns and concurrency.
class AdversityOrchestrator
{
public:
  AdversityOrchestrator() = default;
  explicit AdversityOrchestrator(std::vector<AdversitySpec> specs);

  const std::vector<AdversitySpec> & specs() const { return specs_; }
  const std::vector<ActiveAdversity> & active() const { return active_; }

  bool in_cooldown(std::size_t spec, const std::string & subject, double now) const;
  int active_count(std::size_t spec) const;
  const ActiveAdversity * active_for(const std::string & subject) const;
  ActiveAdversity * active_for(const std::string & subject);
  /// Cooldown, concurrency and one-dynamic-adversity-per-subject gates.
  bool can_activate(std::size_t spec, const std::string & subject, double now) const;

  /// Starts an adversity; static kinds apply their world side effects immediately.
  ActiveAdversity & activate(std::size_t spec, const std::string & subject, double now, VehicleState * agent, RoadNetwork & network);

  /// Retires everything expired at `now`, restoring subjects and undoing static effects.
  std::vector<AdversityEvent> expire(double now, std::vector<VehicleState> & agents, RoadNetwork & network);
  /// Drops adversities whose subject left the simulation.
  std::vector<AdversityEvent> retire_subject(const std::string & subject, double now);

  /// Static actors (cones) emitted by active lane closures.
  std::vector<StaticActor> static_actors(const RoadNetwork & network) const;

  static std::string static_subject(const AdversitySpec & spec);

private:
  void undo_static(const ActiveAdversity & a, RoadNetwork & network) const;

  std::vector<AdversitySpec> specs_;
  std::vector<ActiveAdversity> active_;
  std::map<std::pair<std::size_t, std::string>, double> cooldown_until_;
};

}  // namespace terasim

#endif  // TERASIM_ADVERSITY_HPP
