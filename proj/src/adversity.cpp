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

#include "terasim/adversity.hpp"

#include "terasim/error.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <cmath>
#include <numbers>

namespace terasim
{

namespace
{
template <typename E, std::size_t N>
std::string_view lookup(const std::array<std::pair<E, std::string_view>, N> & table, E value)
{
  for (const auto & [k, name] : table) {
    if (k == value) return name;
  }
  return "UNKNOWN";
}

template <typename E, std::size_t N>
E parse(const std::array<std::pair<E, std::string_view>, N> & table, std::string_view text, const char * what)
{
  for (const auto & [k, name] : table) {
    if (name == text) return k;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

constexpr std::array<std::pair<TriggerKind, std::string_view>, 6> kTriggerNames{{
  {TriggerKind::kLeadGapAndSpeedDiff, "LEAD_GAP_AND_SPEED_DIFF"},
  {TriggerKind::kApproachingIntersection, "APPROACHING_INTERSECTION"},
  {TriggerKind::kSharedLaneWithCyclist, "SHARED_LANE_WITH_CYCLIST"},
  {TriggerKind::kPedestrianCrossingWindow, "PEDESTRIAN_CROSSING_WINDOW"},
  {TriggerKind::kTimeWindow, "TIME_WINDOW"},
  {TriggerKind::kAlways, "ALWAYS"},
}};

constexpr std::array<std::pair<BehaviorKind, std::string_view>, 7> kBehaviorNames{{
  {BehaviorKind::kHardBrake, "HARD_BRAKE"},
  {BehaviorKind::kCutIn, "CUT_IN"},
  {BehaviorKind::kFailToYield, "FAIL_TO_YIELD"},
  {BehaviorKind::kJaywalk, "JAYWALK"},
  {BehaviorKind::kCyclistSwerve, "CYCLIST_SWERVE"},
  {BehaviorKind::kLaneClosure, "LANE_CLOSURE"},
  {BehaviorKind::kSignalOverride, "SIGNAL_OVERRIDE"},
}};

constexpr std::array<std::pair<TakeoverMode, std::string_view>, 2> kTakeoverNames{{
  {TakeoverMode::kTrajectory, "TRAJECTORY"},
  {TakeoverMode::kHighLevelCommand, "HIGH_LEVEL_COMMAND"},
}};

constexpr std::array<std::pair<AdversityScope, std::string_view>, 2> kScopeNames{{
  {AdversityScope::kStatic, "STATIC"},
  {AdversityScope::kDynamic, "DYNAMIC"},
}};

bool is_static_kind(BehaviorKind k) { return k == BehaviorKind::kLaneClosure || k == BehaviorKind::kSignalOverride; }
}  // namespace

std::string_view to_string(TriggerKind k) { return lookup(kTriggerNames, k); }
std::string_view to_string(BehaviorKind k) { return lookup(kBehaviorNames, k); }
std::string_view to_string(TakeoverMode m) { return lookup(kTakeoverNames, m); }
std::string_view to_string(AdversityScope s) { return lookup(kScopeNames, s); }
TriggerKind parse_trigger_kind(std::string_view text) { return parse(kTriggerNames, text, "trigger kind"); }
BehaviorKind parse_behavior_kind(std::string_view text) { return parse(kBehaviorNames, text, "behavior kind"); }
TakeoverMode parse_takeover_mode(std::string_view text) { return parse(kTakeoverNames, text, "takeover mode"); }
AdversityScope parse_scope(std::string_view text) { return parse(kScopeNames, text, "scope"); }

bool AdversitySpec::is_eligible_kind(AgentKind kind) const
{
  return std::find(eligible_kinds.begin(), eligible_kinds.end(), kind) != eligible_kinds.end();
}

void AdversitySpec::validate(bool nade_enabled, const RoadNetwork * network, std::size_t index) const
{
  const std::string base = "adversities[" + std::to_string(index) + "]";
  auto fail = [&](const std::string & field, const std::string & what) { throw ConfigError(base + "." + field, what); };

  if (id.empty()) fail("id", "must be non-empty");
  if (!(natural_prob >= 0.0 && natural_prob <= 1.0)) fail("natural_prob", "must lie in [0, 1]");
  if (!(proposal_prob >= 0.0 && proposal_prob <= 1.0)) fail("proposal_prob", "must lie in [0, 1]");
  if (nade_enabled) {
    if (proposal_prob < natural_prob) fail("proposal_prob", "must be >= natural_prob under NADE");
    if (proposal_prob >= 1.0 && natural_prob < 1.0) fail("proposal_prob", "q = 1 requires p = 1");
    if (natural_prob == 0.0 && proposal_prob > 0.0) fail("natural_prob", "zero natural probability cannot be proposed");
  }
  if (max_concurrent < 1) fail("max_concurrent", "must be >= 1");
  if (!(cooldown >= 0.0) || !std::isfinite(cooldown)) fail("cooldown", "must be >= 0");
  if (scope == AdversityScope::kDynamic && eligible_kinds.empty()) fail("eligible_kinds", "dynamic adversities need at least one kind");
  if (scope == AdversityScope::kDynamic && is_static_kind(behavior.kind)) fail("behavior.kind", "static behavior on a dynamic spec");
  if (scope == AdversityScope::kStatic && !is_static_kind(behavior.kind)) fail("behavior.kind", "dynamic behavior on a static spec");

  const auto & t = trigger;
  switch (t.kind) {
    case TriggerKind::kLeadGapAndSpeedDiff:
      if (!(t.max_gap > 0.0)) fail("trigger.max_gap", "must be > 0");
      if (!(t.min_speed_diff > 0.0)) fail("trigger.min_speed_diff", "must be > 0");
      break;
    case TriggerKind::kSharedLaneWithCyclist:
      if (!(t.max_gap > 0.0)) fail("trigger.max_gap", "must be > 0");
      break;
    case TriggerKind::kApproachingIntersection:
    case TriggerKind::kPedestrianCrossingWindow:
      if (!(t.max_distance_to_conflict > 0.0)) fail("trigger.max_distance_to_conflict", "must be > 0");
      break;
    case TriggerKind::kTimeWindow:
      if (!(t.start_time >= 0.0)) fail("trigger.start_time", "must be >= 0");
      if (!(t.end_time > t.start_time)) fail("trigger.end_time", "must exceed start_time");
      break;
    case TriggerKind::kAlways:
      break;
  }

  const auto & b = behavior;
  if (b.duration && !(*b.duration > 0.0)) fail("behavior.duration", "must be > 0");
  switch (b.kind) {
    case BehaviorKind::kHardBrake:
      if (!(b.decel > 0.0)) fail("behavior.decel", "must be > 0");
      break;
    case BehaviorKind::kCutIn:
      if (!(b.aggressive_gap > 0.0)) fail("behavior.aggressive_gap", "must be > 0");
      if (!(b.lateral_duration > 0.0)) fail("behavior.lateral_duration", "must be > 0");
      if (!(b.brake_decel >= 0.0)) fail("behavior.brake_decel", "must be >= 0");
      if (!(b.brake_duration >= 0.0)) fail("behavior.brake_duration", "must be >= 0");
      break;
    case BehaviorKind::kFailToYield:
      break;
    case BehaviorKind::kJaywalk:
      if (!(b.speed > 0.0)) fail("behavior.speed", "must be > 0");
      if (b.crossing_path.size() == 1) fail("behavior.crossing_path", "needs at least two points");
      break;
    case BehaviorKind::kCyclistSwerve:
      if (!(b.amplitude > 0.0)) fail("behavior.amplitude", "must be > 0");
      if (!(b.period > 0.0)) fail("behavior.period", "must be > 0");
      break;
    case BehaviorKind::kLaneClosure:
      if (b.lanes.empty()) fail("behavior.lanes", "must name at least one lane");
      if (!(b.start_s >= 0.0 && b.end_s > b.start_s)) fail("behavior.end_s", "interval must satisfy 0 <= start_s < end_s");
      if (!(b.cone_spacing > 0.0)) fail("behavior.cone_spacing", "must be > 0");
      if (network) {
        for (std::size_t i = 0; i < b.lanes.size(); ++i) {
          const auto lane = network->find_lane(b.lanes[i]);
          if (!lane) fail("behavior.lanes[" + std::to_string(i) + "]", "unknown lane '" + b.lanes[i] + "'");
          if (b.end_s > network->length(*lane) + 1e-9) fail("behavior.end_s", "interval exceeds lane '" + b.lanes[i] + "'");
        }
      }
      break;
    case BehaviorKind::kSignalOverride:
      if (b.signal_id.empty()) fail("behavior.signal", "must be non-empty");
      if (network && !network->find_signal(b.signal_id)) fail("behavior.signal", "unknown signal '" + b.signal_id + "'");
      break;
  }
}

namespace
{
std::optional<std::size_t> perceiver(std::optional<std::size_t> agent, const WorldView & world)
{
  return agent ? agent : world.av;
}

double distance_to_path(const std::vector<Vec2d> & path, const Vec2d & p)
{
  if (path.size() < 2) return std::numeric_limits<double>::infinity();
  const auto stations = cumulative_length<double>(path);
  return project_onto_polyline<double>(path, stations, p).distance;
}

bool crossing_window(const VehicleState & ped, std::span<const VehicleState> agents, double max_distance)
{
  if (ped.path.size() < 2 || ped.s >= polyline_length<double>(ped.path)) return false;
  for (const auto & other : agents) {
    if (!is_motor_vehicle(other.kind)) continue;
    if (distance_to_path(ped.path, other.position) <= max_distance) return true;
  }
  return false;
}

bool footprint_on(const VehicleState & v, LaneIndex lane, const RoadNetwork & net, double start_s, double end_s)
{
  auto overlaps = [&](double offset) {
    if (std::abs(offset) >= (net.lane(lane).width + v.width) / 2.0) return false;
    return v.front() > start_s && v.rear() < end_s;
  };
  if (v.lane == lane && overlaps(v.lateral_offset)) return true;
  if (v.lane_change && v.lane_change->from_lane == lane && overlaps(v.lateral_offset - v.lane_change->start_offset)) return true;
  return false;
}
}  // namespace

bool evaluate_trigger(const AdversitySpec & spec, std::optional<std::size_t> agent, const WorldView & world)
{
  const auto & t = spec.trigger;
  switch (t.kind) {
    case TriggerKind::kAlways:
      return true;
    case TriggerKind::kTimeWindow:
      return world.time >= t.start_time && world.time < t.end_time;
    default:
      break;
  }

  const auto who = perceiver(agent, world);
  if (!who) return false;
  const VehicleState & ego = world.agents[*who];

  switch (t.kind) {
    case TriggerKind::kLeadGapAndSpeedDiff: {
      if (!ego.on_lane()) return false;
      const auto lead = world.perception.leader(*who);
      if (!lead || !lead->agent) return false;
      return lead->neighbor.gap <= t.max_gap && ego.speed - lead->neighbor.speed >= t.min_speed_diff;
    }
    case TriggerKind::kApproachingIntersection: {
      if (!ego.on_lane() || !world.network.signal_for_lane(ego.lane)) return false;
      const double to_stop = world.network.length(ego.lane) - ego.front();
      return to_stop >= 0.0 && to_stop <= t.max_distance_to_conflict;
    }
    case TriggerKind::kSharedLaneWithCyclist: {
      if (!ego.on_lane()) return false;
      const bool ego_cyclist = ego.kind == AgentKind::kCyclist;
      auto matches = [&](const std::optional<LeaderInfo> & n) {
        if (!n || !n->agent || n->neighbor.gap > t.max_gap) return false;
        const AgentKind other = world.agents[*n->agent].kind;
        return ego_cyclist ? is_motor_vehicle(other) : other == AgentKind::kCyclist;
      };
      if (matches(world.perception.leader(*who))) return true;
      return ego_cyclist && matches(world.perception.follower(*who));
    }
    case TriggerKind::kPedestrianCrossingWindow: {
      if (ego.kind == AgentKind::kPedestrian) return crossing_window(ego, world.agents, t.max_distance_to_conflict);
      for (const auto & other : world.agents) {
        if (other.kind != AgentKind::kPedestrian) continue;
        if (other.path.size() >= 2 && other.s < polyline_length<double>(other.path) &&
            distance_to_path(other.path, ego.position) <= t.max_distance_to_conflict) {
          return true;
        }
      }
      return false;
    }
    default:
      return false;
  }
}

bool behavior_applicable(const AdversitySpec & spec, std::optional<std::size_t> agent, const WorldView & world, const ModelLimits & limits)
{
  (void)limits;
  const auto & b = spec.behavior;
  const auto & net = world.network;

  if (b.kind == BehaviorKind::kLaneClosure) {
    for (const auto & id : b.lanes) {
      const auto lane = net.find_lane(id);
      if (!lane) return false;
      for (const auto & c : net.closures(*lane)) {
        if (c.start_s < b.end_s && b.start_s < c.end_s) return false;
      }
      for (const auto & v : world.agents) {
        if (footprint_on(v, *lane, net, b.start_s, b.end_s)) return false;
      }
    }
    return true;
  }
  if (b.kind == BehaviorKind::kSignalOverride) {
    const auto sig = net.find_signal(b.signal_id);
    return sig && !net.signals()[*sig].override_state;
  }

  if (!agent) return false;
  const VehicleState & v = world.agents[*agent];
  switch (b.kind) {
    case BehaviorKind::kHardBrake:
    case BehaviorKind::kFailToYield:
      return v.on_lane();
    case BehaviorKind::kCutIn: {
      if (!world.av || *world.av == *agent || !v.on_lane() || v.lane_change) return false;
      const VehicleState & av = world.agents[*world.av];
      if (!av.on_lane()) return false;
      if (net.left(v.lane) != av.lane && net.right(v.lane) != av.lane) return false;
      const double ratio = net.length(av.lane) / net.length(v.lane);
      const double s_on_target = v.s * ratio;
      if (s_on_target < av.s) return false;
      const double gap = (s_on_target - v.length / 2.0) - av.front();
      if (gap > b.aggressive_gap) return false;
      for (const auto & c : net.closures(av.lane)) {
        if (s_on_target + v.length / 2.0 > c.start_s && s_on_target - v.length / 2.0 < c.end_s) return false;
      }
      return true;
    }
    case BehaviorKind::kJaywalk:
      return v.kind == AgentKind::kPedestrian && (b.crossing_path.size() >= 2 || v.path.size() >= 2);
    case BehaviorKind::kCyclistSwerve:
      return v.on_lane() && !v.lane_change;
    default:
      return false;
  }
}

RollOutcome roll_activation(const AdversitySpec & spec, CounterRng & rng, bool nade_enabled)
{
  const double p = spec.natural_prob;
  const double q = spec.proposal_prob;
  const double u = rng.uniform();
  RollOutcome out;
  out.activated = u < (nade_enabled ? q : p);
  if (nade_enabled) out.weight_factor = out.activated ? p / q : (1.0 - p) / (1.0 - q);
  return out;
}

double behavior_duration(const ActivatedBehavior & b, const VehicleState * agent, const RoadNetwork & network)
{
  (void)network;
  if (b.duration) return *b.duration;
  switch (b.kind) {
    case BehaviorKind::kHardBrake:
      return 3.0;
    case BehaviorKind::kCutIn:
      return std::max(b.lateral_duration, b.brake_duration) + 2.0;
    case BehaviorKind::kFailToYield:
      return 5.0;
    case BehaviorKind::kJaywalk: {
      if (b.crossing_path.size() >= 2) return polyline_length<double>(b.crossing_path) / b.speed;
      if (agent && agent->path.size() >= 2) return std::max(0.0, polyline_length<double>(agent->path) - agent->s) / b.speed;
      return 1.0;
    }
    case BehaviorKind::kCyclistSwerve:
      return 2.0 * b.period;
    case BehaviorKind::kLaneClosure:
      return std::numeric_limits<double>::infinity();
    case BehaviorKind::kSignalOverride:
      return 10.0;
  }
  return 1.0;
}

StepResult apply_behavior(ActiveAdversity & active, const AdversitySpec & spec, const VehicleState & agent,
  std::size_t agent_index, const WorldView & world, const StepContext & ctx, CounterRng & rng)
{
  const auto & b = spec.behavior;
  StepResult result{agent, false, false};
  VehicleState & v = result.state;
  const Perception perception = world.perception.perceive(agent_index);
  const bool first = !active.started;
  active.started = true;

  auto command = [&](double forced, const StepContext & c) {
    if (b.takeover == TakeoverMode::kHighLevelCommand) return std::min(forced, longitudinal_command(v, perception, c));
    return forced;
  };

  switch (b.kind) {
    case BehaviorKind::kHardBrake: {
      const double a = command(-b.decel, ctx);
      advance_lateral(v, ctx.dt);
      result.despawn = integrate_longitudinal(v, a, ctx);
      break;
    }
    case BehaviorKind::kCutIn: {
      if (first && world.av) {
        const LaneIndex target = world.agents[*world.av].lane;
        if (v.on_lane() && (ctx.network.left(v.lane) == target || ctx.network.right(v.lane) == target)) {
          begin_lane_change(v, target, b.lateral_duration, ctx.network, rng, ctx.route_horizon);
          active.target_lane = target;
          result.changed_lane = true;
        }
      }
      const double elapsed = world.time - active.started_at;
      const double idm = longitudinal_command(v, perception, ctx);
      double a = idm;
      if (b.brake_decel > 0.0 && elapsed < b.brake_duration - 1e-9) a = command(-b.brake_decel, ctx);
      advance_lateral(v, ctx.dt);
      result.despawn = integrate_longitudinal(v, a, ctx);
      break;
    }
    case BehaviorKind::kFailToYield: {
      StepContext c = ctx;
      c.ignore_signals = true;
      c.ignore_leader = b.ignore_leader;
      const double a = longitudinal_command(v, perception, c);
      advance_lateral(v, ctx.dt);
      result.despawn = integrate_longitudinal(v, a, c);
      break;
    }
    case BehaviorKind::kJaywalk: {
      if (first && b.crossing_path.size() >= 2) {
        v.path = b.crossing_path;
        v.lane = kNoLane;
        v.s = 0.0;
        v.lane_change.reset();
      }
      v.speed = b.speed;
      result.despawn = integrate_longitudinal(v, 0.0, ctx);
      v.accel = 0.0;
      break;
    }
    case BehaviorKind::kCyclistSwerve: {
      const double a = longitudinal_command(v, perception, ctx);
      result.despawn = integrate_longitudinal(v, a, ctx);
      const double phase = 2.0 * std::numbers::pi * (world.time + ctx.dt - active.started_at) / b.period;
      v.lateral_offset = active.saved_lateral_offset + b.amplitude * std::sin(phase);
      break;
    }
    case BehaviorKind::kLaneClosure:
    case BehaviorKind::kSignalOverride:
      return nde_step(agent, perception, ctx, rng);
  }
  update_pose(v, ctx.network);
  return result;
}

VehicleState expire_and_restore(const ActiveAdversity & active, const VehicleState & agent, double now)
{
  (void)now;
  VehicleState v = agent;
  v.behavior = active.saved_behavior;
  v.active_adversity.reset();
  if (!v.lane_change && v.on_lane()) v.lateral_offset = active.saved_lateral_offset;
  return v;
}

AdversityOrchestrator::AdversityOrchestrator(std::vector<AdversitySpec> specs) : specs_(std::move(specs)) {}

std::string AdversityOrchestrator::static_subject(const AdversitySpec & spec) { return "world:" + spec.id; }

bool AdversityOrchestrator::in_cooldown(std::size_t spec, const std::string & subject, double now) const
{
  const auto it = cooldown_until_.find({spec, subject});
  return it != cooldown_until_.end() && now < it->second - 1e-9;
}

int AdversityOrchestrator::active_count(std::size_t spec) const
{
  return static_cast<int>(std::count_if(active_.begin(), active_.end(), [&](const ActiveAdversity & a) { return a.spec_index == spec; }));
}

const ActiveAdversity * AdversityOrchestrator::active_for(const std::string & subject) const
{
  for (const auto & a : active_) {
    if (a.subject_id == subject) return &a;
  }
  return nullptr;
}

ActiveAdversity * AdversityOrchestrator::active_for(const std::string & subject)
{
  for (auto & a : active_) {
    if (a.subject_id == subject) return &a;
  }
  return nullptr;
}

bool AdversityOrchestrator::can_activate(std::size_t spec, const std::string & subject, double now) const
{
  if (in_cooldown(spec, subject, now)) return false;
  if (active_count(spec) >= specs_[spec].max_concurrent) return false;
  return active_for(subject) == nullptr;
}

ActiveAdversity & AdversityOrchestrator::activate(std::size_t spec_index, const std::string & subject, double now, VehicleState * agent, RoadNetwork & network)
{
  const AdversitySpec & spec = specs_.at(spec_index);
  ActiveAdversity a;
  a.spec_id = spec.id;
  a.spec_index = spec_index;
  a.subject_id = subject;
  a.started_at = now;
  a.expires_at = now + behavior_duration(spec.behavior, agent, network);
  if (agent) {
    a.saved_behavior = agent->behavior;
    a.saved_lateral_offset = agent->lateral_offset;
    agent->active_adversity = spec.id;
  }
  const auto & b = spec.behavior;
  if (b.kind == BehaviorKind::kLaneClosure) {
    for (const auto & id : b.lanes) network.add_closure(network.lane_index(id), {b.start_s, b.end_s});
  } else if (b.kind == BehaviorKind::kSignalOverride) {
    network.signal(*network.find_signal(b.signal_id)).override_state = b.state;
  }
  active_.push_back(std::move(a));
  return active_.back();
}

void AdversityOrchestrator::undo_static(const ActiveAdversity & a, RoadNetwork & network) const
{
  const auto & b = specs_[a.spec_index].behavior;
  if (b.kind == BehaviorKind::kLaneClosure) {
    for (const auto & id : b.lanes) network.remove_closure(network.lane_index(id), {b.start_s, b.end_s});
  } else if (b.kind == BehaviorKind::kSignalOverride) {
    if (const auto sig = network.find_signal(b.signal_id)) network.signal(*sig).override_state.reset();
  }
}

std::vector<AdversityEvent> AdversityOrchestrator::expire(double now, std::vector<VehicleState> & agents, RoadNetwork & network)
{
  std::vector<AdversityEvent> events;
  std::vector<ActiveAdversity> kept;
  for (auto & a : active_) {
    if (now < a.expires_at - 1e-9) {
      kept.push_back(std::move(a));
      continue;
    }
    const auto & spec = specs_[a.spec_index];
    if (spec.scope == AdversityScope::kStatic) {
      undo_static(a, network);
    } else {
      for (auto & v : agents) {
        if (v.id == a.subject_id) {
          v = expire_and_restore(a, v, now);
          break;
        }
      }
    }
    cooldown_until_[{a.spec_index, a.subject_id}] = now + spec.cooldown;
    events.push_back({AdversityEvent::Type::kExpiry, a.spec_id, a.subject_id, now});
  }
  active_ = std::move(kept);
  return events;
}

std::vector<AdversityEvent> AdversityOrchestrator::retire_subject(const std::string & subject, double now)
{
  std::vector<AdversityEvent> events;
  std::erase_if(active_, [&](const ActiveAdversity & a) {
    if (a.subject_id != subject) return false;
    events.push_back({AdversityEvent::Type::kRetired, a.spec_id, a.subject_id, now});
    return true;
  });
  return events;
}

std::vector<StaticActor> AdversityOrchestrator::static_actors(const RoadNetwork & network) const
{
  std::vector<StaticActor> out;
  for (const auto & a : active_) {
    const auto & b = specs_[a.spec_index].behavior;
    if (b.kind != BehaviorKind::kLaneClosure) continue;
    for (const auto & id : b.lanes) {
      const LaneIndex lane = network.lane_index(id);
      const auto count = static_cast<std::size_t>(std::floor((b.end_s - b.start_s) / b.cone_spacing + 1e-9)) + 1;
      for (std::size_t k = 0; k < count; ++k) {
        const double s = b.start_s + static_cast<double>(k) * b.cone_spacing;
        const auto pose = network.pose(lane, s, 0.0);
        out.push_back({"cone_" + a.spec_id + "_" + id + "_" + std::to_string(k), "CONE", pose.position, pose.heading, 0.5, 0.5});
      }
    }
  }
  return out;
}

}  // namespace terasim
