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

#include "terasim/behavior.hpp"

#include "terasim/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace terasim
{

std::string_view to_string(AgentKind kind)
{
  switch (kind) {
    case AgentKind::kCar:
      return "CAR";
    case AgentKind::kTruck:
      return "TRUCK";
    case AgentKind::kCyclist:
      return "CYCLIST";
    case AgentKind::kPedestrian:
      return "PEDESTRIAN";
    case AgentKind::kAv:
      return "AV";
  }
  return "CAR";
}

AgentKind parse_agent_kind(std::string_view text)
{
  if (text == "CAR") return AgentKind::kCar;
  if (text == "TRUCK") return AgentKind::kTruck;
  if (text == "CYCLIST") return AgentKind::kCyclist;
  if (text == "PEDESTRIAN") return AgentKind::kPedestrian;
  if (text == "AV") return AgentKind::kAv;
  throw std::invalid_argument("unknown agent kind '" + std::string(text) + "'");
}

bool is_motor_vehicle(AgentKind kind)
{
  return kind == AgentKind::kCar || kind == AgentKind::kTruck || kind == AgentKind::kAv;
}

Dimensions default_dimensions(AgentKind kind)
{
  switch (kind) {
    case AgentKind::kTruck:
      return {12.0, 2.5};
    case AgentKind::kCyclist:
      return {1.8, 0.6};
    case AgentKind::kPedestrian:
      return {0.5, 0.5};
    case AgentKind::kCar:
    case AgentKind::kAv:
      break;
  }
  return {4.8, 1.9};
}

void BehaviorParams::validate() const
{
  auto positive = [](double v, const char * name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
  };
  positive(desired_speed, "desired_speed");
  positive(max_accel, "max_accel");
  positive(comfortable_decel, "comfortable_decel");
  positive(min_gap, "min_gap");
  positive(time_headway, "time_headway");
  if (!(accel_exponent >= 1.0)) throw std::invalid_argument("accel_exponent must be >= 1");
  if (!(politeness >= 0.0 && politeness <= 1.0)) throw std::invalid_argument("politeness must lie in [0, 1]");
  if (!(reaction_noise_sd >= 0.0)) throw std::invalid_argument("reaction_noise_sd must be >= 0");
  if (!std::isfinite(lane_change_threshold)) throw std::invalid_argument("lane_change_threshold must be finite");
}

double TruncatedNormal::sample(CounterRng & rng) const
{
  if (sd == 0.0 || min == max) return std::clamp(mean, min, max);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double x = rng.normal(mean, sd);
    if (x >= min && x <= max) return x;
  }
  return std::clamp(mean, min, max);
}

double TruncatedNormal::expected_value() const
{
  if (sd == 0.0 || min == max) return std::clamp(mean, min, max);
  auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double a = (min - mean) / sd;
  const double b = (max - mean) / sd;
  return mean + sd * (pdf(a) - pdf(b)) / (cdf(b) - cdf(a));
}

KindDistribution KindDistribution::defaults(AgentKind kind)
{
  KindDistribution d;
  switch (kind) {
    case AgentKind::kTruck:
      d.max_accel = TruncatedNormal::fixed(1.0);
      d.comfortable_decel = TruncatedNormal::fixed(2.0);
      d.min_gap = TruncatedNormal::fixed(3.0);
      d.time_headway = TruncatedNormal::fixed(1.8);
      break;
    case AgentKind::kCyclist:
      d.desired_speed = TruncatedNormal{5.0, 1.0, 3.0, 8.0};
      d.max_accel = TruncatedNormal::fixed(1.0);
      d.comfortable_decel = TruncatedNormal::fixed(2.0);
      d.min_gap = TruncatedNormal::fixed(1.0);
      d.time_headway = TruncatedNormal::fixed(1.0);
      break;
    case AgentKind::kPedestrian:
      d.desired_speed = TruncatedNormal{1.4, 0.2, 0.8, 2.0};
      d.max_accel = TruncatedNormal::fixed(1.0);
      d.comfortable_decel = TruncatedNormal::fixed(1.0);
      d.min_gap = TruncatedNormal::fixed(0.5);
      d.time_headway = TruncatedNormal::fixed(0.5);
      break;
    case AgentKind::kAv:
      d.comfortable_decel = TruncatedNormal::fixed(2.0);
      d.time_headway = TruncatedNormal::fixed(2.0);
      d.reaction_noise_sd = TruncatedNormal::fixed(0.0);
      break;
    case AgentKind::kCar:
      break;
  }
  return d;
}

const KindDistribution & NdeConfig::distribution(AgentKind kind) const
{
  static const std::array<KindDistribution, 5> fallback{
    KindDistribution::defaults(AgentKind::kCar), KindDistribution::defaults(AgentKind::kTruck),
    KindDistribution::defaults(AgentKind::kCyclist), KindDistribution::defaults(AgentKind::kPedestrian),
    KindDistribution::defaults(AgentKind::kAv)};
  auto it = kinds.find(kind);
  if (it != kinds.end()) return it->second;
  return fallback[static_cast<std::size_t>(kind)];
}

void NdeConfig::validate() const
{
  auto check = [](const TruncatedNormal & t, const std::string & path, double floor, bool strict) {
    if (!(t.sd >= 0.0)) throw ConfigError(path + ".sd", "must be >= 0");
    if (!(t.min <= t.mean && t.mean <= t.max)) throw ConfigError(path, "requires min <= mean <= max");
    if (strict ? !(t.min > floor) : !(t.min >= floor)) throw ConfigError(path + ".min", "violates parameter bound");
  };
  for (const auto & [kind, d] : kinds) {
    const std::string p = "nde.kinds." + std::string(to_string(kind));
    if (d.desired_speed) check(*d.desired_speed, p + ".desired_speed", 0.0, true);
    check(d.max_accel, p + ".max_accel", 0.0, true);
    check(d.comfortable_decel, p + ".comfortable_decel", 0.0, true);
    check(d.min_gap, p + ".min_gap", 0.0, true);
    check(d.time_headway, p + ".time_headway", 0.0, true);
    check(d.accel_exponent, p + ".accel_exponent", 1.0, false);
    check(d.politeness, p + ".politeness", 0.0, false);
    if (d.politeness.max > 1.0) throw ConfigError(p + ".politeness.max", "must be <= 1");
    check(d.lane_change_threshold, p + ".lane_change_threshold", -1e9, false);
    if (d.reaction_noise_sd) check(*d.reaction_noise_sd, p + ".reaction_noise_sd", 0.0, false);
  }
  if (!(spawn_rate >= 0.0)) throw ConfigError("nde.spawn_rate", "must be >= 0");
  if (!(maneuver_noise >= 0.0)) throw ConfigError("nde.maneuver_noise", "must be >= 0");
  if (initial_vehicles < 0) throw ConfigError("nde.initial_vehicles", "must be >= 0");
  double mix = 0.0;
  for (const auto & [kind, w] : kind_mix) {
    if (!(w >= 0.0)) throw ConfigError("nde.kind_mix." + std::string(to_string(kind)), "must be >= 0");
    if (kind == AgentKind::kAv || kind == AgentKind::kPedestrian) {
      throw ConfigError("nde.kind_mix." + std::string(to_string(kind)), "kind cannot be spawned on lanes");
    }
    mix += w;
  }
  if (spawn_rate > 0.0 && !(mix > 0.0)) throw ConfigError("nde.kind_mix", "needs a positive weight");
  if (!(limits.safe_decel > 0.0)) throw ConfigError("nde.limits.safe_decel", "must be > 0");
  if (!(limits.emergency_decel > 0.0)) throw ConfigError("nde.limits.emergency_decel", "must be > 0");
  if (!(limits.lane_change_duration > 0.0)) throw ConfigError("nde.limits.lane_change_duration", "must be > 0");
  if (route_length == 0) throw ConfigError("nde.route_length", "must be >= 1");
}

void update_pose(VehicleState & v, const RoadNetwork & network)
{
  if (v.on_lane()) {
    const auto pose = network.pose(v.lane, v.s, v.lateral_offset);
    v.position = pose.position;
    v.heading = pose.heading;
  } else if (v.path.size() >= 2) {
    const auto stations = cumulative_length<double>(v.path);
    const auto pose = locate_on_polyline<double>(v.path, stations, v.s, v.lateral_offset);
    v.position = pose.position;
    v.heading = pose.heading;
  }
}

double idm_accel(const BehaviorParams & p, double ego_speed, double gap, double lead_speed, const ModelLimits & limits)
{
  const double free_term = 1.0 - std::pow(ego_speed / p.desired_speed, p.accel_exponent);
  double a = 0.0;
  if (!std::isfinite(gap)) {
    a = p.max_accel * free_term;
  } else {
    if (gap <= 0.0) return -limits.emergency_decel;
    const double dv = ego_speed - lead_speed;
    const double dynamic = ego_speed * p.time_headway + ego_speed * dv / (2.0 * std::sqrt(p.max_accel * p.comfortable_decel));
    const double desired_gap = p.min_gap + std::max(0.0, dynamic);
    const double ratio = desired_gap / gap;
    a = p.max_accel * (free_term - ratio * ratio);
  }
  return std::clamp(a, -limits.emergency_decel, p.max_accel);
}

double equilibrium_gap(const BehaviorParams & p, double speed)
{
  if (!(speed >= 0.0 && speed < p.desired_speed)) {
    throw std::domain_error("equilibrium_gap requires 0 <= speed < desired_speed");
  }
  const double denom = 1.0 - std::pow(speed / p.desired_speed, p.accel_exponent);
  return (p.min_gap + speed * p.time_headway) / std::sqrt(denom);
}

std::string_view to_string(LaneChange lc)
{
  switch (lc) {
    case LaneChange::kLeft:
      return "LEFT";
    case LaneChange::kRight:
      return "RIGHT";
    case LaneChange::kKeep:
      break;
  }
  return "KEEP";
}

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

double gap_of(const std::optional<Neighbor> & n) { return n ? n->gap : kInf; }
double speed_of(const std::optional<Neighbor> & n) { return n ? n->speed : 0.0; }
}  // namespace

std::optional<double> mobil_incentive(const BehaviorParams & ego, double ego_speed, double ego_length,
  const LaneNeighbors & current, const LaneNeighbors & target, const ModelLimits & limits)
{
  const auto & tl = target.leader;
  const auto & nf = target.follower;
  if (tl && tl->gap <= 0.0) return std::nullopt;
  if (nf && nf->gap <= 0.0) return std::nullopt;

  double nf_gain = 0.0;
  if (nf) {
    const double nf_new = idm_accel(nf->params, nf->speed, nf->gap, ego_speed, limits);
    if (nf_new < -limits.safe_decel) return std::nullopt;
    const double nf_old = idm_accel(nf->params, nf->speed, nf->gap + ego_length + gap_of(tl), speed_of(tl), limits);
    nf_gain = nf_new - nf_old;
  }

  double of_gain = 0.0;
  if (const auto & of = current.follower) {
    const double of_old = idm_accel(of->params, of->speed, of->gap, ego_speed, limits);
    const double of_new = idm_accel(of->params, of->speed, of->gap + ego_length + gap_of(current.leader), speed_of(current.leader), limits);
    of_gain = of_new - of_old;
  }

  const double ego_old = idm_accel(ego, ego_speed, gap_of(current.leader), speed_of(current.leader), limits);
  const double ego_new = idm_accel(ego, ego_speed, gap_of(tl), speed_of(tl), limits);
  return (ego_new - ego_old) + ego.politeness * (nf_gain + of_gain);
}

LaneChange mobil_lane_change(const VehicleState & ego, const NeighborSnapshot & neighbors, const ModelLimits & limits)
{
  const double threshold = ego.behavior.lane_change_threshold;
  std::optional<double> left;
  std::optional<double> right;
  if (neighbors.left) left = mobil_incentive(ego.behavior, ego.speed, ego.length, neighbors.current, *neighbors.left, limits);
  if (neighbors.right) right = mobil_incentive(ego.behavior, ego.speed, ego.length, neighbors.current, *neighbors.right, limits);
  const bool go_left = left && *left > threshold;
  const bool go_right = right && *right > threshold;
  if (go_left && go_right) return *left >= *right ? LaneChange::kLeft : LaneChange::kRight;
  if (go_left) return LaneChange::kLeft;
  if (go_right) return LaneChange::kRight;
  return LaneChange::kKeep;
}

BehaviorParams sample_behavior(const NdeConfig & config, AgentKind kind, CounterRng & rng, double speed_limit)
{
  const KindDistribution & d = config.distribution(kind);
  BehaviorParams p;
  p.desired_speed = d.desired_speed ? d.desired_speed->sample(rng) : speed_limit;
  p.max_accel = d.max_accel.sample(rng);
  p.comfortable_decel = d.comfortable_decel.sample(rng);
  p.min_gap = d.min_gap.sample(rng);
  p.time_headway = d.time_headway.sample(rng);
  p.accel_exponent = d.accel_exponent.sample(rng);
  p.politeness = d.politeness.sample(rng);
  p.lane_change_threshold = d.lane_change_threshold.sample(rng);
  p.reaction_noise_sd = d.reaction_noise_sd ? d.reaction_noise_sd->sample(rng) : config.maneuver_noise;
  return p;
}

double longitudinal_command(const VehicleState & v, const Perception & perception, const StepContext & ctx)
{
  const auto & leader = perception.neighbors.current.leader;
  const double gap = ctx.ignore_leader ? kInf : gap_of(leader);
  double a = idm_accel(v.behavior, v.speed, gap, speed_of(leader), ctx.limits);
  if (perception.stop_line && !ctx.ignore_signals && perception.stop_line->distance > 0.0) {
    const auto & sl = *perception.stop_line;
    const double comfortable_stop = v.speed * v.speed / (2.0 * v.behavior.comfortable_decel);
    const bool must_stop = sl.state == SignalState::kRed || (sl.state == SignalState::kYellow && sl.distance >= comfortable_stop);
    if (must_stop) a = std::min(a, idm_accel(v.behavior, v.speed, sl.distance, 0.0, ctx.limits));
  }
  return a;
}

namespace
{
// Holds the vehicle at the upstream edge of any closed interval its footprint would enter.
void stop_at_closures(VehicleState & v, double prev_s, double prev_speed, const StepContext & ctx)
{
  const auto & net = ctx.network;
  auto hold = [&](LaneIndex lane, double offset_in_lane) {
    if (lane == kNoLane) return;
    if (std::abs(offset_in_lane) >= (net.lane(lane).width + v.width) / 2.0) return;
    for (const auto & c : net.closures(lane)) {
      const double limit = c.start_s - v.length / 2.0;
      if (prev_s <= limit + 1e-9 && v.s > limit) {
        v.s = std::max(limit, prev_s);
        v.speed = 0.0;
        v.accel = -prev_speed / ctx.dt;
      }
    }
  };
  hold(v.lane, v.lateral_offset);
  if (v.lane_change) hold(v.lane_change->from_lane, v.lateral_offset - v.lane_change->start_offset);
}
}  // namespace

namespace
{
constexpr double kStandstillSpeed = 0.1;
}

bool integrate_longitudinal(VehicleState & v, double accel, const StepContext & ctx)
{
  const double dt = ctx.dt;
  const double prev_speed = v.speed;
  double speed = v.speed + accel * dt;
  v.accel = accel;
  // IDM only approaches a stop asymptotically; a braking vehicle this slow is held at rest.
  if (speed < 0.0 || (accel < 0.0 && speed < kStandstillSpeed)) {
    speed = 0.0;
    v.accel = -v.speed / dt;
  }
  v.speed = speed;
  double prev_s = v.s;
  v.s += speed * dt;

  if (!v.on_lane()) {
    v.odometer += v.s - prev_s;
    const double len = polyline_length<double>(v.path);
    if (v.s >= len) {
      v.s = len;
      return true;
    }
    return false;
  }

  while (v.s > ctx.network.length(v.lane)) {
    const double len = ctx.network.length(v.lane);
    if (v.route_index + 1 >= v.route.size()) {
      v.odometer += len - prev_s;
      v.s = len;
      return true;
    }
    v.odometer += len - prev_s;
    v.s -= len;
    prev_s -= len;
    ++v.route_index;
    v.lane = v.route[v.route_index];
    if (v.lane_change) v.lane_change->from_lane = kNoLane;
  }
  stop_at_closures(v, prev_s, prev_speed, ctx);
  v.odometer += v.s - prev_s;
  return false;
}

void advance_lateral(VehicleState & v, double dt)
{
  if (!v.lane_change) return;
  auto & lc = *v.lane_change;
  lc.elapsed += dt;
  const double frac = std::min(1.0, lc.elapsed / lc.duration);
  v.lateral_offset = lc.start_offset * (1.0 - frac);
  if (frac >= 1.0) {
    v.lateral_offset = 0.0;
    v.lane_change.reset();
  }
}

void begin_lane_change(VehicleState & v, LaneIndex target, double duration, const RoadNetwork & network, CounterRng & rng, std::size_t route_horizon)
{
  const bool to_left = network.left(v.lane) == target;
  const double shift = (network.lane(v.lane).width + network.lane(target).width) / 2.0;
  const double start_offset = v.lateral_offset + (to_left ? -shift : shift);
  const double ratio = network.length(target) / network.length(v.lane);
  const std::size_t remaining = v.route.empty() ? 0 : v.route.size() - v.route_index - 1;
  const LaneIndex from = v.lane;
  v.s = std::clamp(v.s * ratio, 0.0, network.length(target));
  v.lane = target;
  v.lateral_offset = start_offset;
  v.lane_change = LaneChangeAnimation{start_offset, 0.0, duration, from};
  v.route = sample_route(network, target, std::min(remaining, route_horizon) + 1, rng);
  v.route_index = 0;
}

StepResult nde_step(const VehicleState & vehicle, const Perception & perception, const StepContext & ctx, CounterRng & rng)
{
  StepResult result{vehicle, false, false};
  VehicleState & v = result.state;

  if (!v.on_lane()) {
    // Path-bound agents walk at their desired speed, waiting for green when signal-controlled.
    const bool may_walk = !perception.walk_signal || *perception.walk_signal == SignalState::kGreen;
    v.speed = may_walk ? v.behavior.desired_speed : 0.0;
    result.despawn = integrate_longitudinal(v, 0.0, ctx);
    v.accel = 0.0;
    update_pose(v, ctx.network);
    return result;
  }

  double a = longitudinal_command(v, perception, ctx);
  if (v.behavior.reaction_noise_sd > 0.0) a += rng.normal() * v.behavior.reaction_noise_sd;
  a = std::clamp(a, -ctx.limits.emergency_decel, v.behavior.max_accel);

  LaneChange decision = LaneChange::kKeep;
  if (ctx.allow_lane_change && !v.lane_change && is_motor_vehicle(v.kind)) {
    decision = mobil_lane_change(v, perception.neighbors, ctx.limits);
  }

  advance_lateral(v, ctx.dt);
  const LaneIndex lane_before = v.lane;
  result.despawn = integrate_longitudinal(v, a, ctx);
  if (!result.despawn && decision != LaneChange::kKeep && v.lane == lane_before) {
    const LaneIndex target = decision == LaneChange::kLeft ? ctx.network.left(v.lane) : ctx.network.right(v.lane);
    if (target != kNoLane) {
      begin_lane_change(v, target, ctx.limits.lane_change_duration, ctx.network, rng, ctx.route_horizon);
      result.changed_lane = true;
    }
  }
  update_pose(v, ctx.network);
  return result;
}

}  // namespace terasim
