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

#include "terasim/engine.hpp"

#include "terasim/cosim/bridge.hpp"
#include "terasim/cosim/messages.hpp"
#include "terasim/error.hpp"
#include "terasim/perception.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace terasim
{

Json to_json(const CrashEvent & c)
{
  return {
    {"t", c.time},
    {"partners", {c.partners[0], c.partners[1]}},
    {"relative_speed", c.relative_speed},
    {"witness", {{"depth", c.witness.depth}, {"axis", {c.witness.axis.x(), c.witness.axis.y()}}}},
    {"av", c.involves_av},
  };
}

OrientedBox<double> footprint(const VehicleState & v) { return {v.position, v.heading, v.length, v.width}; }

std::vector<CrashEvent> detect_collisions(std::span<const VehicleState> actors, double time)
{
  std::vector<CrashEvent> out;
  std::vector<OrientedBox<double>> boxes;
  boxes.reserve(actors.size());
  for (const auto & a : actors) boxes.push_back(footprint(a));
  for (std::size_t i = 0; i < actors.size(); ++i) {
    for (std::size_t j = i + 1; j < actors.size(); ++j) {
      if (actors[i].kind == AgentKind::kPedestrian && actors[j].kind == AgentKind::kPedestrian) continue;
      const double reach = boxes[i].bounding_radius() + boxes[j].bounding_radius();
      if ((boxes[i].center - boxes[j].center).squaredNorm() >= reach * reach) continue;
      const auto w = separating_axis_test(boxes[i], boxes[j]);
      if (!w.overlap) continue;
      CrashEvent c;
      c.time = time;
      c.partners = {actors[i].id, actors[j].id};
      const Vec2d vi = unit_from_heading(actors[i].heading) * actors[i].speed;
      const Vec2d vj = unit_from_heading(actors[j].heading) * actors[j].speed;
      c.relative_speed = (vi - vj).norm();
      c.witness = w;
      c.involves_av = actors[i].kind == AgentKind::kAv || actors[j].kind == AgentKind::kAv;
      out.push_back(c);
    }
  }
  return out;
}

namespace
{
std::string agent_id(std::uint64_t n)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "veh_%06llu", static_cast<unsigned long long>(n));
  return buf;
}

AgentKind pick_kind(const NdeConfig & config, CounterRng & rng)
{
  double total = 0.0;
  for (const auto & [k, w] : config.kind_mix) total += w;
  double u = rng.uniform() * total;
  AgentKind last = AgentKind::kCar;
  for (const auto & [k, w] : config.kind_mix) {
    if (w <= 0.0) continue;
    last = k;
    if (u < w) return k;
    u -= w;
  }
  return last;
}

int poisson(double lambda, CounterRng & rng)
{
  // Inversion; lambda is a per-step rate and therefore small.
  const double u = rng.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  int k = 0;
  while (u > cdf && k < 64) {
    ++k;
    p *= lambda / k;
    cdf += p;
  }
  return k;
}

VehicleState make_vehicle(std::string id, AgentKind kind, const RoadNetwork & net, LaneIndex lane, double s, double speed, const BehaviorParams & behavior)
{
  VehicleState v;
  v.id = std::move(id);
  v.kind = kind;
  const auto dims = default_dimensions(kind);
  v.length = dims.length;
  v.width = dims.width;
  v.lane = lane;
  v.s = s;
  v.speed = speed;
  v.behavior = behavior;
  update_pose(v, net);
  return v;
}

bool overlaps_any(const VehicleState & v, std::span<const VehicleState> others, double margin)
{
  OrientedBox<double> mine{v.position, v.heading, v.length + 2.0 * margin, v.width};
  for (const auto & o : others) {
    if (boxes_overlap(mine, footprint(o))) return true;
  }
  return false;
}

// Bumper gaps to the nearest vehicles ahead of and behind `s` on `lane`.
std::pair<double, double> lane_gaps(const VehicleState & v, std::span<const VehicleState> others)
{
  double ahead = std::numeric_limits<double>::infinity();
  double behind = std::numeric_limits<double>::infinity();
  for (const auto & o : others) {
    const bool on = o.lane == v.lane || (o.lane_change && o.lane_change->from_lane == v.lane);
    if (!on) continue;
    if (o.s >= v.s) {
      ahead = std::min(ahead, o.rear() - v.front());
    } else {
      behind = std::min(behind, v.rear() - o.front());
    }
  }
  return {ahead, behind};
}

double safe_equilibrium_gap(const BehaviorParams & p, double speed)
{
  return equilibrium_gap(p, std::min(speed, 0.95 * p.desired_speed));
}
}  // namespace

std::vector<VehicleState> spawn_agents(const RoadNetwork & network, const NdeConfig & config, CounterRng & rng, double now, double dt,
  std::span<const VehicleState> existing, std::uint64_t & next_id, SpawnStats & stats)
{
  (void)now;
  std::vector<VehicleState> out;
  if (!(config.spawn_rate > 0.0)) return out;
  std::vector<VehicleState> all(existing.begin(), existing.end());
  for (const auto & sp : network.spawn_points()) {
    const int arrivals = poisson(config.spawn_rate * dt, rng);
    const LaneIndex lane = network.lane_index(sp.lane_id);
    for (int a = 0; a < arrivals; ++a) {
      const AgentKind kind = pick_kind(config, rng);
      const double limit = network.lane(lane).speed_limit;
      const BehaviorParams params = sample_behavior(config, kind, rng, limit);
      const double speed = std::min(0.8 * params.desired_speed, limit);
      const double s = std::min(network.length(lane), sp.s + default_dimensions(kind).length / 2.0);
      VehicleState v = make_vehicle(agent_id(next_id), kind, network, lane, s, speed, params);
      const auto [ahead, behind] = lane_gaps(v, all);
      bool ok = ahead >= safe_equilibrium_gap(params, speed) && behind >= params.min_gap && !overlaps_any(v, all, 0.5);
      if (ok) {
        v.route = sample_route(network, lane, config.route_length, rng);
        ++next_id;
        ++stats.spawned;
        all.push_back(v);
        out.push_back(std::move(v));
      } else {
        ++stats.rejected;
      }
    }
  }
  return out;
}

cosim::ActorStateMessage world_message(double time, std::span<const VehicleState> agents, std::span<const StaticActor> statics,
  const RoadNetwork & network, const std::string & weather)
{
  cosim::ActorStateMessage m;
  m.header = {time, std::string(cosim::kSimulatorPlatform), std::string(cosim::kSchemaVersion)};
  for (const auto & a : agents) {
    cosim::ActorType type = cosim::ActorType::kCar;
    switch (a.kind) {
      case AgentKind::kCar:
        type = cosim::ActorType::kCar;
        break;
      case AgentKind::kTruck:
        type = cosim::ActorType::kTruck;
        break;
      case AgentKind::kCyclist:
        type = cosim::ActorType::kCyclist;
        break;
      case AgentKind::kPedestrian:
        type = cosim::ActorType::kPedestrian;
        break;
      case AgentKind::kAv:
        type = cosim::ActorType::kAv;
        break;
    }
    m.actors.push_back({a.id, type, a.position.x(), a.position.y(), a.heading, a.speed, a.accel, a.length, a.width});
  }
  for (const auto & s : statics) {
    m.actors.push_back({s.id, s.type == "SIGN" ? cosim::ActorType::kSign : cosim::ActorType::kCone, s.position.x(), s.position.y(), s.heading, 0.0,
      0.0, s.length, s.width});
  }
  std::vector<cosim::SignalEntry> sig;
  for (const auto & s : network.signals()) sig.push_back({s.id, std::string(to_string(s.state()))});
  m.signals = std::move(sig);
  m.weather = weather;
  return m;
}

namespace
{
constexpr double kMaxLateralRate = 1.5;

Json actor_json(const VehicleState & v, const RoadNetwork & net)
{
  return {
    {"id", v.id},
    {"kind", to_string(v.kind)},
    {"lane", v.on_lane() ? Json(net.lane(v.lane).id) : Json(nullptr)},
    {"s", v.s},
    {"lat", v.lateral_offset},
    {"x", v.position.x()},
    {"y", v.position.y()},
    {"heading", v.heading},
    {"speed", v.speed},
    {"accel", v.accel},
    {"length", v.length},
    {"width", v.width},
    {"adv", v.active_adversity ? Json(*v.active_adversity) : Json(nullptr)},
  };
}

// Moves an agent whose lateral offset crossed a lane edge onto the neighbouring lane.
void reassign_lane(VehicleState & v, const RoadNetwork & net, CounterRng & rng, std::size_t horizon)
{
  if (!v.on_lane()) return;
  const double half = net.lane(v.lane).width / 2.0;
  LaneIndex target = kNoLane;
  if (v.lateral_offset > half) target = net.left(v.lane);
  if (v.lateral_offset < -half) target = net.right(v.lane);
  if (target == kNoLane) return;
  const bool left = target == net.left(v.lane);
  const double shift = (net.lane(v.lane).width + net.lane(target).width) / 2.0;
  const double ratio = net.length(target) / net.length(v.lane);
  v.s = std::clamp(v.s * ratio, 0.0, net.length(target));
  v.lateral_offset += left ? -shift : shift;
  v.lane = target;
  v.route = sample_route(net, target, horizon, rng);
  v.route_index = 0;
}

StepResult apply_control(const VehicleState & av, const cosim::ControlMessage & ctl, const StepContext & ctx, CounterRng & rng)
{
  StepResult r{av, false, false};
  VehicleState & v = r.state;
  double a = 0.0;
  double lateral_rate = 0.0;
  if (ctl.mode == cosim::ControlMode::kPedals) {
    a = ctl.throttle * v.behavior.max_accel - ctl.brake * ctx.limits.emergency_decel;
    lateral_rate = ctl.steering * kMaxLateralRate;
  } else {
    a = std::clamp(ctl.target_accel, -ctx.limits.emergency_decel, v.behavior.max_accel);
    const double err = ctl.target_lane_offset - v.lateral_offset;
    lateral_rate = std::clamp(err / ctx.dt, -kMaxLateralRate, kMaxLateralRate);
  }
  v.lane_change.reset();
  r.despawn = integrate_longitudinal(v, a, ctx);
  if (v.speed > 0.0) v.lateral_offset += lateral_rate * ctx.dt;
  const LaneIndex before = v.lane;
  reassign_lane(v, ctx.network, rng, ctx.route_horizon);
  r.changed_lane = v.lane != before;
  update_pose(v, ctx.network);
  return r;
}

void adopt_av_state(VehicleState & av, const cosim::ActorStateMessage & m, const RoadNetwork & net)
{
  for (const auto & a : m.actors) {
    if (a.id != av.id && a.type != cosim::ActorType::kAv) continue;
    if (!av.on_lane()) return;
    const auto proj = net.project(av.lane, Vec2d(a.x, a.y));
    av.s = std::clamp(proj.s, 0.0, net.length(av.lane));
    av.lateral_offset = proj.lateral;
    av.speed = std::max(0.0, a.speed);
    av.accel = a.accel;
    update_pose(av, net);
    return;
  }
}

std::optional<std::size_t> find_av(std::span<const VehicleState> agents)
{
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].kind == AgentKind::kAv) return i;
  }
  return std::nullopt;
}

struct OpenActivation
{
  std::size_t record_index;
  std::string spec;
  std::string subject;
};
}  // namespace

EpisodeResult run_episode(const ScenarioConfig & config, std::uint64_t seed, const EpisodeOptions & options)
{
  const double dt = config.episode.dt;
  const bool nade = config.mode == SimMode::kNade;
  const bool cosim_control = config.av.enabled && config.av.control == ControlSource::kCosim;
  if (cosim_control && !options.bridge) throw ConfigError("cosim", "COSIM control requested but no co-sim bridge is attached");

  EpisodeResult result{{}, TrajectoryLog(options.log), std::nullopt, {}, {}};
  EpisodeRecord & rec = result.record;
  rec.seed = seed;
  rec.mode = config.mode;
  rec.nominal_miles = config.episode.nominal_miles;

  const EpisodeRng root(seed);
  CounterRng spawn_rng = root.stream("spawn");
  CounterRng behavior_rng = root.stream("behavior");
  CounterRng adversity_rng = root.stream("adversity");

  RoadNetwork net = config.network;
  const NdeConfig & nde = config.nde;
  std::vector<VehicleState> agents;
  std::uint64_t next_id = 0;

  auto route_for = [&](LaneIndex lane, const std::vector<std::string> & ids) {
    if (ids.empty()) return sample_route(net, lane, nde.route_length, spawn_rng);
    Route r;
    for (const auto & id : ids) r.push_back(net.lane_index(id));
    return r;
  };

  if (config.av.enabled) {
    const LaneIndex lane = net.lane_index(config.av.lane);
    BehaviorParams p = builtin_av_behavior(net.lane(lane).speed_limit);
    config.av.behavior.apply(p);
    VehicleState av = make_vehicle("av", AgentKind::kAv, net, lane, config.av.s, config.av.speed, p);
    av.route = route_for(lane, config.av.route);
    agents.push_back(std::move(av));
  }
  for (const auto & seed_agent : config.agents) {
    const double limit = seed_agent.lane.empty() ? 13.9 : net.lane(net.lane_index(seed_agent.lane)).speed_limit;
    BehaviorParams p = sample_behavior(nde, seed_agent.kind, spawn_rng, limit);
    seed_agent.behavior.apply(p);
    VehicleState v;
    if (!seed_agent.lane.empty()) {
      const LaneIndex lane = net.lane_index(seed_agent.lane);
      v = make_vehicle(seed_agent.id, seed_agent.kind, net, lane, seed_agent.s, seed_agent.speed, p);
      v.lateral_offset = seed_agent.lateral_offset;
      v.route = route_for(lane, seed_agent.route);
    } else {
      v.id = seed_agent.id;
      v.kind = seed_agent.kind;
      const auto dims = default_dimensions(seed_agent.kind);
      v.length = dims.length;
      v.width = dims.width;
      v.path = seed_agent.path;
      v.s = seed_agent.s;
      v.speed = seed_agent.speed;
      v.behavior = p;
      if (!seed_agent.walk_signal.empty()) v.walk_signal = net.find_signal(seed_agent.walk_signal);
    }
    update_pose(v, net);
    agents.push_back(std::move(v));
  }
  if (nde.initial_vehicles > 0) {
    // Even spacing along the concatenation of all lanes.
    double total = 0.0;
    for (std::size_t i = 0; i < net.lane_count(); ++i) total += net.length(static_cast<LaneIndex>(i));
    const double spacing = total / nde.initial_vehicles;
    for (int n = 0; n < nde.initial_vehicles; ++n) {
      double pos = (n + 0.5) * spacing;
      LaneIndex lane = 0;
      while (lane + 1 < static_cast<LaneIndex>(net.lane_count()) && pos > net.length(lane)) {
        pos -= net.length(lane);
        ++lane;
      }
      const AgentKind kind = pick_kind(nde, spawn_rng);
      const double limit = net.lane(lane).speed_limit;
      const BehaviorParams p = sample_behavior(nde, kind, spawn_rng, limit);
      const double len = default_dimensions(kind).length;
      if (pos < len / 2.0 || pos > net.length(lane) - len / 2.0) {
        ++result.stats.rejected_spawns;
        continue;
      }
      VehicleState v = make_vehicle(agent_id(next_id), kind, net, lane, pos, p.desired_speed, p);
      const auto [ahead, behind] = lane_gaps(v, agents);
      // A vehicle placed too close to a non-green stop line could not stop for it.
      const auto signal = net.signal_state(lane);
      const bool cannot_stop = signal && *signal != SignalState::kGreen &&
                               net.length(lane) - v.front() < v.speed * v.speed / (2.0 * p.comfortable_decel) + p.min_gap;
      if (cannot_stop || ahead < p.min_gap || behind < p.min_gap || overlaps_any(v, agents, 1.0)) {
        ++result.stats.rejected_spawns;
        continue;
      }
      v.route = sample_route(net, lane, nde.route_length, spawn_rng);
      ++next_id;
      ++result.stats.spawned;
      agents.push_back(std::move(v));
    }
  }

  AdversityOrchestrator orchestrator(config.adversities);
  LikelihoodLedger ledger;
  std::vector<OpenActivation> open;
  SpawnStats spawn_stats;

  StepContext ctx{net, nde.limits, dt, true, false, false, nde.route_length};
  StepContext av_ctx = ctx;
  av_ctx.allow_lane_change = config.av.allow_lane_change;

  std::optional<cosim::ControlMessage> last_control;
  const auto heartbeat_every = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(1.0 / dt)));
  const double nominal_meters = config.episode.nominal_miles * kMetersPerMile;
  double av_odometer = 0.0;
  bool av_gone = false;

  auto close_activation = [&](const std::string & spec, const std::string & subject, double t) {
    for (auto it = open.begin(); it != open.end(); ++it) {
      if (it->spec == spec && it->subject == subject) {
        rec.activations[it->record_index].until = t;
        open.erase(it);
        return;
      }
    }
  };

  std::uint64_t step = 0;
  double t = 0.0;
  Json events = Json::array();
  auto event = [&](Json e) {
    if (result.log.enabled()) events.push_back(std::move(e));
  };

  for (;;) {
    t = static_cast<double>(step) * dt;
    if (t >= config.episode.max_duration - 1e-9) break;

    // Expiry happens at the step boundary, before anything perceives the world.
    for (const auto & e : orchestrator.expire(t, agents, net)) {
      close_activation(e.spec_id, e.subject_id, t);
      event({{"type", "expire"}, {"spec", e.spec_id}, {"subject", e.subject_id}, {"t", t}});
    }

    if (options.bridge && config.av.enabled) {
      if (auto state = options.bridge->av_state(); state && state->header.timestamp > options.bridge->last_published()) {
        if (auto i = find_av(agents)) adopt_av_state(agents[*i], *state, net);
      }
    }

    for (auto & v : spawn_agents(net, nde, spawn_rng, t, dt, agents, next_id, spawn_stats)) {
      event({{"type", "spawn"}, {"id", v.id}, {"t", t}});
      agents.push_back(std::move(v));
    }

    const std::vector<VehicleState> snapshot = agents;
    const PerceptionIndex index(net, snapshot);
    const auto av_index = find_av(snapshot);
    const WorldView world{t, net, snapshot, index, av_index};

    auto try_roll = [&](std::size_t spec_index, std::optional<std::size_t> agent, const std::string & subject) {
      const AdversitySpec & spec = orchestrator.specs()[spec_index];
      if (!orchestrator.can_activate(spec_index, subject, t)) return false;
      if (!evaluate_trigger(spec, agent, world)) return false;
      if (!behavior_applicable(spec, agent, world, nde.limits)) return false;
      const RollOutcome roll = roll_activation(spec, adversity_rng, nade);
      if (nade) {
        record_roll(ledger, spec.natural_prob, spec.proposal_prob, roll.activated);
      } else {
        ++ledger.roll_count;
      }
      if (!roll.activated) return false;
      orchestrator.activate(spec_index, subject, t, agent ? &agents[*agent] : nullptr, net);
      open.push_back({rec.activations.size(), spec.id, subject});
      rec.activations.push_back({spec.id, subject, t, std::nullopt});
      event({{"type", "activation"}, {"spec", spec.id}, {"subject", subject}, {"t", t}});
      return true;
    };

    for (std::size_t i = 0; i < orchestrator.specs().size(); ++i) {
      const auto & spec = orchestrator.specs()[i];
      if (spec.scope == AdversityScope::kStatic) try_roll(i, std::nullopt, AdversityOrchestrator::static_subject(spec));
    }
    for (std::size_t a = 0; a < snapshot.size(); ++a) {
      if (snapshot[a].kind == AgentKind::kAv) continue;
      for (std::size_t i = 0; i < orchestrator.specs().size(); ++i) {
        const auto & spec = orchestrator.specs()[i];
        if (spec.scope != AdversityScope::kDynamic || !spec.is_eligible_kind(snapshot[a].kind)) continue;
        if (try_roll(i, a, snapshot[a].id)) break;
      }
    }

    std::vector<StepResult> results;
    results.reserve(agents.size());
    for (std::size_t a = 0; a < agents.size(); ++a) {
      const VehicleState & agent = agents[a];
      if (agent.kind == AgentKind::kAv) {
        if (cosim_control) {
          const auto statics = orchestrator.static_actors(net);
          options.bridge->publish_world(world_message(t, snapshot, statics, net, config.weather));
          if (step % heartbeat_every == 0) options.bridge->publish_heartbeat(t, step, "running");
          const auto deadline = step == 0 ? config.cosim.handshake_timeout : config.cosim.step_deadline;
          const auto poll = options.bridge->await_control(t, std::chrono::duration<double>(deadline));
          if (step == 0 && poll.status == cosim::ControlStatus::kTimeout) {
            throw CosimTimeout("no AV control received within the " + std::to_string(deadline) + " s handshake timeout");
          }
          if (poll.status == cosim::ControlStatus::kFresh) {
            last_control = poll.message;
          } else if (poll.status == cosim::ControlStatus::kStale) {
            ++result.stats.stale_controls;
          } else {
            ++result.stats.control_timeouts;
          }
          if (last_control) {
            results.push_back(apply_control(agent, *last_control, av_ctx, behavior_rng));
          } else {
            cosim::ControlMessage hold;
            hold.mode = cosim::ControlMode::kTarget;
            hold.target_lane_offset = agent.lateral_offset;
            results.push_back(apply_control(agent, hold, av_ctx, behavior_rng));
          }
        } else {
          results.push_back(nde_step(agent, index.perceive(a), av_ctx, behavior_rng));
        }
        continue;
      }
      ActiveAdversity * active = orchestrator.active_for(agent.id);
      if (active && orchestrator.specs()[active->spec_index].scope == AdversityScope::kDynamic) {
        ++result.stats.overridden_steps;
        results.push_back(apply_behavior(*active, orchestrator.specs()[active->spec_index], agent, a, world, ctx, behavior_rng));
      } else {
        results.push_back(nde_step(agent, index.perceive(a), ctx, behavior_rng));
      }
    }

    std::vector<VehicleState> next;
    next.reserve(results.size());
    for (auto & r : results) {
      if (r.despawn) {
        if (r.state.kind == AgentKind::kAv) {
          av_gone = true;
          av_odometer = r.state.odometer;
        }
        ++result.stats.despawned;
        for (const auto & e : orchestrator.retire_subject(r.state.id, t + dt)) {
          close_activation(e.spec_id, e.subject_id, t + dt);
          event({{"type", "retire"}, {"spec", e.spec_id}, {"subject", e.subject_id}, {"t", t + dt}});
        }
        event({{"type", "despawn"}, {"id", r.state.id}, {"reason", "route_end"}, {"t", t + dt}});
        continue;
      }
      next.push_back(std::move(r.state));
    }
    agents = std::move(next);

    net.advance_signals(dt);
    ++step;
    t = static_cast<double>(step) * dt;

    std::optional<CrashEvent> crash;
    std::vector<std::string> removed;
    for (const auto & c : detect_collisions(agents, t)) {
      const bool ends = c.involves_av || !config.av.enabled;
      if (ends) {
        if (!crash) crash = c;
        continue;
      }
      if (std::find(removed.begin(), removed.end(), c.partners[0]) != removed.end() ||
          std::find(removed.begin(), removed.end(), c.partners[1]) != removed.end()) {
        continue;
      }
      ++result.stats.nde_collisions;
      event({{"type", "collision"}, {"crash", to_json(c)}});
      for (const auto & id : c.partners) removed.push_back(id);
    }
    if (!crash && !removed.empty()) {
      std::erase_if(agents, [&](const VehicleState & v) {
        if (std::find(removed.begin(), removed.end(), v.id) == removed.end()) return false;
        for (const auto & e : orchestrator.retire_subject(v.id, t)) {
          close_activation(e.spec_id, e.subject_id, t);
          event({{"type", "retire"}, {"spec", e.spec_id}, {"subject", e.subject_id}, {"t", t}});
        }
        event({{"type", "despawn"}, {"id", v.id}, {"reason", "collision"}, {"t", t}});
        ++result.stats.despawned;
        return true;
      });
    }
    if (crash) event({{"type", "crash"}, {"crash", to_json(*crash)}});

    if (const auto i = find_av(agents)) av_odometer = agents[*i].odometer;

    if (result.log.enabled()) {
      Json actors = Json::array();
      for (const auto & v : agents) actors.push_back(actor_json(v, net));
      Json signals = Json::array();
      for (const auto & s : net.signals()) signals.push_back({{"id", s.id}, {"state", to_string(s.state())}});
      Json statics = Json::array();
      for (const auto & s : orchestrator.static_actors(net)) {
        statics.push_back({{"id", s.id}, {"type", s.type}, {"x", s.position.x()}, {"y", s.position.y()}});
      }
      result.log.append({{"step", step}, {"t", t}, {"actors", std::move(actors)}, {"signals", std::move(signals)}, {"statics", std::move(statics)},
        {"events", std::move(events)}});
      events = Json::array();
    } else {
      result.log.append(Json());
    }

    if (crash) {
      result.crash = crash;
      break;
    }
    if (config.av.enabled && (av_gone || av_odometer >= nominal_meters)) break;
  }

  if (options.bridge && cosim_control) {
    options.bridge->publish_world(world_message(t, agents, orchestrator.static_actors(net), net, config.weather));
    options.bridge->publish_heartbeat(t, step, "ended");
  }

  if (options.bridge) result.stats.max_control_wait = options.bridge->stats().max_wait;
  result.stats.steps = step;
  result.stats.spawned += spawn_stats.spawned;
  result.stats.rejected_spawns += spawn_stats.rejected;
  rec.miles = av_odometer / kMetersPerMile;
  rec.crash = result.crash && (result.crash->involves_av || !config.av.enabled);
  if (result.crash) {
    rec.crash_time = result.crash->time;
    rec.crash_partners = {result.crash->partners[0], result.crash->partners[1]};
  }
  rec.log_weight = nade ? ledger.log_weight : 0.0;
  rec.rolls = ledger.roll_count;
  rec.duration = t;
  rec.digest = result.log.digest();
  result.final_agents = std::move(agents);
  return result;
}

}  // namespace terasim
