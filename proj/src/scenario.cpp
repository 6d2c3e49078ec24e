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

#include "terasim/scenario.hpp"

#include "terasim/error.hpp"

#include <fstream>
#include <sstream>

namespace terasim
{

using Cursor = JsonCursor<ConfigError>;

std::string_view to_string(ControlSource c) { return c == ControlSource::kCosim ? "COSIM" : "BUILTIN_IDM"; }

void BehaviorOverrides::apply(BehaviorParams & p) const
{
  if (desired_speed) p.desired_speed = *desired_speed;
  if (max_accel) p.max_accel = *max_accel;
  if (comfortable_decel) p.comfortable_decel = *comfortable_decel;
  if (min_gap) p.min_gap = *min_gap;
  if (time_headway) p.time_headway = *time_headway;
  if (accel_exponent) p.accel_exponent = *accel_exponent;
  if (politeness) p.politeness = *politeness;
  if (lane_change_threshold) p.lane_change_threshold = *lane_change_threshold;
  if (reaction_noise_sd) p.reaction_noise_sd = *reaction_noise_sd;
}

BehaviorParams builtin_av_behavior(double speed_limit)
{
  BehaviorParams p;
  p.desired_speed = speed_limit;
  p.comfortable_decel = 2.0;
  p.time_headway = 2.0;
  p.reaction_noise_sd = 0.0;
  return p;
}

namespace
{
#define TERASIM_BEHAVIOR_FIELDS(X) \
  X(desired_speed)                 \
  X(max_accel)                     \
  X(comfortable_decel)             \
  X(min_gap)                       \
  X(time_headway)                  \
  X(accel_exponent)                \
  X(politeness)                    \
  X(lane_change_threshold)         \
  X(reaction_noise_sd)

BehaviorOverrides parse_overrides(const Cursor & c)
{
#define TERASIM_KEY(name) #name,
  c.only_keys({TERASIM_BEHAVIOR_FIELDS(TERASIM_KEY)});
#undef TERASIM_KEY
  BehaviorOverrides o;
#define TERASIM_READ(name) \
  if (auto v = c.maybe(#name)) o.name = v->number();
  TERASIM_BEHAVIOR_FIELDS(TERASIM_READ)
#undef TERASIM_READ
  return o;
}

TruncatedNormal parse_tn(const Cursor & c)
{
  if (c.value().is_number()) return TruncatedNormal::fixed(c.number());
  c.only_keys({"mean", "sd", "min", "max"});
  TruncatedNormal t;
  t.mean = c.at("mean").number();
  t.sd = c.maybe("sd") ? c.at("sd").non_negative() : 0.0;
  t.min = c.maybe("min") ? c.at("min").number() : t.mean - 4.0 * t.sd;
  t.max = c.maybe("max") ? c.at("max").number() : t.mean + 4.0 * t.sd;
  return t;
}

AgentKind kind_of(const Cursor & c)
{
  try {
    return parse_agent_kind(c.string());
  } catch (const std::invalid_argument & e) {
    c.fail(e.what());
  }
}

KindDistribution parse_kind_distribution(const Cursor & c, AgentKind kind)
{
#define TERASIM_KEY(name) #name,
  c.only_keys({TERASIM_BEHAVIOR_FIELDS(TERASIM_KEY)});
#undef TERASIM_KEY
  KindDistribution d = KindDistribution::defaults(kind);
  if (auto v = c.maybe("desired_speed")) d.desired_speed = parse_tn(*v);
  if (auto v = c.maybe("max_accel")) d.max_accel = parse_tn(*v);
  if (auto v = c.maybe("comfortable_decel")) d.comfortable_decel = parse_tn(*v);
  if (auto v = c.maybe("min_gap")) d.min_gap = parse_tn(*v);
  if (auto v = c.maybe("time_headway")) d.time_headway = parse_tn(*v);
  if (auto v = c.maybe("accel_exponent")) d.accel_exponent = parse_tn(*v);
  if (auto v = c.maybe("politeness")) d.politeness = parse_tn(*v);
  if (auto v = c.maybe("lane_change_threshold")) d.lane_change_threshold = parse_tn(*v);
  if (auto v = c.maybe("reaction_noise_sd")) d.reaction_noise_sd = parse_tn(*v);
  return d;
}

NdeConfig parse_nde(const Cursor & c)
{
  c.only_keys({"kinds", "spawn_rate", "maneuver_noise", "kind_mix", "initial_vehicles", "route_length", "limits"});
  NdeConfig n;
  if (auto k = c.maybe("kinds")) {
    k->expect_object();
    for (auto it = k->value().begin(); it != k->value().end(); ++it) {
      const Cursor kc(*it, k->child_path(it.key()));
      AgentKind kind;
      try {
        kind = parse_agent_kind(it.key());
      } catch (const std::invalid_argument & e) {
        kc.fail(e.what());
      }
      n.kinds[kind] = parse_kind_distribution(kc, kind);
    }
  }
  if (auto v = c.maybe("spawn_rate")) n.spawn_rate = v->non_negative();
  if (auto v = c.maybe("maneuver_noise")) n.maneuver_noise = v->non_negative();
  if (auto m = c.maybe("kind_mix")) {
    m->expect_object();
    n.kind_mix.clear();
    for (auto it = m->value().begin(); it != m->value().end(); ++it) {
      const Cursor mc(*it, m->child_path(it.key()));
      AgentKind kind;
      try {
        kind = parse_agent_kind(it.key());
      } catch (const std::invalid_argument & e) {
        mc.fail(e.what());
      }
      n.kind_mix[kind] = mc.non_negative();
    }
  }
  if (auto v = c.maybe("initial_vehicles")) n.initial_vehicles = static_cast<int>(v->integer());
  if (auto v = c.maybe("route_length")) {
    const auto len = v->integer();
    if (len < 1) v->fail("must be >= 1");
    n.route_length = static_cast<std::size_t>(len);
  }
  if (auto l = c.maybe("limits")) {
    l->only_keys({"safe_decel", "emergency_decel", "lane_change_duration"});
    if (auto v = l->maybe("safe_decel")) n.limits.safe_decel = v->positive();
    if (auto v = l->maybe("emergency_decel")) n.limits.emergency_decel = v->positive();
    if (auto v = l->maybe("lane_change_duration")) n.limits.lane_change_duration = v->positive();
  }
  n.validate();
  return n;
}

std::vector<Vec2d> parse_points(const Cursor & c)
{
  std::vector<Vec2d> out;
  for (const auto & p : c.elements()) {
    const auto xy = p.elements();
    if (xy.size() != 2) p.fail("expected [x, y]");
    out.emplace_back(xy[0].number(), xy[1].number());
  }
  return out;
}

RoadNetwork parse_map(const Cursor & c, const std::filesystem::path & base_dir)
{
  if (c.has("lanes") && !c.has("generator")) return RoadNetwork::from_json(c.value());
  if (auto t = c.maybe("template")) return make_template(t->string());
  if (auto f = c.maybe("file")) {
    std::filesystem::path p = f->string();
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p, std::ios::binary);
    if (!in) f->fail("cannot open map file '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_network(ss.str());
  }
  if (auto g = c.maybe("generator")) {
    const std::string kind = g->string();
    auto num = [&](const char * key, double def) { return c.maybe(key) ? c.at(key).positive() : def; };
    auto count = [&](const char * key, int def) {
      if (!c.maybe(key)) return def;
      const auto v = c.at(key).integer();
      if (v < 1) c.at(key).fail("must be >= 1");
      return static_cast<int>(v);
    };
    if (kind == "highway") return make_highway(count("lanes", 2), num("length", 2000.0), num("speed_limit", 30.0));
    if (kind == "ring") return make_ring(count("lanes", 2), num("radius", 200.0), num("speed_limit", 30.0));
    if (kind == "grid") return make_grid(count("cols", 3), count("rows", 3), num("block", 200.0), num("speed_limit", 13.9));
    g->fail("unknown generator '" + kind + "'");
  }
  c.fail("expected one of lanes, template, file or generator");
}

TriggerCondition parse_trigger(const Cursor & c)
{
  c.only_keys({"kind", "max_gap", "min_speed_diff", "max_distance_to_conflict", "start_time", "end_time"});
  TriggerCondition t;
  try {
    t.kind = parse_trigger_kind(c.at("kind").string());
  } catch (const std::invalid_argument & e) {
    throw ConfigError(c.child_path("kind"), e.what());
  }
  if (auto v = c.maybe("max_gap")) t.max_gap = v->positive();
  if (auto v = c.maybe("min_speed_diff")) t.min_speed_diff = v->positive();
  if (auto v = c.maybe("max_distance_to_conflict")) t.max_distance_to_conflict = v->positive();
  if (auto v = c.maybe("start_time")) t.start_time = v->non_negative();
  if (auto v = c.maybe("end_time")) t.end_time = v->positive();
  return t;
}

ActivatedBehavior parse_activated(const Cursor & c)
{
  c.only_keys({"kind", "takeover", "duration", "decel", "aggressive_gap", "lateral_duration", "brake_decel", "brake_duration",
    "ignore_leader", "speed", "crossing_path", "amplitude", "period", "lanes", "start_s", "end_s", "cone_spacing", "signal", "state"});
  ActivatedBehavior b;
  try {
    b.kind = parse_behavior_kind(c.at("kind").string());
    if (auto v = c.maybe("takeover")) b.takeover = parse_takeover_mode(v->string());
    if (auto v = c.maybe("state")) b.state = parse_signal_state(v->string());
  } catch (const std::invalid_argument & e) {
    c.fail(e.what());
  }
  if (auto v = c.maybe("duration")) b.duration = v->positive();
  if (auto v = c.maybe("decel")) b.decel = v->positive();
  if (auto v = c.maybe("aggressive_gap")) b.aggressive_gap = v->positive();
  if (auto v = c.maybe("lateral_duration")) b.lateral_duration = v->positive();
  if (auto v = c.maybe("brake_decel")) b.brake_decel = v->non_negative();
  if (auto v = c.maybe("brake_duration")) b.brake_duration = v->non_negative();
  if (auto v = c.maybe("ignore_leader")) b.ignore_leader = v->boolean();
  if (auto v = c.maybe("speed")) b.speed = v->positive();
  if (auto v = c.maybe("crossing_path")) b.crossing_path = parse_points(*v);
  if (auto v = c.maybe("amplitude")) b.amplitude = v->positive();
  if (auto v = c.maybe("period")) b.period = v->positive();
  if (auto v = c.maybe("lanes")) b.lanes = v->strings();
  if (auto v = c.maybe("start_s")) b.start_s = v->non_negative();
  if (auto v = c.maybe("end_s")) b.end_s = v->positive();
  if (auto v = c.maybe("cone_spacing")) b.cone_spacing = v->positive();
  if (auto v = c.maybe("signal")) b.signal_id = v->string();
  return b;
}

AgentSeed parse_agent(const Cursor & c)
{
  c.only_keys({"id", "kind", "lane", "s", "speed", "lateral_offset", "route", "behavior", "path", "walk_signal"});
  AgentSeed a;
  a.id = c.at("id").string();
  if (auto k = c.maybe("kind")) a.kind = kind_of(*k);
  if (a.kind == AgentKind::kAv) c.at("kind").fail("the AV is configured under 'av'");
  if (auto v = c.maybe("lane")) a.lane = v->string();
  if (auto v = c.maybe("s")) a.s = v->non_negative();
  if (auto v = c.maybe("speed")) a.speed = v->non_negative();
  if (auto v = c.maybe("lateral_offset")) a.lateral_offset = v->number();
  if (auto v = c.maybe("route")) a.route = v->strings();
  if (auto v = c.maybe("behavior")) a.behavior = parse_overrides(*v);
  if (auto v = c.maybe("path")) a.path = parse_points(*v);
  if (auto v = c.maybe("walk_signal")) a.walk_signal = v->string();
  if (a.lane.empty() && a.path.size() < 2) c.fail("agent needs a lane or a path of at least two points");
  return a;
}

AvConfig parse_av(const Cursor & c)
{
  c.only_keys({"enabled", "lane", "s", "speed", "route", "control", "behavior", "allow_lane_change"});
  AvConfig av;
  if (auto v = c.maybe("enabled")) av.enabled = v->boolean();
  if (!av.enabled) return av;
  av.lane = c.at("lane").string();
  if (auto v = c.maybe("s")) av.s = v->non_negative();
  if (auto v = c.maybe("speed")) av.speed = v->non_negative();
  if (auto v = c.maybe("route")) av.route = v->strings();
  if (auto v = c.maybe("control")) {
    const auto s = v->string();
    if (s == "BUILTIN_IDM") {
      av.control = ControlSource::kBuiltinIdm;
    } else if (s == "COSIM") {
      av.control = ControlSource::kCosim;
    } else {
      v->fail("expected BUILTIN_IDM or COSIM");
    }
  }
  if (auto v = c.maybe("behavior")) av.behavior = parse_overrides(*v);
  if (auto v = c.maybe("allow_lane_change")) av.allow_lane_change = v->boolean();
  return av;
}

CosimConfig parse_cosim(const Cursor & c)
{
  c.only_keys({"enabled", "listen", "external", "password", "step_deadline", "handshake_timeout"});
  CosimConfig k;
  if (auto v = c.maybe("enabled")) k.enabled = v->boolean();
  if (auto v = c.maybe("listen")) k.listen = v->string();
  if (auto v = c.maybe("external")) k.external = v->string();
  if (auto v = c.maybe("password")) k.password = v->string();
  if (auto v = c.maybe("step_deadline")) k.step_deadline = v->positive();
  if (auto v = c.maybe("handshake_timeout")) k.handshake_timeout = v->positive();
  return k;
}
}  // namespace

BehaviorParams parse_behavior_params(const Cursor & c)
{
  BehaviorParams p;
  parse_overrides(c).apply(p);
  try {
    p.validate();
  } catch (const std::invalid_argument & e) {
    c.fail(e.what());
  }
  return p;
}

Json to_json(const BehaviorParams & p)
{
  Json j;
#define TERASIM_WRITE(name) j[#name] = p.name;
  TERASIM_BEHAVIOR_FIELDS(TERASIM_WRITE)
#undef TERASIM_WRITE
  return j;
}

AdversitySpec parse_adversity(const Cursor & c)
{
  c.only_keys({"id", "scope", "eligible_kinds", "trigger", "behavior", "natural_prob", "proposal_prob", "max_concurrent", "cooldown"});
  AdversitySpec s;
  s.id = c.at("id").string();
  s.behavior = parse_activated(c.at("behavior"));
  const bool static_kind = s.behavior.kind == BehaviorKind::kLaneClosure || s.behavior.kind == BehaviorKind::kSignalOverride;
  s.scope = static_kind ? AdversityScope::kStatic : AdversityScope::kDynamic;
  if (auto v = c.maybe("scope")) {
    try {
      s.scope = parse_scope(v->string());
    } catch (const std::invalid_argument & e) {
      v->fail(e.what());
    }
  }
  if (auto v = c.maybe("eligible_kinds")) {
    for (const auto & e : v->elements()) s.eligible_kinds.push_back(kind_of(e));
  }
  s.trigger = parse_trigger(c.at("trigger"));
  s.natural_prob = c.at("natural_prob").number();
  s.proposal_prob = c.maybe("proposal_prob") ? c.at("proposal_prob").number() : s.natural_prob;
  if (auto v = c.maybe("max_concurrent")) s.max_concurrent = static_cast<int>(v->integer());
  if (auto v = c.maybe("cooldown")) s.cooldown = v->non_negative();
  return s;
}

void ScenarioConfig::validate() const
{
  if (!(episode.dt > 0.0)) throw ConfigError("episode.dt", "must be > 0");
  if (!(episode.max_duration > 0.0)) throw ConfigError("episode.max_duration", "must be > 0");
  if (!(episode.nominal_miles > 0.0)) throw ConfigError("episode.nominal_miles", "must be > 0");
  nde.validate();
  for (std::size_t i = 0; i < adversities.size(); ++i) {
    adversities[i].validate(mode == SimMode::kNade, &network, i);
    for (std::size_t j = 0; j < i; ++j) {
      if (adversities[j].id == adversities[i].id) throw ConfigError("adversities[" + std::to_string(i) + "].id", "duplicate id");
    }
  }
  auto check_route = [&](const std::string & lane, const std::vector<std::string> & route, const std::string & path) {
    if (!network.find_lane(lane)) throw ConfigError(path + ".lane", "unknown lane '" + lane + "'");
    if (route.empty()) return;
    Route r;
    for (std::size_t i = 0; i < route.size(); ++i) {
      const auto li = network.find_lane(route[i]);
      if (!li) throw ConfigError(path + ".route[" + std::to_string(i) + "]", "unknown lane '" + route[i] + "'");
      r.push_back(*li);
    }
    if (route.front() != lane) throw ConfigError(path + ".route", "must start on the agent's lane");
    if (!network.is_connected_route(r)) throw ConfigError(path + ".route", "lanes are not connected");
  };
  if (av.enabled) {
    check_route(av.lane, av.route, "av");
    if (av.s > network.length(network.lane_index(av.lane))) throw ConfigError("av.s", "outside lane");
  }
  if (av.enabled && av.control == ControlSource::kCosim && !cosim.enabled) throw ConfigError("av.control", "COSIM control requires cosim.enabled");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto & a = agents[i];
    const std::string p = "agents[" + std::to_string(i) + "]";
    if (a.id == "av") throw ConfigError(p + ".id", "'av' is reserved");
    for (std::size_t j = 0; j < i; ++j) {
      if (agents[j].id == a.id) throw ConfigError(p + ".id", "duplicate id");
    }
    if (!a.lane.empty()) {
      check_route(a.lane, a.route, p);
      if (a.s > network.length(network.lane_index(a.lane))) throw ConfigError(p + ".s", "outside lane");
    }
    if (!a.walk_signal.empty() && !network.find_signal(a.walk_signal)) throw ConfigError(p + ".walk_signal", "unknown signal");
  }
}

ScenarioConfig parse_scenario(const Json & doc, const std::filesystem::path & base_dir)
{
  const Cursor c(doc, "");
  c.only_keys({"name", "map", "nde", "adversities", "mode", "episode", "av", "agents", "seed", "cosim", "weather"});
  ScenarioConfig s;
  if (auto v = c.maybe("name")) s.name = v->string();
  s.network = parse_map(c.at("map"), base_dir);
  if (auto v = c.maybe("nde")) s.nde = parse_nde(*v);
  if (auto v = c.maybe("mode")) {
    try {
      s.mode = parse_mode(v->string());
    } catch (const std::invalid_argument & e) {
      v->fail(e.what());
    }
  }
  if (auto v = c.maybe("episode")) {
    v->only_keys({"dt", "max_duration", "nominal_miles"});
    if (auto x = v->maybe("dt")) s.episode.dt = x->positive();
    if (auto x = v->maybe("max_duration")) s.episode.max_duration = x->positive();
    if (auto x = v->maybe("nominal_miles")) s.episode.nominal_miles = x->positive();
  }
  if (auto v = c.maybe("av")) {
    s.av = parse_av(*v);
  } else {
    s.av.enabled = false;
  }
  if (auto v = c.maybe("agents")) {
    for (const auto & a : v->elements()) s.agents.push_back(parse_agent(a));
  }
  if (auto v = c.maybe("adversities")) {
    for (const auto & a : v->elements()) s.adversities.push_back(parse_adversity(a));
  }
  if (auto v = c.maybe("seed")) s.seed = v->value().get<std::uint64_t>();
  if (auto v = c.maybe("cosim")) s.cosim = parse_cosim(*v);
  if (auto v = c.maybe("weather")) s.weather = v->string();
  s.validate();
  return s;
}

ScenarioConfig load_scenario(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open scenario '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception & e) {
    throw ConfigError("", std::string("malformed scenario document: ") + e.what());
  }
  return parse_scenario(doc, path.parent_path());
}

}  // namespace terasim
