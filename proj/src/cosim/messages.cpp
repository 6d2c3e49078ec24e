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

#include "terasim/cosim/messages.hpp"

#include <array>
#include <set>
#include <utility>

namespace terasim::cosim
{

namespace
{
using Cursor = JsonCursor<ValidationError>;

constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kOwners{{
  {kActorInfoKey, kSimulatorPlatform},
  {kHeartbeatKey, kSimulatorPlatform},
  {kAvStateKey, kPhysicsPlatform},
  {kSensorKey, kPhysicsPlatform},
  {kControlKey, kAvPlatform},
}};

constexpr std::array<std::pair<ActorType, std::string_view>, 7> kActorTypes{{
  {ActorType::kCar, "CAR"},
  {ActorType::kTruck, "TRUCK"},
  {ActorType::kCyclist, "CYCLIST"},
  {ActorType::kPedestrian, "PEDESTRIAN"},
  {ActorType::kAv, "AV"},
  {ActorType::kCone, "CONE"},
  {ActorType::kSign, "SIGN"},
}};

MessageHeader parse_header(const Cursor & c)
{
  c.only_keys({"timestamp", "platform", "schema_version"});
  MessageHeader h;
  h.timestamp = c.at("timestamp").non_negative();
  h.platform = c.at("platform").string();
  h.schema_version = c.at("schema_version").string();
  if (h.schema_version != kSchemaVersion) c.at("schema_version").fail("unsupported schema version '" + h.schema_version + "'");
  return h;
}

ActorType parse_actor_type(const Cursor & c)
{
  const auto s = c.string();
  for (const auto & [t, name] : kActorTypes) {
    if (name == s) return t;
  }
  c.fail("unknown actor type '" + s + "'");
}

double bounded(const Cursor & c, double lo, double hi)
{
  const double v = c.number();
  if (v < lo || v > hi) c.fail("must lie in [" + Json(lo).dump() + ", " + Json(hi).dump() + "]");
  return v;
}

Json parse_document(std::string_view payload)
{
  try {
    return Json::parse(payload);
  } catch (const Json::exception & e) {
    throw ValidationError("", std::string("malformed payload: ") + e.what());
  }
}
}  // namespace

std::string_view key_owner(std::string_view key)
{
  for (const auto & [k, owner] : kOwners) {
    if (k == key) return owner;
  }
  return {};
}

bool is_registered_key(std::string_view key) { return !key_owner(key).empty(); }

std::vector<std::string_view> registered_keys()
{
  std::vector<std::string_view> out;
  for (const auto & [k, owner] : kOwners) out.push_back(k);
  return out;
}

std::string_view to_string(ActorType t)
{
  for (const auto & [k, name] : kActorTypes) {
    if (k == t) return name;
  }
  return "CAR";
}

Json to_json(const MessageHeader & h)
{
  return {{"timestamp", h.timestamp}, {"platform", h.platform}, {"schema_version", h.schema_version}};
}

Json to_json(const ActorStateMessage & m)
{
  Json actors = Json::array();
  for (const auto & a : m.actors) {
    actors.push_back({{"id", a.id}, {"type", to_string(a.type)}, {"x", a.x}, {"y", a.y}, {"heading", a.heading},
      {"speed", a.speed}, {"accel", a.accel}, {"length", a.length}, {"width", a.width}});
  }
  Json j = {{"header", to_json(m.header)}, {"actors", std::move(actors)}};
  if (m.signals) {
    Json sig = Json::array();
    for (const auto & s : *m.signals) sig.push_back({{"id", s.id}, {"state", s.state}});
    j["signals"] = std::move(sig);
  }
  if (m.weather) j["weather"] = *m.weather;
  return j;
}

Json to_json(const ControlMessage & m)
{
  Json cmd;
  if (m.mode == ControlMode::kPedals) {
    cmd = {{"throttle", m.throttle}, {"brake", m.brake}, {"steering", m.steering}};
  } else {
    cmd = {{"target_accel", m.target_accel}, {"target_lane_offset", m.target_lane_offset}};
  }
  return {{"header", to_json(m.header)}, {"mode", m.mode == ControlMode::kPedals ? "PEDALS" : "TARGET"}, {"command", std::move(cmd)}};
}

Json to_json(const HeartbeatMessage & m)
{
  return {{"header", to_json(m.header)}, {"status", m.status}, {"step", m.step}};
}

ActorStateMessage parse_actor_state(const Json & doc)
{
  const Cursor c(doc, "");
  c.only_keys({"header", "actors", "signals", "weather"});
  ActorStateMessage m;
  m.header = parse_header(c.at("header"));
  std::set<std::string> ids;
  for (const auto & a : c.at("actors").elements()) {
    a.only_keys({"id", "type", "x", "y", "heading", "speed", "accel", "length", "width"});
    ActorEntry e;
    e.id = a.at("id").string();
    if (e.id.empty()) a.at("id").fail("must be non-empty");
    if (!ids.insert(e.id).second) a.at("id").fail("duplicate actor id '" + e.id + "'");
    e.type = parse_actor_type(a.at("type"));
    e.x = a.at("x").number();
    e.y = a.at("y").number();
    e.heading = a.at("heading").number();
    e.speed = a.at("speed").number();
    e.accel = a.at("accel").number();
    e.length = a.at("length").positive();
    e.width = a.at("width").positive();
    m.actors.push_back(std::move(e));
  }
  if (auto s = c.maybe("signals")) {
    std::vector<SignalEntry> sig;
    for (const auto & e : s->elements()) {
      e.only_keys({"id", "state"});
      SignalEntry se{e.at("id").string(), e.at("state").string()};
      if (se.state != "GREEN" && se.state != "YELLOW" && se.state != "RED") e.at("state").fail("unknown signal state '" + se.state + "'");
      sig.push_back(std::move(se));
    }
    m.signals = std::move(sig);
  }
  if (auto w = c.maybe("weather")) m.weather = w->string();
  return m;
}

ControlMessage parse_control(const Json & doc)
{
  const Cursor c(doc, "");
  c.only_keys({"header", "mode", "command"});
  ControlMessage m;
  m.header = parse_header(c.at("header"));
  const auto mode = c.at("mode");
  const auto cmd = c.at("command");
  const std::string ms = mode.string();
  if (ms == "PEDALS") {
    m.mode = ControlMode::kPedals;
    cmd.only_keys({"throttle", "brake", "steering"});
    m.throttle = bounded(cmd.at("throttle"), 0.0, 1.0);
    m.brake = bounded(cmd.at("brake"), 0.0, 1.0);
    m.steering = bounded(cmd.at("steering"), -1.0, 1.0);
  } else if (ms == "TARGET") {
    m.mode = ControlMode::kTarget;
    cmd.only_keys({"target_accel", "target_lane_offset"});
    m.target_accel = cmd.at("target_accel").number();
    m.target_lane_offset = cmd.maybe("target_lane_offset") ? cmd.at("target_lane_offset").number() : 0.0;
  } else {
    mode.fail("unknown control mode '" + ms + "'");
  }
  return m;
}

HeartbeatMessage parse_heartbeat(const Json & doc)
{
  const Cursor c(doc, "");
  c.only_keys({"header", "status", "step"});
  HeartbeatMessage m;
  m.header = parse_header(c.at("header"));
  m.status = c.at("status").string();
  if (m.status != "running" && m.status != "ended") c.at("status").fail("unknown status '" + m.status + "'");
  const auto step = c.at("step").integer();
  if (step < 0) c.at("step").fail("must be >= 0");
  m.step = static_cast<std::uint64_t>(step);
  return m;
}

std::string serialize(const ActorStateMessage & m) { return to_json(m).dump(); }
std::string serialize(const ControlMessage & m) { return to_json(m).dump(); }
std::string serialize(const HeartbeatMessage & m) { return to_json(m).dump(); }

Message validate_message(std::string_view key, std::string_view payload)
{
  if (!is_registered_key(key)) throw ValidationError("", "unknown key '" + std::string(key) + "'");
  const Json doc = parse_document(payload);
  if (!doc.is_object()) throw ValidationError("", "payload must be an object");
  if (key == kActorInfoKey || key == kAvStateKey) return parse_actor_state(doc);
  if (key == kControlKey) return parse_control(doc);
  if (key == kHeartbeatKey) return parse_heartbeat(doc);
  const Cursor c(doc, "");
  return SensorMessage{parse_header(c.at("header")), doc};
}

}  // namespace terasim::cosim
