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

#ifndef TERASIM_COSIM_MESSAGES_HPP
#define TERASIM_COSIM_MESSAGES_HPP

#include "terasim/error.hpp"
#include "terasim/json_util.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace terasim::cosim
{

inline constexpr std::string_view kSchemaVersion = "1.0";

inline constexpr std::string_view kAvStateKey = "av-state-info";
inline constexpr std::string_view kActorInfoKey = "terasim-actor-info";
inline constexpr std::string_view kSensorKey = "physics-sim-sensor-info";
inline constexpr std::string_view kControlKey = "av-control-info";
inline constexpr std::string_view kHeartbeatKey = "terasim-heartbeat";

inline constexpr std::string_view kSimulatorPlatform = "terasim";
inline constexpr std::string_view kPhysicsPlatform = "physics-sim";
inline constexpr std::string_view kAvPlatform = "av-stack";

/// Owner platform of a well-known key; empty for unregistered keys.
std::string_view key_owner(std::string_view key);
bool is_registered_key(std::string_view key);
std::vector<std::string_view> registered_keys();

class ValidationError : public SchemaError
{
public:
  using SchemaError::SchemaError;
};

struct MessageHeader
{
  double timestamp{0.0};
  std::string platform;
  std::string schema_version{kSchemaVersion};
  bool operator==(const MessageHeader &) const = default;
};

enum class ActorType { kCar, kTruck, kCyclist, kPedestrian, kAv, kCone, kSign };
std::string_view to_string(ActorType t);

struct ActorEntry
{
  std::string id;
  ActorType type{ActorType::kCar};
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double speed{0.0};
  double accel{0.0};
  double length{0.0};
  double width{0.0};
  bool operator==(const ActorEntry &) const = default;
};

struct SignalEntry
{
  std::string id;
  std::string state;
  bool operator==(const SignalEntry &) const = default;
};

struct ActorStateMessage
{
  MessageHeader header;
  std::vector<ActorEntry> actors;
  std::optional<std::vector<SignalEntry>> signals;
  std::optional<std::string> weather;
  bool operator==(const ActorStateMessage &) const = default;
};

enum class ControlMode { kPedals, kTarget };

struct ControlMessage
{
  MessageHeader header;
  ControlMode mode{ControlMode::kTarget};
  double throttle{0.0};
  double brake{0.0};
  double steering{0.0};
  double target_accel{0.0};
  double target_lane_offset{0.0};
  bool operator==(const ControlMessage &) const = default;
};

struct HeartbeatMessage
{
  MessageHeader header;
  std::string status{"running"};
  std::uint64_t step{0};
  bool operator==(const HeartbeatMessage &) const = default;
};

/// Sensor payloads are relayed verbatim; only the header is checked.
struct SensorMessage
{
  MessageHeader header;
  Json body;
  bool operator==(const SensorMessage &) const = default;
};

using Message = std::variant<ActorStateMessage, ControlMessage, HeartbeatMessage, SensorMessage>;

Json to_json(const MessageHeader & h);
Json to_json(const ActorStateMessage & m);
Json to_json(const ControlMessage & m);
Json to_json(const HeartbeatMessage & m);

ActorStateMessage parse_actor_state(const Json & doc);
ControlMessage parse_control(const Json & doc);
HeartbeatMessage parse_heartbeat(const Json & doc);

/// Canonical payload: sorted keys, shortest round-trip numbers, no whitespace.
std::string serialize(const ActorStateMessage & m);
std::string serialize(const ControlMessage & m);
std::string serialize(const HeartbeatMessage & m);

/// Parses `payload` against the schema registered for `key`.
/// Throws ValidationError with a field path on any violation.
Message validate_message(std::string_view key, std::string_view payload);

}  // namespace terasim::cosim

#endif  // TERASIM_COSIM_MESSAGES_HPP
