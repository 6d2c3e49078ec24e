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

#ifndef TERASIM_SCENARIO_HPP
#define TERASIM_SCENARIO_HPP

#include "terasim/adversity.hpp"
#include "terasim/behavior.hpp"
#include "terasim/json_util.hpp"
#include "terasim/nade.hpp"
#include "terasim/road_network.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace terasim
{

enum class ControlSource { kBuiltinIdm, kCosim };
std::string_view to_string(ControlSource c);

struct EpisodeConfig
{
  double dt{0.1};
  double max_duration{120.0};
  double nominal_miles{0.5};
};

/// Partial parameter set; unset fields are sampled from the kind distribution.
struct BehaviorOverrides
{
  std::optional<double> desired_speed;
  std::optional<double> max_accel;
  std::optional<double> comfortable_decel;
  std::optional<double> min_gap;
  std::optional<double> time_headway;
  std::optional<double> accel_exponent;
  std::optional<double> politeness;
  std::optional<double> lane_change_threshold;
  std::optional<double> reaction_noise_sd;

  void apply(BehaviorParams & p) const;
};

struct AgentSeed
{
  std::string id;
  AgentKind kind{AgentKind::kCar};
  std::string lane;
  double s{0.0};
  double speed{0.0};
  double lateral_offset{0.0};
  std::vector<std::string> route;
  BehaviorOverrides behavior;
  std::vector<Vec2d> path;
  std::string walk_signal;
};

struct AvConfig
{
  bool enabled{true};
  std::string lane;
  double s{0.0};
  double speed{0.0};
  std::vector<std::string> route;
  ControlSource control{ControlSource::kBuiltinIdm};
  BehaviorOverrides behavior;
  bool allow_lane_change{false};
};

struct CosimConfig
{
  bool enabled{false};
  std::string listen{"127.0.0.1:0"};
  /// host:port of an external RESP server used instead of the embedded one.
  std::string external;
  std::string password;
  double step_deadline{0.1};
  double handshake_timeout{5.0};
};

struct ScenarioConfig
{
  std::string name{"scenario"};
  RoadNetwork network;
  NdeConfig nde;
  std::vector<AdversitySpec> adversities;
  SimMode mode{SimMode::kNde};
  EpisodeConfig episode;
  AvConfig av;
  std::vector<AgentSeed> agents;
  std::uint64_t seed{0};
  CosimConfig cosim;
  std::string weather{"clear"};

  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

/// The conservative built-in AV parameters (T = 2 s, b = 2 m/s^2, no noise).
BehaviorParams builtin_av_behavior(double speed_limit);

/// `base_dir` resolves relative map file references.
ScenarioConfig parse_scenario(const Json & doc, const std::filesystem::path & base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path & path);

BehaviorParams parse_behavior_params(const JsonCursor<ConfigError> & c);
Json to_json(const BehaviorParams & p);
AdversitySpec parse_adversity(const JsonCursor<ConfigError> & c);

}  // namespace terasim

#endif  // TERASIM_SCENARIO_HPP
