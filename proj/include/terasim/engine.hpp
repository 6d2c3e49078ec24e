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

#ifndef TERASIM_ENGINE_HPP
#define TERASIM_ENGINE_HPP

#include "terasim/adversity.hpp"
#include "terasim/behavior.hpp"
#include "terasim/geometry.hpp"
#include "terasim/nade.hpp"
#include "terasim/scenario.hpp"
#include "terasim/trajectory_log.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace terasim
{

namespace cosim
{
class CosimBridge;
struct ActorStateMessage;
}  // namespace cosim

inline constexpr double kMetersPerMile = 1609.344;

struct CrashEvent
{
  double time{0.0};
  std::array<std::string, 2> partners;
  double relative_speed{0.0};
  /// The separating-axis certificate: minimum overlap depth and the axis it was found on.
  SatWitness<double> witness{};
  bool involves_av{false};
};

Json to_json(const CrashEvent & c);

OrientedBox<double> footprint(const VehicleState & v);

/// Every overlapping pair once, in index order; pedestrian-pedestrian pairs excluded.
std::vector<CrashEvent> detect_collisions(std::span<const VehicleState> actors, double time);

struct SpawnStats
{
  std::size_t spawned{0};
  std::size_t rejected{0};
};

/// Poisson arrivals over one step at each spawn point; arrivals without an
/// equilibrium gap to existing traffic are rejected and counted.
std::vector<VehicleState> spawn_agents(const RoadNetwork & network, const NdeConfig & config, CounterRng & rng, double now, double dt,
  std::span<const VehicleState> existing, std::uint64_t & next_id, SpawnStats & stats);

struct EpisodeOptions
{
  LogRetention log{LogRetention::kFull};
  cosim::CosimBridge * bridge{nullptr};
};

struct EpisodeStats
{
  std::size_t steps{0};
  std::size_t spawned{0};
  std::size_t despawned{0};
  std::size_t rejected_spawns{0};
  std::size_t nde_collisions{0};
  std::size_t overridden_steps{0};
  std::size_t stale_controls{0};
  std::size_t control_timeouts{0};
  double max_control_wait{0.0};
};

struct EpisodeResult
{
  EpisodeRecord record;
  TrajectoryLog log;
  std::optional<CrashEvent> crash;
  EpisodeStats stats;
  std::vector<VehicleState> final_agents;
};

/// Builds the world message the co-sim layer publishes for a set of actors.
cosim::ActorStateMessage world_message(double time, std::span<const VehicleState> agents, std::span<const StaticActor> statics,
  const RoadNetwork & network, const std::string & weather);

/// Runs one seeded episode. Throws ConfigError for an invalid config and
/// CosimTimeout when co-sim control never arrives during the handshake.
EpisodeResult run_episode(const ScenarioConfig & config, std::uint64_t seed, const EpisodeOptions & options = {});

}  // namespace terasim

#endif  // TERASIM_ENGINE_HPP
