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

#ifndef TERASIM_PERCEPTION_HPP
#define TERASIM_PERCEPTION_HPP

#include "terasim/behavior.hpp"
#include "terasim/road_network.hpp"

#include <optional>
#include <span>
#include <vector>

namespace terasim
{

/// What sits ahead of (or behind) an agent: another agent or a closed-lane edge.
struct LeaderInfo
{
  Neighbor neighbor;
  /// Index into the agent span; empty for static obstacles.
  std::optional<std::size_t> agent;
};

/// Per-step spatial index over lane-bound agents. Built from an immutable snapshot;
/// all queries are const and deterministic.
class PerceptionIndex
{
public:
  PerceptionIndex(const RoadNetwork & network, std::span<const VehicleState> agents, double lookahead = 200.0, double lookbehind = 120.0);

  std::optional<LeaderInfo> leader(std::size_t agent) const;
  std::optional<LeaderInfo> follower(std::size_t agent) const;

  /// Neighbours of `agent` as if it stood on `lane` at the proportional position.
  LaneNeighbors neighbors_on(std::size_t agent, LaneIndex lane) const;
  NeighborSnapshot snapshot(std::size_t agent) const;
  Perception perceive(std::size_t agent) const;

  std::span<const VehicleState> agents() const { return agents_; }
  const RoadNetwork & network() const { return network_; }

private:
  struct Entry
  {
    double s;
    std::size_t agent;
  };

  double mapped_s(std::size_t agent, LaneIndex lane) const;
  std::optional<LeaderInfo> search_ahead(std::size_t agent, LaneIndex lane, double s, bool follow_route) const;
  std::optional<LeaderInfo> search_behind(std::size_t agent, LaneIndex lane, double s) const;

  const RoadNetwork & network_;
  std::span<const VehicleState> agents_;
  double lookahead_;
  double lookbehind_;
  std::vector<std::vector<Entry>> by_lane_;
};

}  // namespace terasim

#endif  // TERASIM_PERCEPTION_HPP
