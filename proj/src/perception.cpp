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

#include "terasim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace terasim
{

namespace
{
Neighbor make_neighbor(const VehicleState & other, double gap)
{
  Neighbor n;
  n.gap = gap;
  n.speed = other.speed;
  n.length = other.length;
  n.params = other.behavior;
  return n;
}

Neighbor make_obstacle(double gap)
{
  Neighbor n;
  n.gap = gap;
  n.speed = 0.0;
  n.length = 0.0;
  return n;
}
}  // namespace

PerceptionIndex::PerceptionIndex(const RoadNetwork & network, std::span<const VehicleState> agents, double lookahead, double lookbehind)
: network_(network), agents_(agents), lookahead_(lookahead), lookbehind_(lookbehind), by_lane_(network.lane_count())
{
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto & a = agents_[i];
    if (!a.on_lane()) continue;
    by_lane_[static_cast<std::size_t>(a.lane)].push_back({a.s, i});
    // Agents still sliding out of a lane keep occupying it until the animation ends.
    if (a.lane_change && a.lane_change->from_lane != kNoLane) {
      const LaneIndex from = a.lane_change->from_lane;
      const double s = a.s * network_.length(from) / network_.length(a.lane);
      by_lane_[static_cast<std::size_t>(from)].push_back({s, i});
    }
  }
  for (auto & lane : by_lane_) {
    std::sort(lane.begin(), lane.end(), [](const Entry & x, const Entry & y) {
      return x.s < y.s || (x.s == y.s && x.agent < y.agent);
    });
  }
}

double PerceptionIndex::mapped_s(std::size_t agent, LaneIndex lane) const
{
  const auto & a = agents_[agent];
  if (lane == a.lane) return a.s;
  return a.s * network_.length(lane) / network_.length(a.lane);
}

std::optional<LeaderInfo> PerceptionIndex::search_ahead(std::size_t self, LaneIndex start_lane, double s0, bool follow_route) const
{
  const auto & ego = agents_[self];
  const double ego_front = s0 + ego.length / 2.0;
  std::optional<LeaderInfo> best;
  double best_gap = std::numeric_limits<double>::infinity();

  LaneIndex lane = start_lane;
  double offset = 0.0;
  std::size_t route_pos = ego.route_index;
  for (int hop = 0; hop < 64 && lane != kNoLane; ++hop) {
    if (offset - s0 > lookahead_) break;
    for (const auto & e : by_lane_[static_cast<std::size_t>(lane)]) {
      if (e.agent == self) continue;
      if (hop == 0 && (e.s < s0 || (e.s == s0 && e.agent < self))) continue;
      const auto & other = agents_[e.agent];
      const double gap = offset + e.s - other.length / 2.0 - ego_front;
      if (gap < best_gap) {
        best_gap = gap;
        best = LeaderInfo{make_neighbor(other, gap), e.agent};
      }
      break;  // entries are sorted; the first qualifying one is nearest on this lane
    }
    for (const auto & c : network_.closures(lane)) {
      const double end = offset + c.end_s;
      if (end <= s0 - ego.length / 2.0) continue;
      const double gap = offset + c.start_s - ego_front;
      if (gap < best_gap) {
        best_gap = gap;
        best = LeaderInfo{make_obstacle(gap), std::nullopt};
      }
    }
    if (best) break;
    offset += network_.length(lane);
    LaneIndex next = kNoLane;
    if (follow_route && route_pos + 1 < ego.route.size() && ego.route[route_pos] == lane) {
      next = ego.route[++route_pos];
    } else {
      const auto succ = network_.successors(lane);
      if (!succ.empty()) next = succ.front();
      follow_route = false;
    }
    lane = next;
  }
  return best;
}

std::optional<LeaderInfo> PerceptionIndex::search_behind(std::size_t self, LaneIndex start_lane, double s0) const
{
  const auto & ego = agents_[self];
  const double ego_rear = s0 - ego.length / 2.0;
  const auto & entries = by_lane_[static_cast<std::size_t>(start_lane)];
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (it->agent == self) continue;
    if (it->s > s0 || (it->s == s0 && it->agent > self)) continue;
    const auto & other = agents_[it->agent];
    return LeaderInfo{make_neighbor(other, ego_rear - (it->s + other.length / 2.0)), it->agent};
  }
  // Nearest vehicle on the upstream lanes.
  std::optional<LeaderInfo> best;
  double best_gap = std::numeric_limits<double>::infinity();
  struct Frontier
  {
    LaneIndex lane;
    double offset;
  };
  std::vector<Frontier> frontier{{start_lane, 0.0}};
  for (int depth = 0; depth < 3 && !frontier.empty(); ++depth) {
    std::vector<Frontier> next;
    for (const auto & f : frontier) {
      for (auto pred : network_.predecessors(f.lane)) {
        const double off = f.offset + network_.length(pred);
        if (off - network_.length(pred) > lookbehind_ + s0) continue;
        const auto & pe = by_lane_[static_cast<std::size_t>(pred)];
        bool found = false;
        for (auto it = pe.rbegin(); it != pe.rend(); ++it) {
          if (it->agent == self) continue;
          const auto & other = agents_[it->agent];
          const double gap = ego_rear + off - (it->s + other.length / 2.0);
          if (gap < best_gap) {
            best_gap = gap;
            best = LeaderInfo{make_neighbor(other, gap), it->agent};
          }
          found = true;
          break;
        }
        if (!found) next.push_back({pred, off});
      }
    }
    if (best) break;
    frontier = std::move(next);
  }
  if (best && best->neighbor.gap > lookbehind_) return std::nullopt;
  return best;
}

std::optional<LeaderInfo> PerceptionIndex::leader(std::size_t agent) const
{
  const auto & a = agents_[agent];
  if (!a.on_lane()) return std::nullopt;
  return search_ahead(agent, a.lane, a.s, true);
}

std::optional<LeaderInfo> PerceptionIndex::follower(std::size_t agent) const
{
  const auto & a = agents_[agent];
  if (!a.on_lane()) return std::nullopt;
  return search_behind(agent, a.lane, a.s);
}

LaneNeighbors PerceptionIndex::neighbors_on(std::size_t agent, LaneIndex lane) const
{
  LaneNeighbors n;
  const bool own = lane == agents_[agent].lane;
  const double s = mapped_s(agent, lane);
  if (auto l = search_ahead(agent, lane, s, own)) n.leader = l->neighbor;
  if (auto f = search_behind(agent, lane, s)) n.follower = f->neighbor;
  return n;
}

NeighborSnapshot PerceptionIndex::snapshot(std::size_t agent) const
{
  const auto & a = agents_[agent];
  NeighborSnapshot snap;
  if (!a.on_lane()) return snap;
  snap.current = neighbors_on(agent, a.lane);
  if (const LaneIndex l = network_.left(a.lane); l != kNoLane) snap.left = neighbors_on(agent, l);
  if (const LaneIndex r = network_.right(a.lane); r != kNoLane) snap.right = neighbors_on(agent, r);
  return snap;
}

Perception PerceptionIndex::perceive(std::size_t agent) const
{
  const auto & a = agents_[agent];
  Perception p;
  if (!a.on_lane()) {
    if (a.walk_signal) p.walk_signal = network_.signals()[*a.walk_signal].state();
    return p;
  }
  p.neighbors = snapshot(agent);
  if (auto state = network_.signal_state(a.lane)) {
    p.stop_line = StopLine{network_.length(a.lane) - a.front(), *state};
  }
  return p;
}

}  // namespace terasim
