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


#include "terasim/error.hpp"
#include "terasim/road_network.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <set>
#include <string>

using namespace terasim;

namespace
{

Json two_lane_doc()
{
  return Json::parse(R"({
    "lanes": [
      {"id": "a", "centerline": [[0, 0], [100, 0]], "width": 3.5, "speed_limit": 20, "successors": ["b"], "left_neighbor": "a2"},
      {"id": "a2", "centerline": [[0, 3.5], [100, 3.5]], "width": 3.5, "speed_limit": 20, "right_neighbor": "a"},
      {"id": "b", "centerline": [[100, 0], [200, 0]], "width": 3.5, "speed_limit": 20}
    ],
    "signals": [
      {"id": "sig", "controlled_lanes": ["a"], "program": [{"state": "GREEN", "duration": 10}, {"state": "YELLOW", "duration": 3}, {"state": "RED", "duration": 7}]}
    ],
    "spawn_points": [{"lane": "a", "s": 0}]
  })");
}

std::string expect_config_error(const Json & doc)
{
  try {
    RoadNetwork::from_json(doc);
  } catch (const ConfigError & e) {
    return e.path();
  }
  ADD_FAILURE() << "expected ConfigError";
  return {};
}

// Brute-force enumeration: every path that stops at `max_lanes` lanes or at a dead end.
double enumerate_routes(const RoadNetwork & net, LaneIndex from, std::size_t max_lanes)
{
  std::function<double(LaneIndex, std::size_t)> walk = [&](LaneIndex l, std::size_t depth) -> double {
    if (depth == max_lanes || net.successors(l).empty()) return 1.0;
    double total = 0.0;
    for (auto s : net.successors(l)) total += walk(s, depth + 1);
    return total;
  };
  return walk(from, 1);
}

}  // namespace

TEST(RoadNetwork, LoadsAndIndexes)
{
  const auto net = RoadNetwork::from_json(two_lane_doc());
  ASSERT_EQ(net.lane_count(), 3u);
  const auto a = net.lane_index("a");
  EXPECT_DOUBLE_EQ(net.length(a), 100.0);
  ASSERT_EQ(net.successors(a).size(), 1u);
  EXPECT_EQ(net.lane(net.successors(a)[0]).id, "b");
  ASSERT_EQ(net.predecessors(net.lane_index("b")).size(), 1u);
  EXPECT_EQ(net.lane(net.left(a)).id, "a2");
  EXPECT_EQ(net.right(net.lane_index("a2")), a);
  EXPECT_EQ(net.signal_state(a), SignalState::kGreen);
  EXPECT_FALSE(net.signal_state(net.lane_index("b")).has_value());
  EXPECT_THROW(net.lane_index("nope"), std::out_of_range);
}

TEST(RoadNetwork, JsonRoundTripIsIdentity)
{
  const auto net = RoadNetwork::from_json(two_lane_doc());
  const auto again = load_network(serialize_network(net));
  EXPECT_TRUE(net == again);
  EXPECT_EQ(serialize_network(net), serialize_network(again));
}

TEST(RoadNetwork, GeneratedTemplatesRoundTrip)
{
  for (const char * name : {"highway2", "ring", "grid3x3"}) {
    const auto net = make_template(name);
    EXPECT_TRUE(net == load_network(serialize_network(net))) << name;
  }
  EXPECT_THROW(make_template("moon_base"), ConfigError);
}

TEST(RoadNetwork, DanglingSuccessorNamesField)
{
  auto doc = two_lane_doc();
  doc["lanes"][0]["successors"] = {"ghost"};
  EXPECT_EQ(expect_config_error(doc), "lanes[0].successors[0]");
}

TEST(RoadNetwork, AsymmetricNeighborRejected)
{
  auto doc = two_lane_doc();
  doc["lanes"][1].erase("right_neighbor");
  EXPECT_EQ(expect_config_error(doc), "lanes[0].left_neighbor");
}

TEST(RoadNetwork, DuplicateLaneRejected)
{
  auto doc = two_lane_doc();
  doc["lanes"][2]["id"] = "a";
  EXPECT_EQ(expect_config_error(doc), "lanes[2].id");
}

TEST(RoadNetwork, DegenerateCenterlineRejected)
{
  auto doc = two_lane_doc();
  doc["lanes"][2]["centerline"] = {{100, 0}};
  EXPECT_EQ(expect_config_error(doc), "lanes[2].centerline");
  doc["lanes"][2]["centerline"] = {{100, 0}, {100, 0}};
  EXPECT_EQ(expect_config_error(doc), "lanes[2].centerline[1]");
}

TEST(RoadNetwork, BadWidthAndLimitRejected)
{
  auto doc = two_lane_doc();
  doc["lanes"][0]["width"] = 0;
  EXPECT_EQ(expect_config_error(doc), "lanes[0].width");
  doc = two_lane_doc();
  doc["lanes"][0]["speed_limit"] = -1;
  EXPECT_EQ(expect_config_error(doc), "lanes[0].speed_limit");
}

TEST(RoadNetwork, UnknownKeyRejected)
{
  auto doc = two_lane_doc();
  doc["lanes"][0]["colour"] = "red";
  EXPECT_THROW(RoadNetwork::from_json(doc), ConfigError);
}

TEST(RoadNetwork, SignalLaneControlledOnce)
{
  auto doc = two_lane_doc();
  doc["signals"].push_back(Json::parse(R"({"id": "sig2", "controlled_lanes": ["a"], "program": [{"state": "RED", "duration": 5}]})"));
  EXPECT_EQ(expect_config_error(doc), "signals[1].controlled_lanes[0]");
}

TEST(RoadNetwork, SignalCyclesThroughProgram)
{
  auto net = RoadNetwork::from_json(two_lane_doc());
  const auto a = net.lane_index("a");
  std::vector<SignalState> seen;
  for (int step = 0; step < 200; ++step) {
    seen.push_back(*net.signal_state(a));
    net.advance_signals(0.1);
  }
  // 10 s green, 3 s yellow, 7 s red at dt 0.1.
  EXPECT_EQ(seen[0], SignalState::kGreen);
  EXPECT_EQ(seen[99], SignalState::kGreen);
  EXPECT_EQ(seen[100], SignalState::kYellow);
  EXPECT_EQ(seen[129], SignalState::kYellow);
  EXPECT_EQ(seen[130], SignalState::kRed);
  EXPECT_EQ(seen[199], SignalState::kRed);
  EXPECT_EQ(*net.signal_state(a), SignalState::kGreen);
  EXPECT_DOUBLE_EQ(net.signals()[0].period(), 20.0);
}

TEST(RoadNetwork, OverrideHoldsSignal)
{
  auto net = RoadNetwork::from_json(two_lane_doc());
  net.signal(0).override_state = SignalState::kRed;
  EXPECT_EQ(*net.signal_state(net.lane_index("a")), SignalState::kRed);
  net.signal(0).override_state.reset();
  EXPECT_EQ(*net.signal_state(net.lane_index("a")), SignalState::kGreen);
}

TEST(RoadNetwork, ClosuresAddAndRemove)
{
  auto net = RoadNetwork::from_json(two_lane_doc());
  const auto a = net.lane_index("a");
  net.add_closure(a, {10, 30});
  EXPECT_THROW(net.add_closure(a, {20, 40}), ConfigError);
  EXPECT_THROW(net.add_closure(a, {90, 120}), ConfigError);
  net.add_closure(a, {30, 40});
  EXPECT_EQ(net.closures(a).size(), 2u);
  net.remove_closure(a, {10, 30});
  ASSERT_EQ(net.closures(a).size(), 1u);
  EXPECT_EQ(net.closures(a)[0], (ClosedInterval{30, 40}));
}

TEST(RoadNetwork, PoseFollowsCenterline)
{
  const auto net = make_highway(3, 500.0, 30.0);
  const auto l = net.lane_index("hw_2");
  const auto p = net.pose(l, 123.0, 0.5);
  EXPECT_NEAR(p.position.x(), 123.0, 1e-12);
  EXPECT_NEAR(p.position.y(), 7.5, 1e-12);
  EXPECT_NEAR(p.heading, 0.0, 1e-12);
  const auto pr = net.project(l, Vec2d(50.0, 6.0));
  EXPECT_NEAR(pr.s, 50.0, 1e-12);
  EXPECT_NEAR(pr.lateral, -1.0, 1e-12);
}

TEST(RoadNetwork, RingIsClosedLoop)
{
  const auto net = make_ring(2, 100.0, 20.0);
  const auto r0 = net.lane_index("ring_0");
  EXPECT_EQ(net.successors(r0)[0], r0);
  EXPECT_NEAR(net.length(r0), 2 * M_PI * 100.0, 0.5);
  const Route loop{r0, r0, r0};
  EXPECT_TRUE(net.is_connected_route(loop));
}

TEST(RoadNetwork, GridInvariants)
{
  const auto net = make_grid(3, 3, 200.0, 13.9);
  EXPECT_FALSE(net.signals().empty());
  std::set<std::string> controlled;
  for (const auto & s : net.signals()) {
    for (const auto & id : s.controlled_lane_ids) EXPECT_TRUE(controlled.insert(id).second) << id;
  }
  for (std::size_t i = 0; i < net.lane_count(); ++i) {
    for (auto s : net.successors(static_cast<LaneIndex>(i))) {
      // Successors start where the lane ends.
      const auto & from = net.lane(static_cast<LaneIndex>(i)).centerline.back();
      const auto & to = net.lane(s).centerline.front();
      EXPECT_LT((from - to).norm(), 1e-6) << net.lane(static_cast<LaneIndex>(i)).id << " -> " << net.lane(s).id;
    }
  }
}

TEST(RoadNetwork, RouteCountMatchesEnumeration)
{
  const auto net = make_grid(3, 3, 200.0, 13.9);
  for (std::size_t depth : {1u, 2u, 3u, 5u, 7u}) {
    for (std::size_t i = 0; i < net.lane_count(); i += 3) {
      const auto l = static_cast<LaneIndex>(i);
      EXPECT_DOUBLE_EQ(count_routes(net, l, depth), enumerate_routes(net, l, depth)) << net.lane(l).id << " depth " << depth;
    }
  }
}

TEST(RoadNetwork, SampledRoutesAreConnectedAndUniform)
{
  const auto net = make_grid(3, 3, 200.0, 13.9);
  LaneIndex start = 0;
  for (std::size_t i = 0; i < net.lane_count(); ++i) {
    if (net.successors(static_cast<LaneIndex>(i)).size() > 1) {
      start = static_cast<LaneIndex>(i);
      break;
    }
  }
  const std::size_t depth = 3;
  const double total = count_routes(net, start, depth);
  ASSERT_GT(total, 1.0);
  CounterRng rng(1, 2);
  std::map<Route, int> hist;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const Route r = sample_route(net, start, depth, rng);
    ASSERT_TRUE(net.is_connected_route(r));
    ASSERT_EQ(r.front(), start);
    ++hist[r];
  }
  EXPECT_EQ(static_cast<double>(hist.size()), total);
  const double expected = n / total;
  for (const auto & [route, count] : hist) EXPECT_NEAR(count, expected, 6 * std::sqrt(expected));
}
