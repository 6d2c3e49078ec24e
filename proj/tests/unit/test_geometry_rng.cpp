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


#include "terasim/geometry.hpp"
#include "terasim/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace terasim;

namespace
{

OrientedBox<double> box(double x, double y, double heading, double len = 4.0, double wid = 2.0)
{
  OrientedBox<double> b;
  b.center = Vec2d(x, y);
  b.heading = heading;
  b.length = len;
  b.width = wid;
  return b;
}

}  // namespace

TEST(Geometry, WrapAngleStaysInHalfOpenRange)
{
  for (double a = -20.0; a <= 20.0; a += 0.37) {
    const double w = wrap_angle(a);
    EXPECT_GE(w, -M_PI);
    EXPECT_LT(w, M_PI);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-12);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-12);
  }
}

TEST(Geometry, LocateAndProjectAreInverse)
{
  const std::vector<Vec2d> pts{{0, 0}, {10, 0}, {10, 10}, {20, 15}};
  const auto st = cumulative_length<double>(pts);
  ASSERT_DOUBLE_EQ(st.back(), polyline_length<double>(pts));
  for (double s = 0.5; s < st.back(); s += 1.3) {
    // Near a vertex an offset point can sit closer to the neighbouring segment.
    if (std::any_of(st.begin(), st.end(), [&](double v) { return std::abs(v - s) < 0.5; })) continue;
    for (double lat : {-0.4, 0.0, 0.4}) {
      const auto pose = locate_on_polyline<double>(pts, st, s, lat);
      const auto pr = project_onto_polyline<double>(pts, st, pose.position);
      EXPECT_NEAR(pr.s, s, 1e-9) << "s=" << s << " lat=" << lat;
      EXPECT_NEAR(pr.lateral, lat, 1e-9);
    }
  }
}

TEST(Geometry, LeftNormalPointsLeft)
{
  const Vec2d n = left_normal(Vec2d(1.0, 0.0));
  EXPECT_DOUBLE_EQ(n.x(), 0.0);
  EXPECT_DOUBLE_EQ(n.y(), 1.0);
}

TEST(Geometry, SatAxisAlignedOverlapDepth)
{
  // 4 m boxes 3 m apart along x overlap by 1 m.
  const auto w = separating_axis_test(box(0, 0, 0), box(3, 0, 0));
  EXPECT_TRUE(w.overlap);
  EXPECT_NEAR(w.depth, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(w.axis.x()), 1.0, 1e-12);
}

TEST(Geometry, SatSeparatedGap)
{
  const auto w = separating_axis_test(box(0, 0, 0), box(0, 2.5, 0));
  EXPECT_FALSE(w.overlap);
  EXPECT_NEAR(w.depth, 0.5, 1e-12);
}

TEST(Geometry, SatIsSymmetric)
{
  CounterRng rng(7, 1);
  for (int i = 0; i < 2000; ++i) {
    const auto a = box(rng.uniform() * 8 - 4, rng.uniform() * 8 - 4, rng.uniform() * 6.3, 1 + rng.uniform() * 5, 0.5 + rng.uniform() * 2);
    const auto b = box(rng.uniform() * 8 - 4, rng.uniform() * 8 - 4, rng.uniform() * 6.3, 1 + rng.uniform() * 5, 0.5 + rng.uniform() * 2);
    EXPECT_EQ(boxes_overlap(a, b), boxes_overlap(b, a));
  }
}

TEST(Geometry, RotatedDiamondMissesCorner)
{
  // A 45-degree square next to an axis-aligned one: bounding circles overlap, SAT must not.
  const double h = std::sqrt(2.0);
  EXPECT_FALSE(boxes_overlap(box(0, 0, 0, 2, 2), box(1.0 + h + 0.05, 0, M_PI / 4, 2, 2)));
  EXPECT_TRUE(boxes_overlap(box(0, 0, 0, 2, 2), box(1.0 + h - 0.05, 0, M_PI / 4, 2, 2)));
}

TEST(Geometry, ContainsMatchesCorners)
{
  const auto b = box(1, 2, 0.7);
  for (const auto & c : b.corners()) {
    EXPECT_TRUE(b.contains(b.center + (c - b.center) * 0.999));
    EXPECT_FALSE(b.contains(b.center + (c - b.center) * 1.001));
  }
}

TEST(Rng, SameKeyAndStreamReproduce)
{
  CounterRng a(42, stream_hash("behavior"));
  CounterRng b(42, stream_hash("behavior"));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.counter(), 100u);
}

TEST(Rng, StreamsAreIndependent)
{
  EpisodeRng ep(5);
  auto s = ep.stream("spawn");
  auto b = ep.stream("behavior");
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += s.next_u64() == b.next_u64();
  EXPECT_EQ(equal, 0);
  EXPECT_NE(stream_hash("spawn"), stream_hash("adversity"));
}

TEST(Rng, DeriveDependsOnLabelOnly)
{
  CounterRng base(1, 2);
  CounterRng advanced = base;
  for (int i = 0; i < 10; ++i) advanced.next_u64();
  auto x = base.derive("veh_000001");
  auto y = advanced.derive("veh_000001");
  auto z = base.derive("veh_000002");
  EXPECT_EQ(x.next_u64(), y.next_u64());
  EXPECT_NE(base.derive("veh_000001").next_u64(), z.next_u64());
}

TEST(Rng, UniformMoments)
{
  CounterRng rng(99, 0);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  // Mean 1/2 and variance 1/12; tolerances are about 5 standard errors.
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 2e-3);
}

TEST(Rng, NormalMoments)
{
  CounterRng rng(3, 3);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, ExponentialMean)
{
  CounterRng rng(11, 4);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(0.5);
  EXPECT_NEAR(sum / n, 2.0, 5 * 2.0 / std::sqrt(n));
}
