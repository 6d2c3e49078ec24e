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

#ifndef TERASIM_GEOMETRY_HPP
#define TERASIM_GEOMETRY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace terasim
{

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec2d = Vec2<double>;

template <typename Scalar>
inline Vec2<Scalar> unit_from_heading(Scalar heading)
{
  using std::cos;
  using std::sin;
  return Vec2<Scalar>(cos(heading), sin(heading));
}

/// Left-hand normal of a direction (positive lateral offset is left of travel).
template <typename Derived>
inline Vec2<typename Derived::Scalar> left_normal(const Eigen::MatrixBase<Derived> & dir)
{
  return Vec2<typename Derived::Scalar>(-dir.y(), dir.x());
}

template <typename Scalar>
inline Scalar wrap_angle(Scalar a)
{
  const Scalar two_pi = Scalar(2.0 * M_PI);
  a = std::fmod(a + Scalar(M_PI), two_pi);
  if (a < Scalar(0)) a += two_pi;
  return a - Scalar(M_PI);
}

/// Cumulative arc length at every vertex of a polyline; front() == 0.
template <typename Scalar>
std::vector<Scalar> cumulative_length(std::span<const Vec2<Scalar>> points)
{
  std::vector<Scalar> acc(points.size(), Scalar(0));
  for (std::size_t i = 1; i < points.size(); ++i) {
    acc[i] = acc[i - 1] + (points[i] - points[i - 1]).norm();
  }
  return acc;
}

template <typename Scalar>
Scalar polyline_length(std::span<const Vec2<Scalar>> points)
{
  Scalar total(0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += (points[i] - points[i - 1]).norm();
  }
  return total;
}

template <typename Scalar>
struct PolylinePose
{
  Vec2<Scalar> position;
  Scalar heading;
  std::size_t segment;
};

/// Point at arc length `s` (clamped to the polyline), offset `lateral` to the left.
/// `stations` must come from cumulative_length() of the same points.
template <typename Scalar>
PolylinePose<Scalar> locate_on_polyline(
  std::span<const Vec2<Scalar>> points, std::span<const Scalar> stations, Scalar s, Scalar lateral)
{
  const std::size_t n = points.size();
  s = std::clamp(s, Scalar(0), stations[n - 1]);
  // upper_bound gives the first vertex strictly beyond s; the segment starts one before it.
  auto it = std::upper_bound(stations.begin(), stations.end(), s);
  std::size_t seg = it == stations.begin() ? 0 : static_cast<std::size_t>(it - stations.begin()) - 1;
  seg = std::min(seg, n - 2);
  const Vec2<Scalar> a = points[seg];
  const Vec2<Scalar> b = points[seg + 1];
  const Scalar seg_len = stations[seg + 1] - stations[seg];
  const Vec2<Scalar> dir = (b - a) / seg_len;
  const Scalar t = s - stations[seg];
  PolylinePose<Scalar> pose;
  pose.position = a + dir * t + left_normal(dir) * lateral;
  pose.heading = std::atan2(dir.y(), dir.x());
  pose.segment = seg;
  return pose;
}

template <typename Scalar>
struct PolylineProjection
{
  Scalar s;
  Scalar lateral;
  Scalar distance;
};

/// Closest-point projection of `p` onto the polyline (arc length + signed left offset).
template <typename Scalar>
PolylineProjection<Scalar> project_onto_polyline(
  std::span<const Vec2<Scalar>> points, std::span<const Scalar> stations, const Vec2<Scalar> & p)
{
  PolylineProjection<Scalar> best{Scalar(0), Scalar(0), std::numeric_limits<Scalar>::infinity()};
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2<Scalar> a = points[i];
    const Vec2<Scalar> d = points[i + 1] - a;
    const Scalar len = d.norm();
    const Vec2<Scalar> u = d / len;
    const Scalar t = std::clamp((p - a).dot(u), Scalar(0), len);
    const Vec2<Scalar> foot = a + u * t;
    const Scalar dist = (p - foot).norm();
    if (dist < best.distance) {
      best.distance = dist;
      best.s = stations[i] + t;
      best.lateral = (p - foot).dot(left_normal(u));
    }
  }
  return best;
}

/// Rectangle of `length` x `width` centred at `center`, long axis along `heading`.
template <typename Scalar>
struct OrientedBox
{
  Vec2<Scalar> center{Vec2<Scalar>::Zero()};
  Scalar heading{0};
  Scalar length{1};
  Scalar width{1};

  Vec2<Scalar> axis_long() const { return unit_from_heading(heading); }
  Vec2<Scalar> axis_lat() const { return left_normal(axis_long()); }

  std::array<Vec2<Scalar>, 4> corners() const
  {
    const Vec2<Scalar> u = axis_long() * (length / Scalar(2));
    const Vec2<Scalar> v = axis_lat() * (width / Scalar(2));
    return {center + u + v, center - u + v, center - u - v, center + u - v};
  }

  /// Half-width of the projection onto a unit axis.
  Scalar radius_along(const Vec2<Scalar> & axis) const
  {
    using std::abs;
    return length / Scalar(2) * abs(axis_long().dot(axis)) +
           width / Scalar(2) * abs(axis_lat().dot(axis));
  }

  bool contains(const Vec2<Scalar> & p) const
  {
    using std::abs;
    const Vec2<Scalar> d = p - center;
    return abs(d.dot(axis_long())) <= length / Scalar(2) && abs(d.dot(axis_lat())) <= width / Scalar(2);
  }

  Scalar bounding_radius() const
  {
    using std::sqrt;
    return sqrt(length * length + width * width) / Scalar(2);
  }
};

/// Outcome of a separating-axis query. When `overlap` is false, `axis` separates the
/// boxes by `depth` (> 0 means a real gap). When true, `axis` is the axis of least
/// penetration and `depth` the penetration along it; every candidate axis failed.
template <typename Scalar>
struct SatWitness
{
  bool overlap{false};
  Vec2<Scalar> axis{Vec2<Scalar>::UnitX()};
  Scalar depth{0};
};

template <typename Scalar>
SatWitness<Scalar> separating_axis_test(const OrientedBox<Scalar> & a, const OrientedBox<Scalar> & b)
{
  using std::abs;
  const std::array<Vec2<Scalar>, 4> axes{a.axis_long(), a.axis_lat(), b.axis_long(), b.axis_lat()};
  const Vec2<Scalar> delta = b.center - a.center;

  SatWitness<Scalar> best_sep;
  best_sep.depth = -std::numeric_limits<Scalar>::infinity();
  SatWitness<Scalar> best_pen;
  best_pen.overlap = true;
  best_pen.depth = std::numeric_limits<Scalar>::infinity();

  for (const auto & axis : axes) {
    const Scalar gap = abs(delta.dot(axis)) - a.radius_along(axis) - b.radius_along(axis);
    if (gap >= Scalar(0)) {
      if (gap > best_sep.depth) {
        best_sep.axis = axis;
        best_sep.depth = gap;
      }
    } else if (-gap < best_pen.depth) {
      best_pen.axis = axis;
      best_pen.depth = -gap;
    }
  }
  if (best_sep.depth >= Scalar(0)) return best_sep;
  return best_pen;
}

template <typename Scalar>
inline bool boxes_overlap(const OrientedBox<Scalar> & a, const OrientedBox<Scalar> & b)
{
  const Scalar reach = a.bounding_radius() + b.bounding_radius();
  if ((b.center - a.center).squaredNorm() >= reach * reach) return false;
  return separating_axis_test(a, b).overlap;
}

}  // namespace terasim

#endif  // TERASIM_GEOMETRY_HPP
