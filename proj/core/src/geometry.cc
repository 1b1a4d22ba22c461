// Copyright 2026 The cacp Authors. All Rights Reserved.
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
#include "cacp/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cacp {

Vec2 TransformPoint(const Pose2& pose, Vec2 local) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  return {pose.x + c * local.x - s * local.y, pose.y + s * local.x + c * local.y};
}

Vec2 InverseTransformPoint(const Pose2& pose, Vec2 parent) {
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  const double dx = parent.x - pose.x;
  const double dy = parent.y - pose.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Pose2 Compose(const Pose2& a, const Pose2& b) {
  const Vec2 p = TransformPoint(a, {b.x, b.y});
  return {p.x, p.y, WrapAngle(a.yaw + b.yaw)};
}

Pose2 Inverse(const Pose2& pose) {
  const Vec2 p = InverseTransformPoint(pose, {0.0, 0.0});
  return {p.x, p.y, WrapAngle(-pose.yaw)};
}

Pose2 RelativePose(const Pose2& reference, const Pose2& target) {
  return Compose(Inverse(reference), target);
}

double WrapAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

bool OrientedRect::Contains(Vec2 p, double eps) const {
  const Vec2 local = InverseTransformPoint({center.x, center.y, angle}, p);
  return std::abs(local.x) <= half_extents.x + eps &&
         std::abs(local.y) <= half_extents.y + eps;
}

OrientedRect ToOriented(const Rect& r) { return {r.center, r.half_extents, 0.0}; }

OrientedRect TransformRect(const Pose2& pose, const OrientedRect& local) {
  return {TransformPoint(pose, local.center), local.half_extents,
          WrapAngle(pose.yaw + local.angle)};
}

OrientedRect InverseTransformRect(const Pose2& pose,
                                  const OrientedRect& parent) {
  return {InverseTransformPoint(pose, parent.center), parent.half_extents,
          WrapAngle(parent.angle - pose.yaw)};
}

double RayRectHit(Vec2 origin, Vec2 dir, const Rect& box) {
  const double lo[2] = {box.center.x - box.half_extents.x,
                        box.center.y - box.half_extents.y};
  const double hi[2] = {box.center.x + box.half_extents.x,
                        box.center.y + box.half_extents.y};
  const double o[2] = {origin.x, origin.y};
  const double d[2] = {dir.x, dir.y};
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return -1.0;
      continue;
    }
    double t0 = (lo[k] - o[k]) / d[k];
    double t1 = (hi[k] - o[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit || t_enter < 0.0) return -1.0;
  return t_enter;
}

}  // namespace cacp
