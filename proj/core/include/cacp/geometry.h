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

#ifndef CACP_GEOMETRY_H_
#define CACP_GEOMETRY_H_

#include <cmath>

namespace cacp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double Norm() const { return std::hypot(x, y); }
  bool operator==(const Vec2&) const = default;
};

inline double Distance(Vec2 a, Vec2 b) { return (a - b).Norm(); }

// Planar rigid transform: rotation by yaw followed by translation (x, y).
// Maps points from the local frame of the pose into the parent frame.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose2&) const = default;
};

// Local -> parent.
Vec2 TransformPoint(const Pose2& pose, Vec2 local);
// Parent -> local.
Vec2 InverseTransformPoint(const Pose2& pose, Vec2 parent);

// (a ∘ b): apply b, then a.
Pose2 Compose(const Pose2& a, const Pose2& b);
Pose2 Inverse(const Pose2& pose);

// Pose of `target` expressed in the frame of `reference`.
Pose2 RelativePose(const Pose2& reference, const Pose2& target);

// Wraps an angle to (-pi, pi].
double WrapAngle(double angle);

// Axis-aligned rectangle in the world frame.
struct Rect {
  Vec2 center;
  Vec2 half_extents;
  bool operator==(const Rect&) const = default;
};

// Rectangle with arbitrary orientation; `angle` rotates the box axes.
struct OrientedRect {
  Vec2 center;
  Vec2 half_extents;
  double angle = 0.0;

  // Cell-center style inclusion; points within `eps` of an edge count as
  // inside.
  bool Contains(Vec2 p, double eps = 1e-9) const;
  bool operator==(const OrientedRect&) const = default;
};

OrientedRect ToOriented(const Rect& r);

// Re-expresses a rectangle given in the frame of `pose` in the parent frame.
OrientedRect TransformRect(const Pose2& pose, const OrientedRect& local);
OrientedRect InverseTransformRect(const Pose2& pose, const OrientedRect& parent);

// Ray/box intersection. Returns the smallest t >= 0 at which
// origin + t * dir enters the box, or a negative value on a miss. A ray whose
// origin lies inside the box reports a miss.
double RayRectHit(Vec2 origin, Vec2 dir, const Rect& box);

}  // namespace cacp

#endif  // CACP_GEOMETRY_H_
