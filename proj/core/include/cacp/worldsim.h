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
#ifndef CACP_WORLDSIM_H_
#define CACP_WORLDSIM_H_

#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cacp/geometry.h"

namespace cacp {

struct Vehicle {
  int id = 0;
  Pose2 pose;
  Vec2 velocity;
  bool is_ego = false;
  // Brightness gain of the vehicle's camera; 1 is the reference domain.
  double exposure = 1.0;

  bool operator==(const Vehicle&) const = default;
};

struct WorldObject {
  int id = 0;
  Rect shape;
  Vec2 velocity;
  // Occluders block rays but are not perception targets.
  bool occluder = false;

  bool operator==(const WorldObject&) const = default;
};

struct Bounds {
  Vec2 min;
  Vec2 max;

  bool Contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  bool operator==(const Bounds&) const = default;
};

struct WorldScenario {
  Bounds bounds;
  std::vector<Vehicle> vehicles;
  std::vector<WorldObject> objects;

  // Exactly one ego, positive half-extents, unique ids, every entity inside
  // the bounds, no vehicle inside an object. Throws ConfigError otherwise.
  void Validate() const;
  const Vehicle& Ego() const;
  size_t EgoIndex() const;
  // Throws InputError for an unknown id.
  const Vehicle& FindVehicle(int id) const;

  bool operator==(const WorldScenario&) const = default;
};

struct SensorParams {
  double max_range = 90.0;
  double fov = 2.0 * std::numbers::pi;
  double angular_resolution = std::numbers::pi / 1800.0;  // 0.1 deg
  int min_hits = 3;

  void Validate() const;
  bool operator==(const SensorParams&) const = default;
};

struct Detection {
  int object_id = 0;
  // Object footprint in the sensing vehicle's frame.
  OrientedRect observed;
  bool occluder = false;
  int hits = 0;
};

struct DetectionSet {
  int sensor_id = 0;
  double timestamp = 0.0;
  std::vector<Detection> detections;
};

// Ray-casts from the vehicle over its field of view. Each ray stops at the
// first box it enters within max_range; objects with at least min_hits first
// hits are reported.
DetectionSet Sense(const WorldScenario& world, int vehicle_id,
                   const SensorParams& params, double timestamp = 0.0);

// Independent zero-mean Gaussian noise on x, y and yaw.
Pose2 PerturbPose(const Pose2& pose, double sigma_xy, double sigma_yaw,
                  uint64_t seed);

// Moves every vehicle and object by velocity * dt. Throws DomainError for
// negative dt.
WorldScenario AdvanceWorld(const WorldScenario& world, double dt);
// The world as it was dt seconds earlier.
WorldScenario RewindWorld(const WorldScenario& world, double dt);

// Binary grid whose cell (col, row) has its center at
// origin + ((col + 0.5) * resolution, (row + 0.5) * resolution).
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  // Covers the bounds; throws InputError for non-positive resolution.
  OccupancyGrid(const Bounds& bounds, double resolution);

  double resolution() const { return resolution_; }
  Vec2 origin() const { return origin_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }

  bool at(int col, int row) const { return cells_[Index(col, row)] != 0; }
  void set(int col, int row, bool v) { cells_[Index(col, row)] = v ? 1 : 0; }
  Vec2 CellCenter(int col, int row) const {
    return {origin_.x + (col + 0.5) * resolution_,
            origin_.y + (row + 0.5) * resolution_};
  }

  // Marks every cell whose center lies inside the rectangle (ties inside).
  void Rasterize(const OrientedRect& rect);
  size_t Count() const;
  bool SameGeometry(const OccupancyGrid& o) const;
  const std::vector<uint8_t>& cells() const { return cells_; }

  bool operator==(const OccupancyGrid&) const = default;

 private:
  size_t Index(int col, int row) const {
    return static_cast<size_t>(row) * cols_ + col;
  }

  double resolution_ = 0.0;
  Vec2 origin_;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<uint8_t> cells_;
};

struct HelperInput {
  DetectionSet detections;
  // Helper pose at sensing time expressed in the ego frame at fusion time.
  Pose2 relative_pose;
  double latency = 0.0;
};

struct FusionResult {
  OccupancyGrid fused;
  OccupancyGrid ego_only;
  OccupancyGrid truth;
};

inline constexpr double kDefaultGridResolution = 0.5;

// Late fusion on a grid covering the world bounds. Ego detections are placed
// with the ego's true pose; helper detections go through relative_pose
// first. Occluder detections are not rasterized. Truth holds the
// non-occluder objects of world_at_fusion.
FusionResult FuseLate(const DetectionSet& ego_set,
                      std::span<const HelperInput> helpers,
                      const WorldScenario& world_at_fusion,
                      double grid_resolution = kDefaultGridResolution);

// |a & b| / |a | b|, 1 when both are empty. Throws InputError on geometry
// mismatch.
double Iou(const OccupancyGrid& a, const OccupancyGrid& b);

// 8-bit PGM with occupied cells white; row 0 of the grid at the bottom.
void WriteGridPgm(const std::string& path, const OccupancyGrid& grid);

// Scenario JSON:
//   {"bounds": {"min": [x, y], "max": [x, y]},
//    "vehicles": [{"id", "pose": [x, y, yaw], "velocity": [vx, vy],
//                  "ego": bool, "exposure": g}],
//    "objects": [{"id", "center": [x, y], "half_extents": [hx, hy],
//                 "velocity": [vx, vy], "occluder": bool}]}
// velocity, ego, exposure and occluder are optional.
WorldScenario ParseScenario(const std::string& json_text);
WorldScenario LoadScenario(const std::string& path);
std::string ScenarioToJson(const WorldScenario& world);

// Blocked-pedestrian layout: the ego's view of a crossing pedestrian is
// shadowed by a stopped vehicle while a helper in the opposite lane sees it.
WorldScenario OcclusionScenario();

struct RandomScenarioOptions {
  int helpers = 2;
  int targets = 8;
  int occluders = 8;
  double object_speed = 0.0;  // m/s, random heading per target
  double exposure_min = 1.0;
  double exposure_max = 1.0;
  bool operator==(const RandomScenarioOptions&) const = default;
};

WorldScenario RandomScenario(uint64_t seed, const RandomScenarioOptions& opts);

}  // namespace cacp

#endif  // CACP_WORLDSIM_H_
