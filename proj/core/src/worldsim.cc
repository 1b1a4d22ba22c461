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
#include "cacp/worldsim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "cacp/error.h"

namespace cacp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool Finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

bool RectInside(const Rect& r, const Bounds& b) {
  return b.Contains(r.center - r.half_extents) &&
         b.Contains(r.center + r.half_extents);
}

bool StrictlyInside(Vec2 p, const Rect& r) {
  return std::abs(p.x - r.center.x) < r.half_extents.x &&
         std::abs(p.y - r.center.y) < r.half_extents.y;
}

}  // namespace

void WorldScenario::Validate() const {
  if (!(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y) ||
      !Finite(bounds.min) || !Finite(bounds.max)) {
    throw ConfigError("scenario bounds must be finite with min < max");
  }
  int egos = 0;
  std::set<int> ids;
  for (const Vehicle& v : vehicles) {
    if (v.is_ego) ++egos;
    if (!ids.insert(v.id).second) {
      throw ConfigError("duplicate vehicle id " + std::to_string(v.id));
    }
    if (!Finite(v.pose.position()) || !std::isfinite(v.pose.yaw) ||
        !Finite(v.velocity)) {
      throw ConfigError("vehicle " + std::to_string(v.id) + " is not finite");
    }
    if (!bounds.Contains(v.pose.position())) {
      throw ConfigError("vehicle " + std::to_string(v.id) + " is out of bounds");
    }
    if (!(v.exposure > 0.0)) {
      throw ConfigError("vehicle " + std::to_string(v.id) +
                        " needs a positive exposure");
    }
  }
  if (egos != 1) throw ConfigError("scenario needs exactly one ego vehicle");
  std::set<int> object_ids;
  for (const WorldObject& o : objects) {
    const std::string name = "object " + std::to_string(o.id);
    if (!object_ids.insert(o.id).second) throw ConfigError("duplicate " + name);
    if (!(o.shape.half_extents.x > 0.0 && o.shape.half_extents.y > 0.0)) {
      throw ConfigError(name + " needs positive half-extents");
    }
    if (!Finite(o.shape.center) || !Finite(o.shape.half_extents) ||
        !Finite(o.velocity)) {
      throw ConfigError(name + " is not finite");
    }
    if (!RectInside(o.shape, bounds)) throw ConfigError(name + " is out of bounds");
    for (const Vehicle& v : vehicles) {
      if (StrictlyInside(v.pose.position(), o.shape)) {
        throw ConfigError("vehicle " + std::to_string(v.id) + " lies inside " +
                          name);
      }
    }
  }
}

size_t WorldScenario::EgoIndex() const {
  for (size_t i = 0; i < vehicles.size(); ++i) {
    if (vehicles[i].is_ego) return i;
  }
  throw ConfigError("scenario has no ego vehicle");
}

const Vehicle& WorldScenario::Ego() const { return vehicles[EgoIndex()]; }

const Vehicle& WorldScenario::FindVehicle(int id) const {
  for (const Vehicle& v : vehicles) {
    if (v.id == id) return v;
  }
  throw InputError("unknown vehicle id " + std::to_string(id));
}

void SensorParams::Validate() const {
  if (!(max_range > 0.0)) throw DomainError("sensor max_range must be positive");
  if (!(fov > 0.0 && fov <= kTwoPi + 1e-12)) {
    throw DomainError("sensor fov must lie in (0, 2 pi]");
  }
  if (!(angular_resolution > 0.0 && angular_resolution <= fov)) {
    throw DomainError("angular_resolution must lie in (0, fov]");
  }
  if (min_hits < 1) throw DomainError("min_hits must be at least 1");
}

DetectionSet Sense(const WorldScenario& world, int vehicle_id,
                   const SensorParams& params, double timestamp) {
  params.Validate();
  const Vehicle& sensor = world.FindVehicle(vehicle_id);
  const Vec2 origin = sensor.pose.position();

  const bool full_circle = params.fov >= kTwoPi - 1e-12;
  const int rays =
      full_circle
          ? static_cast<int>(std::round(kTwoPi / params.angular_resolution))
          : static_cast<int>(std::floor(params.fov / params.angular_resolution +
                                        1e-9)) + 1;
  const double start =
      full_circle ? sensor.pose.yaw : sensor.pose.yaw - params.fov / 2.0;

  std::vector<int> hits(world.objects.size(), 0);
  for (int k = 0; k < rays; ++k) {
    const double angle = start + k * params.angular_resolution;
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    int nearest = -1;
    double nearest_t = 0.0;
    for (size_t j = 0; j < world.objects.size(); ++j) {
      const double t = RayRectHit(origin, dir, world.objects[j].shape);
      if (t < 0.0 || t > params.max_range) continue;
      if (nearest < 0 || t < nearest_t) {
        nearest = static_cast<int>(j);
        nearest_t = t;
      }
    }
    if (nearest >= 0) ++hits[nearest];
  }

  DetectionSet out;
  out.sensor_id = vehicle_id;
  out.timestamp = timestamp;
  for (size_t j = 0; j < world.objects.size(); ++j) {
    if (hits[j] < params.min_hits) continue;
    const WorldObject& o = world.objects[j];
    out.detections.push_back(
        {o.id, InverseTransformRect(sensor.pose, ToOriented(o.shape)),
         o.occluder, hits[j]});
  }
  return out;
}

Pose2 PerturbPose(const Pose2& pose, double sigma_xy, double sigma_yaw,
                  uint64_t seed) {
  if (!(sigma_xy >= 0.0) || !(sigma_yaw >= 0.0)) {
    throw DomainError("pose noise sigmas must be non-negative");
  }
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dx = normal(engine);
  const double dy = normal(engine);
  const double dyaw = normal(engine);
  return {pose.x + sigma_xy * dx, pose.y + sigma_xy * dy,
          pose.yaw + sigma_yaw * dyaw};
}

WorldScenario AdvanceWorld(const WorldScenario& world, double dt) {
  if (!(dt >= 0.0)) throw DomainError("dt must be non-negative");
  WorldScenario out = world;
  for (Vehicle& v : out.vehicles) {
    v.pose.x += v.velocity.x * dt;
    v.pose.y += v.velocity.y * dt;
  }
  for (WorldObject& o : out.objects) o.shape.center = o.shape.center + o.velocity * dt;
  return out;
}

WorldScenario RewindWorld(const WorldScenario& world, double dt) {
  WorldScenario reversed = world;
  for (Vehicle& v : reversed.vehicles) v.velocity = v.velocity * -1.0;
  for (WorldObject& o : reversed.objects) o.velocity = o.velocity * -1.0;
  WorldScenario out = AdvanceWorld(reversed, dt);
  for (size_t i = 0; i < out.vehicles.size(); ++i) {
    out.vehicles[i].velocity = world.vehicles[i].velocity;
  }
  for (size_t i = 0; i < out.objects.size(); ++i) {
    out.objects[i].velocity = world.objects[i].velocity;
  }
  return out;
}

OccupancyGrid::OccupancyGrid(const Bounds& bounds, double resolution)
    : resolution_(resolution), origin_(bounds.min) {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw InputError("grid resolution must be positive");
  }
  cols_ = std::max(1, static_cast<int>(std::ceil(
                          (bounds.max.x - bounds.min.x) / resolution - 1e-9)));
  rows_ = std::max(1, static_cast<int>(std::ceil(
                          (bounds.max.y - bounds.min.y) / resolution - 1e-9)));
  cells_.assign(static_cast<size_t>(cols_) * rows_, 0);
}

void OccupancyGrid::Rasterize(const OrientedRect& rect) {
  const double c = std::abs(std::cos(rect.angle));
  const double s = std::abs(std::sin(rect.angle));
  const double ex = c * rect.half_extents.x + s * rect.half_extents.y;
  const double ey = s * rect.half_extents.x + c * rect.half_extents.y;
  // Cell centers sit at origin + (i + 0.5) * resolution.
  const int col_lo = std::max(
      0, static_cast<int>(std::floor((rect.center.x - ex - origin_.x) / resolution_ - 0.5)));
  const int col_hi = std::min(
      cols_ - 1, static_cast<int>(std::ceil((rect.center.x + ex - origin_.x) / resolution_ - 0.5)));
  const int row_lo = std::max(
      0, static_cast<int>(std::floor((rect.center.y - ey - origin_.y) / resolution_ - 0.5)));
  const int row_hi = std::min(
      rows_ - 1, static_cast<int>(std::ceil((rect.center.y + ey - origin_.y) / resolution_ - 0.5)));
  for (int row = row_lo; row <= row_hi; ++row) {
    for (int col = col_lo; col <= col_hi; ++col) {
      if (rect.Contains(CellCenter(col, row))) cells_[Index(col, row)] = 1;
    }
  }
}

size_t OccupancyGrid::Count() const {
  return static_cast<size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

bool OccupancyGrid::SameGeometry(const OccupancyGrid& o) const {
  return resolution_ == o.resolution_ && origin_ == o.origin_ &&
         cols_ == o.cols_ && rows_ == o.rows_;
}

FusionResult FuseLate(const DetectionSet& ego_set,
                      std::span<const HelperInput> helpers,
                      const WorldScenario& world_at_fusion,
                      double grid_resolution) {
  if (!(grid_resolution > 0.0)) {
    throw InputError("grid resolution must be positive");
  }
  const Pose2 ego_pose = world_at_fusion.Ego().pose;
  FusionResult r{OccupancyGrid(world_at_fusion.bounds, grid_resolution),
                 OccupancyGrid(world_at_fusion.bounds, grid_resolution),
                 OccupancyGrid(world_at_fusion.bounds, grid_resolution)};
  for (const Detection& d : ego_set.detections) {
    if (d.occluder) continue;
    const OrientedRect world_rect = TransformRect(ego_pose, d.observed);
    r.ego_only.Rasterize(world_rect);
    r.fused.Rasterize(world_rect);
  }
  for (const HelperInput& h : helpers) {
    const Pose2 helper_in_world = Compose(ego_pose, h.relative_pose);
    for (const Detection& d : h.detections.detections) {
      if (d.occluder) continue;
      r.fused.Rasterize(TransformRect(helper_in_world, d.observed));
    }
  }
  for (const WorldObject& o : world_at_fusion.objects) {
    if (!o.occluder) r.truth.Rasterize(ToOriented(o.shape));
  }
  return r;
}

double Iou(const OccupancyGrid& a, const OccupancyGrid& b) {
  if (!a.SameGeometry(b)) throw InputError("grid geometries differ");
  size_t inter = 0;
  size_t uni = 0;
  const auto& ca = a.cells();
  const auto& cb = b.cells();
  for (size_t i = 0; i < ca.size(); ++i) {
    inter += (ca[i] & cb[i]);
    uni += (ca[i] | cb[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

void WriteGridPgm(const std::string& path, const OccupancyGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "P5\n" << grid.cols() << " " << grid.rows() << "\n255\n";
  for (int row = grid.rows() - 1; row >= 0; --row) {
    for (int col = 0; col < grid.cols(); ++col) {
      out.put(grid.at(col, row) ? static_cast<char>(255) : static_cast<char>(0));
    }
  }
  if (!out) throw InputError("failed writing " + path);
}

WorldScenario OcclusionScenario() {
  WorldScenario w;
  w.bounds = {{-10.0, -20.0}, {60.0, 20.0}};
  w.vehicles = {
      {0, {0.0, 0.0, 0.0}, {0.0, 0.0}, true, 1.0},
      {1, {40.0, 8.0, std::numbers::pi}, {0.0, 0.0}, false, 1.0},
  };
  w.objects = {
      // Stopped vehicle in the near lane that hides the pedestrian.
      {1, {{10.0, 3.0}, {2.5, 1.0}}, {0.0, 0.0}, true},
      // Crossing pedestrian.
      {2, {{20.0, 6.0}, {0.4, 0.4}}, {0.0, 0.0}, false},
      // Lead vehicle visible to both.
      {3, {{30.0, -0.2}, {2.2, 0.9}}, {0.0, 0.0}, false},
  };
  return w;
}

WorldScenario RandomScenario(uint64_t seed, const RandomScenarioOptions& opts) {
  if (opts.helpers < 0 || opts.targets < 0 || opts.occluders < 0 ||
      !(opts.object_speed >= 0.0) || !(opts.exposure_min > 0.0) ||
      !(opts.exposure_max >= opts.exposure_min)) {
    throw ConfigError("invalid random scenario options");
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  WorldScenario w;
  w.bounds = {{-80.0, -50.0}, {80.0, 50.0}};
  w.vehicles.push_back({0, {0.0, 0.0, 0.0}, {0.0, 0.0}, true, 1.0});
  for (int h = 0; h < opts.helpers; ++h) {
    Vec2 p;
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      p = {uniform(-60.0, 60.0), uniform(-35.0, 35.0)};
      ok = true;
      for (const Vehicle& v : w.vehicles) ok = ok && Distance(p, v.pose.position()) >= 5.0;
    }
    const double yaw = uniform(-std::numbers::pi, std::numbers::pi);
    const double exposure = opts.exposure_max > opts.exposure_min
                                ? uniform(opts.exposure_min, opts.exposure_max)
                                : opts.exposure_min;
    w.vehicles.push_back({h + 1, {p.x, p.y, yaw}, {0.0, 0.0}, false, exposure});
  }

  // Objects keep clear of every vehicle, with room for their motion.
  auto clear_of_vehicles = [&](const Rect& r, double margin) {
    for (const Vehicle& v : w.vehicles) {
      const Rect grown{r.center, r.half_extents + Vec2{margin, margin}};
      if (StrictlyInside(v.pose.position(), grown)) return false;
    }
    return true;
  };
  int next_id = 100;
  for (int k = 0; k < opts.occluders; ++k) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const bool along_x = uniform(0.0, 1.0) < 0.5;
      const Rect r{{uniform(-60.0, 60.0), uniform(-35.0, 35.0)},
                   along_x ? Vec2{2.2, 1.0} : Vec2{1.0, 2.2}};
      if (clear_of_vehicles(r, 1.5)) {
        w.objects.push_back({next_id++, r, {0.0, 0.0}, true});
        break;
      }
    }
  }
  const double motion_margin = 1.5 + 3.0 * opts.object_speed;
  for (int k = 0; k < opts.targets; ++k) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const bool pedestrian = uniform(0.0, 1.0) < 0.5;
      const Vec2 half = pedestrian ? Vec2{0.4, 0.4} : Vec2{2.2, 0.9};
      const Rect r{{uniform(-65.0, 65.0), uniform(-40.0, 40.0)}, half};
      const double heading = uniform(-std::numbers::pi, std::numbers::pi);
      if (clear_of_vehicles(r, motion_margin)) {
        const Vec2 vel{opts.object_speed * std::cos(heading),
                       opts.object_speed * std::sin(heading)};
        w.objects.push_back({next_id++, r, vel, false});
        break;
      }
    }
  }
  return w;
}

}  // namespace cacp
