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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cacp/error.h"
#include "cacp/imagery.h"
#include "cacp/worldsim.h"

namespace cacp {
namespace {

constexpr double kPi = std::numbers::pi;

bool Detected(const DetectionSet& s, int object_id) {
  for (const Detection& d : s.detections) {
    if (d.object_id == object_id) return true;
  }
  return false;
}

WorldScenario Lone(Vec2 center, Vec2 half = {1.0, 1.0}) {
  WorldScenario w;
  w.bounds = {{-200, -200}, {200, 200}};
  w.vehicles = {{0, {0, 0, 0}, {0, 0}, true, 1.0}};
  w.objects = {{1, {center, half}, {0, 0}, false}};
  return w;
}

// ---------------------------------------------------------------- sensing

TEST(Sense, OcclusionScenario) {
  const WorldScenario w = OcclusionScenario();
  ASSERT_NO_THROW(w.Validate());
  const DetectionSet ego = Sense(w, 0, SensorParams{});
  const DetectionSet helper = Sense(w, 1, SensorParams{});
  EXPECT_FALSE(Detected(ego, 2));  // pedestrian behind the stopped car
  EXPECT_TRUE(Detected(ego, 1));
  EXPECT_TRUE(Detected(ego, 3));
  EXPECT_TRUE(Detected(helper, 2));
  for (const Detection& d : ego.detections) EXPECT_EQ(d.occluder, d.object_id == 1);
}

TEST(Sense, RangeLimit) {
  EXPECT_FALSE(Detected(Sense(Lone({100, 0}), 0, SensorParams{}), 1));
  // Nearest boundary point just beyond / within the 90 m range.
  EXPECT_FALSE(Detected(Sense(Lone({91.5, 0}), 0, SensorParams{}), 1));
  EXPECT_TRUE(Detected(Sense(Lone({90.5, 0}), 0, SensorParams{}), 1));
}

TEST(Sense, LoneObjectAheadInLocalFrame) {
  WorldScenario w = Lone({0, 10});
  w.vehicles[0].pose = {0, 0, kPi / 2};
  const DetectionSet s = Sense(w, 0, SensorParams{}, 2.5);
  ASSERT_EQ(s.detections.size(), 1u);
  EXPECT_EQ(s.sensor_id, 0);
  EXPECT_EQ(s.timestamp, 2.5);
  const Detection& d = s.detections[0];
  EXPECT_NEAR(d.observed.center.x, 10.0, 1e-9);
  EXPECT_NEAR(d.observed.center.y, 0.0, 1e-9);
  EXPECT_NEAR(WrapAngle(d.observed.angle + kPi / 2), 0.0, 1e-12);
  EXPECT_GE(d.hits, 3);
}

TEST(Sense, FieldOfView) {
  SensorParams p;
  p.fov = kPi / 2;
  EXPECT_TRUE(Detected(Sense(Lone({20, 0}), 0, p), 1));
  EXPECT_FALSE(Detected(Sense(Lone({-20, 0}), 0, p), 1));
  EXPECT_FALSE(Detected(Sense(Lone({0, 20}), 0, p), 1));
}

TEST(Sense, MinHits) {
  SensorParams p;
  p.angular_resolution = 0.5 * kPi / 180.0;  // 0.7 m between rays at 80 m
  EXPECT_FALSE(Detected(Sense(Lone({80, 0.2}, {0.4, 0.4}), 0, p), 1));
  p.min_hits = 1;
  EXPECT_TRUE(Detected(Sense(Lone({80, 0.2}, {0.4, 0.4}), 0, p), 1));
}

TEST(Sense, FullyShadowedNeverDetected) {
  WorldScenario w = Lone({30, 0}, {0.5, 0.5});
  w.objects.push_back({2, {{10, 0}, {1.0, 3.0}}, {0, 0}, true});
  const DetectionSet s = Sense(w, 0, SensorParams{});
  EXPECT_FALSE(Detected(s, 1));
  EXPECT_TRUE(Detected(s, 2));
}

TEST(SensorParams, Validation) {
  SensorParams p;
  p.fov = 7.0;
  EXPECT_THROW(p.Validate(), Error);
  p = SensorParams{};
  p.min_hits = 0;
  EXPECT_THROW(p.Validate(), Error);
  p = SensorParams{};
  p.max_range = 0.0;
  EXPECT_THROW(p.Validate(), Error);
}

// ---------------------------------------------------------------- poses

TEST(PerturbPose, ZeroSigmaAndDeterminism) {
  const Pose2 p{3, 4, 0.5};
  EXPECT_EQ(PerturbPose(p, 0.0, 0.0, 17), p);
  EXPECT_EQ(PerturbPose(p, 1.0, 0.1, 17), PerturbPose(p, 1.0, 0.1, 17));
  EXPECT_NE(PerturbPose(p, 1.0, 0.1, 17), PerturbPose(p, 1.0, 0.1, 18));
}

TEST(PerturbPose, SampleStd) {
  double sx = 0, sxx = 0, sy = 0, syy = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const Pose2 q = PerturbPose({0, 0, 0}, 0.5, 0.0, static_cast<uint64_t>(k));
    sx += q.x;
    sxx += q.x * q.x;
    sy += q.y;
    syy += q.y * q.y;
  }
  const double std_x = std::sqrt(sxx / n - (sx / n) * (sx / n));
  const double std_y = std::sqrt(syy / n - (sy / n) * (sy / n));
  EXPECT_NEAR(std_x, 0.5, 0.025);
  EXPECT_NEAR(std_y, 0.5, 0.025);
}

// ---------------------------------------------------------------- motion

TEST(AdvanceWorld, Motion) {
  WorldScenario w = Lone({0, 20});
  w.objects[0].velocity = {10, 0};
  w.vehicles[0].velocity = {0, 1};
  EXPECT_EQ(AdvanceWorld(w, 0.0), w);
  const WorldScenario a = AdvanceWorld(w, 0.1313);
  EXPECT_NEAR(a.objects[0].shape.center.x, 1.313, 1e-12);
  EXPECT_NEAR(a.vehicles[0].pose.y, 0.1313, 1e-12);
  const WorldScenario b = AdvanceWorld(AdvanceWorld(w, 0.3), 0.45);
  const WorldScenario c = AdvanceWorld(w, 0.75);
  EXPECT_NEAR(b.objects[0].shape.center.x, c.objects[0].shape.center.x, 1e-12);
  EXPECT_THROW(AdvanceWorld(w, -1.0), DomainError);
  const WorldScenario r = RewindWorld(w, 0.5);
  EXPECT_NEAR(r.objects[0].shape.center.x, -5.0, 1e-12);
  EXPECT_EQ(r.objects[0].velocity, w.objects[0].velocity);
}

// ---------------------------------------------------------------- grids

TEST(OccupancyGrid, RasterizeMatchesCellCenterScan) {
  const Bounds b{{-10, -10}, {10, 10}};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-8, 8), h(0.2, 3), a(-kPi, kPi);
  for (int k = 0; k < 50; ++k) {
    const OrientedRect r{{u(rng), u(rng)}, {h(rng), h(rng)}, a(rng)};
    OccupancyGrid g(b, 0.5);
    g.Rasterize(r);
    for (int row = 0; row < g.rows(); ++row) {
      for (int col = 0; col < g.cols(); ++col) {
        EXPECT_EQ(g.at(col, row), r.Contains(g.CellCenter(col, row)));
      }
    }
  }
}

TEST(OccupancyGrid, BoundaryTiesCountInside) {
  OccupancyGrid g({{0, 0}, {4, 4}}, 1.0);
  // Edges pass exactly through the centers at 0.5 and 2.5.
  g.Rasterize(ToOriented(Rect{{1.5, 1.5}, {1.0, 1.0}}));
  EXPECT_EQ(g.Count(), 9u);
  EXPECT_THROW(OccupancyGrid({{0, 0}, {1, 1}}, 0.0), InputError);
}

TEST(Iou, Values) {
  const Bounds b{{0, 0}, {4, 1}};
  OccupancyGrid a(b, 1.0), c(b, 1.0), e(b, 1.0);
  EXPECT_EQ(Iou(a, c), 1.0);
  a.set(0, 0, true);
  a.set(1, 0, true);
  EXPECT_EQ(Iou(a, a), 1.0);
  c.set(2, 0, true);
  c.set(3, 0, true);
  EXPECT_EQ(Iou(a, c), 0.0);
  e.set(1, 0, true);
  e.set(2, 0, true);
  EXPECT_DOUBLE_EQ(Iou(a, e), 1.0 / 3.0);
  EXPECT_THROW(Iou(a, OccupancyGrid(b, 0.5)), InputError);
}

// ---------------------------------------------------------------- fusion

TEST(FuseLate, ZeroErrorFusionIsSuperset) {
  const WorldScenario w = OcclusionScenario();
  const DetectionSet ego = Sense(w, 0, SensorParams{});
  HelperInput h;
  h.detections = Sense(w, 1, SensorParams{});
  h.relative_pose = RelativePose(w.vehicles[0].pose, w.vehicles[1].pose);
  const FusionResult r = FuseLate(ego, std::vector<HelperInput>{h}, w);
  for (size_t i = 0; i < r.fused.cells().size(); ++i) {
    if (r.ego_only.cells()[i]) EXPECT_TRUE(r.fused.cells()[i]);
  }
  EXPECT_GT(Iou(r.fused, r.truth), Iou(r.ego_only, r.truth));
  EXPECT_DOUBLE_EQ(Iou(r.fused, r.truth), 1.0);
}

TEST(FuseLate, OccludersAreNotFused) {
  const WorldScenario w = OcclusionScenario();
  const DetectionSet ego = Sense(w, 0, SensorParams{});
  const FusionResult r = FuseLate(ego, {}, w);
  OccupancyGrid occluder(w.bounds, kDefaultGridResolution);
  occluder.Rasterize(ToOriented(w.objects[0].shape));
  for (size_t i = 0; i < r.ego_only.cells().size(); ++i) {
    if (occluder.cells()[i]) EXPECT_FALSE(r.ego_only.cells()[i]);
  }
}

double CentroidX(const OccupancyGrid& g) {
  double sum = 0.0;
  int n = 0;
  for (int row = 0; row < g.rows(); ++row) {
    for (int col = 0; col < g.cols(); ++col) {
      if (g.at(col, row)) {
        sum += g.CellCenter(col, row).x;
        ++n;
      }
    }
  }
  return sum / n;
}

TEST(FuseLate, StaleHelperDataIsDisplaced) {
  WorldScenario w;
  w.bounds = {{-10, -10}, {40, 20}};
  w.vehicles = {{0, {0, 0, 0}, {0, 0}, true, 1.0},
                {1, {20, 10, -kPi / 2}, {0, 0}, false, 1.0}};
  w.objects = {{7, {{20, 0}, {0.4, 0.4}}, {2, 0}, false}};
  const double latency = 0.5;
  const WorldScenario stale = RewindWorld(w, latency);
  HelperInput h;
  h.detections = Sense(stale, 1, SensorParams{}, -latency);
  ASSERT_TRUE(Detected(h.detections, 7));
  h.relative_pose = RelativePose(w.vehicles[0].pose, stale.vehicles[1].pose);
  h.latency = latency;
  const FusionResult r = FuseLate(DetectionSet{}, std::vector<HelperInput>{h}, w);
  EXPECT_NEAR(CentroidX(r.truth) - CentroidX(r.fused), 1.0, 1e-9);
}

TEST(FuseLate, RejectsBadResolution) {
  EXPECT_THROW(FuseLate(DetectionSet{}, {}, OcclusionScenario(), 0.0), InputError);
}

// ---------------------------------------------------------------- scenarios

TEST(Scenario, JsonRoundTrip) {
  WorldScenario w = OcclusionScenario();
  w.vehicles[1].velocity = {1.5, -0.25};
  w.vehicles[1].exposure = 0.6;
  w.objects[1].velocity = {0.0, 2.0};
  const WorldScenario back = ParseScenario(ScenarioToJson(w));
  EXPECT_EQ(back, w);
}

TEST(Scenario, RejectsUnknownKeysAndBadWorlds) {
  EXPECT_THROW(ParseScenario(R"({"bounds": {"min": [0,0], "max": [1,1]},
      "vehicles": [], "objects": [], "weather": 1})"), ConfigError);
  try {
    ParseScenario(R"({"bounds": {"min": [-5,-5], "max": [5,5]},
      "vehicles": [{"id": 0, "pose": [0,0,0], "ego": true, "speed": 3}], "objects": []})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("speed"), std::string::npos);
  }
  WorldScenario two_egos = OcclusionScenario();
  two_egos.vehicles[1].is_ego = true;
  EXPECT_THROW(two_egos.Validate(), ConfigError);
  WorldScenario outside = OcclusionScenario();
  outside.objects[0].shape.center = {100, 0};
  EXPECT_THROW(outside.Validate(), ConfigError);
  EXPECT_THROW(LoadScenario("/nonexistent/scenario.json"), ConfigError);
}

TEST(Scenario, RandomIsDeterministicAndValid) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    RandomScenarioOptions o;
    o.object_speed = 2.0;
    const WorldScenario a = RandomScenario(seed, o);
    EXPECT_EQ(a, RandomScenario(seed, o));
    EXPECT_NO_THROW(a.Validate());
    EXPECT_EQ(a.vehicles.size(), 1u + o.helpers);
    EXPECT_NO_THROW(AdvanceWorld(a, 1.0).Validate());
  }
}

// ---------------------------------------------------------------- imagery

TEST(Imagery, RenderAndContrast) {
  const WorldScenario w = OcclusionScenario();
  const DetectionSet s = Sense(w, 1, SensorParams{});
  const ViewGeometry view;
  const Image img = RenderView(s, view, 1.0);
  EXPECT_EQ(img.width(), view.size);
  EXPECT_EQ(img.height(), view.size);
  for (double v : img.samples()) EXPECT_TRUE(v >= 0.0 && v <= 255.0);
  for (size_t i = 0; i < s.detections.size(); ++i) {
    const auto c = DetectionContrast(img, s, i, view);
    if (s.detections[i].object_id == 2) {
      ASSERT_TRUE(c.has_value());
      EXPECT_GT(*c, 50.0);
    }
  }
  // Exposure scales brightness.
  const Image dark = RenderView(s, view, 0.5);
  EXPECT_NEAR(dark.at(0, 0, 0), 0.5 * img.at(0, 0, 0), 1e-9);
}

TEST(Imagery, ContrastOutsideViewIsEmpty) {
  DetectionSet s;
  s.detections.push_back({1, {{500, 0}, {1, 1}, 0}, false, 5});
  EXPECT_FALSE(DetectionContrast(RenderView(s, {}, 1.0), s, 0, {}).has_value());
}

TEST(Imagery, PixelCenters) {
  const ViewGeometry v{4, 1.0};
  const Vec2 c = v.PixelCenter(0, 0);
  EXPECT_DOUBLE_EQ(c.x, -1.5);
  EXPECT_DOUBLE_EQ(c.y, 1.5);
  const Vec2 d = v.PixelCenter(3, 3);
  EXPECT_DOUBLE_EQ(d.x, 1.5);
  EXPECT_DOUBLE_EQ(d.y, -1.5);
}

}  // namespace
}  // namespace cacp
