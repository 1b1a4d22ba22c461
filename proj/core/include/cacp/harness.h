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
#ifndef CACP_HARNESS_H_
#define CACP_HARNESS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cacp/channel.h"
#include "cacp/codec.h"
#include "cacp/netopt.h"
#include "cacp/specalign.h"
#include "cacp/worldsim.h"

namespace cacp {

// LTE-V2X average latency floor, seconds.
inline constexpr double kDefaultBaseLatency = 0.13130;
// 100,000 points x 16 bytes per LiDAR frame.
inline constexpr double kDefaultFrameVolumeBits = 1.28e7;

struct DelayConfig {
  double gamma = 1.0;
  double d_max = 4.0;
  double rho_min = 0.01;
  double distance_floor = kDefaultDistanceFloor;
  bool operator==(const DelayConfig&) const = default;
};

struct ImageryConfig {
  int image_size = 256;      // pixels per side of each rendered view
  double pixel_size = 0.25;  // m
  // A helper detection survives transmission when its contrast in the
  // decoded, aligned view keeps at least this fraction of the original.
  double keep_fraction = 0.5;
  bool operator==(const ImageryConfig&) const = default;
};

struct CodecConfig {
  bool unit_table = false;  // quantization table of all ones
  std::optional<QuantTable> qtable;  // explicit table, overrides unit_table
  double lambda0 = kDefaultLambda0;
  bool operator==(const CodecConfig&) const = default;

  CodecParams Params() const;
};

struct RunConfig {
  // Exactly one of scenario_path / random_scenario is set.
  std::string scenario_path;
  std::optional<RandomScenarioOptions> random_scenario;

  RadioParams radio;
  double comm_range = 300.0;  // m
  CsiTrace csi;               // csi.seed is replaced by the run seed
  DelayConfig delay;
  GradientOptions optimizer;
  SensorParams sensor;
  double sigma_xy = 0.0;   // m
  double sigma_yaw = 0.0;  // rad
  AlignParams align;
  CodecConfig codec;
  ImageryConfig imagery;
  double grid_resolution = kDefaultGridResolution;
  double base_latency = kDefaultBaseLatency;
  double frame_volume_bits = kDefaultFrameVolumeBits;
  std::vector<uint64_t> seeds = {0};

  // Optional sweep specification used when the CLI does not pass one.
  std::string sweep_axis;
  std::vector<double> sweep_values;

  // Throws ConfigError naming the offending field.
  void Validate() const;
  bool operator==(const RunConfig& o) const;
};

// Parses and validates a configuration. Relative scenario paths resolve
// against base_dir. Unknown keys throw ConfigError naming the key.
RunConfig ParseConfig(const std::string& json_text,
                      const std::string& base_dir = ".");
// Throws ConfigError when the file is missing or invalid.
RunConfig LoadConfig(const std::string& path);
std::string ConfigToJson(const RunConfig& cfg);

struct HelperMetrics {
  int vehicle_id = 0;
  bool reachable = false;
  int hops = 0;
  double rho = 0.0;
  double delay_s = 0.0;    // transmission only
  double latency_s = 0.0;  // base latency + transmission
  int detections_sent = 0;
  int detections_kept = 0;
};

struct MetricsReport {
  uint64_t seed = 0;
  std::vector<HelperMetrics> helpers;
  double mean_delay_s = 0.0;
  // Codec and alignment figures are averaged over reachable helpers.
  double rate_bits = 0.0;
  double psnr_db = 0.0;
  double rd_loss = 0.0;
  double align_hist_pre = 0.0;
  double align_hist_post = 0.0;
  double iou_single = 0.0;
  double iou_fused = 0.0;
  double wall_time_s = 0.0;
};

// Only the per-node link and plan information of one configuration/seed.
struct OptimizationResult {
  std::vector<HelperMetrics> helpers;
  double mean_delay_s = 0.0;
  CommGraph graph;
  LinkSelection selection;
  CompressionPlan plan;
};

WorldScenario ScenarioForRun(const RunConfig& cfg, uint64_t seed);

// CSI sampling, graph construction, link selection and ratio optimization.
OptimizationResult OptimizeLinks(const RunConfig& cfg,
                                 const WorldScenario& world, uint64_t seed);

// Full pipeline for one seed. Stage failures surface as StageError.
MetricsReport RunScenario(const RunConfig& cfg, uint64_t seed);

// JSON; wall_time_s is written only when include_timing is set.
std::string ReportToJson(const MetricsReport& report,
                         bool include_timing = false);

// helper_id,rho,delay_s,reachable,hops
std::string HelperPlanCsv(const std::vector<HelperMetrics>& helpers);

// Names accepted by Sweep.
std::vector<std::string> SweepAxes();
// Throws ConfigError for unknown axes or out-of-range values.
void SetAxis(RunConfig& cfg, const std::string& axis, double value);

std::string SweepCsvHeader();

// One RunScenario per (value, seed), value-major then seed-minor,
// independent of the number of worker threads. threads = 0 picks the
// hardware concurrency.
std::string Sweep(const RunConfig& cfg, const std::string& axis,
                  const std::vector<double>& values, unsigned threads = 0);

// RFC 4180 field quoting.
std::string CsvEscape(const std::string& field);

}  // namespace cacp

#endif  // CACP_HARNESS_H_
