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
#include "cacp/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "cacp/error.h"
#include "cacp/imagery.h"
#include "json.hpp"

namespace cacp {

namespace {

uint64_t Mix(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <typename Fn>
auto Stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

nlohmann::ordered_json JsonNum(double v) {
  if (std::isfinite(v)) return v;
  return Num(v);
}

}  // namespace

WorldScenario ScenarioForRun(const RunConfig& cfg, uint64_t seed) {
  return Stage("scenario", [&] {
    WorldScenario w = cfg.random_scenario
                          ? RandomScenario(seed, *cfg.random_scenario)
                          : LoadScenario(cfg.scenario_path);
    w.Validate();
    return w;
  });
}

OptimizationResult OptimizeLinks(const RunConfig& cfg,
                                 const WorldScenario& world, uint64_t seed) {
  OptimizationResult out;
  const size_t ego = world.EgoIndex();
  std::vector<Vec2> positions;
  for (const Vehicle& v : world.vehicles) positions.push_back(v.pose.position());

  CsiTrace trace = cfg.csi;
  trace.seed = seed;
  out.graph = Stage("build_graph", [&] {
    const Matrix<ChannelState> csi =
        SampleLinkStates(positions, cfg.radio, trace, 0.0);
    return BuildGraph(positions, csi, cfg.comm_range, ego);
  });
  out.selection = Stage("select_links", [&] { return SelectLinks(out.graph); });

  std::vector<size_t> reachable;
  std::vector<double> distances;
  for (size_t i : out.graph.Helpers()) {
    if (!out.selection.reachable[i]) continue;
    reachable.push_back(i);
    distances.push_back(Distance(positions[i], positions[ego]));
  }

  if (!reachable.empty()) {
    out.plan = Stage("optimize_delay", [&] {
      const ImportanceWeights weights =
          DistanceWeights(distances, cfg.delay.distance_floor);
      DelayModel model;
      model.gamma = cfg.delay.gamma;
      model.d_max = cfg.delay.d_max;
      model.rho_min = cfg.delay.rho_min;
      for (size_t i : reachable) {
        model.volumes.push_back(cfg.frame_volume_bits);
        model.path_delay_per_bit.push_back(out.selection.path_delay_per_bit[i]);
      }
      return OptimizeDelay(model, weights, cfg.optimizer);
    });
    out.mean_delay_s = out.plan.mean_delay;
  }

  size_t k = 0;
  for (size_t i : out.graph.Helpers()) {
    HelperMetrics h;
    h.vehicle_id = world.vehicles[i].id;
    h.reachable = out.selection.reachable[i];
    h.hops = out.selection.hops[i];
    if (h.reachable) {
      h.rho = out.plan.rho[k];
      h.delay_s = out.plan.per_helper_delay[k];
      h.latency_s = cfg.base_latency + h.delay_s;
      ++k;
    }
    out.helpers.push_back(h);
  }
  return out;
}

MetricsReport RunScenario(const RunConfig& cfg, uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  MetricsReport report;
  report.seed = seed;

  const WorldScenario world = ScenarioForRun(cfg, seed);
  OptimizationResult opt = OptimizeLinks(cfg, world, seed);
  report.mean_delay_s = opt.mean_delay_s;

  const Vehicle& ego = world.Ego();
  const ViewGeometry view{cfg.imagery.image_size, cfg.imagery.pixel_size};
  const CodecParams codec = cfg.codec.Params();

  const DetectionSet ego_set =
      Stage("sense", [&] { return Sense(world, ego.id, cfg.sensor); });
  const Image ego_image = RenderView(ego_set, view, ego.exposure);
  const Pose2 ego_est = PerturbPose(ego.pose, cfg.sigma_xy, cfg.sigma_yaw,
                                    Mix(seed, static_cast<uint64_t>(ego.id)));

  std::vector<HelperInput> inputs;
  double rate = 0.0, psnr = 0.0, rd = 0.0, pre = 0.0, post = 0.0;
  int used = 0;
  for (HelperMetrics& h : opt.helpers) {
    if (!h.reachable) continue;
    const WorldScenario stale =
        Stage("sense", [&] { return RewindWorld(world, h.latency_s); });
    const Vehicle& helper = stale.FindVehicle(h.vehicle_id);
    const DetectionSet sent = Stage("sense", [&] {
      return Sense(stale, h.vehicle_id, cfg.sensor, -h.latency_s);
    });
    h.detections_sent = static_cast<int>(sent.detections.size());

    const Image raw = RenderView(sent, view, helper.exposure);
    const double rho = std::clamp(h.rho, std::numeric_limits<double>::min(), 1.0);
    const EncodedFrame frame =
        Stage("encode", [&] { return Encode(raw, codec, rho); });
    const Image decoded = Stage("decode", [&] { return Decode(frame, codec); });
    const Image aligned = Stage("align", [&] {
      return AlignAmplitude(decoded, ego_image, cfg.align);
    });

    const double mse = Mse(raw, decoded);
    rate += frame.rate_bits;
    psnr += Psnr(raw, decoded);
    rd += RdLoss(frame.rate_bits, mse, rho, codec.lambda0);
    pre += AmplitudeHistogramDistance(decoded, ego_image);
    post += AmplitudeHistogramDistance(aligned, ego_image);
    ++used;

    // Detections whose footprint washes out in the received view are dropped.
    HelperInput in;
    in.detections.sensor_id = sent.sensor_id;
    in.detections.timestamp = sent.timestamp;
    for (size_t d = 0; d < sent.detections.size(); ++d) {
      const auto before = DetectionContrast(raw, sent, d, view);
      const auto after = DetectionContrast(aligned, sent, d, view);
      const bool keep = !before || !after || *before < 1.0 ||
                        *after >= cfg.imagery.keep_fraction * *before;
      if (keep) in.detections.detections.push_back(sent.detections[d]);
    }
    h.detections_kept = static_cast<int>(in.detections.detections.size());

    const Pose2 helper_est =
        PerturbPose(helper.pose, cfg.sigma_xy, cfg.sigma_yaw,
                    Mix(seed, static_cast<uint64_t>(h.vehicle_id)));
    in.relative_pose = RelativePose(ego_est, helper_est);
    in.latency = h.latency_s;
    inputs.push_back(std::move(in));
  }
  if (used > 0) {
    report.rate_bits = rate / used;
    report.psnr_db = psnr / used;
    report.rd_loss = rd / used;
    report.align_hist_pre = pre / used;
    report.align_hist_post = post / used;
  }

  const FusionResult fusion = Stage("fuse", [&] {
    return FuseLate(ego_set, inputs, world, cfg.grid_resolution);
  });
  report.iou_single = Iou(fusion.ego_only, fusion.truth);
  report.iou_fused = Iou(fusion.fused, fusion.truth);
  report.helpers = std::move(opt.helpers);
  report.wall_time_s = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  return report;
}

std::string ReportToJson(const MetricsReport& r, bool include_timing) {
  nlohmann::ordered_json doc;
  doc["seed"] = r.seed;
  doc["reachable_helpers"] = std::count_if(
      r.helpers.begin(), r.helpers.end(),
      [](const HelperMetrics& h) { return h.reachable; });
  doc["mean_delay_s"] = JsonNum(r.mean_delay_s);
  doc["rate_bits"] = JsonNum(r.rate_bits);
  doc["psnr_db"] = JsonNum(r.psnr_db);
  doc["rd_loss"] = JsonNum(r.rd_loss);
  doc["align_hist_pre"] = JsonNum(r.align_hist_pre);
  doc["align_hist_post"] = JsonNum(r.align_hist_post);
  doc["iou_single"] = JsonNum(r.iou_single);
  doc["iou_fused"] = JsonNum(r.iou_fused);
  nlohmann::ordered_json helpers = nlohmann::ordered_json::array();
  for (const HelperMetrics& h : r.helpers) {
    helpers.push_back({{"vehicle_id", h.vehicle_id},
                       {"reachable", h.reachable},
                       {"hops", h.hops},
                       {"rho", JsonNum(h.rho)},
                       {"delay_s", JsonNum(h.delay_s)},
                       {"latency_s", JsonNum(h.latency_s)},
                       {"detections_sent", h.detections_sent},
                       {"detections_kept", h.detections_kept}});
  }
  doc["helpers"] = helpers;
  if (include_timing) doc["wall_time_s"] = r.wall_time_s;
  return doc.dump(2) + "\n";
}

std::string HelperPlanCsv(const std::vector<HelperMetrics>& helpers) {
  std::string out = "helper_id,rho,delay_s,reachable,hops\n";
  for (const HelperMetrics& h : helpers) {
    out += std::to_string(h.vehicle_id) + "," + Num(h.rho) + "," +
           Num(h.delay_s) + "," + (h.reachable ? "1" : "0") + "," +
           std::to_string(h.hops) + "\n";
  }
  return out;
}

std::vector<std::string> SweepAxes() {
  return {"sigma_xy",      "sigma_yaw",      "base_latency",
          "D_max",         "gamma",          "rho_min",
          "beta",          "mask_radius",    "lambda0",
          "frame_volume_bits", "sensor_range", "comm_range",
          "tx_power",      "bandwidth",      "shadowing_sigma_db",
          "object_speed",  "keep_fraction",  "grid_resolution"};
}

void SetAxis(RunConfig& cfg, const std::string& axis, double value) {
  if (axis == "sigma_xy") cfg.sigma_xy = value;
  else if (axis == "sigma_yaw") cfg.sigma_yaw = value;
  else if (axis == "base_latency") cfg.base_latency = value;
  else if (axis == "D_max") cfg.delay.d_max = value;
  else if (axis == "gamma") cfg.delay.gamma = value;
  else if (axis == "rho_min") cfg.delay.rho_min = value;
  else if (axis == "beta") cfg.align.beta = value;
  else if (axis == "mask_radius") cfg.align.mask_radius = value;
  else if (axis == "lambda0") cfg.codec.lambda0 = value;
  else if (axis == "frame_volume_bits") cfg.frame_volume_bits = value;
  else if (axis == "sensor_range") cfg.sensor.max_range = value;
  else if (axis == "comm_range") cfg.comm_range = value;
  else if (axis == "tx_power") cfg.radio.tx_power = value;
  else if (axis == "bandwidth") cfg.radio.bandwidth = value;
  else if (axis == "shadowing_sigma_db") cfg.csi.shadowing_sigma_db = value;
  else if (axis == "keep_fraction") cfg.imagery.keep_fraction = value;
  else if (axis == "grid_resolution") cfg.grid_resolution = value;
  else if (axis == "object_speed") {
    if (!cfg.random_scenario) {
      throw ConfigError("axis object_speed needs a random_scenario config");
    }
    cfg.random_scenario->object_speed = value;
  } else {
    throw ConfigError("unknown sweep axis \"" + axis + "\"");
  }
  cfg.Validate();
}

std::string SweepCsvHeader() {
  return "axis,value,seed,reachable_helpers,mean_delay_s,rate_bits,psnr_db,"
         "rd_loss,align_hist_pre,align_hist_post,iou_single,iou_fused\n";
}

std::string Sweep(const RunConfig& cfg, const std::string& axis,
                  const std::vector<double>& values, unsigned threads) {
  const auto axes = SweepAxes();
  if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
    throw ConfigError("unknown sweep axis \"" + axis + "\"");
  }
  // Fail on bad values before any work starts.
  std::vector<RunConfig> configs;
  for (double v : values) {
    configs.push_back(cfg);
    SetAxis(configs.back(), axis, v);
  }

  const size_t n_seeds = cfg.seeds.size();
  const size_t n_tasks = values.size() * n_seeds;
  std::vector<std::string> rows(n_tasks);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<size_t>(threads, std::max<size_t>(n_tasks, 1)));

  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const size_t t = next.fetch_add(1);
      if (t >= n_tasks) return;
      const size_t vi = t / n_seeds;
      const uint64_t seed = cfg.seeds[t % n_seeds];
      try {
        const MetricsReport r = RunScenario(configs[vi], seed);
        const long reachable = std::count_if(
            r.helpers.begin(), r.helpers.end(),
            [](const HelperMetrics& h) { return h.reachable; });
        rows[t] = CsvEscape(axis) + "," + Num(values[vi]) + "," +
                  std::to_string(seed) + "," + std::to_string(reachable) +
                  "," + Num(r.mean_delay_s) + "," + Num(r.rate_bits) + "," +
                  Num(r.psnr_db) + "," + Num(r.rd_loss) + "," +
                  Num(r.align_hist_pre) + "," + Num(r.align_hist_post) + "," +
                  Num(r.iou_single) + "," + Num(r.iou_fused) + "\n";
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n_tasks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::string out = SweepCsvHeader();
  for (const std::string& row : rows) out += row;
  return out;
}

std::string CsvEscape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace cacp
