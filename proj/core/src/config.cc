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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cacp/error.h"
#include "cacp/harness.h"
#include "json_util.h"

namespace cacp {

using internal::GetInt;
using internal::GetNumber;
using internal::Json;
using internal::RequireKnownKeys;

namespace {

void Require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

template <typename Fn>
void Wrap(const std::string& section, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

const Json& Section(const Json& doc, const char* key) {
  static const Json kEmpty = Json::object();
  const auto it = doc.find(key);
  if (it == doc.end()) return kEmpty;
  if (!it->is_object()) {
    throw ConfigError(std::string("\"") + key + "\" must be a JSON object");
  }
  return *it;
}

}  // namespace

CodecParams CodecConfig::Params() const {
  CodecParams p;
  if (qtable) {
    p.qtable = *qtable;
  } else if (unit_table) {
    p.qtable = UnitTable();
  }
  p.lambda0 = lambda0;
  return p;
}

void RunConfig::Validate() const {
  Require(scenario_path.empty() != !random_scenario.has_value(),
          "exactly one of \"scenario\" and \"random_scenario\" must be given");
  if (random_scenario) {
    const RandomScenarioOptions& r = *random_scenario;
    Require(r.helpers >= 0, "random_scenario.helpers must be non-negative");
    Require(r.targets >= 0, "random_scenario.targets must be non-negative");
    Require(r.occluders >= 0, "random_scenario.occluders must be non-negative");
    Require(r.object_speed >= 0.0,
            "random_scenario.object_speed must be non-negative");
    Require(r.exposure_min > 0.0 && r.exposure_max >= r.exposure_min,
            "random_scenario exposure range must satisfy 0 < min <= max");
  }
  Wrap("radio", [&] { radio.Validate(); });
  Require(comm_range > 0.0, "radio.comm_range must be positive");
  Wrap("csi", [&] { csi.Validate(); });
  Require(delay.gamma > 0.0, "delay_model.gamma must be positive");
  Require(delay.d_max >= 1.0,
          "delay_model.D_max must be at least 1 (the total importance weight)");
  Require(delay.rho_min > 0.0 && delay.rho_min < 1.0,
          "delay_model.rho_min must lie in (0, 1)");
  Require(delay.distance_floor > 0.0,
          "delay_model.distance_floor must be positive");
  Require(optimizer.step > 0.0, "optimizer.step must be positive");
  Require(optimizer.iters >= 1, "optimizer.iters must be at least 1");
  Require(optimizer.tol >= 0.0, "optimizer.tol must be non-negative");
  Wrap("sensor", [&] { sensor.Validate(); });
  Require(sigma_xy >= 0.0, "pose_noise.sigma_xy must be non-negative");
  Require(sigma_yaw >= 0.0, "pose_noise.sigma_yaw must be non-negative");
  Wrap("align", [&] { align.Validate(); });
  Wrap("codec", [&] { codec.Params().Validate(); });
  Require(imagery.image_size >= 8 && imagery.image_size <= 4096,
          "imagery.image_size must lie in [8, 4096]");
  Require(imagery.pixel_size > 0.0, "imagery.pixel_size must be positive");
  Require(imagery.keep_fraction >= 0.0 && imagery.keep_fraction <= 1.0,
          "imagery.keep_fraction must lie in [0, 1]");
  Require(grid_resolution > 0.0, "fusion.grid_resolution must be positive");
  Require(base_latency >= 0.0, "base_latency must be non-negative");
  Require(frame_volume_bits > 0.0, "frame_volume_bits must be positive");
  Require(!seeds.empty(), "seeds must not be empty");
  if (!sweep_axis.empty()) {
    bool known = false;
    for (const std::string& a : SweepAxes()) known = known || a == sweep_axis;
    Require(known, "sweep.axis \"" + sweep_axis + "\" is not a sweepable field");
  }
}

bool RunConfig::operator==(const RunConfig& o) const {
  return scenario_path == o.scenario_path &&
         random_scenario == o.random_scenario && radio == o.radio &&
         comm_range == o.comm_range && csi == o.csi && delay == o.delay &&
         optimizer.step == o.optimizer.step &&
         optimizer.iters == o.optimizer.iters &&
         optimizer.tol == o.optimizer.tol && sensor == o.sensor &&
         sigma_xy == o.sigma_xy && sigma_yaw == o.sigma_yaw &&
         align == o.align && codec == o.codec && imagery == o.imagery &&
         grid_resolution == o.grid_resolution &&
         base_latency == o.base_latency &&
         frame_volume_bits == o.frame_volume_bits && seeds == o.seeds &&
         sweep_axis == o.sweep_axis && sweep_values == o.sweep_values;
}

RunConfig ParseConfig(const std::string& json_text,
                      const std::string& base_dir) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RequireKnownKeys(doc, "",
                   {"scenario", "random_scenario", "radio", "csi",
                    "delay_model", "optimizer", "sensor", "pose_noise",
                    "align", "codec", "imagery", "fusion", "base_latency",
                    "frame_volume_bits", "seeds", "sweep"});
  RunConfig cfg;

  if (doc.contains("scenario")) {
    Require(doc["scenario"].is_string(), "\"scenario\" must be a path string");
    std::filesystem::path p = doc["scenario"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    p = p.lexically_normal();
    Require(std::filesystem::is_regular_file(p),
            "scenario file not found: " + p.string());
    cfg.scenario_path = p.string();
  }
  if (doc.contains("random_scenario")) {
    const Json& r = doc["random_scenario"];
    RequireKnownKeys(r, "random_scenario",
                     {"helpers", "targets", "occluders", "object_speed",
                      "exposure_min", "exposure_max"});
    RandomScenarioOptions o;
    o.helpers = GetInt(r, "helpers", "random_scenario", o.helpers);
    o.targets = GetInt(r, "targets", "random_scenario", o.targets);
    o.occluders = GetInt(r, "occluders", "random_scenario", o.occluders);
    o.object_speed = GetNumber(r, "object_speed", "random_scenario", o.object_speed);
    o.exposure_min = GetNumber(r, "exposure_min", "random_scenario", o.exposure_min);
    o.exposure_max = GetNumber(r, "exposure_max", "random_scenario", o.exposure_max);
    cfg.random_scenario = o;
  }

  const Json& radio = Section(doc, "radio");
  RequireKnownKeys(radio, "radio",
                   {"tx_power", "noise_density", "bandwidth", "ref_gain",
                    "ref_distance", "pathloss_exponent", "comm_range"});
  RadioParams& rp = cfg.radio;
  rp.tx_power = GetNumber(radio, "tx_power", "radio", rp.tx_power);
  rp.noise_density = GetNumber(radio, "noise_density", "radio", rp.noise_density);
  rp.bandwidth = GetNumber(radio, "bandwidth", "radio", rp.bandwidth);
  rp.ref_gain = GetNumber(radio, "ref_gain", "radio", rp.ref_gain);
  rp.ref_distance = GetNumber(radio, "ref_distance", "radio", rp.ref_distance);
  rp.pathloss_exponent =
      GetNumber(radio, "pathloss_exponent", "radio", rp.pathloss_exponent);
  cfg.comm_range = GetNumber(radio, "comm_range", "radio", cfg.comm_range);

  const Json& csi = Section(doc, "csi");
  RequireKnownKeys(csi, "csi",
                   {"fading_model", "shadowing_sigma_db", "sample_interval"});
  if (csi.contains("fading_model")) {
    const Json& m = csi["fading_model"];
    Require(m.is_string() && (m == "none" || m == "lognormal"),
            "csi.fading_model must be \"none\" or \"lognormal\"");
    cfg.csi.fading_model =
        m == "none" ? FadingModel::kNone : FadingModel::kLogNormal;
  }
  cfg.csi.shadowing_sigma_db =
      GetNumber(csi, "shadowing_sigma_db", "csi", cfg.csi.shadowing_sigma_db);
  cfg.csi.sample_interval =
      GetNumber(csi, "sample_interval", "csi", cfg.csi.sample_interval);

  const Json& dm = Section(doc, "delay_model");
  RequireKnownKeys(dm, "delay_model",
                   {"gamma", "D_max", "rho_min", "distance_floor"});
  cfg.delay.gamma = GetNumber(dm, "gamma", "delay_model", cfg.delay.gamma);
  cfg.delay.d_max = GetNumber(dm, "D_max", "delay_model", cfg.delay.d_max);
  cfg.delay.rho_min = GetNumber(dm, "rho_min", "delay_model", cfg.delay.rho_min);
  cfg.delay.distance_floor =
      GetNumber(dm, "distance_floor", "delay_model", cfg.delay.distance_floor);

  const Json& opt = Section(doc, "optimizer");
  RequireKnownKeys(opt, "optimizer", {"step", "iters", "tol"});
  cfg.optimizer.step = GetNumber(opt, "step", "optimizer", cfg.optimizer.step);
  cfg.optimizer.iters = GetInt(opt, "iters", "optimizer", cfg.optimizer.iters);
  cfg.optimizer.tol = GetNumber(opt, "tol", "optimizer", cfg.optimizer.tol);

  const Json& sensor = Section(doc, "sensor");
  RequireKnownKeys(sensor, "sensor",
                   {"max_range", "fov", "angular_resolution", "min_hits"});
  cfg.sensor.max_range = GetNumber(sensor, "max_range", "sensor", cfg.sensor.max_range);
  cfg.sensor.fov = GetNumber(sensor, "fov", "sensor", cfg.sensor.fov);
  cfg.sensor.angular_resolution = GetNumber(sensor, "angular_resolution", "sensor",
                                            cfg.sensor.angular_resolution);
  cfg.sensor.min_hits = GetInt(sensor, "min_hits", "sensor", cfg.sensor.min_hits);

  const Json& pose = Section(doc, "pose_noise");
  RequireKnownKeys(pose, "pose_noise", {"sigma_xy", "sigma_yaw"});
  cfg.sigma_xy = GetNumber(pose, "sigma_xy", "pose_noise", cfg.sigma_xy);
  cfg.sigma_yaw = GetNumber(pose, "sigma_yaw", "pose_noise", cfg.sigma_yaw);

  const Json& align = Section(doc, "align");
  RequireKnownKeys(align, "align", {"beta", "mask_radius"});
  cfg.align.beta = GetNumber(align, "beta", "align", cfg.align.beta);
  cfg.align.mask_radius =
      GetNumber(align, "mask_radius", "align", cfg.align.mask_radius);

  const Json& codec = Section(doc, "codec");
  RequireKnownKeys(codec, "codec", {"qtable", "lambda0"});
  if (codec.contains("qtable")) {
    const Json& q = codec["qtable"];
    if (q.is_string()) {
      Require(q == "jpeg" || q == "unit",
              "codec.qtable must be \"jpeg\", \"unit\" or 64 numbers");
      cfg.codec.unit_table = q == "unit";
    } else {
      Require(q.is_array() && q.size() == 64,
              "codec.qtable must be \"jpeg\", \"unit\" or 64 numbers");
      QuantTable t;
      for (size_t i = 0; i < 64; ++i) {
        Require(q[i].is_number(), "codec.qtable entries must be numbers");
        t[i] = q[i].get<double>();
      }
      cfg.codec.qtable = t;
    }
  }
  cfg.codec.lambda0 = GetNumber(codec, "lambda0", "codec", cfg.codec.lambda0);

  const Json& im = Section(doc, "imagery");
  RequireKnownKeys(im, "imagery", {"image_size", "pixel_size", "keep_fraction"});
  cfg.imagery.image_size = GetInt(im, "image_size", "imagery", cfg.imagery.image_size);
  cfg.imagery.pixel_size = GetNumber(im, "pixel_size", "imagery", cfg.imagery.pixel_size);
  cfg.imagery.keep_fraction =
      GetNumber(im, "keep_fraction", "imagery", cfg.imagery.keep_fraction);

  const Json& fusion = Section(doc, "fusion");
  RequireKnownKeys(fusion, "fusion", {"grid_resolution"});
  cfg.grid_resolution =
      GetNumber(fusion, "grid_resolution", "fusion", cfg.grid_resolution);

  cfg.base_latency = GetNumber(doc, "base_latency", "", cfg.base_latency);
  cfg.frame_volume_bits =
      GetNumber(doc, "frame_volume_bits", "", cfg.frame_volume_bits);

  if (doc.contains("seeds")) {
    const Json& s = doc["seeds"];
    Require(s.is_array(), "\"seeds\" must be an array of non-negative integers");
    cfg.seeds.clear();
    for (const Json& v : s) {
      Require(v.is_number_unsigned(),
              "\"seeds\" must be an array of non-negative integers");
      cfg.seeds.push_back(v.get<uint64_t>());
    }
  }

  if (doc.contains("sweep")) {
    const Json& sw = doc["sweep"];
    RequireKnownKeys(sw, "sweep", {"axis", "values"});
    if (sw.contains("axis")) {
      Require(sw["axis"].is_string(), "\"sweep.axis\" must be a string");
      cfg.sweep_axis = sw["axis"].get<std::string>();
    }
    if (sw.contains("values")) {
      Require(sw["values"].is_array(), "\"sweep.values\" must be an array");
      for (const Json& v : sw["values"]) {
        Require(v.is_number(), "\"sweep.values\" entries must be numbers");
        cfg.sweep_values.push_back(v.get<double>());
      }
    }
  }

  cfg.Validate();
  return cfg;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  return ParseConfig(ss.str(), dir.empty() ? "." : dir.string());
}

std::string ConfigToJson(const RunConfig& cfg) {
  nlohmann::ordered_json doc;
  if (!cfg.scenario_path.empty()) doc["scenario"] = cfg.scenario_path;
  if (cfg.random_scenario) {
    const RandomScenarioOptions& r = *cfg.random_scenario;
    doc["random_scenario"] = {{"helpers", r.helpers},
                              {"targets", r.targets},
                              {"occluders", r.occluders},
                              {"object_speed", r.object_speed},
                              {"exposure_min", r.exposure_min},
                              {"exposure_max", r.exposure_max}};
  }
  doc["radio"] = {{"tx_power", cfg.radio.tx_power},
                  {"noise_density", cfg.radio.noise_density},
                  {"bandwidth", cfg.radio.bandwidth},
                  {"ref_gain", cfg.radio.ref_gain},
                  {"ref_distance", cfg.radio.ref_distance},
                  {"pathloss_exponent", cfg.radio.pathloss_exponent},
                  {"comm_range", cfg.comm_range}};
  doc["csi"] = {{"fading_model", cfg.csi.fading_model == FadingModel::kNone
                                     ? "none"
                                     : "lognormal"},
                {"shadowing_sigma_db", cfg.csi.shadowing_sigma_db},
                {"sample_interval", cfg.csi.sample_interval}};
  doc["delay_model"] = {{"gamma", cfg.delay.gamma},
                        {"D_max", cfg.delay.d_max},
                        {"rho_min", cfg.delay.rho_min},
                        {"distance_floor", cfg.delay.distance_floor}};
  doc["optimizer"] = {{"step", cfg.optimizer.step},
                      {"iters", cfg.optimizer.iters},
                      {"tol", cfg.optimizer.tol}};
  doc["sensor"] = {{"max_range", cfg.sensor.max_range},
                   {"fov", cfg.sensor.fov},
                   {"angular_resolution", cfg.sensor.angular_resolution},
                   {"min_hits", cfg.sensor.min_hits}};
  doc["pose_noise"] = {{"sigma_xy", cfg.sigma_xy}, {"sigma_yaw", cfg.sigma_yaw}};
  doc["align"] = {{"beta", cfg.align.beta},
                  {"mask_radius", cfg.align.mask_radius}};
  nlohmann::ordered_json codec;
  if (cfg.codec.qtable) {
    codec["qtable"] = *cfg.codec.qtable;
  } else {
    codec["qtable"] = cfg.codec.unit_table ? "unit" : "jpeg";
  }
  codec["lambda0"] = cfg.codec.lambda0;
  doc["codec"] = codec;
  doc["imagery"] = {{"image_size", cfg.imagery.image_size},
                    {"pixel_size", cfg.imagery.pixel_size},
                    {"keep_fraction", cfg.imagery.keep_fraction}};
  doc["fusion"] = {{"grid_resolution", cfg.grid_resolution}};
  doc["base_latency"] = cfg.base_latency;
  doc["frame_volume_bits"] = cfg.frame_volume_bits;
  doc["seeds"] = cfg.seeds;
  if (!cfg.sweep_axis.empty() || !cfg.sweep_values.empty()) {
    nlohmann::ordered_json sweep;
    if (!cfg.sweep_axis.empty()) sweep["axis"] = cfg.sweep_axis;
    sweep["values"] = cfg.sweep_values;
    doc["sweep"] = sweep;
  }
  return doc.dump(2);
}

}  // namespace cacp
