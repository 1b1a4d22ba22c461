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

// Command-line front end: simulate, sweep, align, codec, optimize.
//
// Exit status: 0 on success, 2 for usage or configuration errors, 3 for
// failures while running.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cacp/codec.h"
#include "cacp/error.h"
#include "cacp/harness.h"
#include "cacp/image.h"
#include "cacp/specalign.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void Emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw cacp::InputError("cannot write " + out_path);
  out << text;
  if (!out) throw cacp::InputError("failed writing " + out_path);
}

std::vector<uint64_t> SeedsFor(const cacp::RunConfig& cfg,
                               const std::optional<uint64_t>& seed) {
  if (seed) return {*seed};
  return cfg.seeds;
}

std::vector<double> ParseValues(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw cacp::ConfigError("--values: \"" + item + "\" is not a number");
    }
    values.push_back(v);
  }
  return values;
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel-aware collaborative perception simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "cacp 0.1.0");

  std::string out_path;
  std::string config_path;
  std::optional<uint64_t> seed;
  bool timing = false;

  auto* simulate = app.add_subcommand("simulate", "Run the full pipeline");
  simulate->add_option("config", config_path, "Run config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Run only this seed");
  simulate->add_option("--out", out_path, "Write the report here");
  simulate->add_flag("--timing", timing, "Include wall_time_s");

  std::string axis;
  std::string values_text;
  bool values_given = false;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter over seeds");
  sweep->add_option("config", config_path, "Run config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "Parameter to vary");
  auto* values_opt =
      sweep->add_option("--values", values_text, "Comma-separated values");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_option("--out", out_path, "Write the CSV here");

  std::string src_path, ref_path;
  double beta = 1.0, radius = 0.1;
  std::string spectra_prefix;
  auto* align = app.add_subcommand("align", "Amplitude-align an image");
  align->add_option("src", src_path, "Source PGM/PPM")
      ->required()
      ->check(CLI::ExistingFile);
  align->add_option("ref", ref_path, "Reference PGM/PPM")
      ->required()
      ->check(CLI::ExistingFile);
  align->add_option("--beta", beta, "Mixing weight in [0, 1]");
  align->add_option("--radius", radius, "Low-frequency mask radius in [0, 1]");
  align->add_option("--out", out_path, "Output image")->required();
  align->add_option("--dump-spectra", spectra_prefix,
                    "Write raw float64 spectra with this path prefix");

  std::string image_path;
  double rho = 1.0;
  double lambda0 = cacp::kDefaultLambda0;
  std::string decoded_path;
  std::string bitstream_path;
  auto* codec = app.add_subcommand("codec", "Encode and decode an image");
  codec->add_option("image", image_path, "Input PGM/PPM")
      ->required()
      ->check(CLI::ExistingFile);
  codec->add_option("--rho", rho, "Retained fraction in (0, 1]")->required();
  codec->add_option("--lambda0", lambda0, "Loss weight at rho = 1");
  codec->add_option("--decoded", decoded_path, "Write the decoded image here");
  codec->add_option("--bitstream", bitstream_path,
                    "Write the encoded frame here");
  codec->add_option("--out", out_path, "Write the metrics here");

  auto* optimize = app.add_subcommand("optimize", "Print the compression plan");
  optimize->add_option("config", config_path, "Run config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  optimize->add_option("--seed", seed, "CSI seed (default: first in config)");
  optimize->add_option("--out", out_path, "Write the CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  values_given = values_opt->count() > 0;

  try {
    if (*simulate) {
      const cacp::RunConfig cfg = cacp::LoadConfig(config_path);
      const auto seeds = SeedsFor(cfg, seed);
      std::string text;
      if (seeds.size() == 1) {
        text = cacp::ReportToJson(cacp::RunScenario(cfg, seeds[0]), timing);
      } else {
        text = "[\n";
        for (size_t i = 0; i < seeds.size(); ++i) {
          text += cacp::ReportToJson(cacp::RunScenario(cfg, seeds[i]), timing);
          if (i + 1 < seeds.size()) text.insert(text.size() - 1, ",");
        }
        text += "]\n";
      }
      Emit(text, out_path);
    } else if (*sweep) {
      const cacp::RunConfig cfg = cacp::LoadConfig(config_path);
      if (axis.empty()) axis = cfg.sweep_axis;
      if (axis.empty()) throw cacp::ConfigError("no sweep axis given");
      const std::vector<double> values =
          values_given ? ParseValues(values_text) : cfg.sweep_values;
      Emit(cacp::Sweep(cfg, axis, values, threads), out_path);
    } else if (*align) {
      cacp::AlignParams params{beta, radius};
      try {
        params.Validate();
      } catch (const cacp::Error& e) {
        throw cacp::ConfigError(e.what());
      }
      const cacp::Image src = cacp::ReadPnm(src_path);
      const cacp::Image ref = cacp::ReadPnm(ref_path);
      const cacp::Image out = cacp::AlignAmplitude(src, ref, params);
      cacp::WritePnm(out_path, out);
      if (!spectra_prefix.empty()) {
        cacp::WriteSpectrumRaw(spectra_prefix + "src.f64",
                               cacp::Fft2(cacp::ZeroPadToPowerOfTwo(src)));
        cacp::WriteSpectrumRaw(spectra_prefix + "ref.f64",
                               cacp::Fft2(cacp::ZeroPadToPowerOfTwo(ref)));
        cacp::WriteSpectrumRaw(spectra_prefix + "out.f64",
                               cacp::Fft2(cacp::ZeroPadToPowerOfTwo(out)));
      }
    } else if (*codec) {
      if (!(rho > 0.0 && rho <= 1.0)) {
        throw cacp::ConfigError("--rho must lie in (0, 1]");
      }
      cacp::CodecParams params;
      params.lambda0 = lambda0;
      try {
        params.Validate();
      } catch (const cacp::Error& e) {
        throw cacp::ConfigError(e.what());
      }
      const cacp::Image img = cacp::ReadPnm(image_path);
      const cacp::EncodedFrame frame = cacp::Encode(img, params, rho);
      const cacp::Image dec = cacp::Decode(frame, params);
      if (!decoded_path.empty()) cacp::WritePnm(decoded_path, dec);
      if (!bitstream_path.empty()) {
        const auto bytes = cacp::SerializeFrame(frame);
        std::ofstream f(bitstream_path, std::ios::binary);
        f.write(reinterpret_cast<const char*>(bytes.data()),
                static_cast<std::streamsize>(bytes.size()));
        if (!f) throw cacp::InputError("cannot write " + bitstream_path);
      }
      const double mse = cacp::Mse(img, dec);
      Emit("rho,rate_bits,mse,psnr_db,rd_loss\n" + Fmt(rho) + "," +
               Fmt(frame.rate_bits) + "," + Fmt(mse) + "," +
               Fmt(cacp::Psnr(img, dec)) + "," +
               Fmt(cacp::RdLoss(frame.rate_bits, mse, rho, lambda0)) + "\n",
           out_path);
    } else if (*optimize) {
      const cacp::RunConfig cfg = cacp::LoadConfig(config_path);
      const uint64_t s = seed ? *seed : cfg.seeds.front();
      const cacp::WorldScenario world = cacp::ScenarioForRun(cfg, s);
      const cacp::OptimizationResult r = cacp::OptimizeLinks(cfg, world, s);
      Emit(cacp::HelperPlanCsv(r.helpers), out_path);
    }
  } catch (const cacp::ConfigError& e) {
    std::cerr << "cacp: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "cacp: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
