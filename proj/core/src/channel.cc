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
#include "cacp/channel.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cacp/error.h"

namespace cacp {
namespace {

void RequirePositive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void RadioParams::Validate() const {
  RequirePositive(tx_power, "tx_power");
  RequirePositive(noise_density, "noise_density");
  RequirePositive(bandwidth, "bandwidth");
  RequirePositive(ref_gain, "ref_gain");
  RequirePositive(ref_distance, "ref_distance");
  if (!(pathloss_exponent >= 1.5 && pathloss_exponent <= 6.0)) {
    throw DomainError("pathloss_exponent must lie in [1.5, 6]");
  }
}

void CsiTrace::Validate() const {
  if (!(shadowing_sigma_db >= 0.0) || !std::isfinite(shadowing_sigma_db)) {
    throw DomainError("shadowing_sigma_db must be non-negative");
  }
  RequirePositive(sample_interval, "sample_interval");
}

double PathGain(double distance, const RadioParams& params) {
  if (!(distance > 0.0)) throw DomainError("distance must be positive");
  const double ratio = std::max(distance, params.ref_distance) /
                       params.ref_distance;
  return params.ref_gain * std::pow(ratio, -params.pathloss_exponent);
}

double ShannonCapacityFromSnr(double bandwidth, double snr) {
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  if (!(snr >= 0.0)) throw DomainError("snr must be non-negative");
  return bandwidth * std::log2(1.0 + snr);
}

double ShannonCapacity(double bandwidth, double tx_power, double gain,
                       double noise_density) {
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  if (!(noise_density > 0.0)) {
    throw DomainError("noise_density must be positive");
  }
  if (!(gain >= 0.0) || !(tx_power >= 0.0)) {
    throw DomainError("gain and tx_power must be non-negative");
  }
  const double snr = tx_power * gain / (noise_density * bandwidth);
  return ShannonCapacityFromSnr(bandwidth, snr);
}

uint64_t LinkId(size_t a, size_t b) {
  const uint64_t lo = std::min(a, b);
  const uint64_t hi = std::max(a, b);
  return (hi << 32) | lo;
}

double ShadowingOffsetDb(const CsiTrace& trace, uint64_t link_id, double t) {
  if (trace.fading_model == FadingModel::kNone ||
      trace.shadowing_sigma_db == 0.0) {
    return 0.0;
  }
  if (!(t >= 0.0)) throw DomainError("sample time must be non-negative");
  const auto sample = static_cast<uint64_t>(std::floor(t / trace.sample_interval));
  const uint64_t key =
      SplitMix64(trace.seed ^ SplitMix64(link_id ^ SplitMix64(sample)));
  std::mt19937_64 engine(key);
  std::normal_distribution<double> normal(0.0, trace.shadowing_sigma_db);
  return normal(engine);
}

ChannelState SampleCsi(const CsiTrace& trace, uint64_t link_id,
                       double link_distance, const RadioParams& params,
                       double t) {
  if (!(t >= 0.0)) throw DomainError("sample time must be non-negative");
  const double offset_db = ShadowingOffsetDb(trace, link_id, t);
  double gain = PathGain(link_distance, params) * std::pow(10.0, offset_db / 10.0);
  gain = std::min(gain, params.ref_gain);

  ChannelState state;
  state.gain = gain;
  state.snr = params.tx_power * gain / (params.noise_density * params.bandwidth);
  state.capacity = ShannonCapacityFromSnr(params.bandwidth, state.snr);
  state.timestamp = t;
  return state;
}

}  // namespace cacp
