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
#ifndef CACP_CHANNEL_H_
#define CACP_CHANNEL_H_

#include <cstddef>
#include <cstdint>

namespace cacp {

// Static radio configuration shared by every V2V link.
struct RadioParams {
  double tx_power = 0.2;           // W (23 dBm)
  double noise_density = 3.98e-21; // W/Hz (-174 dBm/Hz)
  double bandwidth = 10e6;         // Hz
  double ref_gain = 1e-4;          // gain at ref_distance
  double ref_distance = 1.0;       // m
  double pathloss_exponent = 3.0;

  // Throws DomainError unless every field is positive and the exponent is in
  // [1.5, 6].
  void Validate() const;
  bool operator==(const RadioParams&) const = default;
};

struct ChannelState {
  double gain = 0.0;
  double snr = 0.0;
  double capacity = 0.0;  // bit/s
  double timestamp = 0.0; // s

  bool operator==(const ChannelState&) const = default;
};

enum class FadingModel { kNone, kLogNormal };

// Parameters of a reproducible time-varying CSI source. The trace is
// piecewise constant over `sample_interval`.
struct CsiTrace {
  uint64_t seed = 0;
  FadingModel fading_model = FadingModel::kNone;
  double shadowing_sigma_db = 0.0;
  double sample_interval = 0.1;

  void Validate() const;
  bool operator==(const CsiTrace&) const = default;
};

// Log-distance path gain, clamped to ref_gain below ref_distance.
double PathGain(double distance, const RadioParams& params);

double ShannonCapacityFromSnr(double bandwidth, double snr);

// B * log2(1 + P g / (N0 B)).
double ShannonCapacity(double bandwidth, double tx_power, double gain,
                       double noise_density);

// Stable identity of the undirected link {a, b}.
uint64_t LinkId(size_t a, size_t b);

// Shadowing offset in dB for one link at time t. Zero for FadingModel::kNone.
double ShadowingOffsetDb(const CsiTrace& trace, uint64_t link_id, double t);

// Pure function of (trace.seed, link_id, sample index of t).
ChannelState SampleCsi(const CsiTrace& trace, uint64_t link_id,
                       double link_distance, const RadioParams& params,
                       double t);

}  // namespace cacp

#endif  // CACP_CHANNEL_H_
