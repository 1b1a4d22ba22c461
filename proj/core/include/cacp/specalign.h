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
#ifndef CACP_SPECALIGN_H_
#define CACP_SPECALIGN_H_

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "cacp/image.h"

namespace cacp {

using Complex = std::complex<double>;

// Unnormalized 2D DFT per channel with DC at (0, 0), rows of length width.
struct Spectrum {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<Complex> coefficients;

  Complex& at(int c, int v, int u) {
    return coefficients[(static_cast<size_t>(c) * height + v) * width + u];
  }
  Complex at(int c, int v, int u) const {
    return coefficients[(static_cast<size_t>(c) * height + v) * width + u];
  }
};

struct AmplitudePhase {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> amplitude;
  std::vector<double> phase;  // (-pi, pi], 0 where amplitude is 0
};

bool IsPowerOfTwo(int n);
int NextPowerOfTwo(int n);

// In-place iterative radix-2 transform. inverse applies the conjugate kernel
// and the 1/N scale. Throws InputError if the length is not a power of two.
void Fft1d(std::span<Complex> data, bool inverse);

// Throws InputError for empty images or non power-of-two sides.
Spectrum Fft2(const Image& img);
// Real part of the inverse transform; no clamping.
Image Ifft2(const Spectrum& spec);

AmplitudePhase Decompose(const Spectrum& spec);
Spectrum Recompose(const AmplitudePhase& ap);

struct AlignParams {
  double beta = 1.0;         // 0 keeps the source amplitude, 1 replaces it
  double mask_radius = 0.1;  // fraction of min(W, H) / 2

  void Validate() const;
  bool operator==(const AlignParams&) const = default;
};

// True when frequency (u, v) lies in the centered low-frequency square of
// half-width radius * min(W, H) / 2 (wrap-aware). Empty for radius 0.
bool InAlignmentMask(int u, int v, int width, int height, double radius);

// Blends the source amplitude toward the reference amplitude inside the
// low-frequency mask while keeping the source phase, then inverts and clamps
// to [0, 255]. Non power-of-two inputs are zero-padded and cropped back.
// Throws InputError on shape mismatch.
Image AlignAmplitude(const Image& src, const Image& ref,
                     const AlignParams& params);

// L1 distance between normalized 64-bin histograms of log(1 + amplitude)
// over all channels. Both images are padded to a common power-of-two size.
double AmplitudeHistogramDistance(const Image& a, const Image& b);

// Pads with zeros to the next power of two on each side.
Image ZeroPadToPowerOfTwo(const Image& img);
Image Crop(const Image& img, int width, int height);

// Raw dump: interleaved float64 (re, im), channel-major, row-major.
void WriteSpectrumRaw(const std::string& path, const Spectrum& spec);

}  // namespace cacp

#endif  // CACP_SPECALIGN_H_
