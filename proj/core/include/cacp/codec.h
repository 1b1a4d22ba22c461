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
#ifndef CACP_CODEC_H_
#define CACP_CODEC_H_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cacp/image.h"

namespace cacp {

inline constexpr int kBlockSize = 8;
using QuantTable = std::array<double, kBlockSize * kBlockSize>;

// ITU-T T.81 Annex K luminance table, row-major.
QuantTable JpegLuminanceTable();
QuantTable UnitTable();

inline double InverseQualityScale(double rho) { return 1.0 / rho; }

inline constexpr double kDefaultLambda0 = 200.0;

struct CodecParams {
  QuantTable qtable = JpegLuminanceTable();
  // Loss weight at rho = 1; the effective weight is lambda0 / rho.
  double lambda0 = kDefaultLambda0;
  // Multiplier on every quantization step for a given retained fraction rho.
  std::function<double(double)> quality_scale = InverseQualityScale;

  // Throws DomainError if any step is below 1 or lambda0 is not positive.
  void Validate() const;
};

// Quantized block-DCT coefficients. Coefficients are stored per channel over
// the padded sample grid, each block's 8x8 coefficients in place of its
// pixels (row-major).
struct EncodedFrame {
  int width = 0;
  int height = 0;
  int channels = 0;
  int padded_width = 0;
  int padded_height = 0;
  double rho_used = 1.0;
  std::vector<int16_t> coefficients;
  double rate_bits = 0.0;

  bool operator==(const EncodedFrame&) const = default;
};

// Level shift by -128, 8x8 orthonormal DCT-II, uniform quantization with
// steps qtable * quality_scale(rho). Edges are replicated up to a multiple of
// 8. Throws DomainError for rho outside (0, 1].
EncodedFrame Encode(const Image& img, const CodecParams& params, double rho);

// Inverse of Encode up to quantization; output clamped to [0, 255] and
// cropped to the original size. Throws FormatError on inconsistent frames.
Image Decode(const EncodedFrame& frame, const CodecParams& params);

// Order-0 empirical entropy of the symbol stream times its length.
double EntropyBits(std::span<const int16_t> symbols);

double RdLoss(double rate_bits, double distortion_mse, double rho,
              double lambda0);

double Mse(const Image& a, const Image& b);
// +infinity when the images are identical.
double Psnr(const Image& a, const Image& b);

// Greedy coordinate descent over the quantization table: step k scales entry
// k mod 64 by the best of {0.8, 1.0, 1.25} for the mean rd loss over
// `frames`. Entries never drop below 1. Throws InputError on an empty set.
CodecParams Refine(const CodecParams& params, std::span<const Image> frames,
                   double rho, int steps);

// Mean RdLoss of encoding and decoding every frame at rho.
double MeanRdLoss(const CodecParams& params, std::span<const Image> frames,
                  double rho);

// Flat little-endian layout: "CPQF", u32 width, u32 height, u32 channels,
// f64 rho, then int16 coefficients over the padded grid.
std::vector<uint8_t> SerializeFrame(const EncodedFrame& frame);
EncodedFrame DeserializeFrame(std::span<const uint8_t> bytes);

}  // namespace cacp

#endif  // CACP_CODEC_H_
