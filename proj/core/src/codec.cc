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
#include "cacp/codec.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <string>

#include "cacp/error.h"

namespace cacp {
namespace {

constexpr int kN = kBlockSize;
constexpr int kCoeffs = kN * kN;

struct DctBasis {
  // basis[k][n] = alpha(k) cos((2n + 1) k pi / 16)
  double m[kN][kN];
  DctBasis() {
    for (int k = 0; k < kN; ++k) {
      const double alpha = k == 0 ? std::sqrt(1.0 / kN) : std::sqrt(2.0 / kN);
      for (int n = 0; n < kN; ++n) {
        m[k][n] = alpha * std::cos((2 * n + 1) * k * std::numbers::pi / (2 * kN));
      }
    }
  }
};

const DctBasis& Basis() {
  static const DctBasis basis;
  return basis;
}

void ForwardDct(const double in[kCoeffs], double out[kCoeffs]) {
  const auto& b = Basis().m;
  double tmp[kCoeffs];
  for (int y = 0; y < kN; ++y) {
    for (int u = 0; u < kN; ++u) {
      double s = 0.0;
      for (int x = 0; x < kN; ++x) s += b[u][x] * in[y * kN + x];
      tmp[y * kN + u] = s;
    }
  }
  for (int v = 0; v < kN; ++v) {
    for (int u = 0; u < kN; ++u) {
      double s = 0.0;
      for (int y = 0; y < kN; ++y) s += b[v][y] * tmp[y * kN + u];
      out[v * kN + u] = s;
    }
  }
}

void InverseDct(const double in[kCoeffs], double out[kCoeffs]) {
  const auto& b = Basis().m;
  double tmp[kCoeffs];
  for (int v = 0; v < kN; ++v) {
    for (int x = 0; x < kN; ++x) {
      double s = 0.0;
      for (int u = 0; u < kN; ++u) s += b[u][x] * in[v * kN + u];
      tmp[v * kN + x] = s;
    }
  }
  for (int y = 0; y < kN; ++y) {
    for (int x = 0; x < kN; ++x) {
      double s = 0.0;
      for (int v = 0; v < kN; ++v) s += b[v][y] * tmp[v * kN + x];
      out[y * kN + x] = s;
    }
  }
}

int PadTo8(int n) { return (n + kN - 1) / kN * kN; }

// Level-shifted block DCT of an edge-replicated image, laid out like
// EncodedFrame::coefficients.
struct CoefficientPlanes {
  int width = 0;
  int height = 0;
  int channels = 0;
  int padded_width = 0;
  int padded_height = 0;
  std::vector<double> values;
};

CoefficientPlanes ForwardTransform(const Image& img) {
  if (img.empty()) throw InputError("cannot encode an empty image");
  for (double s : img.samples()) {
    if (!std::isfinite(s)) throw InputError("image samples must be finite");
  }
  CoefficientPlanes p;
  p.width = img.width();
  p.height = img.height();
  p.channels = img.channels();
  p.padded_width = PadTo8(p.width);
  p.padded_height = PadTo8(p.height);
  const size_t plane = static_cast<size_t>(p.padded_width) * p.padded_height;
  p.values.assign(plane * p.channels, 0.0);

  double block[kCoeffs];
  double coeffs[kCoeffs];
  for (int c = 0; c < p.channels; ++c) {
    double* dst = p.values.data() + c * plane;
    for (int by = 0; by < p.padded_height; by += kN) {
      for (int bx = 0; bx < p.padded_width; bx += kN) {
        for (int y = 0; y < kN; ++y) {
          const int sy = std::min(by + y, p.height - 1);
          for (int x = 0; x < kN; ++x) {
            const int sx = std::min(bx + x, p.width - 1);
            block[y * kN + x] = img.at(c, sy, sx) - 128.0;
          }
        }
        ForwardDct(block, coeffs);
        for (int v = 0; v < kN; ++v) {
          for (int u = 0; u < kN; ++u) {
            dst[static_cast<size_t>(by + v) * p.padded_width + bx + u] =
                coeffs[v * kN + u];
          }
        }
      }
    }
  }
  return p;
}

using StepTable = std::array<double, kCoeffs>;

StepTable Steps(const CodecParams& params, double rho) {
  const double scale = params.quality_scale(rho);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("quality scale must be positive and finite");
  }
  StepTable steps;
  for (int k = 0; k < kCoeffs; ++k) steps[k] = params.qtable[k] * scale;
  return steps;
}

void Quantize(const CoefficientPlanes& p, const StepTable& steps,
              std::vector<int16_t>& out) {
  out.resize(p.values.size());
  const size_t plane = static_cast<size_t>(p.padded_width) * p.padded_height;
  constexpr double kLo = std::numeric_limits<int16_t>::min();
  constexpr double kHi = std::numeric_limits<int16_t>::max();
  for (size_t i = 0; i < p.values.size(); ++i) {
    const size_t in_plane = i % plane;
    const int y = static_cast<int>(in_plane / p.padded_width);
    const int x = static_cast<int>(in_plane % p.padded_width);
    const double q = std::round(p.values[i] / steps[(y % kN) * kN + x % kN]);
    out[i] = static_cast<int16_t>(std::clamp(q, kLo, kHi));
  }
}

Image Reconstruct(std::span<const int16_t> q, const StepTable& steps,
                  int width, int height, int channels, int padded_width,
                  int padded_height) {
  Image img(width, height, channels);
  const size_t plane = static_cast<size_t>(padded_width) * padded_height;
  double coeffs[kCoeffs];
  double block[kCoeffs];
  for (int c = 0; c < channels; ++c) {
    const int16_t* src = q.data() + c * plane;
    for (int by = 0; by < padded_height; by += kN) {
      for (int bx = 0; bx < padded_width; bx += kN) {
        for (int v = 0; v < kN; ++v) {
          for (int u = 0; u < kN; ++u) {
            coeffs[v * kN + u] =
                src[static_cast<size_t>(by + v) * padded_width + bx + u] *
                steps[v * kN + u];
          }
        }
        InverseDct(coeffs, block);
        for (int y = 0; y < kN && by + y < height; ++y) {
          for (int x = 0; x < kN && bx + x < width; ++x) {
            img.at(c, by + y, bx + x) =
                std::clamp(block[y * kN + x] + 128.0, 0.0, 255.0);
          }
        }
      }
    }
  }
  return img;
}

void CheckRho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw DomainError("compression ratio must lie in (0, 1]");
  }
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t GetU32(std::span<const uint8_t> in, size_t at) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(in[at + i]) << (8 * i);
  return v;
}

constexpr char kMagic[4] = {'C', 'P', 'Q', 'F'};
constexpr size_t kHeaderBytes = 4 + 3 * 4 + 8;

}  // namespace

QuantTable JpegLuminanceTable() {
  return {16, 11, 10, 16, 24,  40,  51,  61,   //
          12, 12, 14, 19, 26,  58,  60,  55,   //
          14, 13, 16, 24, 40,  57,  69,  56,   //
          14, 17, 22, 29, 51,  87,  80,  62,   //
          18, 22, 37, 56, 68,  109, 103, 77,   //
          24, 35, 55, 64, 81,  104, 113, 92,   //
          49, 64, 78, 87, 103, 121, 120, 101,  //
          72, 92, 95, 98, 112, 100, 103, 99};
}

QuantTable UnitTable() {
  QuantTable t;
  t.fill(1.0);
  return t;
}

void CodecParams::Validate() const {
  for (double q : qtable) {
    if (!(q >= 1.0) || !std::isfinite(q)) {
      throw DomainError("quantization steps must be finite and >= 1");
    }
  }
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw DomainError("lambda0 must be positive");
  }
  if (!quality_scale) throw DomainError("quality_scale is not set");
}

double EntropyBits(std::span<const int16_t> symbols) {
  if (symbols.empty()) return 0.0;
  std::vector<uint32_t> counts(1 << 16, 0);
  for (int16_t s : symbols) ++counts[static_cast<uint16_t>(s)];
  const double n = static_cast<double>(symbols.size());
  double h = 0.0;
  int distinct = 0;
  for (uint32_t c : counts) {
    if (c == 0) continue;
    ++distinct;
    const double p = c / n;
    h -= p * std::log2(p);
  }
  if (distinct == 1) {
    // A constant stream carries no information unless its symbol has to be
    // signalled; charge one literal so only the all-zero stream is free.
    return symbols.front() == 0 ? 0.0 : 16.0;
  }
  return h * n;
}

EncodedFrame Encode(const Image& img, const CodecParams& params, double rho) {
  CheckRho(rho);
  params.Validate();
  const CoefficientPlanes planes = ForwardTransform(img);
  EncodedFrame f;
  f.width = planes.width;
  f.height = planes.height;
  f.channels = planes.channels;
  f.padded_width = planes.padded_width;
  f.padded_height = planes.padded_height;
  f.rho_used = rho;
  Quantize(planes, Steps(params, rho), f.coefficients);
  f.rate_bits = EntropyBits(f.coefficients);
  return f;
}

Image Decode(const EncodedFrame& frame, const CodecParams& params) {
  params.Validate();
  if (frame.width <= 0 || frame.height <= 0 ||
      (frame.channels != 1 && frame.channels != 3)) {
    throw FormatError("encoded frame has invalid dimensions");
  }
  if (frame.padded_width != PadTo8(frame.width) ||
      frame.padded_height != PadTo8(frame.height)) {
    throw FormatError("encoded frame padding does not match its dimensions");
  }
  const size_t expected = static_cast<size_t>(frame.padded_width) *
                          frame.padded_height * frame.channels;
  if (frame.coefficients.size() != expected) {
    throw FormatError("encoded frame payload size does not match dimensions");
  }
  if (!(frame.rho_used > 0.0 && frame.rho_used <= 1.0)) {
    throw FormatError("encoded frame carries an invalid compression ratio");
  }
  return Reconstruct(frame.coefficients, Steps(params, frame.rho_used),
                     frame.width, frame.height, frame.channels,
                     frame.padded_width, frame.padded_height);
}

double RdLoss(double rate_bits, double distortion_mse, double rho,
              double lambda0) {
  CheckRho(rho);
  if (!(rate_bits >= 0.0) || !(distortion_mse >= 0.0) || !(lambda0 >= 0.0)) {
    throw DomainError("rd loss inputs must be non-negative");
  }
  return rate_bits + (lambda0 / rho) * distortion_mse;
}

double Mse(const Image& a, const Image& b) {
  if (!a.SameShape(b)) throw InputError("image dimensions differ");
  if (a.empty()) return 0.0;
  double total = 0.0;
  const auto& sa = a.samples();
  const auto& sb = b.samples();
  for (size_t i = 0; i < sa.size(); ++i) {
    const double d = sa[i] - sb[i];
    total += d * d;
  }
  return total / static_cast<double>(sa.size());
}

double Psnr(const Image& a, const Image& b) {
  const double mse = Mse(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

struct RefineSample {
  const Image* original;
  CoefficientPlanes planes;
};

double SampleLoss(const RefineSample& s, const StepTable& steps, double rho,
                  double lambda0, std::vector<int16_t>& scratch) {
  Quantize(s.planes, steps, scratch);
  const double rate = EntropyBits(scratch);
  const Image recon =
      Reconstruct(scratch, steps, s.planes.width, s.planes.height,
                  s.planes.channels, s.planes.padded_width,
                  s.planes.padded_height);
  return RdLoss(rate, Mse(*s.original, recon), rho, lambda0);
}

double MeanLoss(const std::vector<RefineSample>& samples,
                const CodecParams& params, double rho,
                std::vector<int16_t>& scratch) {
  const StepTable steps = Steps(params, rho);
  double total = 0.0;
  for (const auto& s : samples) {
    total += SampleLoss(s, steps, rho, params.lambda0, scratch);
  }
  return total / static_cast<double>(samples.size());
}

}  // namespace

double MeanRdLoss(const CodecParams& params, std::span<const Image> frames,
                  double rho) {
  if (frames.empty()) throw InputError("no frames to evaluate");
  double total = 0.0;
  for (const Image& f : frames) {
    const EncodedFrame enc = Encode(f, params, rho);
    total += RdLoss(enc.rate_bits, Mse(f, Decode(enc, params)), rho,
                    params.lambda0);
  }
  return total / static_cast<double>(frames.size());
}

CodecParams Refine(const CodecParams& params, std::span<const Image> frames,
                   double rho, int steps) {
  CheckRho(rho);
  params.Validate();
  if (frames.empty()) throw InputError("refinement needs at least one frame");
  if (steps < 0) throw DomainError("refinement steps must be non-negative");
  CodecParams out = params;
  if (steps == 0) return out;

  std::vector<RefineSample> samples;
  samples.reserve(frames.size());
  for (const Image& f : frames) samples.push_back({&f, ForwardTransform(f)});

  std::vector<int16_t> scratch;
  double current = MeanLoss(samples, out, rho, scratch);
  constexpr double kFactors[] = {0.8, 1.25};
  for (int step = 0; step < steps; ++step) {
    const int k = step % kCoeffs;
    const double original = out.qtable[k];
    double best_value = original;
    double best_loss = current;
    for (double factor : kFactors) {
      const double candidate = std::max(1.0, original * factor);
      if (candidate == original) continue;
      out.qtable[k] = candidate;
      const double loss = MeanLoss(samples, out, rho, scratch);
      if (loss < best_loss) {
        best_loss = loss;
        best_value = candidate;
      }
    }
    out.qtable[k] = best_value;
    current = best_loss;
  }
  return out;
}

std::vector<uint8_t> SerializeFrame(const EncodedFrame& frame) {
  std::vector<uint8_t> out;
  out.reserve(kHeaderBytes + frame.coefficients.size() * 2);
  out.insert(out.end(), kMagic, kMagic + 4);
  PutU32(out, static_cast<uint32_t>(frame.width));
  PutU32(out, static_cast<uint32_t>(frame.height));
  PutU32(out, static_cast<uint32_t>(frame.channels));
  uint64_t rho_bits;
  std::memcpy(&rho_bits, &frame.rho_used, sizeof rho_bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(rho_bits >> (8 * i)));
  for (int16_t c : frame.coefficients) {
    const auto u = static_cast<uint16_t>(c);
    out.push_back(static_cast<uint8_t>(u & 0xff));
    out.push_back(static_cast<uint8_t>(u >> 8));
  }
  return out;
}

EncodedFrame DeserializeFrame(std::span<const uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not an encoded frame");
  }
  EncodedFrame f;
  f.width = static_cast<int>(GetU32(bytes, 4));
  f.height = static_cast<int>(GetU32(bytes, 8));
  f.channels = static_cast<int>(GetU32(bytes, 12));
  uint64_t rho_bits = 0;
  for (int i = 0; i < 8; ++i) rho_bits |= static_cast<uint64_t>(bytes[16 + i]) << (8 * i);
  std::memcpy(&f.rho_used, &rho_bits, sizeof rho_bits);
  if (f.width <= 0 || f.height <= 0 || (f.channels != 1 && f.channels != 3)) {
    throw FormatError("encoded frame has invalid dimensions");
  }
  f.padded_width = PadTo8(f.width);
  f.padded_height = PadTo8(f.height);
  const size_t count = static_cast<size_t>(f.padded_width) * f.padded_height *
                       f.channels;
  if (bytes.size() != kHeaderBytes + 2 * count) {
    throw FormatError("encoded frame payload size does not match dimensions");
  }
  f.coefficients.resize(count);
  for (size_t i = 0; i < count; ++i) {
    const size_t at = kHeaderBytes + 2 * i;
    f.coefficients[i] = static_cast<int16_t>(
        static_cast<uint16_t>(bytes[at] | (bytes[at + 1] << 8)));
  }
  f.rate_bits = EntropyBits(f.coefficients);
  return f;
}

}  // namespace cacp
