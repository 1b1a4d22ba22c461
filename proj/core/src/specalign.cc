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
#include "cacp/specalign.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "cacp/error.h"

namespace cacp {

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace {

// exp(-2 pi i k / n) for k < n / 2, cached per length and thread.
const std::vector<Complex>& Twiddles(size_t n) {
  thread_local std::vector<std::vector<Complex>> cache;
  size_t log2n = 0;
  while ((size_t{1} << log2n) < n) ++log2n;
  if (cache.size() <= log2n) cache.resize(log2n + 1);
  std::vector<Complex>& t = cache[log2n];
  if (t.empty() && n > 1) {
    t.resize(n / 2);
    for (size_t k = 0; k < n / 2; ++k) {
      t[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(n));
    }
  }
  return t;
}

}  // namespace

void Fft1d(std::span<Complex> data, bool inverse) {
  const size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw InputError("FFT length must be a power of two");
  }
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const std::vector<Complex>& tw = Twiddles(n);
  const double sign = inverse ? -1.0 : 1.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t half = len / 2;
    const size_t stride = n / len;
    for (size_t k = 0; k < half; ++k) {
      const double wr = tw[k * stride].real();
      const double wi = sign * tw[k * stride].imag();
      for (size_t start = 0; start < n; start += len) {
        const Complex a = data[start + k];
        const Complex b = data[start + k + half];
        // Plain product; std::complex's operator* adds inf/nan recovery.
        const Complex bw(b.real() * wr - b.imag() * wi,
                         b.real() * wi + b.imag() * wr);
        data[start + k] = Complex(a.real() + bw.real(), a.imag() + bw.imag());
        data[start + k + half] =
            Complex(a.real() - bw.real(), a.imag() - bw.imag());
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (Complex& v : data) v *= scale;
  }
}

namespace {

// Row transforms followed by column transforms on one channel plane.
void Fft2InPlace(std::span<Complex> plane, int width, int height,
                 bool inverse) {
  for (int v = 0; v < height; ++v) {
    Fft1d(plane.subspan(static_cast<size_t>(v) * width, width), inverse);
  }
  std::vector<Complex> column(height);
  for (int u = 0; u < width; ++u) {
    for (int v = 0; v < height; ++v) column[v] = plane[static_cast<size_t>(v) * width + u];
    Fft1d(column, inverse);
    for (int v = 0; v < height; ++v) plane[static_cast<size_t>(v) * width + u] = column[v];
  }
}

void CheckTransformable(const Image& img) {
  if (img.empty()) throw InputError("cannot transform an empty image");
  if (!IsPowerOfTwo(img.width()) || !IsPowerOfTwo(img.height()) ||
      img.width() < 2 || img.height() < 2) {
    throw InputError("FFT needs power-of-two sides of at least 2");
  }
}

double ArgOrZero(Complex z) {
  if (z == Complex(0.0, 0.0)) return 0.0;
  const double a = std::arg(z);
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}

}  // namespace

Spectrum Fft2(const Image& img) {
  CheckTransformable(img);
  Spectrum s;
  s.width = img.width();
  s.height = img.height();
  s.channels = img.channels();
  s.coefficients.resize(img.samples().size());
  for (size_t i = 0; i < s.coefficients.size(); ++i) {
    s.coefficients[i] = Complex(img.samples()[i], 0.0);
  }
  const size_t plane = img.plane_size();
  for (int c = 0; c < s.channels; ++c) {
    Fft2InPlace(std::span<Complex>(s.coefficients).subspan(c * plane, plane),
                s.width, s.height, false);
  }
  return s;
}

Image Ifft2(const Spectrum& spec) {
  if (spec.width <= 0 || spec.height <= 0 ||
      (spec.channels != 1 && spec.channels != 3) ||
      spec.coefficients.size() !=
          static_cast<size_t>(spec.width) * spec.height * spec.channels) {
    throw InputError("spectrum dimensions do not match its coefficients");
  }
  if (!IsPowerOfTwo(spec.width) || !IsPowerOfTwo(spec.height)) {
    throw InputError("inverse FFT needs power-of-two sides");
  }
  std::vector<Complex> work = spec.coefficients;
  const size_t plane = static_cast<size_t>(spec.width) * spec.height;
  for (int c = 0; c < spec.channels; ++c) {
    Fft2InPlace(std::span<Complex>(work).subspan(c * plane, plane), spec.width,
                spec.height, true);
  }
  Image img(spec.width, spec.height, spec.channels);
  for (size_t i = 0; i < work.size(); ++i) img.samples()[i] = work[i].real();
  return img;
}

AmplitudePhase Decompose(const Spectrum& spec) {
  AmplitudePhase ap;
  ap.width = spec.width;
  ap.height = spec.height;
  ap.channels = spec.channels;
  ap.amplitude.resize(spec.coefficients.size());
  ap.phase.resize(spec.coefficients.size());
  for (size_t i = 0; i < spec.coefficients.size(); ++i) {
    ap.amplitude[i] = std::abs(spec.coefficients[i]);
    ap.phase[i] = ap.amplitude[i] == 0.0 ? 0.0 : ArgOrZero(spec.coefficients[i]);
  }
  return ap;
}

Spectrum Recompose(const AmplitudePhase& ap) {
  if (ap.amplitude.size() != ap.phase.size()) {
    throw InputError("amplitude and phase differ in size");
  }
  Spectrum s;
  s.width = ap.width;
  s.height = ap.height;
  s.channels = ap.channels;
  s.coefficients.resize(ap.amplitude.size());
  for (size_t i = 0; i < ap.amplitude.size(); ++i) {
    s.coefficients[i] = std::polar(ap.amplitude[i], ap.phase[i]);
  }
  return s;
}

void AlignParams::Validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  if (!(mask_radius >= 0.0 && mask_radius <= 1.0)) {
    throw DomainError("mask_radius must lie in [0, 1]");
  }
}

bool InAlignmentMask(int u, int v, int width, int height, double radius) {
  const double half = radius * std::min(width, height) / 2.0;
  if (!(half > 0.0)) return false;
  const int fu = u <= width / 2 ? u : u - width;
  const int fv = v <= height / 2 ? v : v - height;
  return std::abs(fu) <= half && std::abs(fv) <= half;
}

Image ZeroPadToPowerOfTwo(const Image& img) {
  const int w = NextPowerOfTwo(std::max(img.width(), 2));
  const int h = NextPowerOfTwo(std::max(img.height(), 2));
  if (w == img.width() && h == img.height()) return img;
  Image out(w, h, img.channels(), 0.0);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) out.at(c, y, x) = img.at(c, y, x);
    }
  }
  return out;
}

Image Crop(const Image& img, int width, int height) {
  if (width > img.width() || height > img.height()) {
    throw InputError("crop exceeds image bounds");
  }
  if (width == img.width() && height == img.height()) return img;
  Image out(width, height, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) out.at(c, y, x) = img.at(c, y, x);
    }
  }
  return out;
}

Image AlignAmplitude(const Image& src, const Image& ref,
                     const AlignParams& params) {
  params.Validate();
  if (src.empty() || !src.SameShape(ref)) {
    throw InputError("alignment needs non-empty images of equal shape");
  }
  if (params.beta == 0.0 || params.mask_radius == 0.0) {
    Image out = src;
    ClampSamples(out);
    return out;
  }

  const Image src_padded = ZeroPadToPowerOfTwo(src);
  const Image ref_padded = ZeroPadToPowerOfTwo(ref);
  Spectrum spec = Fft2(src_padded);
  const Spectrum ref_spec = Fft2(ref_padded);
  const int w = spec.width;
  const int h = spec.height;
  for (int c = 0; c < spec.channels; ++c) {
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        if (!InAlignmentMask(u, v, w, h, params.mask_radius)) continue;
        const Complex s = spec.at(c, v, u);
        const double amp = (1.0 - params.beta) * std::abs(s) +
                           params.beta * std::abs(ref_spec.at(c, v, u));
        spec.at(c, v, u) = std::polar(amp, ArgOrZero(s));
      }
    }
  }
  Image out = Crop(Ifft2(spec), src.width(), src.height());
  ClampSamples(out);
  return out;
}

double AmplitudeHistogramDistance(const Image& a, const Image& b) {
  if (a.empty() || b.empty() || a.channels() != b.channels()) {
    throw InputError("histogram distance needs non-empty images with equal channels");
  }
  const int w = NextPowerOfTwo(std::max({a.width(), b.width(), 2}));
  const int h = NextPowerOfTwo(std::max({a.height(), b.height(), 2}));
  constexpr int kBins = 64;
  const double top = std::log1p(255.0 * w * h);

  auto histogram = [&](const Image& img) {
    Image padded(w, h, img.channels(), 0.0);
    for (int c = 0; c < img.channels(); ++c) {
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) padded.at(c, y, x) = img.at(c, y, x);
      }
    }
    const Spectrum s = Fft2(padded);
    std::vector<double> hist(kBins, 0.0);
    for (const Complex& z : s.coefficients) {
      const double t = std::log1p(std::abs(z)) / top;
      const int bin = std::clamp(static_cast<int>(t * kBins), 0, kBins - 1);
      hist[bin] += 1.0;
    }
    for (double& v : hist) v /= static_cast<double>(s.coefficients.size());
    return hist;
  };

  const std::vector<double> ha = histogram(a);
  const std::vector<double> hb = histogram(b);
  double d = 0.0;
  for (int i = 0; i < kBins; ++i) d += std::abs(ha[i] - hb[i]);
  return d;
}

void WriteSpectrumRaw(const std::string& path, const Spectrum& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  for (const Complex& z : spec.coefficients) {
    const double parts[2] = {z.real(), z.imag()};
    out.write(reinterpret_cast<const char*>(parts), sizeof parts);
  }
  if (!out) throw InputError("failed writing " + path);
}

}  // namespace cacp
