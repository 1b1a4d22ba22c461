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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cacp/error.h"
#include "cacp/specalign.h"
#include "test_images.h"

namespace cacp {
namespace {

using testing::NoiseImage;
using testing::SmoothImage;

Image RandomReal(int w, int h, int channels, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  Image img(w, h, channels);
  for (double& s : img.samples()) s = u(rng);
  return img;
}

Complex NaiveDft(const Image& img, int c, int v, int u) {
  Complex s = 0.0;
  const int w = img.width(), h = img.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double angle = -2.0 * std::numbers::pi *
                           (static_cast<double>(u) * x / w + static_cast<double>(v) * y / h);
      s += img.at(c, y, x) * Complex(std::cos(angle), std::sin(angle));
    }
  }
  return s;
}

double MaxAbsDiff(const Image& a, const Image& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.samples().size(); ++i) {
    m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  }
  return m;
}

TEST(Fft2, MatchesNaiveDft) {
  const Image img = RandomReal(16, 8, 3, 1);
  const Spectrum s = Fft2(img);
  for (int c = 0; c < 3; ++c) {
    for (int v = 0; v < 8; ++v) {
      for (int u = 0; u < 16; ++u) {
        EXPECT_LT(std::abs(s.at(c, v, u) - NaiveDft(img, c, v, u)), 1e-9);
      }
    }
  }
}

TEST(Fft2, ConstantIsDcOnly) {
  const int n = 32;
  const Spectrum s = Fft2(Image(n, n, 1, 7.5));
  EXPECT_NEAR(s.at(0, 0, 0).real(), n * n * 7.5, 1e-9);
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      if (u || v) EXPECT_LT(std::abs(s.at(0, v, u)), 1e-9);
    }
  }
}

TEST(Fft2, CosineSplitsIntoTwoBins) {
  const int n = 32, u0 = 5;
  Image img(n, n, 1);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) img.at(0, y, x) = std::cos(2.0 * std::numbers::pi * u0 * x / n);
  }
  const Spectrum s = Fft2(img);
  EXPECT_NEAR(s.at(0, 0, u0).real(), n * n / 2.0, 1e-9);
  EXPECT_NEAR(s.at(0, 0, n - u0).real(), n * n / 2.0, 1e-9);
  double rest = 0.0;
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      if (v == 0 && (u == u0 || u == n - u0)) continue;
      rest += std::norm(s.at(0, v, u));
    }
  }
  EXPECT_LT(rest, 1e-12);
}

TEST(Fft2, Linear) {
  const Image x = RandomReal(16, 16, 1, 2), y = RandomReal(16, 16, 1, 3);
  Image mix(16, 16, 1);
  for (size_t i = 0; i < mix.samples().size(); ++i) {
    mix.samples()[i] = 2.5 * x.samples()[i] - 0.75 * y.samples()[i];
  }
  const Spectrum sx = Fft2(x), sy = Fft2(y), sm = Fft2(mix);
  for (size_t i = 0; i < sm.coefficients.size(); ++i) {
    EXPECT_LT(std::abs(sm.coefficients[i] - (2.5 * sx.coefficients[i] - 0.75 * sy.coefficients[i])), 1e-8);
  }
}

TEST(Fft2, ParsevalAndRoundTrip) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const Image img = RandomReal(64, 64, 1, seed);
    const Spectrum s = Fft2(img);
    double energy = 0.0, spectral = 0.0;
    for (double v : img.samples()) energy += v * v;
    for (const Complex& c : s.coefficients) spectral += std::norm(c);
    EXPECT_NEAR(spectral / (64.0 * 64.0), energy, 1e-6 * energy);
    EXPECT_LT(MaxAbsDiff(Ifft2(s), img), 1e-9);
  }
}

TEST(Fft2, Errors) {
  EXPECT_THROW(Fft2(Image()), InputError);
  EXPECT_THROW(Fft2(Image(12, 8, 1)), InputError);
  EXPECT_THROW(Fft2(Image(1, 8, 1)), InputError);
  Spectrum bad = Fft2(Image(8, 8, 1));
  bad.coefficients.pop_back();
  EXPECT_THROW(Ifft2(bad), InputError);
}

TEST(Ifft2, ZeroAndDcSpectra) {
  Spectrum s;
  s.width = s.height = 16;
  s.channels = 1;
  s.coefficients.assign(256, Complex(0.0, 0.0));
  for (double v : Ifft2(s).samples()) EXPECT_EQ(v, 0.0);
  s.at(0, 0, 0) = 256.0 * 42.0;
  for (double v : Ifft2(s).samples()) EXPECT_NEAR(v, 42.0, 1e-12);
}

TEST(Decompose, Conventions) {
  Spectrum s;
  s.width = 2;
  s.height = 2;
  s.channels = 1;
  s.coefficients = {Complex(3, 4), Complex(2.5, 0), Complex(0, 0), Complex(-1, 0)};
  const AmplitudePhase ap = Decompose(s);
  EXPECT_DOUBLE_EQ(ap.amplitude[0], 5.0);
  EXPECT_NEAR(ap.phase[0], 0.9273, 1e-4);
  EXPECT_EQ(ap.phase[1], 0.0);
  EXPECT_EQ(ap.amplitude[2], 0.0);
  EXPECT_EQ(ap.phase[2], 0.0);
  EXPECT_DOUBLE_EQ(ap.phase[3], std::numbers::pi);
}

TEST(Decompose, RecomposeIsExact) {
  const Spectrum s = Fft2(RandomReal(32, 16, 3, 8));
  const Spectrum r = Recompose(Decompose(s));
  for (size_t i = 0; i < s.coefficients.size(); ++i) {
    EXPECT_LE(std::abs(r.coefficients[i] - s.coefficients[i]),
              1e-12 * std::max(1.0, std::abs(s.coefficients[i])));
  }
  for (double a : Decompose(s).amplitude) EXPECT_GE(a, 0.0);
}

TEST(AlignmentMask, Shape) {
  // 64 wide: half-width 0.1 * 32 = 3.2 bins around DC, wrapping.
  EXPECT_TRUE(InAlignmentMask(0, 0, 64, 64, 0.1));
  EXPECT_TRUE(InAlignmentMask(3, 63, 64, 64, 0.1));
  EXPECT_TRUE(InAlignmentMask(61, 2, 64, 64, 0.1));
  EXPECT_FALSE(InAlignmentMask(4, 0, 64, 64, 0.1));
  EXPECT_FALSE(InAlignmentMask(0, 60, 64, 64, 0.1));
  EXPECT_FALSE(InAlignmentMask(0, 0, 64, 64, 0.0));
  for (int u = 0; u < 64; u += 7) {
    for (int v = 0; v < 64; v += 5) EXPECT_TRUE(InAlignmentMask(u, v, 64, 64, 1.0));
  }
  // The square follows the shorter side, so a wide image keeps its highest
  // horizontal frequencies out even at radius 1.
  EXPECT_TRUE(InAlignmentMask(16, 16, 64, 32, 1.0));
  EXPECT_FALSE(InAlignmentMask(32, 0, 64, 32, 1.0));
}

TEST(AlignAmplitude, SelfAlignmentIsIdentity) {
  const Image img = NoiseImage(64, 64, 3, 4);
  for (double beta : {0.3, 1.0}) {
    for (double r : {0.05, 0.5, 1.0}) {
      EXPECT_LT(MaxAbsDiff(AlignAmplitude(img, img, {beta, r}), img), 1e-6);
    }
  }
}

TEST(AlignAmplitude, BetaZeroAndEmptyMaskAreExact) {
  const Image src = NoiseImage(48, 40, 1, 5);
  const Image ref = NoiseImage(48, 40, 1, 6);
  EXPECT_EQ(AlignAmplitude(src, ref, {0.0, 0.7}), src);
  EXPECT_EQ(AlignAmplitude(src, ref, {1.0, 0.0}), src);
}

TEST(AlignAmplitude, FullReplacementKeepsSourcePhase) {
  const Image src = NoiseImage(64, 64, 1, 11, 110, 150);
  const Image ref = NoiseImage(64, 64, 1, 12, 100, 140);
  const Image out = AlignAmplitude(src, ref, {1.0, 1.0});
  for (double v : out.samples()) ASSERT_TRUE(v > 0.0 && v < 255.0);
  const AmplitudePhase o = Decompose(Fft2(out));
  const AmplitudePhase s = Decompose(Fft2(src));
  const AmplitudePhase r = Decompose(Fft2(ref));
  for (size_t i = 0; i < o.amplitude.size(); ++i) {
    EXPECT_NEAR(o.amplitude[i], r.amplitude[i], 1e-6 * std::max(1.0, r.amplitude[i]));
    if (o.amplitude[i] > 1e-9 && s.amplitude[i] > 1e-9) {
      const double d = std::remainder(o.phase[i] - s.phase[i], 2.0 * std::numbers::pi);
      EXPECT_LT(std::abs(d), 1e-6);
    }
  }
}

TEST(AlignAmplitude, PartialBlendInsideMaskOnly) {
  const Image src = SmoothImage(32, 32, 1);
  const Image ref = SmoothImage(32, 32, 2);
  const AlignParams p{0.4, 0.25};
  const Image out = AlignAmplitude(src, ref, p);
  for (double v : out.samples()) ASSERT_TRUE(v > 0.0 && v < 255.0);
  const AmplitudePhase o = Decompose(Fft2(out));
  const AmplitudePhase s = Decompose(Fft2(src));
  const AmplitudePhase r = Decompose(Fft2(ref));
  for (int v = 0; v < 32; ++v) {
    for (int u = 0; u < 32; ++u) {
      const size_t i = static_cast<size_t>(v) * 32 + u;
      const double expected = InAlignmentMask(u, v, 32, 32, p.mask_radius)
                                  ? 0.6 * s.amplitude[i] + 0.4 * r.amplitude[i]
                                  : s.amplitude[i];
      EXPECT_NEAR(o.amplitude[i], expected, 1e-6 * std::max(1.0, expected));
    }
  }
}

TEST(AlignAmplitude, ChannelsIndependent) {
  const Image src = NoiseImage(32, 32, 3, 20, 60, 190);
  const Image ref = NoiseImage(32, 32, 3, 21, 60, 190);
  const Image out = AlignAmplitude(src, ref, {0.8, 0.3});
  for (int c = 0; c < 3; ++c) {
    Image s1(32, 32, 1), r1(32, 32, 1);
    std::copy(src.plane(c).begin(), src.plane(c).end(), s1.samples().begin());
    std::copy(ref.plane(c).begin(), ref.plane(c).end(), r1.samples().begin());
    const Image o1 = AlignAmplitude(s1, r1, {0.8, 0.3});
    for (size_t i = 0; i < o1.samples().size(); ++i) {
      EXPECT_EQ(o1.samples()[i], out.plane(c)[i]);
    }
  }
}

TEST(AlignAmplitude, NonPowerOfTwoKeepsShape) {
  const Image src = NoiseImage(50, 30, 1, 1);
  const Image ref = NoiseImage(50, 30, 1, 2);
  const Image out = AlignAmplitude(src, ref, {1.0, 0.1});
  EXPECT_TRUE(out.SameShape(src));
  for (double v : out.samples()) EXPECT_TRUE(v >= 0.0 && v <= 255.0);
}

TEST(AlignAmplitude, ContinuousInBeta) {
  const Image src = SmoothImage(32, 32, 5);
  const Image ref = NoiseImage(32, 32, 1, 6);
  const Image a = AlignAmplitude(src, ref, {0.5, 0.2});
  const Image b = AlignAmplitude(src, ref, {0.51, 0.2});
  const AmplitudePhase s = Decompose(Fft2(src));
  const AmplitudePhase r = Decompose(Fft2(ref));
  double bound = 0.0;
  for (size_t i = 0; i < s.amplitude.size(); ++i) {
    bound += std::abs(r.amplitude[i] - s.amplitude[i]);
  }
  // |ifft(X)|_inf <= sum|X| / N for the difference spectrum.
  EXPECT_LE(MaxAbsDiff(a, b), 0.01 * bound / (32.0 * 32.0) + 1e-9);
}

TEST(AlignAmplitude, Errors) {
  EXPECT_THROW(AlignAmplitude(Image(8, 8, 1), Image(8, 16, 1), {}), InputError);
  EXPECT_THROW(AlignAmplitude(Image(8, 8, 1), Image(8, 8, 3), {}), InputError);
  EXPECT_THROW((AlignParams{1.5, 0.1}.Validate()), Error);
  EXPECT_THROW((AlignParams{0.5, -0.1}.Validate()), Error);
}

TEST(AmplitudeHistogram, Distance) {
  const Image a = NoiseImage(32, 32, 1, 1);
  const Image b = SmoothImage(32, 32, 2);
  EXPECT_EQ(AmplitudeHistogramDistance(a, a), 0.0);
  const double d = AmplitudeHistogramDistance(a, b);
  EXPECT_GT(d, 0.0);
  EXPECT_LE(d, 2.0);
  EXPECT_DOUBLE_EQ(d, AmplitudeHistogramDistance(b, a));
}

TEST(Padding, PadAndCrop) {
  const Image img = NoiseImage(5, 3, 1, 1);
  const Image padded = ZeroPadToPowerOfTwo(img);
  EXPECT_EQ(padded.width(), 8);
  EXPECT_EQ(padded.height(), 4);
  EXPECT_EQ(padded.at(0, 3, 7), 0.0);
  EXPECT_EQ(Crop(padded, 5, 3), img);
  EXPECT_EQ(NextPowerOfTwo(5), 8);
  EXPECT_EQ(NextPowerOfTwo(8), 8);
  EXPECT_TRUE(IsPowerOfTwo(64));
  EXPECT_FALSE(IsPowerOfTwo(48));
}

}  // namespace
}  // namespace cacp
