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
#ifndef CACP_IMAGE_H_
#define CACP_IMAGE_H_

#include <cassert>
#include <span>
#include <string>
#include <vector>

namespace cacp {

// Planar floating-point image with 1 or 3 channels. Samples are nominally in
// [0, 255] but intermediate results may leave that range.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return samples_.empty(); }
  size_t plane_size() const { return static_cast<size_t>(width_) * height_; }

  double& at(int c, int y, int x) {
    assert(c >= 0 && c < channels_ && y >= 0 && y < height_ && x >= 0 &&
           x < width_);
    return samples_[c * plane_size() + static_cast<size_t>(y) * width_ + x];
  }
  double at(int c, int y, int x) const {
    assert(c >= 0 && c < channels_ && y >= 0 && y < height_ && x >= 0 &&
           x < width_);
    return samples_[c * plane_size() + static_cast<size_t>(y) * width_ + x];
  }

  std::span<double> plane(int c) {
    return {samples_.data() + c * plane_size(), plane_size()};
  }
  std::span<const double> plane(int c) const {
    return {samples_.data() + c * plane_size(), plane_size()};
  }

  std::vector<double>& samples() { return samples_; }
  const std::vector<double>& samples() const { return samples_; }

  bool SameShape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_ &&
           channels_ == o.channels_;
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> samples_;
};

// Clamps every sample to [0, 255].
void ClampSamples(Image& img);

// Binary PGM (P5) for one channel, PPM (P6) for three; maxval 255 only.
// Samples are rounded and clamped when written.
Image ReadPnm(const std::string& path);
void WritePnm(const std::string& path, const Image& img);

}  // namespace cacp

#endif  // CACP_IMAGE_H_
