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
#include "cacp/imagery.h"

#include <algorithm>
#include <cmath>

#include "cacp/error.h"

namespace cacp {
namespace {

constexpr int kSuper = 4;
constexpr double kBackground = 60.0;
constexpr double kTexture = 10.0;
constexpr double kTargetLevel = 190.0;
constexpr double kOccluderLevel = 150.0;
constexpr double kRingPixels = 2.0;

struct PixelBox {
  int col_lo, col_hi, row_lo, row_hi;
};

// Pixel range touched by the rectangle grown by `grow` meters; unclipped.
PixelBox Footprint(const OrientedRect& r, const ViewGeometry& view,
                   double grow) {
  const double c = std::abs(std::cos(r.angle));
  const double s = std::abs(std::sin(r.angle));
  const double ex = c * r.half_extents.x + s * r.half_extents.y + grow;
  const double ey = s * r.half_extents.x + c * r.half_extents.y + grow;
  const double half = view.size / 2.0;
  return {static_cast<int>(std::floor((r.center.x - ex) / view.pixel_size + half)),
          static_cast<int>(std::floor((r.center.x + ex) / view.pixel_size + half)),
          static_cast<int>(std::floor(half - (r.center.y + ey) / view.pixel_size)),
          static_cast<int>(std::floor(half - (r.center.y - ey) / view.pixel_size))};
}

double Coverage(const OrientedRect& r, const ViewGeometry& view, int col,
                int row) {
  const double half = view.size / 2.0;
  int inside = 0;
  for (int sy = 0; sy < kSuper; ++sy) {
    for (int sx = 0; sx < kSuper; ++sx) {
      const Vec2 p{(col + (sx + 0.5) / kSuper - half) * view.pixel_size,
                   (half - row - (sy + 0.5) / kSuper) * view.pixel_size};
      inside += r.Contains(p, 0.0) ? 1 : 0;
    }
  }
  return static_cast<double>(inside) / (kSuper * kSuper);
}

bool InView(const ViewGeometry& view, int col, int row) {
  return col >= 0 && row >= 0 && col < view.size && row < view.size;
}

}  // namespace

Vec2 ViewGeometry::PixelCenter(int col, int row) const {
  return {(col + 0.5 - size / 2.0) * pixel_size,
          (size / 2.0 - row - 0.5) * pixel_size};
}

Image RenderView(const DetectionSet& detections, const ViewGeometry& view,
                 double exposure) {
  if (view.size <= 0 || !(view.pixel_size > 0.0)) {
    throw InputError("invalid view geometry");
  }
  Image img(view.size, view.size, 1);
  for (int row = 0; row < view.size; ++row) {
    for (int col = 0; col < view.size; ++col) {
      const Vec2 p = view.PixelCenter(col, row);
      img.at(0, row, col) =
          kBackground + kTexture * std::sin(0.21 * p.x) * std::cos(0.17 * p.y);
    }
  }
  for (const Detection& d : detections.detections) {
    const double level = d.occluder ? kOccluderLevel : kTargetLevel;
    const PixelBox box = Footprint(d.observed, view, 0.0);
    for (int row = std::max(0, box.row_lo); row <= std::min(view.size - 1, box.row_hi); ++row) {
      for (int col = std::max(0, box.col_lo); col <= std::min(view.size - 1, box.col_hi); ++col) {
        const double f = Coverage(d.observed, view, col, row);
        if (f > 0.0) img.at(0, row, col) = img.at(0, row, col) * (1.0 - f) + level * f;
      }
    }
  }
  for (double& s : img.samples()) s = std::clamp(s * exposure, 0.0, 255.0);
  return img;
}

std::optional<double> DetectionContrast(const Image& view_image,
                                        const DetectionSet& detections,
                                        size_t index,
                                        const ViewGeometry& view) {
  if (index >= detections.detections.size()) {
    throw InputError("detection index out of range");
  }
  const OrientedRect& rect = detections.detections[index].observed;
  const double grow = kRingPixels * view.pixel_size;
  const PixelBox outer = Footprint(rect, view, grow);
  if (!InView(view, outer.col_lo, outer.row_lo) ||
      !InView(view, outer.col_hi, outer.row_hi)) {
    return std::nullopt;
  }
  const OrientedRect grown{rect.center, rect.half_extents + Vec2{grow, grow},
                           rect.angle};

  double fg = 0.0;
  int fg_n = 0;
  double bg = 0.0;
  int bg_n = 0;
  for (int row = outer.row_lo; row <= outer.row_hi; ++row) {
    for (int col = outer.col_lo; col <= outer.col_hi; ++col) {
      const double f = Coverage(rect, view, col, row);
      if (f >= 0.5) {
        fg += view_image.at(0, row, col);
        ++fg_n;
        continue;
      }
      if (f > 0.0 || !grown.Contains(view.PixelCenter(col, row))) continue;
      bool clear = true;
      for (size_t j = 0; j < detections.detections.size() && clear; ++j) {
        if (j == index) continue;
        clear = Coverage(detections.detections[j].observed, view, col, row) == 0.0;
      }
      if (clear) {
        bg += view_image.at(0, row, col);
        ++bg_n;
      }
    }
  }
  if (fg_n == 0) {
    const double half = view.size / 2.0;
    const int col = static_cast<int>(std::floor(rect.center.x / view.pixel_size + half));
    const int row = static_cast<int>(std::floor(half - rect.center.y / view.pixel_size));
    if (!InView(view, col, row)) return std::nullopt;
    fg = view_image.at(0, row, col);
    fg_n = 1;
  }
  if (bg_n == 0) return std::nullopt;
  return fg / fg_n - bg / bg_n;
}

}  // namespace cacp
