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
#ifndef CACP_IMAGERY_H_
#define CACP_IMAGERY_H_

#include <optional>
#include <vector>

#include "cacp/image.h"
#include "cacp/worldsim.h"

namespace cacp {

// Bird's-eye camera surrogate: a single-channel view centered on the sensing
// vehicle, in its own frame, with +x to the right and +y up.
struct ViewGeometry {
  int size = 256;
  double pixel_size = 0.25;

  // Local-frame coordinates of the center of pixel (col, row).
  Vec2 PixelCenter(int col, int row) const;
};

// Textured background with every detection drawn by area coverage, scaled by
// the camera exposure.
Image RenderView(const DetectionSet& detections, const ViewGeometry& view,
                 double exposure);

// Mean footprint intensity minus mean of a 2-pixel ring around it that is
// free of other detections. Empty when the footprint or ring falls outside
// the view.
std::optional<double> DetectionContrast(const Image& view_image,
                                        const DetectionSet& detections,
                                        size_t index, const ViewGeometry& view);

}  // namespace cacp

#endif  // CACP_IMAGERY_H_
