/* Copyright 2026 The ACFD Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "acfd/backbone.hpp"
#include "acfd/box.hpp"
#include "acfd/error.hpp"
#include "acfd/tensor.hpp"

namespace acfd {

inline constexpr double kAnchorScale = 4.0;

/// One square anchor per cell per level. Order: level-major, then row-major
/// with x fastest. This order is the flattening contract for head outputs.
struct AnchorSet {
  Extent2 image;
  std::vector<Box> boxes;
  std::array<std::size_t, kLevels> level_offsets{};
  std::array<std::size_t, kLevels> strides = kStrides;

  std::size_t size() const { return boxes.size(); }
};

inline AnchorSet generate_anchors(Extent2 image) {
  if (image.h == 0 || image.w == 0 || image.h % 128 != 0 || image.w % 128 != 0)
    throw ShapeError("anchor grid needs image dims divisible by 128, got " + std::to_string(image.h) + "x" +
                     std::to_string(image.w));
  AnchorSet set;
  set.image = image;
  for (std::size_t l = 0; l < kLevels; ++l) {
    set.level_offsets[l] = set.boxes.size();
    const double s = double(kStrides[l]);
    const double half = 0.5 * kAnchorScale * s;
    const std::size_t rows = image.h / kStrides[l], cols = image.w / kStrides[l];
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        const double cx = (double(j) + 0.5) * s, cy = (double(i) + 0.5) * s;
        set.boxes.push_back({cx - half, cy - half, cx + half, cy + half});
      }
  }
  return set;
}

}  // namespace acfd
