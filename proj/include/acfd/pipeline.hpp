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
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "acfd/image.hpp"
#include "acfd/model.hpp"
#include "acfd/postprocess.hpp"

namespace acfd {

struct DetectOptions {
  std::vector<Extent2> scales = multi_scale_sizes();
  std::array<float, 3> mean{0.5f, 0.5f, 0.5f};
  PostprocessConfig post;
};

/// Resize to the scale, subtract the channel means, zero-pad to /128.
inline Tensor4<float> prepare_input(const Image& img, const ScaleInfo& info, const std::array<float, 3>& mean) {
  return pad_to(subtract_mean(resize_bilinear(img, info.resized), mean), info.padded);
}

/// Full multi-scale inference: forward at every scale, then postprocess.
inline std::vector<Detection> detect(const Model<float>& model, const Image& img, const DetectOptions& opts = {}) {
  std::vector<ScaleOutput<float>> outputs;
  for (const auto& scale : opts.scales) {
    ScaleInfo info = make_scale_info({img.h(), img.w()}, scale);
    outputs.push_back({model_forward(model, prepare_input(img, info, opts.mean)), info});
  }
  return postprocess(std::span<const ScaleOutput<float>>(outputs), opts.post);
}

/// One JSON object per line: {"image_id", "x1", "y1", "x2", "y2", "score"},
/// numbers with four fixed decimals.
inline std::string detections_jsonl(const std::string& image_id, const std::vector<Detection>& dets) {
  const std::string id = nlohmann::json(image_id).dump();
  std::string out;
  char buf[256];
  for (const auto& d : dets) {
    std::snprintf(buf, sizeof(buf), ",\"x1\":%.4f,\"y1\":%.4f,\"x2\":%.4f,\"y2\":%.4f,\"score\":%.4f}\n", d.box.x1,
                  d.box.y1, d.box.x2, d.box.y2, d.score);
    out += "{\"image_id\":" + id + buf;
  }
  return out;
}

}  // namespace acfd
