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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "acfd/anchors.hpp"
#include "acfd/box.hpp"
#include "acfd/head.hpp"
#include "acfd/tensor.hpp"

namespace acfd {

struct Detection {
  Box box;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Inference constants: per-scale confidence filter and top-k, NMS overlap,
/// final top-k.
struct PostprocessConfig {
  double conf_thresh = 0.08;
  std::size_t per_scale_top_k = 1000;
  double nms_iou = 0.55;
  std::size_t final_top_k = 100;
};

/// Greedy NMS. Candidates are visited in descending score (ties keep input
/// order); a candidate is dropped when its IoU with any kept box exceeds
/// the threshold.
inline std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  std::vector<Detection> kept;
  for (std::size_t idx : order) {
    const Box& b = dets[idx].box;
    bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) { return iou(k.box, b) > iou_thresh; });
    if (!suppressed) kept.push_back(dets[idx]);
  }
  return kept;
}

/// Geometry of one test scale: the original frame, the resized frame the
/// network sees before padding, and the /128 padded canvas.
struct ScaleInfo {
  Extent2 original;
  Extent2 resized;
  Extent2 padded;

  double sx() const { return double(resized.w) / double(original.w); }
  double sy() const { return double(resized.h) / double(original.h); }
};

inline std::size_t round_up(std::size_t v, std::size_t multiple) { return (v + multiple - 1) / multiple * multiple; }

inline Extent2 padded_size(Extent2 size) { return {round_up(size.h, 128), round_up(size.w, 128)}; }

inline ScaleInfo make_scale_info(Extent2 original, Extent2 target) { return {original, target, padded_size(target)}; }

/// The three multi-scale test sizes as (height, width).
inline std::vector<Extent2> multi_scale_sizes() { return {{480, 645}, {640, 860}, {800, 1075}}; }

inline Box to_scale(const Box& b, const ScaleInfo& s) {
  return {b.x1 * s.sx(), b.y1 * s.sy(), b.x2 * s.sx(), b.y2 * s.sy()};
}

inline Box to_original(const Box& b, const ScaleInfo& s) {
  return {b.x1 / s.sx(), b.y1 / s.sy(), b.x2 / s.sx(), b.y2 / s.sy()};
}

/// Head output for the first image of a batch together with its scale.
template <class T>
struct ScaleOutput {
  HeadOutput<T> head;
  ScaleInfo info;
};

/// Candidates of one scale: sigmoid > conf, top-k by score (ties by anchor
/// index), decoded against the padded-canvas anchors, mapped back to the
/// original frame and clipped to it. Boxes left with zero area after
/// clipping (predicted entirely inside the padding) are dropped.
template <class T>
std::vector<Detection> scale_candidates(const ScaleOutput<T>& so, const PostprocessConfig& cfg) {
  const AnchorSet anchors = generate_anchors(so.info.padded);
  const auto logits = so.head.flat_cls(0);
  if (logits.size() != anchors.size()) throw ShapeError("head output does not match the anchor grid");
  std::vector<std::pair<double, std::size_t>> passing;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-double(logits[i])));
    if (p > cfg.conf_thresh) passing.emplace_back(p, i);
  }
  std::stable_sort(passing.begin(), passing.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  if (passing.size() > cfg.per_scale_top_k) passing.resize(cfg.per_scale_top_k);
  const auto deltas = so.head.flat_reg(0);
  std::vector<Detection> out;
  out.reserve(passing.size());
  for (const auto& [score, idx] : passing) {
    Box b = to_original(decode(anchors.boxes[idx], deltas[idx]), so.info);
    b = clip(b, double(so.info.original.w), double(so.info.original.h));
    if (b.x2 > b.x1 && b.y2 > b.y1) out.push_back({b, score});
  }
  return out;
}

template <class T>
std::vector<Detection> postprocess(std::span<const ScaleOutput<T>> scales, const PostprocessConfig& cfg = {}) {
  std::vector<Detection> merged;
  for (const auto& so : scales) {
    auto c = scale_candidates(so, cfg);
    merged.insert(merged.end(), c.begin(), c.end());
  }
  auto kept = nms(merged, cfg.nms_iou);
  if (kept.size() > cfg.final_top_k) kept.resize(cfg.final_top_k);
  return kept;
}

}  // namespace acfd
