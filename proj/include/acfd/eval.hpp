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
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "acfd/box.hpp"
#include "acfd/postprocess.hpp"

namespace acfd {

/// Single-class average precision.
///
/// Detections from all images are ranked by descending score (ties: image
/// order, then detection order). Each detection is compared with the ground
/// truth of its image it overlaps most; it is a true positive when that IoU
/// reaches `iou_thresh` and the ground truth has not been claimed yet.
/// AP is the all-point interpolated area under the precision/recall curve.
///
/// With no ground truth at all, AP is 1 when there are also no detections
/// and 0 otherwise.
inline double evaluate_ap(std::span<const std::vector<Box>> gts, std::span<const std::vector<Detection>> dets,
                          double iou_thresh = 0.5) {
  std::size_t total_gt = 0;
  for (const auto& g : gts) total_gt += g.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> ranked;  // score, image, det
  for (std::size_t img = 0; img < dets.size(); ++img)
    for (std::size_t d = 0; d < dets[img].size(); ++d) ranked.emplace_back(dets[img][d].score, img, d);
  if (total_gt == 0) return ranked.empty() ? 1.0 : 0.0;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });

  std::vector<std::vector<bool>> claimed(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) claimed[i].assign(gts[i].size(), false);

  std::vector<double> precision, recall;
  std::size_t tp = 0, fp = 0;
  for (const auto& [score, img, d] : ranked) {
    const Box& box = dets[img][d].box;
    double best = -1.0;
    std::size_t best_gt = 0;
    if (img < gts.size())
      for (std::size_t g = 0; g < gts[img].size(); ++g) {
        double v = iou(box, gts[img][g]);
        if (v > best) {
          best = v;
          best_gt = g;
        }
      }
    if (best >= iou_thresh && !claimed[img][best_gt]) {
      claimed[img][best_gt] = true;
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(double(tp) / double(tp + fp));
    recall.push_back(double(tp) / double(total_gt));
  }

  // Precision envelope from the right, then sum over recall steps.
  for (std::size_t i = precision.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

inline double evaluate_ap(const std::vector<std::vector<Box>>& gts, const std::vector<std::vector<Detection>>& dets,
                          double iou_thresh = 0.5) {
  return evaluate_ap(std::span<const std::vector<Box>>(gts), std::span<const std::vector<Detection>>(dets), iou_thresh);
}

}  // namespace acfd
