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

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "acfd/anchors.hpp"
#include "acfd/box.hpp"
#include "acfd/error.hpp"

namespace acfd {

enum class MatchLabel : std::uint8_t { negative = 0, matched = 1, compensated = 2 };

inline constexpr std::size_t kNoGt = std::numeric_limits<std::size_t>::max();

struct MatchResult {
  std::vector<MatchLabel> labels;
  std::vector<std::size_t> assigned_gt;  // kNoGt for negatives
  std::vector<Delta4> targets;           // zero for negatives

  std::size_t size() const { return labels.size(); }
  std::size_t count(MatchLabel l) const {
    std::size_t n = 0;
    for (auto v : labels) n += v == l;
    return n;
  }
};

struct ArgMax {
  std::size_t index = kNoGt;
  double value = 0.0;
};

/// Best IoU of `box` over gts; ties go to the lowest index.
inline ArgMax best_overlap(const Box& box, std::span<const Box> gts) {
  ArgMax best;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    double v = iou(box, gts[g]);
    if (best.index == kNoGt || v > best.value) best = {g, v};
  }
  return best;
}

/// Two-step dynamic anchor match. Step one labels an anchor 1 when its best
/// IoU against the ground truths reaches t1. Otherwise step two looks at the
/// anchor's regressed box and labels it 2 when that box's best IoU reaches t2.
/// Targets always encode the assigned ground truth against the anchor.
inline MatchResult dam_match(std::span<const Box> anchors, std::span<const Box> regressed, std::span<const Box> gts,
                             double t1, double t2) {
  if (regressed.size() != anchors.size()) throw ShapeError("dam_match: one regressed box per anchor required");
  MatchResult r;
  r.labels.assign(anchors.size(), MatchLabel::negative);
  r.assigned_gt.assign(anchors.size(), kNoGt);
  r.targets.assign(anchors.size(), Delta4{0, 0, 0, 0});
  if (gts.empty()) return r;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    ArgMax a = best_overlap(anchors[i], gts);
    if (a.value >= t1) {
      r.labels[i] = MatchLabel::matched;
      r.assigned_gt[i] = a.index;
    } else {
      ArgMax b = best_overlap(regressed[i], gts);
      if (b.value >= t2) {
        r.labels[i] = MatchLabel::compensated;
        r.assigned_gt[i] = b.index;
      }
    }
    if (r.assigned_gt[i] != kNoGt) r.targets[i] = encode(anchors[i], gts[r.assigned_gt[i]]);
  }
  return r;
}

inline MatchResult dam_match(const AnchorSet& anchors, std::span<const Box> regressed, std::span<const Box> gts,
                             double t1, double t2) {
  return dam_match(std::span<const Box>(anchors.boxes), regressed, gts, t1, t2);
}

/// Single-step threshold matcher (dam_match with the second step disabled).
inline MatchResult classic_match(std::span<const Box> anchors, std::span<const Box> gts, double t1) {
  return dam_match(anchors, anchors, gts, t1, std::numeric_limits<double>::infinity());
}

}  // namespace acfd
