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

// Independent reference implementations used by the test suites and by
// `acfd verify`. They favour obviousness over speed and deliberately avoid
// calling the optimized code paths they are compared against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "acfd/box.hpp"
#include "acfd/losses.hpp"
#include "acfd/matching.hpp"
#include "acfd/postprocess.hpp"

namespace acfd::oracle {

inline double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

inline double box_iou(const Box& a, const Box& b) {
  const double inter = overlap_1d(a.x1, a.x2, b.x1, b.x2) * overlap_1d(a.y1, a.y2, b.y1, b.y2);
  const double area_a = std::max(0.0, a.x2 - a.x1) * std::max(0.0, a.y2 - a.y1);
  const double area_b = std::max(0.0, b.x2 - b.x1) * std::max(0.0, b.y2 - b.y1);
  const double uni = area_a + area_b - inter;
  return uni > 0 ? inter / uni : 0.0;
}

/// First index holding the row maximum.
inline std::size_t first_argmax(const std::vector<double>& row) {
  const double m = *std::max_element(row.begin(), row.end());
  return std::size_t(std::find(row.begin(), row.end(), m) - row.begin());
}

/// Two full passes over precomputed IoU matrices: pass one assigns every
/// anchor that clears t1, pass two revisits only the leftovers.
struct DamOracleResult {
  std::vector<int> labels;
  std::vector<long> assigned;  // -1 for negatives
};

inline DamOracleResult dam(std::span<const Box> anchors, std::span<const Box> regressed, std::span<const Box> gts,
                           double t1, double t2) {
  DamOracleResult r{std::vector<int>(anchors.size(), 0), std::vector<long>(anchors.size(), -1)};
  if (gts.empty()) return r;
  std::vector<std::vector<double>> anchor_iou(anchors.size()), box_iou_m(anchors.size());
  for (std::size_t i = 0; i < anchors.size(); ++i)
    for (const auto& g : gts) {
      anchor_iou[i].push_back(box_iou(anchors[i], g));
      box_iou_m[i].push_back(box_iou(regressed[i], g));
    }
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    std::size_t g = first_argmax(anchor_iou[i]);
    if (anchor_iou[i][g] >= t1) {
      r.labels[i] = 1;
      r.assigned[i] = long(g);
    }
  }
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (r.labels[i] != 0) continue;
    std::size_t g = first_argmax(box_iou_m[i]);
    if (box_iou_m[i][g] >= t2) {
      r.labels[i] = 2;
      r.assigned[i] = long(g);
    }
  }
  return r;
}

/// Repeatedly takes the best remaining candidate (lowest index on score ties)
/// and deletes everything overlapping it by more than the threshold.
inline std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh) {
  std::vector<bool> alive(dets.size(), true);
  std::vector<Detection> kept;
  while (true) {
    long best = -1;
    for (std::size_t i = 0; i < dets.size(); ++i)
      if (alive[i] && (best < 0 || dets[i].score > dets[std::size_t(best)].score)) best = long(i);
    if (best < 0) break;
    const Detection& d = dets[std::size_t(best)];
    kept.push_back(d);
    alive[std::size_t(best)] = false;
    for (std::size_t i = 0; i < dets.size(); ++i)
      if (alive[i] && box_iou(dets[i].box, d.box) > iou_thresh) alive[i] = false;
  }
  return kept;
}

/// Anchor count by walking every cell of every level.
inline std::size_t count_anchors(std::size_t h, std::size_t w) {
  std::size_t n = 0;
  for (std::size_t s : {4u, 8u, 16u, 32u, 64u, 128u})
    for (std::size_t y = 0; y + s <= h; y += s)
      for (std::size_t x = 0; x + s <= w; x += s) ++n;
  return n;
}

/// Central finite differences of total_loss with respect to every
/// prediction component and probability.
template <class T>
LossGradient<T> finite_difference(const MatchResult& m, std::vector<Pred4<T>> preds, std::vector<T> probs,
                                  const LossConfig<T>& cfg, T h) {
  auto f = [&]() {
    return total_loss(m, std::span<const Pred4<T>>(preds), std::span<const T>(probs), cfg).total;
  };
  LossGradient<T> g{std::vector<Pred4<T>>(preds.size()), std::vector<T>(probs.size())};
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      const T v = preds[i][k];
      preds[i][k] = v + h;
      const T up = f();
      preds[i][k] = v - h;
      const T down = f();
      preds[i][k] = v;
      g.d_preds[i][k] = (up - down) / (T(2) * h);
    }
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const T v = probs[i];
    probs[i] = v + h;
    const T up = f();
    probs[i] = v - h;
    const T down = f();
    probs[i] = v;
    g.d_probs[i] = (up - down) / (T(2) * h);
  }
  return g;
}

}  // namespace acfd::oracle
