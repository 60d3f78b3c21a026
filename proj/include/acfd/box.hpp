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
#include <array>
#include <cmath>

#include "acfd/error.hpp"

namespace acfd {

/// Axis-aligned box in corner form, image pixels.
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  double cx() const { return 0.5 * (x1 + x2); }
  double cy() const { return 0.5 * (y1 + y2); }
  bool valid() const { return x2 >= x1 && y2 >= y1; }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Regression offsets (dx, dy, dw, dh) relative to an anchor.
using Delta4 = std::array<double, 4>;

/// Largest log-scale change decode will apply: ln(1000 / 16).
inline const double kDecodeClamp = std::log(1000.0 / 16.0);

inline double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0 && ih > 0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

inline Delta4 encode(const Box& anchor, const Box& gt) {
  if (!(anchor.width() > 0 && anchor.height() > 0)) throw DomainError("encode: anchor must have positive area");
  if (!(gt.width() > 0 && gt.height() > 0)) throw DomainError("encode: ground truth must have positive width and height");
  return {(gt.cx() - anchor.cx()) / anchor.width(), (gt.cy() - anchor.cy()) / anchor.height(),
          std::log(gt.width() / anchor.width()), std::log(gt.height() / anchor.height())};
}

inline Box decode(const Box& anchor, const Delta4& d) {
  const double aw = anchor.width(), ah = anchor.height();
  const double cx = anchor.cx() + d[0] * aw;
  const double cy = anchor.cy() + d[1] * ah;
  const double w = aw * std::exp(std::min(d[2], kDecodeClamp));
  const double h = ah * std::exp(std::min(d[3], kDecodeClamp));
  return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

inline Box clip(const Box& b, double width, double height) {
  Box out{std::clamp(b.x1, 0.0, width), std::clamp(b.y1, 0.0, height), std::clamp(b.x2, 0.0, width),
          std::clamp(b.y2, 0.0, height)};
  out.x2 = std::max(out.x2, out.x1);
  out.y2 = std::max(out.y2, out.y1);
  return out;
}

}  // namespace acfd
