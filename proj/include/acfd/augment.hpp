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
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "acfd/anchors.hpp"
#include "acfd/box.hpp"
#include "acfd/error.hpp"
#include "acfd/image.hpp"

namespace acfd {

/// One training image with its face boxes. Every random operation draws from
/// a generator seeded by rng_seed and then advances rng_seed, so a pipeline
/// is reproducible from the initial seed alone.
struct Sample {
  Image image;
  std::vector<Box> boxes;
  std::uint64_t rng_seed = 0;
};

namespace augment_detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::mt19937_64 draw_rng(Sample& s) {
  std::mt19937_64 rng(s.rng_seed);
  s.rng_seed = splitmix64(s.rng_seed);
  return rng;
}

inline std::vector<Box> clip_all(const std::vector<Box>& boxes, std::size_t w, std::size_t h) {
  std::vector<Box> out;
  out.reserve(boxes.size());
  for (const auto& b : boxes) out.push_back(clip(b, double(w), double(h)));
  return out;
}

}  // namespace augment_detail

inline constexpr std::array<double, 6> kAnchorSides{16, 32, 64, 128, 256, 512};

/// Places the image at `offset` (x, y) on a canvas `ratio` times larger, filled
/// with the per-channel image mean. Boxes move with the image.
inline Sample expand(const Sample& s, double ratio, std::array<std::size_t, 2> offset) {
  if (!(ratio >= 1.0)) throw DomainError("expand ratio must be >= 1");
  const std::size_t h = s.image.h(), w = s.image.w();
  const std::size_t ch = std::size_t(std::lround(double(h) * ratio));
  const std::size_t cw = std::size_t(std::lround(double(w) * ratio));
  if (offset[0] + w > cw || offset[1] + h > ch) throw DomainError("expand offset places the image off the canvas");
  auto mean = global_avg_pool(s.image);
  Sample out{Image({1, 3, ch, cw}), {}, s.rng_seed};
  for (std::size_t c = 0; c < 3; ++c) {
    auto plane = out.image.plane(0, c);
    std::fill(plane.begin(), plane.end(), mean.at(0, c, 0, 0));
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) out.image.at(0, c, y + offset[1], x + offset[0]) = s.image.at(0, c, y, x);
  }
  const double dx = double(offset[0]), dy = double(offset[1]);
  for (const auto& b : s.boxes) out.boxes.push_back({b.x1 + dx, b.y1 + dy, b.x2 + dx, b.y2 + dy});
  out.boxes = augment_detail::clip_all(out.boxes, cw, ch);
  return out;
}

/// Seeded offset for a given ratio; ratio 1 always uses offset (0, 0).
inline Sample expand(Sample s, double ratio) {
  if (!(ratio >= 1.0)) throw DomainError("expand ratio must be >= 1");
  auto rng = augment_detail::draw_rng(s);
  const std::size_t ch = std::size_t(std::lround(double(s.image.h()) * ratio));
  const std::size_t cw = std::size_t(std::lround(double(s.image.w()) * ratio));
  std::uniform_int_distribution<std::size_t> ox(0, cw - s.image.w()), oy(0, ch - s.image.h());
  std::array<std::size_t, 2> offset{ox(rng), oy(rng)};
  return expand(s, ratio, offset);
}

/// Seeded ratio drawn from [1, 4].
inline Sample random_expand(Sample s) {
  auto rng = augment_detail::draw_rng(s);
  std::uniform_real_distribution<double> ratio(1.0, 4.0);
  return expand(s, ratio(rng));
}

/// Integer crop rectangle: top-left (x, y), size (w, h).
struct CropWindow {
  std::size_t x = 0, y = 0, w = 0, h = 0;
};

/// Keeps boxes whose center lies inside the window, translated and clipped.
inline Sample crop(const Sample& s, const CropWindow& win) {
  if (win.w == 0 || win.h == 0 || win.x + win.w > s.image.w() || win.y + win.h > s.image.h())
    throw DomainError("crop window outside the image");
  Sample out{Image({1, 3, win.h, win.w}), {}, s.rng_seed};
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < win.h; ++y)
      for (std::size_t x = 0; x < win.w; ++x) out.image.at(0, c, y, x) = s.image.at(0, c, y + win.y, x + win.x);
  const double x0 = double(win.x), y0 = double(win.y), x1 = x0 + double(win.w), y1 = y0 + double(win.h);
  for (const auto& b : s.boxes) {
    if (b.cx() < x0 || b.cx() >= x1 || b.cy() < y0 || b.cy() >= y1) continue;
    out.boxes.push_back(clip({b.x1 - x0, b.y1 - y0, b.x2 - x0, b.y2 - y0}, double(win.w), double(win.h)));
  }
  return out;
}

/// Seeded crop: each side between 30% and 100% of the image, uniform position.
inline Sample random_crop(Sample s) {
  auto rng = augment_detail::draw_rng(s);
  std::uniform_real_distribution<double> frac(0.3, 1.0);
  const std::size_t w = std::max<std::size_t>(1, std::size_t(std::lround(double(s.image.w()) * frac(rng))));
  const std::size_t h = std::max<std::size_t>(1, std::size_t(std::lround(double(s.image.h()) * frac(rng))));
  std::uniform_int_distribution<std::size_t> px(0, s.image.w() - w), py(0, s.image.h() - h);
  CropWindow win{px(rng), 0, w, h};
  win.y = py(rng);
  return crop(s, win);
}

/// Uniformly rescales the sample so that box `face`'s long side equals `side`.
inline Sample tile_to_anchor_scale(const Sample& s, std::size_t face, double side) {
  if (face >= s.boxes.size()) throw DomainError("tile_to_anchor_scale: face index out of range");
  const Box& b = s.boxes[face];
  const double long_side = std::max(b.width(), b.height());
  if (!(long_side > 0)) return s;
  const double scale = side / long_side;
  const std::size_t nh = std::max<std::size_t>(1, std::size_t(std::lround(double(s.image.h()) * scale)));
  const std::size_t nw = std::max<std::size_t>(1, std::size_t(std::lround(double(s.image.w()) * scale)));
  Sample out{resize_bilinear(s.image, {nh, nw}), {}, s.rng_seed};
  for (const auto& box : s.boxes)
    out.boxes.push_back({box.x1 * scale, box.y1 * scale, box.x2 * scale, box.y2 * scale});
  out.boxes = augment_detail::clip_all(out.boxes, nw, nh);
  return out;
}

/// Largest canvas side the seeded tiling may produce.
inline constexpr double kMaxTiledSide = 2560.0;

/// Seeded face and anchor side. Sides that would push the canvas beyond
/// kMaxTiledSide are not drawn; with no boxes (or no admissible side) the
/// sample is returned unchanged.
inline Sample tile_to_anchor_scale(Sample s) {
  if (s.boxes.empty()) return s;
  auto rng = augment_detail::draw_rng(s);
  std::uniform_int_distribution<std::size_t> pick_face(0, s.boxes.size() - 1);
  const std::size_t face = pick_face(rng);
  const Box& b = s.boxes[face];
  const double long_side = std::max(b.width(), b.height());
  if (!(long_side > 0)) return s;
  const double canvas = double(std::max(s.image.h(), s.image.w()));
  std::vector<double> sides;
  for (double side : kAnchorSides)
    if (canvas * side / long_side <= kMaxTiledSide) sides.push_back(side);
  if (sides.empty()) return s;
  std::uniform_int_distribution<std::size_t> pick_side(0, sides.size() - 1);
  return tile_to_anchor_scale(s, face, sides[pick_side(rng)]);
}

inline constexpr std::size_t kTrainSide = 640;

/// Bilinear resize to 640x640; boxes follow the two axis scales.
inline Sample resize_to_train(const Sample& s) {
  const double sx = double(kTrainSide) / double(s.image.w());
  const double sy = double(kTrainSide) / double(s.image.h());
  Sample out{resize_bilinear(s.image, {kTrainSide, kTrainSide}), {}, s.rng_seed};
  for (const auto& b : s.boxes) out.boxes.push_back({b.x1 * sx, b.y1 * sy, b.x2 * sx, b.y2 * sy});
  out.boxes = augment_detail::clip_all(out.boxes, kTrainSide, kTrainSide);
  return out;
}

/// Seeded per-channel gain in [0.875, 1.125] and bias in [-16/255, 16/255],
/// clamped to [0, 1].
inline Sample color_jitter(Sample s) {
  auto rng = augment_detail::draw_rng(s);
  std::uniform_real_distribution<double> gain(0.875, 1.125), bias(-16.0 / 255.0, 16.0 / 255.0);
  for (std::size_t c = 0; c < 3; ++c) {
    const float g = float(gain(rng)), o = float(bias(rng));
    for (float& v : s.image.plane(0, c)) v = std::clamp(v * g + o, 0.0f, 1.0f);
  }
  return s;
}

/// color jitter -> expand -> crop -> tile -> resize to 640x640.
inline Sample augment_sample(Sample s) {
  s = color_jitter(std::move(s));
  s = random_expand(std::move(s));
  s = random_crop(std::move(s));
  s = tile_to_anchor_scale(std::move(s));
  return resize_to_train(s);
}

}  // namespace acfd
