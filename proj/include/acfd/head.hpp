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
#include "acfd/init.hpp"
#include "acfd/tensor.hpp"
#include "acfd/units.hpp"

namespace acfd {

struct HeadConfig {
  std::size_t width = 128;
  std::size_t tower_depth = 2;
};

/// Per-level dense predictions. cls[l] is (n,1,h,w) raw logits, reg[l] is
/// (n,4,h,w) deltas in (dx,dy,dw,dh) channel order.
template <class T>
struct HeadOutput {
  std::array<Tensor4<T>, kLevels> cls;
  std::array<Tensor4<T>, kLevels> reg;

  std::size_t batch() const { return cls[0].n(); }

  /// Logits of image `n` in anchor order.
  std::vector<T> flat_cls(std::size_t n = 0) const {
    std::vector<T> out;
    for (const auto& t : cls) {
      auto p = t.plane(n, 0);
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }

  /// Deltas of image `n` in anchor order.
  std::vector<Delta4> flat_reg(std::size_t n = 0) const {
    std::vector<Delta4> out;
    for (const auto& t : reg) {
      for (std::size_t y = 0; y < t.h(); ++y)
        for (std::size_t x = 0; x < t.w(); ++x)
          out.push_back({double(t.at(n, 0, y, x)), double(t.at(n, 1, y, x)), double(t.at(n, 2, y, x)),
                         double(t.at(n, 3, y, x))});
    }
    return out;
  }
};

/// Prediction heads shared across levels: for each branch a tower of ACB+ReLU
/// layers followed by a 1x1 output convolution.
template <class T>
struct HeadSpec {
  std::vector<AcbUnit<T>> cls_tower;
  std::vector<AcbUnit<T>> reg_tower;
  ConvBnUnit<T> cls_out;  // width -> 1, no norm
  ConvBnUnit<T> reg_out;  // width -> 4, no norm
};

template <class T>
HeadOutput<T> head_forward(const Pyramid6<T>& pyramid, const HeadSpec<T>& spec, MacTally* tally = nullptr) {
  HeadOutput<T> out;
  auto tower = [tally](Tensor4<T> x, const std::vector<AcbUnit<T>>& layers) {
    for (const auto& acb : layers) x = relu(acb.forward(x, tally));
    return x;
  };
  for (std::size_t l = 0; l < kLevels; ++l) {
    if (pyramid[l].c() != spec.cls_out.conv.in_c())
      throw ShapeError("head expects width " + std::to_string(spec.cls_out.conv.in_c()) + ", level " +
                       std::to_string(l) + " has " + std::to_string(pyramid[l].c()));
    out.cls[l] = spec.cls_out.forward(tower(pyramid[l], spec.cls_tower), tally);
    out.reg[l] = spec.reg_out.forward(tower(pyramid[l], spec.reg_tower), tally);
  }
  return out;
}

/// The classification bias starts at the prior logit ln(0.01/0.99) when random.
template <class T>
HeadSpec<T> make_head(const HeadConfig& config, Rng* rng) {
  HeadSpec<T> spec;
  const std::size_t w = config.width;
  for (std::size_t i = 0; i < config.tower_depth; ++i) {
    spec.cls_tower.push_back({rng ? random_acb<T>(w, w, {1, 1}, *rng) : AcbSpec<T>::zeros(w, w)});
    spec.reg_tower.push_back({rng ? random_acb<T>(w, w, {1, 1}, *rng) : AcbSpec<T>::zeros(w, w)});
  }
  spec.cls_out.conv = rng ? kaiming_conv<T>(1, w, {1, 1}, {1, 1}, {0, 0}, *rng, 0.1) : ConvSpec<T>::zeros(1, w, {1, 1});
  spec.reg_out.conv = rng ? kaiming_conv<T>(4, w, {1, 1}, {1, 1}, {0, 0}, *rng, 0.1) : ConvSpec<T>::zeros(4, w, {1, 1});
  if (rng) spec.cls_out.conv.bias[0] = T(-4.59511985);
  return spec;
}

}  // namespace acfd
