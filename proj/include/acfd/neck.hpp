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
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "acfd/backbone.hpp"
#include "acfd/init.hpp"
#include "acfd/tensor.hpp"
#include "acfd/units.hpp"

namespace acfd {

struct NeckConfig {
  std::size_t width = 128;
  std::size_t repeats = 1;
};

inline constexpr double kFusionStabilizer = 1e-4;

/// One fusion node: rectified, normalized weighted sum of its inputs followed
/// by an ACB and ReLU.
template <class T>
struct FusionNode {
  std::vector<T> weights;
  AcbUnit<T> acb;
};

/// Top-down nodes td[i] produce level i (0..4); bottom-up nodes bu[i] produce
/// level i+1 (1..5). bu[0..3] have fan-in 3, td[*] and bu[4] fan-in 2.
template <class T>
struct BifpnLayer {
  std::array<FusionNode<T>, kLevels - 1> td;
  std::array<FusionNode<T>, kLevels - 1> bu;
};

template <class T>
struct BifpnSpec {
  std::size_t width = 0;
  std::array<ConvBnUnit<T>, kLevels> laterals;  // 1x1 projections to `width`
  std::vector<BifpnLayer<T>> layers;
};

/// w_i = max(w_i, 0) / (sum_j max(w_j, 0) + 1e-4)
template <class T>
std::vector<T> normalized_fusion_weights(std::span<const T> weights) {
  std::vector<T> out(weights.size());
  T total = T(0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = std::max(weights[i], T(0));
    total += out[i];
  }
  for (auto& v : out) v /= total + T(kFusionStabilizer);
  return out;
}

template <class T>
Tensor4<T> weighted_sum(std::span<const Tensor4<T>> inputs, std::span<const T> weights) {
  if (inputs.empty() || inputs.size() != weights.size())
    throw ShapeError("fusion node needs one weight per input");
  auto norm = normalized_fusion_weights(weights);
  Tensor4<T> acc(inputs.front().shape());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].shape() != acc.shape())
      throw ShapeError("fusion inputs differ: " + to_string(inputs[i].shape()) + " vs " + to_string(acc.shape()));
    auto src = inputs[i].data();
    auto dst = acc.data();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += norm[i] * src[k];
  }
  return acc;
}

template <class T>
Tensor4<T> fuse_node(std::span<const Tensor4<T>> inputs, std::span<const T> weights, const AcbUnit<T>& acb,
                     MacTally* tally = nullptr) {
  return relu(acb.forward(weighted_sum(inputs, weights), tally));
}

namespace detail {

template <class T>
Tensor4<T> apply_node(const FusionNode<T>& node, std::vector<Tensor4<T>> inputs, MacTally* tally) {
  if (node.weights.size() != inputs.size())
    throw ShapeError("fusion node expects " + std::to_string(node.weights.size()) + " inputs");
  return fuse_node(std::span<const Tensor4<T>>(inputs), std::span<const T>(node.weights), node.acb, tally);
}

template <class T>
Tensor4<T> match_size(const Tensor4<T>& x, const Tensor4<T>& like) {
  return resize_nearest(x, {like.h(), like.w()});
}

}  // namespace detail

/// One bidirectional pass over a width-uniform pyramid.
template <class T>
Pyramid6<T> bifpn_layer_forward(const Pyramid6<T>& p, const BifpnLayer<T>& layer, MacTally* tally = nullptr) {
  Pyramid6<T> td;
  td[kLevels - 1] = p[kLevels - 1];
  for (std::size_t i = kLevels - 1; i-- > 0;) {
    td[i] = detail::apply_node(layer.td[i], {p[i], detail::match_size(td[i + 1], p[i])}, tally);
  }
  Pyramid6<T> out;
  out[0] = td[0];
  for (std::size_t i = 1; i < kLevels; ++i) {
    auto down = detail::match_size(downsample2(out[i - 1]), p[i]);
    if (i + 1 < kLevels)
      out[i] = detail::apply_node(layer.bu[i - 1], {p[i], td[i], down}, tally);
    else
      out[i] = detail::apply_node(layer.bu[i - 1], {p[i], down}, tally);
  }
  return out;
}

template <class T>
Pyramid6<T> lateral_forward(const Pyramid6<T>& pyramid, const BifpnSpec<T>& spec, MacTally* tally = nullptr) {
  Pyramid6<T> p;
  for (std::size_t i = 0; i < kLevels; ++i) {
    if (pyramid[i].c() != spec.laterals[i].conv.in_c())
      throw ShapeError("neck level " + std::to_string(i) + " expects " + std::to_string(spec.laterals[i].conv.in_c()) +
                       " channels, got " + std::to_string(pyramid[i].c()));
    p[i] = spec.laterals[i].forward(pyramid[i], tally);
  }
  return p;
}

template <class T>
Pyramid6<T> abifpn_forward(const Pyramid6<T>& pyramid, const BifpnSpec<T>& spec, MacTally* tally = nullptr) {
  auto p = lateral_forward(pyramid, spec, tally);
  for (const auto& layer : spec.layers) p = bifpn_layer_forward(p, layer, tally);
  return p;
}

template <class T>
BifpnLayer<T> make_bifpn_layer(std::size_t width, Rng* rng) {
  BifpnLayer<T> layer;
  auto node = [&](std::size_t fan_in) {
    FusionNode<T> n;
    n.weights.assign(fan_in, T(1));
    n.acb.form = rng ? random_acb<T>(width, width, {1, 1}, *rng) : AcbSpec<T>::zeros(width, width);
    return n;
  };
  for (std::size_t i = 0; i < kLevels - 1; ++i) layer.td[i] = node(2);
  for (std::size_t i = 0; i < kLevels - 1; ++i) layer.bu[i] = node(i + 2 < kLevels ? 3 : 2);
  return layer;
}

template <class T>
BifpnSpec<T> make_bifpn(const std::array<std::size_t, kLevels>& in_channels, const NeckConfig& config, Rng* rng) {
  BifpnSpec<T> spec;
  spec.width = config.width;
  for (std::size_t i = 0; i < kLevels; ++i) {
    auto& lat = spec.laterals[i];
    lat.conv = rng ? kaiming_conv<T>(config.width, in_channels[i], {1, 1}, {1, 1}, {0, 0}, *rng)
                   : ConvSpec<T>::zeros(config.width, in_channels[i], {1, 1});
    lat.bn = rng ? random_bn<T>(config.width, *rng) : BNSpec<T>::identity(config.width);
  }
  for (std::size_t r = 0; r < config.repeats; ++r) spec.layers.push_back(make_bifpn_layer<T>(config.width, rng));
  return spec;
}

}  // namespace acfd
