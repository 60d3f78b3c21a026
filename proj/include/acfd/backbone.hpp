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
#include <string>
#include <vector>

#include "acfd/conv.hpp"
#include "acfd/error.hpp"
#include "acfd/init.hpp"
#include "acfd/tensor.hpp"
#include "acfd/units.hpp"

namespace acfd {

inline constexpr std::size_t kLevels = 6;
inline constexpr std::array<std::size_t, kLevels> kStrides{4, 8, 16, 32, 64, 128};

template <class T>
using Pyramid6 = std::array<Tensor4<T>, kLevels>;

struct StageConfig {
  std::size_t layer_channels = 0;  // width of every ACB in the chain
  std::size_t out_channels = 0;    // width after the 1x1 projection
  std::size_t repeats = 1;
  std::size_t layer_count = 5;     // ACBs per AOSA module
};

struct BackboneConfig {
  std::array<std::size_t, 3> stem{64, 64, 128};
  std::array<StageConfig, kLevels> stages{};
  bool hard_sigmoid = false;

  /// VoVNetV3-51 widths and repeats.
  static BackboneConfig vovnetv3_51() {
    BackboneConfig c;
    c.stages = {{{128, 256, 1, 5}, {160, 512, 1, 5}, {192, 768, 2, 5}, {224, 1024, 2, 5}, {128, 128, 1, 3},
                 {128, 128, 1, 3}}};
    return c;
  }

  /// Same topology with every channel count divided by `divisor` (min 1).
  BackboneConfig narrowed(std::size_t divisor) const {
    BackboneConfig c = *this;
    auto shrink = [divisor](std::size_t v) { return std::max<std::size_t>(1, v / divisor); };
    for (auto& s : c.stem) s = shrink(s);
    for (auto& s : c.stages) {
      s.layer_channels = shrink(s.layer_channels);
      s.out_channels = shrink(s.out_channels);
    }
    return c;
  }

  /// Uniform small config: every width `channels`, one ACB per module.
  static BackboneConfig tiny(std::size_t channels = 8) {
    BackboneConfig c = vovnetv3_51();
    c.stem = {channels, channels, channels};
    for (auto& s : c.stages) {
      s.layer_channels = channels;
      s.out_channels = channels;
      s.layer_count = 1;
    }
    return c;
  }

  std::array<std::size_t, kLevels> level_channels() const {
    std::array<std::size_t, kLevels> out{};
    for (std::size_t i = 0; i < kLevels; ++i) out[i] = stages[i].out_channels;
    return out;
  }
};

/// Asymmetric one-shot aggregation module.
template <class T>
struct AosaSpec {
  std::size_t in_c = 0;
  std::size_t layer_channels = 0;
  std::size_t out_channels = 0;
  std::vector<AcbUnit<T>> acbs;
  ConvBnUnit<T> projection;
  Matrix<T> ese_weight;
  std::vector<T> ese_bias;
  bool residual = false;
  bool hard_sigmoid = false;

  std::size_t layer_count() const { return acbs.size(); }
  std::size_t concat_channels() const { return in_c + acbs.size() * layer_channels; }
};

template <class T>
Tensor4<T> ese_attention(const Tensor4<T>& x, const Matrix<T>& weight, std::span<const T> bias,
                         bool hard_sigmoid = false) {
  if (weight.rows != x.c() || weight.cols != x.c())
    throw ShapeError("eSE weight must be " + std::to_string(x.c()) + "x" + std::to_string(x.c()));
  auto pooled = global_avg_pool(x);
  Tensor4<T> out = x;
  for (std::size_t n = 0; n < x.n(); ++n) {
    std::span<const T> squeeze = pooled.data().subspan(n * x.c(), x.c());
    auto excite = linear(squeeze, weight, bias);
    for (std::size_t c = 0; c < x.c(); ++c) {
      T v = excite[c];
      T gate = hard_sigmoid ? std::clamp((v + T(3)) / T(6), T(0), T(1)) : sigmoid(v);
      for (T& e : out.plane(n, c)) e *= gate;
    }
  }
  return out;
}

/// features = [x, acb1(x), acb2(acb1(x)), ...] -> concat -> 1x1 conv+BN+ReLU
/// -> eSE gate -> optional identity residual.
template <class T>
Tensor4<T> aosa_forward(const Tensor4<T>& x, const AosaSpec<T>& spec, MacTally* tally = nullptr) {
  if (x.c() != spec.in_c)
    throw ShapeError("AOSA expects " + std::to_string(spec.in_c) + " channels, got " + std::to_string(x.c()));
  std::vector<Tensor4<T>> features;
  features.reserve(spec.acbs.size() + 1);
  features.push_back(x);
  for (const auto& acb : spec.acbs) features.push_back(relu(acb.forward(features.back(), tally)));
  auto y = relu(spec.projection.forward(concat_channels(features), tally));
  y = ese_attention(y, spec.ese_weight, std::span<const T>(spec.ese_bias), spec.hard_sigmoid);
  if (tally) tally->macs += spec.out_channels * spec.out_channels * x.n();
  return spec.residual ? add(y, x) : y;
}

/// Builds an AOSA module. With rng == nullptr every weight is zero and every
/// batch norm is the identity (a skeleton for loading).
template <class T>
AosaSpec<T> make_aosa(std::size_t in_c, std::size_t layer_channels, std::size_t out_channels, std::size_t layer_count,
                      Rng* rng, bool hard_sigmoid = false) {
  AosaSpec<T> spec;
  spec.in_c = in_c;
  spec.layer_channels = layer_channels;
  spec.out_channels = out_channels;
  spec.residual = in_c == out_channels;
  spec.hard_sigmoid = hard_sigmoid;
  std::size_t c = in_c;
  for (std::size_t i = 0; i < layer_count; ++i) {
    spec.acbs.push_back({rng ? random_acb<T>(c, layer_channels, {1, 1}, *rng) : AcbSpec<T>::zeros(c, layer_channels)});
    c = layer_channels;
  }
  std::size_t cat = spec.concat_channels();
  spec.projection.conv = rng ? kaiming_conv<T>(out_channels, cat, {1, 1}, {1, 1}, {0, 0}, *rng)
                             : ConvSpec<T>::zeros(out_channels, cat, {1, 1});
  spec.projection.bn = rng ? random_bn<T>(out_channels, *rng) : BNSpec<T>::identity(out_channels);
  spec.ese_weight = Matrix<T>::zeros(out_channels, out_channels);
  spec.ese_bias.assign(out_channels, T(0));
  if (rng) {
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(double(out_channels)));
    for (auto& v : spec.ese_weight.values) v = T(dist(*rng));
  }
  return spec;
}

template <class T>
struct BackboneSpec {
  BackboneConfig config;
  std::array<ConvBnUnit<T>, 3> stem;  // 3x3 convs, strides 2, 1, 2
  std::array<std::vector<AosaSpec<T>>, kLevels> stages;
};

template <class T>
BackboneSpec<T> make_backbone(const BackboneConfig& config, Rng* rng) {
  BackboneSpec<T> spec;
  spec.config = config;
  const std::array<std::size_t, 3> strides{2, 1, 2};
  std::size_t c = 3;
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t oc = config.stem[i];
    Extent2 s{strides[i], strides[i]};
    spec.stem[i].conv = rng ? kaiming_conv<T>(oc, c, {3, 3}, s, {1, 1}, *rng) : ConvSpec<T>::zeros(oc, c, {3, 3}, s, {1, 1});
    spec.stem[i].bn = rng ? random_bn<T>(oc, *rng) : BNSpec<T>::identity(oc);
    c = oc;
  }
  for (std::size_t s = 0; s < kLevels; ++s) {
    const auto& st = config.stages[s];
    for (std::size_t r = 0; r < st.repeats; ++r) {
      spec.stages[s].push_back(
          make_aosa<T>(c, st.layer_channels, st.out_channels, st.layer_count, rng, config.hard_sigmoid));
      c = st.out_channels;
    }
  }
  return spec;
}

/// Stem, then stages 1..6 with a 3x3/s2/p1 max-pool before stages 2..6.
/// Level i of the result is the output of stage i+1 (stride 4 * 2^i).
template <class T>
Pyramid6<T> backbone_forward(const Tensor4<T>& image, const BackboneSpec<T>& spec, MacTally* tally = nullptr) {
  if (image.c() != 3) throw ShapeError("backbone expects 3-channel images");
  if (image.h() % 128 != 0 || image.w() % 128 != 0)
    throw ShapeError("image dims must be divisible by 128, got " + to_string(image.shape()));
  Tensor4<T> x = image;
  for (const auto& unit : spec.stem) x = relu(unit.forward(x, tally));
  Pyramid6<T> out;
  for (std::size_t s = 0; s < kLevels; ++s) {
    if (s > 0) x = downsample2(x);
    for (const auto& block : spec.stages[s]) x = aosa_forward(x, block, tally);
    out[s] = x;
  }
  return out;
}

template <class T, class F>
void for_each_acb(BackboneSpec<T>& spec, F&& f) {
  for (auto& stage : spec.stages)
    for (auto& block : stage)
      for (auto& acb : block.acbs) f(acb);
}

}  // namespace acfd
