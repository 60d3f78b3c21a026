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

#include <cmath>
#include <cstdint>
#include <random>

#include "acfd/acb.hpp"
#include "acfd/conv.hpp"
#include "acfd/tensor.hpp"

namespace acfd {

using Rng = std::mt19937_64;

template <class T>
Tensor4<T> random_uniform(Shape4 shape, Rng& rng, T lo = T(-1), T hi = T(1)) {
  std::uniform_real_distribution<double> dist{double(lo), double(hi)};
  Tensor4<T> t(shape);
  for (auto& v : t.storage()) v = T(dist(rng));
  return t;
}

/// Fan-in scaled normal init ("kaiming", ReLU gain), zero bias.
/// `gain` multiplies the standard deviation.
template <class T>
ConvSpec<T> kaiming_conv(std::size_t out_c, std::size_t in_c, Extent2 kernel, Extent2 stride, Extent2 pad, Rng& rng,
                         double gain = 1.0) {
  auto spec = ConvSpec<T>::zeros(out_c, in_c, kernel, stride, pad);
  const double fan_in = double(in_c * kernel.h * kernel.w);
  std::normal_distribution<double> dist(0.0, gain * std::sqrt(2.0 / fan_in));
  for (auto& v : spec.weight.storage()) v = T(dist(rng));
  return spec;
}

/// Plausible running statistics around the identity normalization.
template <class T>
BNSpec<T> random_bn(std::size_t c, Rng& rng, T eps = T(1e-5)) {
  std::normal_distribution<double> shift(0.0, 0.1);
  std::uniform_real_distribution<double> spread(0.5, 1.5);
  BNSpec<T> bn;
  bn.eps = eps;
  for (std::size_t i = 0; i < c; ++i) {
    bn.mean.push_back(T(shift(rng)));
    bn.var.push_back(T(spread(rng)));
    bn.gamma.push_back(T(spread(rng)));
    bn.beta.push_back(T(shift(rng)));
  }
  return bn;
}

/// Branch kernels are scaled by 1/sqrt(3) so the summed block keeps the
/// variance of a single kaiming-initialized convolution.
template <class T>
AcbSpec<T> random_acb(std::size_t in_c, std::size_t out_c, Extent2 stride, Rng& rng) {
  const double g = 1.0 / std::sqrt(3.0);
  AcbSpec<T> spec;
  spec.square = {kaiming_conv<T>(out_c, in_c, {3, 3}, stride, {1, 1}, rng, g), random_bn<T>(out_c, rng)};
  spec.horizontal = {kaiming_conv<T>(out_c, in_c, {1, 3}, stride, {0, 1}, rng, g), random_bn<T>(out_c, rng)};
  spec.vertical = {kaiming_conv<T>(out_c, in_c, {3, 1}, stride, {1, 0}, rng, g), random_bn<T>(out_c, rng)};
  return spec;
}

}  // namespace acfd
