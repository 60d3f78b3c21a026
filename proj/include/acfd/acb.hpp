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
#include <cstddef>
#include <string>

#include "acfd/conv.hpp"
#include "acfd/error.hpp"
#include "acfd/tensor.hpp"

namespace acfd {

/// One convolution followed by inference-form batch norm.
template <class T>
struct ConvBnBranch {
  ConvSpec<T> conv;
  BNSpec<T> bn;

  template <class U>
  ConvBnBranch<U> cast() const {
    return {conv.template cast<U>(), bn.template cast<U>()};
  }
};

/// Asymmetric convolution block in its training form: parallel 3x3, 1x3 and
/// 3x1 convolutions, each with its own batch norm, summed elementwise.
/// Paddings are (1,1), (0,1), (1,0) so all branches agree on output size.
template <class T>
struct AcbSpec {
  ConvBnBranch<T> square;
  ConvBnBranch<T> horizontal;
  ConvBnBranch<T> vertical;

  std::size_t in_c() const { return square.conv.in_c(); }
  std::size_t out_c() const { return square.conv.out_c(); }
  Extent2 stride() const { return square.conv.stride; }

  void validate() const {
    const auto& sq = square.conv;
    const auto& ho = horizontal.conv;
    const auto& ve = vertical.conv;
    if (sq.kernel() != Extent2{3, 3} || ho.kernel() != Extent2{1, 3} || ve.kernel() != Extent2{3, 1})
      throw ShapeError("ACB kernels must be 3x3, 1x3 and 3x1");
    if (ho.in_c() != sq.in_c() || ve.in_c() != sq.in_c() || ho.out_c() != sq.out_c() || ve.out_c() != sq.out_c())
      throw ShapeError("ACB branches disagree on channel counts");
    if (ho.stride != sq.stride || ve.stride != sq.stride) throw ShapeError("ACB branches disagree on stride");
    if (sq.pad != Extent2{1, 1} || ho.pad != Extent2{0, 1} || ve.pad != Extent2{1, 0})
      throw ShapeError("ACB paddings must be (1,1), (0,1), (1,0)");
    for (const auto* b : {&square, &horizontal, &vertical}) {
      b->conv.validate();
      b->bn.validate();
      if (b->bn.size() != sq.out_c()) throw ShapeError("ACB batch norm length != out_c");
    }
  }

  /// Zero kernels, zero biases, identity batch norms.
  static AcbSpec zeros(std::size_t in_c, std::size_t out_c, Extent2 stride = {1, 1}, T eps = T(1e-5)) {
    return AcbSpec{
        {ConvSpec<T>::zeros(out_c, in_c, {3, 3}, stride, {1, 1}), BNSpec<T>::identity(out_c, eps)},
        {ConvSpec<T>::zeros(out_c, in_c, {1, 3}, stride, {0, 1}), BNSpec<T>::identity(out_c, eps)},
        {ConvSpec<T>::zeros(out_c, in_c, {3, 1}, stride, {1, 0}), BNSpec<T>::identity(out_c, eps)},
    };
  }

  template <class U>
  AcbSpec<U> cast() const {
    return {square.template cast<U>(), horizontal.template cast<U>(), vertical.template cast<U>()};
  }
};

/// A single 3x3 convolution carrying the merged weights of an AcbSpec.
template <class T>
struct FusedConv {
  ConvSpec<T> conv;
};

template <class T>
Tensor4<T> acb_forward(const Tensor4<T>& x, const AcbSpec<T>& spec) {
  spec.validate();
  auto out = batch_norm_infer(conv2d(x, spec.square.conv), spec.square.bn);
  out = add(out, batch_norm_infer(conv2d(x, spec.horizontal.conv), spec.horizontal.bn));
  return add(out, batch_norm_infer(conv2d(x, spec.vertical.conv), spec.vertical.bn));
}

/// Folds batch norm into the preceding convolution:
/// a = gamma / sqrt(var + eps), W' = W * a, B' = (B - mean) * a + beta.
template <class T>
ConvSpec<T> fuse_conv_bn(const ConvSpec<T>& conv, const BNSpec<T>& bn) {
  conv.validate();
  bn.validate();
  if (bn.size() != conv.out_c())
    throw ShapeError("fuse_conv_bn: " + std::to_string(bn.size()) + " stats for " + std::to_string(conv.out_c()) +
                     " output channels");
  ConvSpec<T> out = conv;
  const auto k = conv.kernel();
  const std::size_t slice = conv.in_c() * k.h * k.w;
  for (std::size_t oc = 0; oc < conv.out_c(); ++oc) {
    const T denom = bn.var[oc] + bn.eps;
    if (!(denom > T(0))) throw DomainError("fuse_conv_bn: var + eps must be positive (channel " + std::to_string(oc) + ")");
    const T a = bn.gamma[oc] / std::sqrt(denom);
    auto w = out.weight.data().subspan(oc * slice, slice);
    for (T& v : w) v *= a;
    out.bias[oc] = (conv.bias[oc] - bn.mean[oc]) * a + bn.beta[oc];
  }
  return out;
}

/// Merges the three branches into one 3x3 convolution. The 1x3 kernel lands
/// in the middle row and the 3x1 kernel in the middle column.
template <class T>
FusedConv<T> fuse_acb(const AcbSpec<T>& spec) {
  spec.validate();
  ConvSpec<T> merged = fuse_conv_bn(spec.square.conv, spec.square.bn);
  const ConvSpec<T> hor = fuse_conv_bn(spec.horizontal.conv, spec.horizontal.bn);
  const ConvSpec<T> ver = fuse_conv_bn(spec.vertical.conv, spec.vertical.bn);
  for (std::size_t oc = 0; oc < merged.out_c(); ++oc) {
    for (std::size_t ic = 0; ic < merged.in_c(); ++ic)
      for (std::size_t t = 0; t < 3; ++t) {
        merged.weight.at(oc, ic, 1, t) += hor.weight.at(oc, ic, 0, t);
        merged.weight.at(oc, ic, t, 1) += ver.weight.at(oc, ic, t, 0);
      }
    merged.bias[oc] += hor.bias[oc] + ver.bias[oc];
  }
  return FusedConv<T>{std::move(merged)};
}

template <class T>
Tensor4<T> fused_forward(const Tensor4<T>& x, const FusedConv<T>& fused) {
  return conv2d(x, fused.conv);
}

/// MACs of the three-branch form (3x3 + 1x3 + 3x1 taps per output element).
template <class T>
std::size_t acb_macs(const AcbSpec<T>& spec, const Shape4& in) {
  return conv_macs(spec.square.conv, in) + conv_macs(spec.horizontal.conv, in) + conv_macs(spec.vertical.conv, in);
}

}  // namespace acfd
