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
#include <span>
#include <string>
#include <vector>

#include "acfd/error.hpp"
#include "acfd/parallel.hpp"
#include "acfd/tensor.hpp"

namespace acfd {

/// Convolution parameters. weight dims are (out_c, in_c, kh, kw).
template <class T>
struct ConvSpec {
  Tensor4<T> weight;
  std::vector<T> bias;
  Extent2 stride{1, 1};
  Extent2 pad{0, 0};

  std::size_t out_c() const { return weight.n(); }
  std::size_t in_c() const { return weight.c(); }
  Extent2 kernel() const { return {weight.h(), weight.w()}; }

  void validate() const {
    if (bias.size() != out_c())
      throw ShapeError("conv bias length " + std::to_string(bias.size()) + " != out_c " + std::to_string(out_c()));
    if (stride.h == 0 || stride.w == 0) throw ShapeError("conv stride must be >= 1");
  }

  /// Zero-initialized spec; the usual starting point before loading or init.
  static ConvSpec zeros(std::size_t out_c, std::size_t in_c, Extent2 kernel, Extent2 stride = {1, 1},
                        Extent2 pad = {0, 0}) {
    return ConvSpec{Tensor4<T>({out_c, in_c, kernel.h, kernel.w}), std::vector<T>(out_c, T(0)), stride, pad};
  }

  template <class U>
  ConvSpec<U> cast() const {
    return ConvSpec<U>{weight.template cast<U>(), std::vector<U>(bias.begin(), bias.end()), stride, pad};
  }
};

/// Inference-form batch normalization statistics.
template <class T>
struct BNSpec {
  std::vector<T> mean;
  std::vector<T> var;
  std::vector<T> gamma;
  std::vector<T> beta;
  T eps = T(1e-5);

  std::size_t size() const { return mean.size(); }

  void validate() const {
    std::size_t c = mean.size();
    if (var.size() != c || gamma.size() != c || beta.size() != c) throw ShapeError("BN vectors differ in length");
  }

  static BNSpec identity(std::size_t c, T eps = T(1e-5)) {
    return BNSpec{std::vector<T>(c, T(0)), std::vector<T>(c, T(1)), std::vector<T>(c, T(1)),
                  std::vector<T>(c, T(0)), eps};
  }

  template <class U>
  BNSpec<U> cast() const {
    return BNSpec<U>{{mean.begin(), mean.end()},
                     {var.begin(), var.end()},
                     {gamma.begin(), gamma.end()},
                     {beta.begin(), beta.end()},
                     U(eps)};
  }
};

inline Shape4 conv_output_shape(const Shape4& in, std::size_t out_c, Extent2 kernel, Extent2 stride, Extent2 pad) {
  return {in.n, out_c, window_output(in.h, kernel.h, stride.h, pad.h), window_output(in.w, kernel.w, stride.w, pad.w)};
}

namespace detail {

template <class T>
void check_conv(const Tensor4<T>& x, const ConvSpec<T>& spec) {
  spec.validate();
  if (x.c() != spec.in_c())
    throw ShapeError("conv2d: input has " + std::to_string(x.c()) + " channels, kernel expects " +
                     std::to_string(spec.in_c()));
}

}  // namespace detail

/// Naive direct cross-correlation: one output element at a time, bias first,
/// then (in_c, ky, kx) in ascending order. This is the reference every other
/// convolution path is checked against.
template <class T>
Tensor4<T> conv2d_reference(const Tensor4<T>& x, const ConvSpec<T>& spec) {
  detail::check_conv(x, spec);
  Shape4 os = conv_output_shape(x.shape(), spec.out_c(), spec.kernel(), spec.stride, spec.pad);
  Tensor4<T> out(os);
  const auto k = spec.kernel();
  for (std::size_t n = 0; n < os.n; ++n)
    for (std::size_t oc = 0; oc < os.c; ++oc)
      for (std::size_t oy = 0; oy < os.h; ++oy)
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          T acc = spec.bias[oc];
          for (std::size_t ic = 0; ic < spec.in_c(); ++ic)
            for (std::size_t ky = 0; ky < k.h; ++ky)
              for (std::size_t kx = 0; kx < k.w; ++kx) {
                std::ptrdiff_t iy = std::ptrdiff_t(oy * spec.stride.h + ky) - std::ptrdiff_t(spec.pad.h);
                std::ptrdiff_t ix = std::ptrdiff_t(ox * spec.stride.w + kx) - std::ptrdiff_t(spec.pad.w);
                if (iy < 0 || ix < 0 || iy >= std::ptrdiff_t(x.h()) || ix >= std::ptrdiff_t(x.w())) continue;
                acc += spec.weight.at(oc, ic, ky, kx) * x.at(n, ic, std::size_t(iy), std::size_t(ix));
              }
          out.at(n, oc, oy, ox) = acc;
        }
  return out;
}

/// Direct convolution with the tap loop hoisted outside the spatial loops so
/// the innermost loop streams a row. Each output element still accumulates
/// bias, then taps in (in_c, ky, kx) order, so results match conv2d_reference
/// bit-for-bit. Output channels are distributed over workers.
template <class T>
Tensor4<T> conv2d(const Tensor4<T>& x, const ConvSpec<T>& spec) {
  detail::check_conv(x, spec);
  Shape4 os = conv_output_shape(x.shape(), spec.out_c(), spec.kernel(), spec.stride, spec.pad);
  Tensor4<T> out(os);
  const auto k = spec.kernel();
  const std::size_t ih = x.h(), iw = x.w();
  const std::size_t sh = spec.stride.h, sw = spec.stride.w;
  const std::ptrdiff_t ph = std::ptrdiff_t(spec.pad.h), pw = std::ptrdiff_t(spec.pad.w);

  // Valid output range [lo, hi) along one axis for a given tap offset.
  auto valid = [](std::size_t out_len, std::size_t in_len, std::size_t stride, std::ptrdiff_t pad,
                  std::size_t tap, std::size_t& lo, std::size_t& hi) {
    // need 0 <= o*stride + tap - pad < in_len
    std::ptrdiff_t t = std::ptrdiff_t(tap) - pad;
    lo = t >= 0 ? 0 : std::size_t((-t + std::ptrdiff_t(stride) - 1) / std::ptrdiff_t(stride));
    std::ptrdiff_t lim = std::ptrdiff_t(in_len) - t;  // o*stride < lim
    hi = lim <= 0 ? 0 : std::min(out_len, std::size_t((lim + std::ptrdiff_t(stride) - 1) / std::ptrdiff_t(stride)));
    if (hi < lo) hi = lo;
  };

  parallel_for(os.n * os.c, [&](std::size_t job) {
    std::size_t n = job / os.c, oc = job % os.c;
    auto dst = out.plane(n, oc);
    std::fill(dst.begin(), dst.end(), spec.bias[oc]);
    for (std::size_t ic = 0; ic < spec.in_c(); ++ic) {
      auto src = x.plane(n, ic);
      for (std::size_t ky = 0; ky < k.h; ++ky) {
        std::size_t ylo, yhi;
        valid(os.h, ih, sh, ph, ky, ylo, yhi);
        for (std::size_t kx = 0; kx < k.w; ++kx) {
          std::size_t xlo, xhi;
          valid(os.w, iw, sw, pw, kx, xlo, xhi);
          const T wv = spec.weight.at(oc, ic, ky, kx);
          for (std::size_t oy = ylo; oy < yhi; ++oy) {
            const T* in_row = src.data() + (std::ptrdiff_t(oy * sh + ky) - ph) * std::ptrdiff_t(iw);
            T* out_row = dst.data() + oy * os.w;
            const std::ptrdiff_t off = std::ptrdiff_t(kx) - pw;
            if (sw == 1) {
              for (std::size_t ox = xlo; ox < xhi; ++ox) out_row[ox] += wv * in_row[std::ptrdiff_t(ox) + off];
            } else {
              for (std::size_t ox = xlo; ox < xhi; ++ox) out_row[ox] += wv * in_row[std::ptrdiff_t(ox * sw) + off];
            }
          }
        }
      }
    }
  });
  return out;
}

/// Multiply-accumulate count of one convolution on an input of the given shape.
template <class T>
std::size_t conv_macs(const ConvSpec<T>& spec, const Shape4& in) {
  Shape4 os = conv_output_shape(in, spec.out_c(), spec.kernel(), spec.stride, spec.pad);
  return os.count() * spec.in_c() * spec.kernel().h * spec.kernel().w;
}

template <class T>
Tensor4<T> batch_norm_infer(const Tensor4<T>& x, const BNSpec<T>& bn) {
  bn.validate();
  if (bn.size() != x.c())
    throw ShapeError("batch_norm: " + std::to_string(bn.size()) + " stats for " + std::to_string(x.c()) + " channels");
  Tensor4<T> out = x;
  for (std::size_t c = 0; c < x.c(); ++c) {
    const T denom = std::sqrt(bn.var[c] + bn.eps);
    const T a = bn.gamma[c] / denom;
    for (std::size_t n = 0; n < x.n(); ++n)
      for (T& v : out.plane(n, c)) v = a * (v - bn.mean[c]) + bn.beta[c];
  }
  return out;
}

/// Row-major dense matrix.
template <class T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> values;

  T& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix{rows, cols, std::vector<T>(rows * cols)}; }
  static Matrix identity(std::size_t n) {
    Matrix m = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
};

template <class T>
std::vector<T> linear(std::span<const T> input, const Matrix<T>& weight, std::span<const T> bias) {
  if (weight.values.size() != weight.rows * weight.cols) throw ShapeError("linear: malformed weight matrix");
  if (input.size() != weight.cols || bias.size() != weight.rows)
    throw ShapeError("linear: weight " + std::to_string(weight.rows) + "x" + std::to_string(weight.cols) +
                     " incompatible with input " + std::to_string(input.size()) + " / bias " +
                     std::to_string(bias.size()));
  std::vector<T> out(bias.begin(), bias.end());
  for (std::size_t r = 0; r < weight.rows; ++r)
    for (std::size_t c = 0; c < weight.cols; ++c) out[r] += weight(r, c) * input[c];
  return out;
}

}  // namespace acfd
