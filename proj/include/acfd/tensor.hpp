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
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "acfd/error.hpp"

namespace acfd {

/// Dimensions of a rank-4 tensor in (batch, channel, height, width) order.
struct Shape4 {
  std::size_t n = 1;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  constexpr std::size_t count() const { return n * c * h * w; }
  constexpr std::size_t plane() const { return h * w; }
  friend constexpr bool operator==(const Shape4&, const Shape4&) = default;
};

inline std::string to_string(const Shape4& s) {
  return "(" + std::to_string(s.n) + "," + std::to_string(s.c) + "," + std::to_string(s.h) + "," +
         std::to_string(s.w) + ")";
}

/// Integer pair used for kernel sizes, strides, paddings and image sizes.
struct Extent2 {
  std::size_t h = 0;
  std::size_t w = 0;
  friend constexpr bool operator==(const Extent2&, const Extent2&) = default;
};

/// Dense NCHW tensor, contiguous and row-major with width fastest.
template <class T>
class Tensor4 {
 public:
  using value_type = T;

  Tensor4() : Tensor4(Shape4{}) {}
  explicit Tensor4(Shape4 shape, T fill = T(0)) : shape_(shape) {
    if (shape.n == 0 || shape.c == 0 || shape.h == 0 || shape.w == 0)
      throw ShapeError("tensor dims must be >= 1, got " + to_string(shape));
    data_.assign(shape.count(), fill);
  }
  Tensor4(Shape4 shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (shape.n == 0 || shape.c == 0 || shape.h == 0 || shape.w == 0)
      throw ShapeError("tensor dims must be >= 1, got " + to_string(shape));
    if (data_.size() != shape.count())
      throw ShapeError("data length " + std::to_string(data_.size()) + " does not match " +
                       to_string(shape));
  }

  const Shape4& shape() const { return shape_; }
  std::size_t n() const { return shape_.n; }
  std::size_t c() const { return shape_.c; }
  std::size_t h() const { return shape_.h; }
  std::size_t w() const { return shape_.w; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) { return data_[index(n, c, y, x)]; }
  const T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[index(n, c, y, x)];
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  /// Contiguous h*w plane for one (n, c) pair.
  std::span<T> plane(std::size_t n, std::size_t c) {
    return std::span<T>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }
  std::span<const T> plane(std::size_t n, std::size_t c) const {
    return std::span<const T>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }

  template <class U>
  Tensor4<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor4<U>(shape_, std::move(out));
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
  }

  friend bool operator==(const Tensor4&, const Tensor4&) = default;

 private:
  Shape4 shape_;
  std::vector<T> data_;
};

/// Output length of a sliding window along one axis; throws when it would be < 1.
inline std::size_t window_output(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad) {
  if (kernel == 0 || stride == 0) throw ShapeError("kernel and stride must be >= 1");
  std::size_t padded = in + 2 * pad;
  if (padded < kernel) throw ShapeError("window larger than padded input");
  return (padded - kernel) / stride + 1;
}

template <class T, class F>
Tensor4<T> map(const Tensor4<T>& x, F&& f) {
  Tensor4<T> out = x;
  for (auto& v : out.storage()) v = f(v);
  return out;
}

template <class T>
Tensor4<T> relu(const Tensor4<T>& x) {
  return map(x, [](T v) { return v > T(0) ? v : T(0); });
}

template <class T>
T sigmoid(T v) {
  return T(1) / (T(1) + std::exp(-v));
}

template <class T>
Tensor4<T> sigmoid(const Tensor4<T>& x) {
  return map(x, [](T v) { return sigmoid(v); });
}

template <class T>
Tensor4<T> add(const Tensor4<T>& a, const Tensor4<T>& b) {
  if (a.shape() != b.shape()) throw ShapeError("add: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  Tensor4<T> out = a;
  auto src = b.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

template <class T>
Tensor4<T> scale(const Tensor4<T>& a, T factor) {
  return map(a, [factor](T v) { return v * factor; });
}

/// Windowed maximum. Padded cells never win (they act as -inf).
template <class T>
Tensor4<T> max_pool2d(const Tensor4<T>& x, Extent2 kernel, Extent2 stride, Extent2 pad = {0, 0}) {
  const auto& s = x.shape();
  std::size_t oh = window_output(s.h, kernel.h, stride.h, pad.h);
  std::size_t ow = window_output(s.w, kernel.w, stride.w, pad.w);
  Tensor4<T> out({s.n, s.c, oh, ow});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      auto in = x.plane(n, c);
      auto dst = out.plane(n, c);
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox) {
          T best = -std::numeric_limits<T>::infinity();
          for (std::size_t ky = 0; ky < kernel.h; ++ky) {
            std::ptrdiff_t iy = std::ptrdiff_t(oy * stride.h + ky) - std::ptrdiff_t(pad.h);
            if (iy < 0 || iy >= std::ptrdiff_t(s.h)) continue;
            for (std::size_t kx = 0; kx < kernel.w; ++kx) {
              std::ptrdiff_t ix = std::ptrdiff_t(ox * stride.w + kx) - std::ptrdiff_t(pad.w);
              if (ix < 0 || ix >= std::ptrdiff_t(s.w)) continue;
              best = std::max(best, in[std::size_t(iy) * s.w + std::size_t(ix)]);
            }
          }
          dst[oy * ow + ox] = best;
        }
    }
  return out;
}

/// The backbone/neck reduction: 3x3 window, stride 2, pad 1 (exact halving of even dims).
template <class T>
Tensor4<T> downsample2(const Tensor4<T>& x) {
  return max_pool2d(x, {3, 3}, {2, 2}, {1, 1});
}

template <class T>
Tensor4<T> global_avg_pool(const Tensor4<T>& x) {
  const auto& s = x.shape();
  Tensor4<T> out({s.n, s.c, 1, 1});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      T acc = T(0);
      for (T v : x.plane(n, c)) acc += v;
      out.at(n, c, 0, 0) = acc / T(s.plane());
    }
  return out;
}

/// Nearest-neighbour resampling with src = floor(dst * src_dim / dst_dim).
template <class T>
Tensor4<T> resize_nearest(const Tensor4<T>& x, Extent2 target) {
  if (target.h == 0 || target.w == 0) throw ShapeError("resize target dims must be >= 1");
  const auto& s = x.shape();
  if (target.h == s.h && target.w == s.w) return x;
  Tensor4<T> out({s.n, s.c, target.h, target.w});
  std::vector<std::size_t> xs(target.w);
  for (std::size_t ox = 0; ox < target.w; ++ox) xs[ox] = ox * s.w / target.w;
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      auto in = x.plane(n, c);
      auto dst = out.plane(n, c);
      for (std::size_t oy = 0; oy < target.h; ++oy) {
        std::size_t iy = oy * s.h / target.h;
        for (std::size_t ox = 0; ox < target.w; ++ox) dst[oy * target.w + ox] = in[iy * s.w + xs[ox]];
      }
    }
  return out;
}

template <class T>
Tensor4<T> concat_channels(std::span<const Tensor4<T>> parts) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  Shape4 s = parts.front().shape();
  std::size_t channels = 0;
  for (const auto& p : parts) {
    const auto& ps = p.shape();
    if (ps.n != s.n || ps.h != s.h || ps.w != s.w)
      throw ShapeError("concat: " + to_string(ps) + " incompatible with " + to_string(s));
    channels += ps.c;
  }
  Tensor4<T> out({s.n, channels, s.h, s.w});
  for (std::size_t n = 0; n < s.n; ++n) {
    std::size_t base = 0;
    for (const auto& p : parts) {
      for (std::size_t c = 0; c < p.c(); ++c) {
        auto src = p.plane(n, c);
        std::copy(src.begin(), src.end(), out.plane(n, base + c).begin());
      }
      base += p.c();
    }
  }
  return out;
}

template <class T>
Tensor4<T> concat_channels(const std::vector<Tensor4<T>>& parts) {
  return concat_channels(std::span<const Tensor4<T>>(parts));
}

/// Channels [first, first + count) of x.
template <class T>
Tensor4<T> slice_channels(const Tensor4<T>& x, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > x.c()) throw ShapeError("slice_channels out of range");
  Tensor4<T> out({x.n(), count, x.h(), x.w()});
  for (std::size_t n = 0; n < x.n(); ++n)
    for (std::size_t c = 0; c < count; ++c) {
      auto src = x.plane(n, first + c);
      std::copy(src.begin(), src.end(), out.plane(n, c).begin());
    }
  return out;
}

template <class T>
T max_abs_diff(const Tensor4<T>& a, const Tensor4<T>& b) {
  if (a.shape() != b.shape()) throw ShapeError("max_abs_diff: shape mismatch");
  T m = T(0);
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace acfd
