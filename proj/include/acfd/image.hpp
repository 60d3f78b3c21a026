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
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "acfd/error.hpp"
#include "acfd/tensor.hpp"

namespace acfd {

/// RGB image as a (1,3,h,w) float tensor with values in [0,1].
using Image = Tensor4<float>;

/// Reads a binary (P6) portable pixmap. Throws FormatError on anything else.
inline Image read_ppm(std::istream& in) {
  auto token = [&in]() {
    std::string t;
    while (in) {
      int c = in.peek();
      if (c == '#') {
        std::string skip;
        std::getline(in, skip);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    in >> t;
    return t;
  };
  if (token() != "P6") throw FormatError("not a binary PPM (P6) image");
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(token());
    h = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::exception&) {
    throw FormatError("malformed PPM header");
  }
  if (w == 0 || h == 0 || maxval == 0 || maxval > 255) throw FormatError("unsupported PPM dimensions or depth");
  in.get();  // single whitespace before raster
  std::vector<unsigned char> raster(w * h * 3);
  in.read(reinterpret_cast<char*>(raster.data()), std::streamsize(raster.size()));
  if (std::size_t(in.gcount()) != raster.size()) throw FormatError("truncated PPM raster");
  Image img({1, 3, h, w});
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < 3; ++c) img.at(0, c, y, x) = float(raster[(y * w + x) * 3 + c]) / float(maxval);
  return img;
}

inline Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_ppm(in);
}

inline void write_ppm(std::ostream& out, const Image& img) {
  out << "P6\n" << img.w() << " " << img.h() << "\n255\n";
  for (std::size_t y = 0; y < img.h(); ++y)
    for (std::size_t x = 0; x < img.w(); ++x)
      for (std::size_t c = 0; c < 3; ++c) {
        float v = std::clamp(img.at(0, c, y, x), 0.0f, 1.0f);
        out.put(char(static_cast<unsigned char>(std::lround(v * 255.0f))));
      }
}

inline void write_ppm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_ppm(out, img);
}

/// Bilinear resampling with half-pixel centers; edges are clamped.
template <class T>
Tensor4<T> resize_bilinear(const Tensor4<T>& x, Extent2 target) {
  if (target.h == 0 || target.w == 0) throw ShapeError("resize target dims must be >= 1");
  if (target.h == x.h() && target.w == x.w()) return x;
  Tensor4<T> out({x.n(), x.c(), target.h, target.w});
  auto coord = [](std::size_t dst, std::size_t src_len, std::size_t dst_len, std::size_t& i0, std::size_t& i1,
                  double& frac) {
    double s = (double(dst) + 0.5) * double(src_len) / double(dst_len) - 0.5;
    s = std::clamp(s, 0.0, double(src_len - 1));
    i0 = std::size_t(std::floor(s));
    i1 = std::min(i0 + 1, src_len - 1);
    frac = s - double(i0);
  };
  for (std::size_t n = 0; n < x.n(); ++n)
    for (std::size_t c = 0; c < x.c(); ++c) {
      auto src = x.plane(n, c);
      auto dst = out.plane(n, c);
      for (std::size_t oy = 0; oy < target.h; ++oy) {
        std::size_t y0, y1;
        double fy;
        coord(oy, x.h(), target.h, y0, y1, fy);
        for (std::size_t ox = 0; ox < target.w; ++ox) {
          std::size_t x0, x1;
          double fx;
          coord(ox, x.w(), target.w, x0, x1, fx);
          double top = (1 - fx) * src[y0 * x.w() + x0] + fx * src[y0 * x.w() + x1];
          double bot = (1 - fx) * src[y1 * x.w() + x0] + fx * src[y1 * x.w() + x1];
          dst[oy * target.w + ox] = T((1 - fy) * top + fy * bot);
        }
      }
    }
  return out;
}

/// Zero-pads on the right and bottom up to `target` (which must not be smaller).
template <class T>
Tensor4<T> pad_to(const Tensor4<T>& x, Extent2 target) {
  if (target.h < x.h() || target.w < x.w()) throw ShapeError("pad_to: target smaller than input");
  if (target.h == x.h() && target.w == x.w()) return x;
  Tensor4<T> out({x.n(), x.c(), target.h, target.w});
  for (std::size_t n = 0; n < x.n(); ++n)
    for (std::size_t c = 0; c < x.c(); ++c)
      for (std::size_t y = 0; y < x.h(); ++y)
        for (std::size_t xx = 0; xx < x.w(); ++xx) out.at(n, c, y, xx) = x.at(n, c, y, xx);
  return out;
}

/// Subtracts a per-channel mean.
template <class T>
Tensor4<T> subtract_mean(const Tensor4<T>& x, const std::array<T, 3>& mean) {
  if (x.c() != 3) throw ShapeError("subtract_mean expects 3 channels");
  Tensor4<T> out = x;
  for (std::size_t n = 0; n < x.n(); ++n)
    for (std::size_t c = 0; c < 3; ++c)
      for (T& v : out.plane(n, c)) v -= mean[c];
  return out;
}

}  // namespace acfd
