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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "acfd/conv.hpp"
#include "acfd/init.hpp"
#include "acfd/tensor.hpp"

using namespace acfd;

namespace {

Tensor4<float> filled(Shape4 s, float v) { return Tensor4<float>(s, v); }

// Counts window placements by stepping the window start across the padded axis.
std::size_t count_windows(std::size_t in, std::size_t k, std::size_t s, std::size_t p) {
  std::size_t n = 0;
  for (long start = -long(p); start + long(k) <= long(in + p); start += long(s)) ++n;
  return n;
}

}  // namespace

TEST(Tensor, RejectsZeroDimsAndBadLength) {
  EXPECT_THROW(Tensor4<float>({1, 0, 2, 2}), ShapeError);
  EXPECT_THROW(Tensor4<float>({1, 1, 2, 2}, std::vector<float>(3)), ShapeError);
}

TEST(Conv2d, AllOnesThreeByThreeWithPadding) {
  auto x = filled({1, 1, 3, 3}, 1.0f);
  auto spec = ConvSpec<float>::zeros(1, 1, {3, 3}, {1, 1}, {1, 1});
  for (auto& v : spec.weight.storage()) v = 1.0f;
  auto y = conv2d(x, spec);
  ASSERT_EQ(y.shape(), (Shape4{1, 1, 3, 3}));
  EXPECT_FLOAT_EQ(y.at(0, 0, 1, 1), 9.0f);
  EXPECT_FLOAT_EQ(y.at(0, 0, 0, 0), 4.0f);
  EXPECT_FLOAT_EQ(y.at(0, 0, 2, 2), 4.0f);
  EXPECT_FLOAT_EQ(y.at(0, 0, 0, 1), 6.0f);
}

TEST(Conv2d, IdentityKernelIsExactIdentity) {
  Rng rng(1);
  auto x = random_uniform<float>({2, 1, 5, 7}, rng);
  auto spec = ConvSpec<float>::zeros(1, 1, {1, 1});
  spec.weight.storage()[0] = 1.0f;
  EXPECT_EQ(conv2d(x, spec), x);
}

TEST(Conv2d, AsymmetricKernelShape) {
  auto x = filled({2, 3, 64, 64}, 0.5f);
  auto spec = ConvSpec<float>::zeros(8, 3, {3, 1}, {1, 1}, {1, 0});
  EXPECT_EQ(conv2d(x, spec).shape(), (Shape4{2, 8, 64, 64}));
}

TEST(Conv2d, ShapeErrors) {
  auto x = filled({1, 3, 4, 4}, 1.0f);
  EXPECT_THROW(conv2d(x, ConvSpec<float>::zeros(2, 4, {3, 3})), ShapeError);
  EXPECT_THROW(conv2d(x, ConvSpec<float>::zeros(2, 3, {5, 5})), ShapeError);
}

TEST(Conv2d, MatchesReferenceOnRandomGeometry) {
  Rng rng(2);
  std::uniform_int_distribution<std::size_t> dim(3, 11), ch(1, 5), ker(1, 4), st(1, 3), pd(0, 2);
  for (int t = 0; t < 200; ++t) {
    Extent2 k{ker(rng), ker(rng)}, s{st(rng), st(rng)}, p{pd(rng), pd(rng)};
    Shape4 in{1 + std::size_t(t % 2), ch(rng), dim(rng) + k.h, dim(rng) + k.w};
    auto x = random_uniform<float>(in, rng);
    auto spec = kaiming_conv<float>(ch(rng), in.c, k, s, p, rng);
    for (auto& b : spec.bias) b = 0.25f;
    auto fast = conv2d(x, spec), ref = conv2d_reference(x, spec);
    ASSERT_EQ(fast.shape(), ref.shape());
    ASSERT_LE(max_abs_diff(fast, ref), 1e-4f);
  }
}

TEST(Conv2d, IsLinearWithoutBias) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto x = random_uniform<double>({1, 3, 8, 8}, rng);
    auto y = random_uniform<double>({1, 3, 8, 8}, rng);
    auto spec = kaiming_conv<float>(4, 3, {3, 3}, {1, 1}, {1, 1}, rng);
    const float a = 0.75f, b = -1.5f;
    auto xf = x.cast<float>(), yf = y.cast<float>();
    auto lhs = conv2d(add(scale(xf, a), scale(yf, b)), spec);
    auto rhs = add(scale(conv2d(xf, spec), a), scale(conv2d(yf, spec), b));
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      float l = lhs.data()[i], r = rhs.data()[i];
      EXPECT_LE(std::abs(l - r), 1e-5f * std::max(1.0f, std::abs(r)));
    }
  }
}

TEST(Conv2d, OutputShapeMatchesWindowCounting) {
  Rng rng(4);
  std::uniform_int_distribution<std::size_t> dim(1, 40), k(1, 7), s(1, 4), p(0, 3);
  for (int t = 0; t < 2000; ++t) {
    std::size_t in = dim(rng), kk = k(rng), ss = s(rng), pp = p(rng);
    if (in + 2 * pp < kk) {
      EXPECT_THROW(window_output(in, kk, ss, pp), ShapeError);
    } else {
      EXPECT_EQ(window_output(in, kk, ss, pp), count_windows(in, kk, ss, pp));
    }
  }
}

TEST(BatchNorm, HandValue) {
  auto x = filled({1, 1, 1, 1}, 2.0f);
  BNSpec<float> bn{{1.0f}, {4.0f}, {3.0f}, {0.5f}, 0.0f};
  EXPECT_FLOAT_EQ(batch_norm_infer(x, bn).at(0, 0, 0, 0), 2.0f);
}

TEST(BatchNorm, IdentityAndConstantChannel) {
  Rng rng(5);
  auto x = random_uniform<float>({1, 2, 3, 3}, rng);
  EXPECT_EQ(batch_norm_infer(x, BNSpec<float>::identity(2, 0.0f)), x);
  BNSpec<float> bn{{0.7f, -0.2f}, {2.0f, 0.5f}, {1.3f, 0.4f}, {0.25f, -1.0f}, 1e-5f};
  Tensor4<float> at_mean({1, 2, 2, 2});
  for (auto& v : at_mean.plane(0, 0)) v = 0.7f;
  for (auto& v : at_mean.plane(0, 1)) v = -0.2f;
  auto y = batch_norm_infer(at_mean, bn);
  for (float v : y.plane(0, 0)) EXPECT_FLOAT_EQ(v, 0.25f);
  for (float v : y.plane(0, 1)) EXPECT_FLOAT_EQ(v, -1.0f);
}

TEST(BatchNorm, IsAffinePerChannel) {
  Rng rng(6);
  auto x = random_uniform<double>({1, 3, 4, 4}, rng);
  auto bn = random_bn<double>(3, rng);
  const double a = 2.5;
  auto y = batch_norm_infer(scale(x, a), bn);
  for (std::size_t c = 0; c < 3; ++c) {
    const double k = bn.gamma[c] / std::sqrt(bn.var[c] + bn.eps);
    const double offset = bn.beta[c] - k * bn.mean[c];
    for (std::size_t i = 0; i < 16; ++i)
      EXPECT_NEAR(y.plane(0, c)[i], a * k * x.plane(0, c)[i] + offset, 1e-6);
  }
}

TEST(BatchNorm, LengthMismatch) {
  EXPECT_THROW(batch_norm_infer(filled({1, 3, 2, 2}, 0.0f), BNSpec<float>::identity(2)), ShapeError);
}

TEST(Activations, ReluAndSigmoid) {
  Tensor4<float> x({1, 1, 1, 3}, std::vector<float>{-1.5f, 2.25f, 0.0f});
  auto r = relu(x);
  EXPECT_EQ(r.storage(), (std::vector<float>{0.0f, 2.25f, 0.0f}));
  EXPECT_EQ(relu(filled({1, 2, 2, 2}, 0.0f)), filled({1, 2, 2, 2}, 0.0f));
  EXPECT_FLOAT_EQ(sigmoid(0.0f), 0.5f);
  EXPECT_NEAR(sigmoid(2.0), 0.880797, 1e-6);
  for (double v : {0.1, 1.7, 5.0}) EXPECT_NEAR(sigmoid(v) + sigmoid(-v), 1.0, 1e-15);
}

TEST(Pooling, MaxPool) {
  Tensor4<float> x({1, 1, 2, 2}, std::vector<float>{1, 2, 3, 4});
  auto y = max_pool2d(x, {2, 2}, {2, 2});
  ASSERT_EQ(y.shape(), (Shape4{1, 1, 1, 1}));
  EXPECT_EQ(y.storage()[0], 4.0f);
  auto c = max_pool2d(filled({1, 2, 6, 6}, 3.0f), {3, 3}, {2, 2}, {1, 1});
  EXPECT_EQ(c, filled({1, 2, 3, 3}, 3.0f));
  EXPECT_THROW(max_pool2d(x, {3, 3}, {1, 1}), ShapeError);
}

TEST(Pooling, MaxPoolHalvesBackboneMaps) {
  EXPECT_EQ(downsample2(filled({1, 256, 160, 160}, 0.0f)).shape(), (Shape4{1, 256, 80, 80}));
}

TEST(Pooling, GlobalAverage) {
  Tensor4<float> x({1, 1, 2, 2}, std::vector<float>{1, 2, 3, 4});
  EXPECT_FLOAT_EQ(global_avg_pool(x).storage()[0], 2.5f);
  EXPECT_FLOAT_EQ(global_avg_pool(filled({1, 1, 3, 5}, 7.0f)).storage()[0], 7.0f);
  EXPECT_FLOAT_EQ(global_avg_pool(filled({1, 1, 3, 5}, 0.0f)).storage()[0], 0.0f);
}

TEST(Linear, HandValues) {
  std::vector<float> in{1, 2};
  Matrix<float> w{2, 2, {1, 1, 1, -1}};
  std::vector<float> zero(2, 0.0f), b{0.5f, -0.25f};
  EXPECT_EQ(linear<float>(in, w, zero), (std::vector<float>{3, -1}));
  EXPECT_EQ(linear<float>(in, Matrix<float>::identity(2), zero), in);
  EXPECT_EQ(linear<float>(in, Matrix<float>::zeros(2, 2), b), b);
  EXPECT_THROW(linear<float>(std::vector<float>{1, 2, 3}, w, zero), ShapeError);
}

TEST(Resize, NearestReplicatesAndIdentity) {
  Tensor4<float> x({1, 1, 2, 2}, std::vector<float>{1, 2, 3, 4});
  auto y = resize_nearest(x, {4, 4});
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(y.at(0, 0, r, c), x.at(0, 0, r / 2, c / 2));
  Rng rng(7);
  auto z = random_uniform<float>({1, 3, 5, 6}, rng);
  EXPECT_EQ(resize_nearest(z, {5, 6}), z);
  EXPECT_EQ(resize_nearest(filled({1, 1, 4, 4}, 2.0f), {2, 2}), filled({1, 1, 2, 2}, 2.0f));
}

TEST(Concat, ShapesOrderAndRoundtrip) {
  Rng rng(8);
  auto a = random_uniform<float>({1, 2, 4, 4}, rng);
  auto b = random_uniform<float>({1, 3, 4, 4}, rng);
  std::vector<Tensor4<float>> one{a};
  EXPECT_EQ(concat_channels(one), a);
  auto ab = concat_channels(std::vector<Tensor4<float>>{a, b});
  EXPECT_EQ(ab.shape(), (Shape4{1, 5, 4, 4}));
  EXPECT_EQ(slice_channels(ab, 0, 2), a);
  EXPECT_EQ(slice_channels(ab, 2, 3), b);
  EXPECT_THROW(concat_channels(std::vector<Tensor4<float>>{a, filled({1, 1, 3, 4}, 0.0f)}), ShapeError);
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
  Rng rng(9);
  auto x = random_uniform<float>({2, 4, 17, 13}, rng);
  auto spec = kaiming_conv<float>(6, 4, {3, 3}, {2, 1}, {1, 1}, rng);
  setenv("ACFD_THREADS", "1", 1);
  auto one = conv2d(x, spec);
  setenv("ACFD_THREADS", "4", 1);
  auto four = conv2d(x, spec);
  unsetenv("ACFD_THREADS");
  EXPECT_EQ(one, four);
}
