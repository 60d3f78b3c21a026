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
#include <span>
#include <vector>

#include "acfd/error.hpp"
#include "acfd/matching.hpp"

namespace acfd {

template <class T>
using Pred4 = std::array<T, 4>;

/// Loss hyper-parameters. Defaults: lambda_reg = lambda_cls = 0.7, margin 0.2,
/// focal alpha 0.25 / gamma 2, smooth-L1 transition 1, probability floor 1e-7.
template <class T>
struct LossConfig {
  T lambda_reg = T(0.7);
  T lambda_cls = T(0.7);
  T margin = T(0.2);
  T alpha = T(0.25);
  T gamma = T(2.0);
  T beta = T(1.0);
  T prob_floor = T(1e-7);
};

/// total = reg_main + lambda_reg * reg_comp + cls_main + lambda_cls * cls_comp.
/// The *_main terms are already divided by N1, the *_comp terms by N2.
template <class T>
struct LossBreakdown {
  T reg_main = T(0);
  T reg_comp = T(0);
  T cls_main = T(0);
  T cls_comp = T(0);
  T total = T(0);
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

template <class T>
T smooth_l1(T d, T beta) {
  const T a = std::abs(d);
  return a < beta ? T(0.5) * d * d / beta : a - T(0.5) * beta;
}

template <class T>
T smooth_l1(const Pred4<T>& pred, const Pred4<T>& target, T beta) {
  T sum = T(0);
  for (std::size_t k = 0; k < 4; ++k) sum += smooth_l1(pred[k] - target[k], beta);
  return sum;
}

template <class T>
T smooth_l1_grad(T d, T beta) {
  const T a = std::abs(d);
  if (a < beta) return d / beta;
  return d > T(0) ? T(1) : T(-1);
}

/// Positive anchors are shifted down by the margin; the result is clamped to
/// [floor, 1 - floor] so the logarithms downstream stay finite.
template <class T>
T margin_transform(T p, bool is_positive, T margin, T floor = T(1e-7)) {
  const T shifted = is_positive ? p - margin : p;
  return std::clamp(shifted, floor, T(1) - floor);
}

/// d margin_transform / dp: 1 strictly inside the clamp range, 0 outside.
template <class T>
T margin_transform_grad(T p, bool is_positive, T margin, T floor = T(1e-7)) {
  const T shifted = is_positive ? p - margin : p;
  return (shifted > floor && shifted < T(1) - floor) ? T(1) : T(0);
}

template <class T>
T focal(T pm, bool is_positive, T alpha, T gamma) {
  if (is_positive) return -alpha * std::pow(T(1) - pm, gamma) * std::log(pm);
  return -(T(1) - alpha) * std::pow(pm, gamma) * std::log(T(1) - pm);
}

template <class T>
T focal_grad(T pm, bool is_positive, T alpha, T gamma) {
  if (is_positive) {
    const T one_minus = T(1) - pm;
    const T lead = gamma == T(0) ? T(0) : alpha * gamma * std::pow(one_minus, gamma - T(1)) * std::log(pm);
    return lead - alpha * std::pow(one_minus, gamma) / pm;
  }
  const T lead = gamma == T(0) ? T(0) : gamma * std::pow(pm, gamma - T(1)) * std::log(T(1) - pm);
  return -(T(1) - alpha) * (lead - std::pow(pm, gamma) / (T(1) - pm));
}

/// (1/N1) * sum over label-1 values + (lambda/N2) * sum over label-2 values.
/// Label-0 entries are ignored; an empty set contributes 0.
template <class T>
std::array<T, 2> split_weighted_sum(std::span<const T> values, std::span<const MatchLabel> labels) {
  T main = T(0), comp = T(0);
  std::size_t n1 = 0, n2 = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (labels[i] == MatchLabel::matched) {
      main += values[i];
      ++n1;
    } else if (labels[i] == MatchLabel::compensated) {
      comp += values[i];
      ++n2;
    }
  }
  return {n1 ? main / T(n1) : T(0), n2 ? comp / T(n2) : T(0)};
}

namespace detail {

template <class T>
Pred4<T> target_of(const MatchResult& m, std::size_t i) {
  return {T(m.targets[i][0]), T(m.targets[i][1]), T(m.targets[i][2]), T(m.targets[i][3])};
}

inline bool is_positive(MatchLabel l) { return l != MatchLabel::negative; }

/// Weight applied to anchor i's classification term. The i-not-in-psi2 sum
/// (matched positives and all negatives) is normalized by N1, clamped to 1
/// when no anchor matched in step one.
template <class T>
T cls_weight(MatchLabel l, std::size_t n1, std::size_t n2, T lambda) {
  if (l == MatchLabel::compensated) return lambda / T(n2);
  return T(1) / T(std::max<std::size_t>(n1, 1));
}

}  // namespace detail

template <class T>
LossBreakdown<T> regression_loss(const MatchResult& matches, std::span<const Pred4<T>> preds,
                                 const LossConfig<T>& cfg) {
  if (preds.size() != matches.size()) throw ShapeError("regression_loss: one prediction per anchor required");
  std::vector<T> per_anchor(preds.size(), T(0));
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (detail::is_positive(matches.labels[i]))
      per_anchor[i] = smooth_l1(preds[i], detail::target_of<T>(matches, i), cfg.beta);
  auto [main, comp] = split_weighted_sum(std::span<const T>(per_anchor), std::span<const MatchLabel>(matches.labels));
  LossBreakdown<T> out;
  out.reg_main = main;
  out.reg_comp = comp;
  out.n1 = matches.count(MatchLabel::matched);
  out.n2 = matches.count(MatchLabel::compensated);
  out.total = main + cfg.lambda_reg * comp;
  return out;
}

template <class T>
LossBreakdown<T> classification_loss(const MatchResult& matches, std::span<const T> probs, const LossConfig<T>& cfg) {
  if (probs.size() != matches.size()) throw ShapeError("classification_loss: one probability per anchor required");
  LossBreakdown<T> out;
  out.n1 = matches.count(MatchLabel::matched);
  out.n2 = matches.count(MatchLabel::compensated);
  T main = T(0), comp = T(0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pos = detail::is_positive(matches.labels[i]);
    const T l = focal(margin_transform(probs[i], pos, cfg.margin, cfg.prob_floor), pos, cfg.alpha, cfg.gamma);
    if (matches.labels[i] == MatchLabel::compensated)
      comp += l;
    else
      main += l;
  }
  out.cls_main = main / T(std::max<std::size_t>(out.n1, 1));
  out.cls_comp = out.n2 ? comp / T(out.n2) : T(0);
  out.total = out.cls_main + cfg.lambda_cls * out.cls_comp;
  return out;
}

template <class T>
LossBreakdown<T> total_loss(const MatchResult& matches, std::span<const Pred4<T>> preds, std::span<const T> probs,
                            const LossConfig<T>& cfg) {
  auto reg = regression_loss(matches, preds, cfg);
  auto cls = classification_loss(matches, probs, cfg);
  LossBreakdown<T> out = reg;
  out.cls_main = cls.cls_main;
  out.cls_comp = cls.cls_comp;
  out.total = out.reg_main + cfg.lambda_reg * out.reg_comp + out.cls_main + cfg.lambda_cls * out.cls_comp;
  return out;
}

template <class T>
struct LossGradient {
  std::vector<Pred4<T>> d_preds;
  std::vector<T> d_probs;
};

/// Analytic partial derivatives of total_loss. At clamped probabilities the
/// derivative is 0.
template <class T>
LossGradient<T> loss_grad(const MatchResult& matches, std::span<const Pred4<T>> preds, std::span<const T> probs,
                          const LossConfig<T>& cfg) {
  if (preds.size() != matches.size() || probs.size() != matches.size())
    throw ShapeError("loss_grad: inputs must be parallel to the anchors");
  const std::size_t n1 = matches.count(MatchLabel::matched);
  const std::size_t n2 = matches.count(MatchLabel::compensated);
  LossGradient<T> g;
  g.d_preds.assign(preds.size(), Pred4<T>{});
  g.d_probs.assign(probs.size(), T(0));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const MatchLabel label = matches.labels[i];
    const bool pos = detail::is_positive(label);
    if (pos) {
      const T w = label == MatchLabel::matched ? T(1) / T(n1) : cfg.lambda_reg / T(n2);
      const auto target = detail::target_of<T>(matches, i);
      for (std::size_t k = 0; k < 4; ++k) g.d_preds[i][k] = w * smooth_l1_grad(preds[i][k] - target[k], cfg.beta);
    }
    const T pm = margin_transform(probs[i], pos, cfg.margin, cfg.prob_floor);
    const T dq = margin_transform_grad(probs[i], pos, cfg.margin, cfg.prob_floor);
    g.d_probs[i] = dq == T(0) ? T(0)
                              : detail::cls_weight(label, n1, n2, cfg.lambda_cls) * focal_grad(pm, pos, cfg.alpha, cfg.gamma);
  }
  return g;
}

}  // namespace acfd
