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
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acfd/acb.hpp"
#include "acfd/anchors.hpp"
#include "acfd/eval.hpp"
#include "acfd/init.hpp"
#include "acfd/losses.hpp"
#include "acfd/matching.hpp"
#include "acfd/model.hpp"
#include "acfd/oracles.hpp"
#include "acfd/postprocess.hpp"

namespace acfd {

// ---------------------------------------------------------------------------
// Random instance generators shared by the verification battery and tests.

inline Box random_box(Rng& rng, double extent, double min_side = 2.0, double max_side = 60.0) {
  std::uniform_real_distribution<double> side(min_side, max_side), pos(0.0, extent);
  const double w = side(rng), h = side(rng);
  const double x = pos(rng), y = pos(rng);
  return {x, y, x + w, y + h};
}

/// Box derived from `base` by a small random jitter, so IoUs spread over (0, 1].
inline Box jitter_box(Rng& rng, const Box& base, double amount) {
  std::uniform_real_distribution<double> d(-amount, amount);
  const double w = base.width(), h = base.height();
  Box b{base.x1 + d(rng) * w, base.y1 + d(rng) * h, base.x2 + d(rng) * w, base.y2 + d(rng) * h};
  if (b.x2 <= b.x1 + 0.5) b.x2 = b.x1 + 0.5;
  if (b.y2 <= b.y1 + 0.5) b.y2 = b.y1 + 0.5;
  return b;
}

struct DamInstance {
  std::vector<Box> anchors;
  std::vector<Box> regressed;
  std::vector<Box> gts;
};

/// Up to 50 anchors and 8 ground truths; anchors and regressed boxes are
/// drawn near ground truths often enough to exercise both match steps.
inline DamInstance random_dam_instance(Rng& rng) {
  std::uniform_int_distribution<std::size_t> n_anchor(0, 50), n_gt(0, 8), pick(0, 3);
  std::uniform_real_distribution<double> amount(0.05, 0.9);
  DamInstance inst;
  const std::size_t ng = n_gt(rng);
  for (std::size_t g = 0; g < ng; ++g) inst.gts.push_back(random_box(rng, 100.0, 4.0, 40.0));
  const std::size_t na = n_anchor(rng);
  for (std::size_t i = 0; i < na; ++i) {
    auto near_gt = [&]() {
      if (inst.gts.empty() || pick(rng) == 0) return random_box(rng, 100.0, 4.0, 40.0);
      std::uniform_int_distribution<std::size_t> which(0, inst.gts.size() - 1);
      return jitter_box(rng, inst.gts[which(rng)], amount(rng));
    };
    inst.anchors.push_back(near_gt());
    inst.regressed.push_back(near_gt());
  }
  return inst;
}

inline std::vector<Detection> random_detections(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 9);
  std::vector<Detection> out;
  for (std::size_t i = 0; i < n; ++i) {
    Box b = (i > 0 && coarse(rng) < 5) ? jitter_box(rng, out[std::size_t(coarse(rng)) % out.size()].box, 0.3)
                                        : random_box(rng, 200.0, 5.0, 60.0);
    // coarse scores create ties that exercise the tie-break rule
    double s = coarse(rng) < 2 ? double(coarse(rng)) / 10.0 : score(rng);
    out.push_back({b, s});
  }
  return out;
}

template <class T>
struct LossInstance {
  MatchResult matches;
  std::vector<Pred4<T>> preds;
  std::vector<T> probs;
};

template <class T>
LossInstance<T> random_loss_instance(Rng& rng, std::size_t anchors) {
  std::uniform_int_distribution<int> label(0, 2);
  std::normal_distribution<double> delta(0.0, 1.2);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  LossInstance<T> inst;
  auto& m = inst.matches;
  for (std::size_t i = 0; i < anchors; ++i) {
    auto l = MatchLabel(label(rng));
    m.labels.push_back(l);
    m.assigned_gt.push_back(l == MatchLabel::negative ? kNoGt : 0);
    Delta4 t{0, 0, 0, 0};
    if (l != MatchLabel::negative) t = {delta(rng), delta(rng), delta(rng), delta(rng)};
    m.targets.push_back(t);
    inst.preds.push_back({T(delta(rng)), T(delta(rng)), T(delta(rng)), T(delta(rng))});
    inst.probs.push_back(T(prob(rng)));
  }
  return inst;
}

/// True when every regression residual sits at least `kink_gap` away from the
/// smooth-L1 kink and every margin-shifted probability lies in
/// [prob_gap, 1 - prob_gap]. The probability band also keeps central
/// differences with h = 1e-4 clear of the logarithm singularities at 0 and 1,
/// where their own truncation error exceeds 1e-3 relative.
template <class T>
bool loss_point_interior(const LossInstance<T>& inst, const LossConfig<T>& cfg, T kink_gap = T(1e-3),
                         T prob_gap = T(1e-2)) {
  for (std::size_t i = 0; i < inst.probs.size(); ++i) {
    const bool pos = inst.matches.labels[i] != MatchLabel::negative;
    const T q = pos ? inst.probs[i] - cfg.margin : inst.probs[i];
    if (q < std::max(prob_gap, cfg.prob_floor + kink_gap) || q > T(1) - std::max(prob_gap, cfg.prob_floor + kink_gap))
      return false;
    if (!pos) continue;
    for (std::size_t k = 0; k < 4; ++k) {
      const T d = inst.preds[i][k] - T(inst.matches.targets[i][k]);
      if (std::abs(std::abs(d) - cfg.beta) < kink_gap) return false;
    }
  }
  return true;
}

/// |a - b| relative to the larger magnitude, with a 1e-6 floor for zeros.
inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// ---------------------------------------------------------------------------
// Verification battery.

struct VerifyOptions {
  std::uint64_t seed = 7;
  bool inject_fault = false;  // perturbs fused weights by 1e-2 (one weight per ACB check, one layer per model check)
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace verify_detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline CheckResult anchor_count() {
  auto set = generate_anchors({640, 640});
  bool ok = set.size() == 34125 && oracle::count_anchors(640, 640) == 34125;
  for (std::size_t l = 0; l < kLevels; ++l) {
    const Box& b = set.boxes[set.level_offsets[l]];
    ok = ok && b.width() == double(16u << l);
  }
  Rng rng(11);
  std::uniform_int_distribution<std::size_t> k(1, 12);
  for (int t = 0; t < 50; ++t) {
    std::size_t h = 128 * k(rng), w = 128 * k(rng);
    ok = ok && generate_anchors({h, w}).size() == oracle::count_anchors(h, w);
  }
  return {"anchor_count", ok, std::to_string(set.size()) + " anchors on 640x640"};
}

inline CheckResult conv_reference(Rng& rng) {
  double worst = 0;
  std::uniform_int_distribution<std::size_t> dim(1, 9), ch(1, 4), ker(1, 3), st(1, 2), pd(0, 1);
  for (int t = 0; t < 40; ++t) {
    Shape4 s{1, ch(rng), dim(rng) + 2, dim(rng) + 2};
    Extent2 k{ker(rng), ker(rng)}, stride{st(rng), st(rng)}, pad{pd(rng), pd(rng)};
    auto x = random_uniform<float>(s, rng);
    auto conv = kaiming_conv<float>(ch(rng), s.c, k, stride, pad, rng);
    for (auto& b : conv.bias) b = float(std::uniform_real_distribution<double>(-1, 1)(rng));
    worst = std::max(worst, double(max_abs_diff(conv2d(x, conv), conv2d_reference(x, conv))));
  }
  return {"conv_direct_vs_reference", worst <= 1e-4, "max |diff| " + fmt(worst)};
}

inline CheckResult conv_bn_fold(Rng& rng) {
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    auto conv = kaiming_conv<float>(4, 3, {3, 3}, {1, 1}, {1, 1}, rng);
    auto bn = random_bn<float>(4, rng);
    auto x = random_uniform<float>({1, 3, 8, 8}, rng);
    auto ref = batch_norm_infer(conv2d(x, conv), bn);
    worst = std::max(worst, double(max_abs_diff(ref, conv2d(x, fuse_conv_bn(conv, bn)))));
  }
  return {"conv_bn_fold", worst <= 1e-5, "max |diff| " + fmt(worst) + " over 100 pairs"};
}

inline CheckResult acb_fusion(Rng& rng, bool fault) {
  double worst32 = 0, worst64 = 0;
  for (int t = 0; t < 100; ++t) {
    auto spec = random_acb<double>(3, 4, {1, 1}, rng);
    auto x = random_uniform<double>({1, 3, 9, 9}, rng);
    auto fused64 = fuse_acb(spec);
    worst64 = std::max(worst64, max_abs_diff(acb_forward(x, spec), fused_forward(x, fused64)));
    auto spec32 = spec.cast<float>();
    auto x32 = x.cast<float>();
    auto fused32 = fuse_acb(spec32);
    if (fault && t == 0) fused32.conv.weight.storage()[0] += 1e-2f;
    worst32 = std::max(worst32, double(max_abs_diff(acb_forward(x32, spec32), fused_forward(x32, fused32))));
  }
  return {"acb_fusion", worst32 <= 1e-4 && worst64 <= 1e-10,
          "f32 " + fmt(worst32) + " (<=1e-4), f64 " + fmt(worst64) + " (<=1e-10)"};
}

inline CheckResult model_fusion(std::uint64_t seed, bool fault) {
  auto model = make_model<float>(ModelConfig::tiny(8), seed);
  auto fused = fuse_model(model);
  if (fault) {
    auto& f = std::get<FusedConv<float>>(fused.backbone.stages[0][0].acbs[0].form);
    for (auto& w : f.conv.weight.storage()) w += 1e-2f;
  }
  Rng rng(seed + 1);
  auto img = random_uniform<float>({1, 3, 128, 128}, rng);
  auto a = model_forward(model, img), b = model_forward(fused, img);
  double worst = 0;
  for (std::size_t l = 0; l < kLevels; ++l) {
    worst = std::max(worst, double(max_abs_diff(a.cls[l], b.cls[l])));
    worst = std::max(worst, double(max_abs_diff(a.reg[l], b.reg[l])));
  }
  return {"model_fusion_drift", worst <= 1e-3, "tiny model max |diff| " + fmt(worst)};
}

inline CheckResult dam_oracle(Rng& rng) {
  std::size_t mismatches = 0, instances = 1000;
  bool classic_ok = true, monotone_ok = true;
  for (std::size_t t = 0; t < instances; ++t) {
    auto inst = random_dam_instance(rng);
    auto got = dam_match(std::span<const Box>(inst.anchors), inst.regressed, inst.gts, 0.35, 0.7);
    auto want = oracle::dam(inst.anchors, inst.regressed, inst.gts, 0.35, 0.7);
    for (std::size_t i = 0; i < inst.anchors.size(); ++i) {
      long assigned = got.assigned_gt[i] == kNoGt ? -1 : long(got.assigned_gt[i]);
      if (int(got.labels[i]) != want.labels[i] || assigned != want.assigned[i]) ++mismatches;
    }
    auto inf = dam_match(std::span<const Box>(inst.anchors), inst.regressed, inst.gts, 0.35,
                         std::numeric_limits<double>::infinity());
    auto classic = classic_match(inst.anchors, inst.gts, 0.35);
    classic_ok = classic_ok && inf.labels == classic.labels && inf.assigned_gt == classic.assigned_gt;
    auto higher = dam_match(std::span<const Box>(inst.anchors), inst.regressed, inst.gts, 0.35, 0.85);
    for (std::size_t i = 0; i < inst.anchors.size(); ++i)
      if (higher.labels[i] == MatchLabel::compensated && got.labels[i] != MatchLabel::compensated) monotone_ok = false;
  }
  return {"dam_oracle", mismatches == 0 && classic_ok && monotone_ok,
          std::to_string(mismatches) + " mismatches over " + std::to_string(instances) +
              " instances; T2=inf reduction " + (classic_ok ? "ok" : "FAILED")};
}

inline CheckResult nms_oracle(Rng& rng) {
  std::size_t bad = 0;
  std::uniform_int_distribution<std::size_t> size(0, 200);
  for (int t = 0; t < 200; ++t) {
    auto dets = random_detections(rng, size(rng));
    auto got = nms(dets, 0.55);
    auto want = oracle::nms(dets, 0.55);
    if (got != want) ++bad;
    for (std::size_t i = 0; i < got.size(); ++i)
      for (std::size_t j = i + 1; j < got.size(); ++j)
        if (iou(got[i].box, got[j].box) > 0.55) ++bad;
  }
  return {"nms_oracle", bad == 0, std::to_string(bad) + " disagreements over 200 random sets"};
}

inline CheckResult loss_gradients(Rng& rng) {
  LossConfig<double> cfg;
  std::size_t points = 0;
  double worst = 0;
  while (points < 1000) {
    auto inst = random_loss_instance<double>(rng, 6);
    if (!loss_point_interior(inst, cfg)) continue;
    auto an = loss_grad(inst.matches, std::span<const Pred4<double>>(inst.preds), std::span<const double>(inst.probs), cfg);
    auto fd = oracle::finite_difference(inst.matches, inst.preds, inst.probs, cfg, 1e-4);
    for (std::size_t i = 0; i < inst.probs.size(); ++i) {
      worst = std::max(worst, relative_error(an.d_probs[i], fd.d_probs[i]));
      for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, relative_error(an.d_preds[i][k], fd.d_preds[i][k]));
    }
    ++points;
  }
  return {"loss_gradients", worst <= 1e-3, "max relative error " + fmt(worst) + " over 1000 points"};
}

inline CheckResult ap_fixture() {
  std::vector<std::vector<Box>> gts{{{0, 0, 10, 10}, {20, 20, 30, 30}}};
  std::vector<std::vector<Detection>> dets{{{{0, 0, 10, 10}, 0.9}, {{50, 50, 60, 60}, 0.8}, {{20, 20, 30, 30}, 0.7}}};
  double ap = evaluate_ap(gts, dets);
  return {"ap_fixture", std::abs(ap - 0.8333333) <= 1e-4, "AP " + std::to_string(ap)};
}

}  // namespace verify_detail

/// Runs every property check; results are in a fixed order.
inline std::vector<CheckResult> run_verification(const VerifyOptions& opts = {}) {
  using namespace verify_detail;
  Rng rng(opts.seed);
  std::vector<CheckResult> out;
  out.push_back(anchor_count());
  out.push_back(conv_reference(rng));
  out.push_back(conv_bn_fold(rng));
  out.push_back(acb_fusion(rng, opts.inject_fault));
  out.push_back(model_fusion(opts.seed, opts.inject_fault));
  out.push_back(dam_oracle(rng));
  out.push_back(nms_oracle(rng));
  out.push_back(loss_gradients(rng));
  out.push_back(ap_fixture());
  return out;
}

}  // namespace acfd
