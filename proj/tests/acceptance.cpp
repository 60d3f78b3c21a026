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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. Usage: acfd_acceptance [path/to/acfd]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acfd/acfd.hpp"
#include "acfd/verify.hpp"

using namespace acfd;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

const std::array<std::size_t, kLevels> kStageChannels{256, 512, 768, 1024, 128, 128};

Outcome anchor_count() {
  auto set = generate_anchors({640, 640});
  bool ok = set.size() == 34125;
  std::string sides;
  for (std::size_t l = 0; l < kLevels; ++l) {
    const std::size_t begin = set.level_offsets[l];
    const std::size_t end = l + 1 < kLevels ? set.level_offsets[l + 1] : set.size();
    for (std::size_t i = begin; i < end; ++i)
      ok = ok && set.boxes[i].width() == double(16u << l) && set.boxes[i].height() == double(16u << l);
    sides += (l ? "," : "") + std::to_string(16u << l);
  }
  return {ok, std::to_string(set.size()) + " anchors, sides {" + sides + "}"};
}

Outcome stage_dims() {
  const std::array<std::size_t, kLevels> sides{160, 80, 40, 20, 10, 5};
  bool ok = true;
  // Full resolution with 1/16 widths exercises every stride at 640x640.
  Rng rng(2);
  auto narrow = make_backbone<float>(BackboneConfig::vovnetv3_51().narrowed(16), &rng);
  auto levels = backbone_forward(random_uniform<float>({1, 3, 640, 640}, rng), narrow);
  for (std::size_t i = 0; i < kLevels; ++i)
    ok = ok && levels[i].shape() == Shape4{1, kStageChannels[i] / 16, sides[i], sides[i]} && levels[i].all_finite();
  // Full widths at the smallest admissible input check every channel count.
  auto full = make_backbone<float>(BackboneConfig::vovnetv3_51(), &rng);
  auto wide = backbone_forward(random_uniform<float>({1, 3, 128, 128}, rng), full);
  for (std::size_t i = 0; i < kLevels; ++i)
    ok = ok && wide[i].shape() == Shape4{1, kStageChannels[i], 128 / kStrides[i], 128 / kStrides[i]};
  std::string dims;
  for (std::size_t i = 0; i < kLevels; ++i)
    dims += (i ? " " : "") + std::to_string(wide[i].c()) + "@" + std::to_string(levels[i].h());
  return {ok, "levels " + dims + " (640x640 spatial, full channels)"};
}

Outcome acb_fusion() {
  Rng rng(3);
  std::uniform_int_distribution<std::size_t> ch(1, 6), side(3, 12), stride(1, 2);
  double worst32 = 0, worst64 = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t s = stride(rng), in_c = ch(rng), out_c = ch(rng);
    auto spec = random_acb<double>(in_c, out_c, {s, s}, rng);
    auto x = random_uniform<double>({1, in_c, side(rng), side(rng)}, rng);
    worst64 = std::max(worst64, max_abs_diff(acb_forward(x, spec), conv2d(x, fuse_acb(spec).conv)));
    auto spec32 = spec.cast<float>();
    auto x32 = x.cast<float>();
    worst32 = std::max(worst32, double(max_abs_diff(acb_forward(x32, spec32), conv2d(x32, fuse_acb(spec32).conv))));
  }
  return {worst32 <= 1e-4 && worst64 <= 1e-10, "f32 " + sci(worst32) + ", f64 " + sci(worst64) + " over 100 specs"};
}

Outcome conv_bn_fold() {
  Rng rng(4);
  std::uniform_int_distribution<std::size_t> ch(1, 6), ker(1, 3), side(3, 10), stride(1, 2);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t kh = ker(rng), kw = ker(rng), s = stride(rng), in_c = ch(rng), out_c = ch(rng);
    auto conv = kaiming_conv<float>(out_c, in_c, {kh, kw}, {s, s}, {kh / 2, kw / 2}, rng);
    for (auto& b : conv.bias) b = std::uniform_real_distribution<float>(-1, 1)(rng);
    auto bn = random_bn<float>(out_c, rng);
    auto x = random_uniform<float>({1, in_c, side(rng), side(rng)}, rng);
    worst = std::max(worst, double(max_abs_diff(batch_norm_infer(conv2d(x, conv), bn), conv2d(x, fuse_conv_bn(conv, bn)))));
  }
  return {worst <= 1e-5, "max |diff| " + sci(worst) + " over 100 pairs"};
}

Outcome model_fusion_drift() {
  auto model = make_model<float>(ModelConfig::tiny(), 5);
  auto fused = fuse_model(model);
  Rng rng(5);
  double worst = 0;
  for (std::size_t side : {256u, 640u}) {
    auto x = random_uniform<float>({1, 3, side, side}, rng);
    auto a = model_forward(model, x), b = model_forward(fused, x);
    for (std::size_t l = 0; l < kLevels; ++l)
      worst = std::max({worst, double(max_abs_diff(a.cls[l], b.cls[l])), double(max_abs_diff(a.reg[l], b.reg[l]))});
  }
  return {worst <= 1e-3 && is_fused(fused), "max |diff| " + sci(worst) + " at 256x256 and 640x640"};
}

Outcome dam_oracle() {
  Rng rng(6);
  auto r = verify_detail::dam_oracle(rng);
  return {r.passed, r.detail};
}

Outcome loss_gradients() {
  Rng rng(7);
  auto r = verify_detail::loss_gradients(rng);
  return {r.passed, r.detail};
}

Outcome loss_hand_values() {
  const double m = margin_transform(0.9, true, 0.2);
  const double f = focal(0.9, true, 0.25, 2.0);
  using L = MatchLabel;
  std::vector<L> labels{L::matched, L::matched, L::compensated, L::negative};
  auto [main, comp] = split_weighted_sum<double>(std::vector<double>{0.2, 0.4, 1.0, 5.0}, labels);
  const double eq1 = main + 0.7 * comp;
  // The same fixture through the regression loss: anchor terms 0.2, 0.4, 1.0.
  MatchResult mr;
  for (auto l : labels) {
    mr.labels.push_back(l);
    mr.assigned_gt.push_back(l == L::negative ? kNoGt : 0);
    mr.targets.push_back({0, 0, 0, 0});
  }
  std::vector<Pred4<double>> preds{{std::sqrt(0.4), 0, 0, 0}, {std::sqrt(0.8), 0, 0, 0}, {1.5, 0, 0, 0}, {9, 9, 9, 9}};
  const double reg = regression_loss<double>(mr, preds, LossConfig<double>{}).total;
  const bool ok = std::abs(m - 0.7) <= 1e-12 && std::abs(f - 2.63402e-4) <= 1e-9 && eq1 == 1.0 &&
                  std::abs(reg - 1.0) <= 1e-12;
  std::ostringstream os;
  os.precision(10);
  os << "margin " << m << ", focal " << f << ", fixture " << eq1 << " (loss path " << reg << ")";
  return {ok, os.str()};
}

HeadOutput<float> constant_head(Extent2 padded, float fill) {
  HeadOutput<float> h;
  for (std::size_t l = 0; l < kLevels; ++l) {
    const std::size_t rows = padded.h / kStrides[l], cols = padded.w / kStrides[l];
    h.cls[l] = Tensor4<float>({1, 1, rows, cols}, fill);
    h.reg[l] = Tensor4<float>({1, 4, rows, cols}, 0.0f);
  }
  return h;
}

Outcome nms_and_postprocess() {
  Rng rng(9);
  auto oracle_check = verify_detail::nms_oracle(rng);
  const PostprocessConfig cfg;
  bool ok = oracle_check.passed && cfg.conf_thresh == 0.08 && cfg.per_scale_top_k == 1000 && cfg.nms_iou == 0.55 &&
            cfg.final_top_k == 100;
  std::size_t max_out = 0;
  // Random heads through the full pipeline.
  std::normal_distribution<float> logit(-1.0f, 2.0f), delta(0.0f, 0.3f);
  for (int t = 0; t < 5; ++t) {
    std::vector<ScaleOutput<float>> scales;
    for (auto size : multi_scale_sizes()) {
      auto info = make_scale_info({300, 400}, size);
      auto head = constant_head(info.padded, 0.0f);
      for (std::size_t l = 0; l < kLevels; ++l) {
        for (auto& v : head.cls[l].storage()) v = logit(rng);
        for (auto& v : head.reg[l].storage()) v = delta(rng);
      }
      scales.push_back({head, info});
    }
    auto dets = postprocess<float>(scales, cfg);
    max_out = std::max(max_out, dets.size());
    ok = ok && dets.size() <= 100 && std::is_sorted(dets.begin(), dets.end(), [](auto& a, auto& b) {
           return a.score > b.score;
         });
    for (std::size_t i = 0; i < dets.size(); ++i) {
      ok = ok && dets[i].score > 0.08;
      for (std::size_t j = i + 1; j < dets.size(); ++j) ok = ok && iou(dets[i].box, dets[j].box) <= 0.55;
    }
  }
  // Per-scale cap: 1500 passing anchors on one scale, suppression disabled.
  auto info = make_scale_info({640, 640}, {640, 640});
  auto head = constant_head(info.padded, -20.0f);
  auto& plane = head.cls[0].storage();
  for (std::size_t i = 0; i < 1500; ++i) plane[i] = 1.0f + float(i) * 1e-3f;
  PostprocessConfig open = cfg;
  open.nms_iou = 1.0;
  open.final_top_k = 5000;
  std::vector<ScaleOutput<float>> one{{head, info}};
  const std::size_t capped = postprocess<float>(one, open).size();
  ok = ok && capped == 1000;
  return {ok, oracle_check.detail + "; max " + std::to_string(max_out) + " detections; per-scale cap " +
                  std::to_string(capped)};
}

Outcome ap_fixture() {
  std::vector<std::vector<Box>> gts{{{0, 0, 10, 10}, {20, 20, 30, 30}}};
  std::vector<std::vector<Detection>> dets{{{{0, 0, 10, 10}, 0.9}, {{50, 50, 60, 60}, 0.8}, {{20, 20, 30, 30}, 0.7}}};
  const double ap = evaluate_ap(gts, dets);
  std::vector<std::vector<Detection>> perfect{{{{0, 0, 10, 10}, 0.9}, {{20, 20, 30, 30}, 0.8}}};
  const double ap1 = evaluate_ap(gts, perfect);
  return {std::abs(ap - 0.8333) <= 1e-4 && ap1 == 1.0, "AP " + std::to_string(ap) + ", perfect " + std::to_string(ap1)};
}

/// Head whose scores come from ground-truth IoU: each anchor's logit is the
/// log-odds of its best IoU and its deltas encode that ground truth.
HeadOutput<float> oracle_head(const ScaleInfo& info, const std::vector<Box>& gts_original) {
  auto head = constant_head(info.padded, -20.0f);
  const auto anchors = generate_anchors(info.padded);
  std::vector<Box> gts;
  for (const auto& g : gts_original) gts.push_back(to_scale(g, info));
  std::size_t idx = 0;
  for (std::size_t l = 0; l < kLevels; ++l) {
    auto& cls = head.cls[l];
    auto& reg = head.reg[l];
    for (std::size_t y = 0; y < cls.h(); ++y)
      for (std::size_t x = 0; x < cls.w(); ++x, ++idx) {
        double best = 0;
        std::size_t arg = 0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
          const double v = iou(anchors.boxes[idx], gts[g]);
          if (v > best) best = v, arg = g;
        }
        if (best <= 0) continue;
        const double p = std::clamp(best, 1e-4, 1 - 1e-4);
        cls.at(0, 0, y, x) = float(std::log(p / (1 - p)));
        const Delta4 d = encode(anchors.boxes[idx], gts[arg]);
        for (std::size_t k = 0; k < 4; ++k) reg.at(0, k, y, x) = float(d[k]);
      }
  }
  return head;
}

Outcome synthetic_detection() {
  Rng rng(11);
  std::uniform_int_distribution<std::size_t> dim(200, 480), faces(1, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<Box>> all_gts;
  std::vector<std::vector<Detection>> all_dets;
  for (int n = 0; n < 50; ++n) {
    const std::size_t h = dim(rng), w = dim(rng);
    Image img({1, 3, h, w}, 0.8f);
    std::vector<Box> gts;
    const std::size_t k = faces(rng);
    for (std::size_t f = 0; f < k * 10 && gts.size() < k; ++f) {
      const double side = 24 + unit(rng) * 0.4 * double(std::min(h, w));
      const double bw = side * (0.8 + 0.4 * unit(rng)), bh = side;
      const double x1 = std::floor(unit(rng) * (double(w) - bw)), y1 = std::floor(unit(rng) * (double(h) - bh));
      Box b{x1, y1, std::floor(x1 + bw), std::floor(y1 + bh)};
      if (std::any_of(gts.begin(), gts.end(), [&](const Box& o) { return iou(o, b) > 0; })) continue;
      gts.push_back(b);
      // paint the face: a flat colour rectangle
      const float colour[3] = {float(unit(rng)), float(unit(rng)), float(unit(rng))};
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = std::size_t(b.y1); y < std::size_t(b.y2); ++y)
          for (std::size_t x = std::size_t(b.x1); x < std::size_t(b.x2); ++x) img.at(0, c, y, x) = colour[c];
    }
    std::vector<ScaleOutput<float>> scales;
    for (auto size : multi_scale_sizes()) {
      auto info = make_scale_info({img.h(), img.w()}, size);
      scales.push_back({oracle_head(info, gts), info});
    }
    all_dets.push_back(postprocess<float>(scales));
    all_gts.push_back(std::move(gts));
  }
  const double ap = evaluate_ap(all_gts, all_dets);
  std::size_t n_gts = 0;
  for (const auto& g : all_gts) n_gts += g.size();
  return {ap >= 0.95, "AP " + std::to_string(ap) + " over 50 images, " + std::to_string(n_gts) + " faces"};
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("acfd_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  Rng rng(12);
  auto model = make_model<float>(ModelConfig::tiny(), 12);
  save_file((dir / "model.acfd").string(), model);
  write_ppm((dir / "image.ppm").string(), random_uniform<float>({1, 3, 150, 200}, rng, 0.0f, 1.0f));

  // Save/load round trip: identical bytes and bit-identical forwards.
  auto loaded = load_file((dir / "model.acfd").string());
  bool ok = save(loaded) == save(model);
  auto x = random_uniform<float>({1, 3, 128, 256}, rng);
  auto a = model_forward(model, x), b = model_forward(loaded, x);
  for (std::size_t l = 0; l < kLevels; ++l)
    ok = ok && a.cls[l].storage() == b.cls[l].storage() && a.reg[l].storage() == b.reg[l].storage();

  std::string detail = ok ? "container round trip bit-identical" : "container round trip differs";
  if (cli.empty()) {
    const auto img = read_ppm((dir / "image.ppm").string());
    const auto first = detections_jsonl("image", detect(model, img));
    const auto second = detections_jsonl("image", detect(loaded, img));
    ok = ok && first == second;
    detail += "; in-process detect " + std::string(first == second ? "identical" : "differs");
  } else {
    std::string outs[2];
    for (int r = 0; r < 2; ++r) {
      const fs::path out = dir / ("det" + std::to_string(r) + ".jsonl");
      const std::string cmd = "\"" + cli + "\" detect \"" + (dir / "image.ppm").string() + "\" \"" +
                              (dir / "model.acfd").string() + "\" -o \"" + out.string() + "\" 2>/dev/null";
      ok = ok && run_command(cmd) == 0;
      outs[r] = slurp(out);
    }
    const std::size_t lines = std::size_t(std::count(outs[0].begin(), outs[0].end(), '\n'));
    ok = ok && !outs[0].empty() && outs[0] == outs[1];
    detail += "; CLI detect twice " + std::string(outs[0] == outs[1] ? "byte-identical" : "differs") + " (" +
              std::to_string(lines) + " lines)";
  }
  fs::remove_all(dir);
  return {ok, detail};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

Outcome bench_direction() {
  auto model = make_model<float>(ModelConfig::tiny(16), 13);
  auto fused = fuse_model(model);
  Rng rng(13);
  auto x = random_uniform<float>({1, 3, 256, 256}, rng);
  MacTally mu, mf;
  model_forward(model, x, &mu);
  model_forward(fused, x, &mf);
  std::vector<double> tu, tf;
  for (int r = 0; r < 9; ++r)
    for (int form = 0; form < 2; ++form) {
      const auto t0 = std::chrono::steady_clock::now();
      auto out = model_forward(form == 0 ? model : fused, x);
      const auto t1 = std::chrono::steady_clock::now();
      (form == 0 ? tu : tf).push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  const double mu_ms = median(tu), mf_ms = median(tf);
  std::ostringstream os;
  os.precision(4);
  os << "median fused " << mf_ms << " ms vs unfused " << mu_ms << " ms; MACs " << mf.macs << " < " << mu.macs;
  return {mf_ms <= 1.1 * mu_ms && mf.macs < mu.macs, os.str()};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // <= 0: no time bound
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria{
      {1, "anchor count", 1, anchor_count},
      {2, "backbone stage dims", 30, stage_dims},
      {3, "ACB fusion equivalence", 60, acb_fusion},
      {4, "conv+BN folding", 10, conv_bn_fold},
      {5, "end-to-end fusion drift", 60, model_fusion_drift},
      {6, "DAM oracle equivalence", 30, dam_oracle},
      {7, "loss gradient check", 60, loss_gradients},
      {8, "loss hand values", 1, loss_hand_values},
      {9, "NMS oracle and postprocess limits", 30, nms_and_postprocess},
      {10, "AP evaluator", 1, ap_fixture},
      {11, "synthetic oracle-head detection", 60, synthetic_detection},
      {12, "determinism", 30, [&cli] { return determinism(cli); }},
      {13, "fused benchmark direction", 0, bench_direction},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s <= 0 || secs < c.budget_s;
    const bool passed = o.passed && in_time;
    failures += !passed;
    std::printf("%s %2d %-34s %s [%.2fs%s]\n", passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
