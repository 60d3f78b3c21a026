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

// acfd: command-line front end.
//
// Exit codes: 0 success, 1 I/O or input format, 2 usage, 3 verification failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "acfd/acfd.hpp"
#include "acfd/verify.hpp"

namespace {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kIoError = 1, kUsage = 2, kVerifyFailed = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_threshold(const std::string& text, bool allow_above_one) {
  double v = 0;
  if (text == "inf" || text == "classic") {
    v = std::numeric_limits<double>::infinity();
  } else {
    std::size_t used = 0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw UsageError("not a number: " + text);
    }
    if (used != text.size()) throw UsageError("not a number: " + text);
  }
  if (!(v >= 0.0) || (!allow_above_one && v > 1.0))
    throw UsageError("threshold " + text + (allow_above_one ? " must be >= 0" : " must lie in [0, 1]"));
  return v;
}

void check_unit(double v, const std::string& name) {
  if (!(v >= 0.0 && v <= 1.0)) throw UsageError(name + " must lie in [0, 1]");
}

acfd::Extent2 parse_scale(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw UsageError("scale must look like HxW, got " + text);
  try {
    std::size_t a = 0, b = 0;
    const unsigned long h = std::stoul(text.substr(0, x), &a);
    const unsigned long w = std::stoul(text.substr(x + 1), &b);
    if (a != x || b != text.size() - x - 1 || h == 0 || w == 0) throw UsageError("bad scale " + text);
    return {h, w};
  } catch (const std::logic_error&) {
    throw UsageError("bad scale " + text);
  }
}

std::string format_threshold(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream os;
  os << v;
  return os.str();
}

acfd::Model<float> load_model(const std::string& path) {
  try {
    return acfd::load_file(path);
  } catch (const acfd::FormatError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const acfd::CorruptionError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

float max_output_diff(const acfd::HeadOutput<float>& a, const acfd::HeadOutput<float>& b) {
  float d = 0;
  for (std::size_t l = 0; l < acfd::kLevels; ++l)
    d = std::max({d, acfd::max_abs_diff(a.cls[l], b.cls[l]), acfd::max_abs_diff(a.reg[l], b.reg[l])});
  return d;
}

// ---------------------------------------------------------------------------
// init

struct InitArgs {
  std::string output;
  std::string config = "tiny";
  std::size_t width = 8;
  std::uint64_t seed = 0;
};

int cmd_init(const InitArgs& a) {
  acfd::ModelConfig cfg;
  if (a.config == "tiny") {
    if (a.width == 0) throw UsageError("--width must be >= 1");
    cfg = acfd::ModelConfig::tiny(a.width);
  } else if (a.config == "full") {
    cfg = acfd::ModelConfig::full();
  } else {
    throw UsageError("--config must be tiny or full");
  }
  auto model = acfd::make_model<float>(cfg, a.seed);
  try {
    acfd::save_file(a.output, model);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  std::cout << "wrote " << a.output << " (" << acfd::parameter_count(model) << " parameters, seed " << a.seed
            << ")\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// fuse

struct FuseArgs {
  std::string input, output;
  std::uint64_t seed = 0;
  std::size_t probe = 128;
};

int cmd_fuse(const FuseArgs& a) {
  if (a.probe == 0 || a.probe % 128 != 0) throw UsageError("--probe-size must be a positive multiple of 128");
  auto model = load_model(a.input);
  if (acfd::is_fused(model)) throw UsageError(a.input + " is already fused");
  auto fused = acfd::fuse_model(model);
  acfd::Rng rng(a.seed);
  auto probe = acfd::random_uniform<float>({1, 3, a.probe, a.probe}, rng);
  const float err = max_output_diff(acfd::model_forward(model, probe), acfd::model_forward(fused, probe));
  const auto bytes = acfd::save(fused);
  {
    std::ofstream out(a.output, std::ios::binary);
    if (!out) throw InputError("cannot write " + a.output);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw InputError("short write to " + a.output);
  }
  const std::size_t before = acfd::parameter_count(model), after = acfd::parameter_count(fused);
  std::cout << "parameters: " << before << " -> " << after << " (-" << (before - after) << ")\n";
  std::cout << "container:  " << std::fixed << std::setprecision(2) << double(bytes.size()) / (1024.0 * 1024.0)
            << " MiB\n";
  std::cout << "probe " << a.probe << "x" << a.probe << " max |diff|: " << std::scientific << std::setprecision(3)
            << err << "\n";
  if (!(err <= 1e-3f)) {
    std::cout << "FAIL fused forward drifts beyond 1e-3\n";
    return kVerifyFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::uint64_t seed = 7;
  bool json_out = false;
  bool inject_fault = false;
};

int cmd_verify(const VerifyArgs& a) {
  auto results = acfd::run_verification({a.seed, a.inject_fault});
  const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  if (a.json_out) {
    json checks = json::array();
    for (const auto& r : results) checks.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    std::cout << json{{"passed", all}, {"seed", a.seed}, {"checks", checks}}.dump(2) << "\n";
  } else {
    for (const auto& r : results)
      std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(26) << r.name << r.detail << "\n";
    if (!all)
      for (const auto& r : results)
        if (!r.passed) std::cout << "failed property: " << r.name << "\n";
  }
  return all ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------
// match

struct MatchArgs {
  std::string annotations;
  std::string predictions;
  std::vector<std::string> t1{"0.35"};
  std::vector<std::string> t2{"0.7"};
  double margin = 0.2;
  double lambda = 0.7;
  bool json_out = false;
  bool csv = false;
};

struct MatchImage {
  std::string file;
  acfd::Extent2 size{640, 640};
  std::vector<acfd::Box> gts;
  std::vector<acfd::Delta4> deltas;  // empty: regressed boxes are the anchors
  std::vector<double> scores;        // empty: no loss report
};

acfd::Box parse_box(const json& j) {
  if (!j.is_array() || j.size() != 4) throw InputError("boxes must be [x1, y1, x2, y2]");
  acfd::Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!(b.x2 > b.x1 && b.y2 > b.y1)) throw InputError("box with non-positive width or height");
  return b;
}

std::vector<MatchImage> read_match_inputs(const MatchArgs& a) {
  const json ann = read_json(a.annotations);
  const json pred = a.predictions.empty() ? json::object() : read_json(a.predictions);
  if (!ann.is_array()) throw InputError(a.annotations + ": expected a JSON array of images");
  if (!pred.is_object()) throw InputError(a.predictions + ": expected a JSON object keyed by file");
  std::vector<MatchImage> out;
  try {
    for (const auto& rec : ann) {
      MatchImage img;
      img.file = rec.at("file").get<std::string>();
      if (rec.contains("height") || rec.contains("width"))
        img.size = {rec.at("height").get<std::size_t>(), rec.at("width").get<std::size_t>()};
      if (img.size.h == 0 || img.size.w == 0) throw InputError(img.file + ": image size must be positive");
      for (const auto& b : rec.at("boxes")) img.gts.push_back(parse_box(b));
      if (pred.contains(img.file)) {
        const auto& p = pred.at(img.file);
        for (const auto& d : p.at("deltas")) {
          if (!d.is_array() || d.size() != 4) throw InputError(img.file + ": deltas must have four components");
          img.deltas.push_back({d[0].get<double>(), d[1].get<double>(), d[2].get<double>(), d[3].get<double>()});
        }
        if (p.contains("scores")) img.scores = p.at("scores").get<std::vector<double>>();
      }
      out.push_back(std::move(img));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed match input: ") + e.what());
  }
  return out;
}

struct MatchRow {
  double t1 = 0, t2 = 0;
  std::size_t faces = 0, matched = 0, compensated = 0, negative = 0, faces_without_anchor = 0;
  double loss = 0;
  bool has_loss = false;
};

int cmd_match(const MatchArgs& a) {
  if (a.json_out && a.csv) throw UsageError("--json and --csv are mutually exclusive");
  check_unit(a.margin, "--margin");
  check_unit(a.lambda, "--lambda");
  std::vector<double> t1s, t2s;
  for (const auto& s : a.t1) t1s.push_back(parse_threshold(s, false));
  for (const auto& s : a.t2) t2s.push_back(parse_threshold(s, true));
  auto images = read_match_inputs(a);

  std::vector<MatchRow> rows;
  for (double t1 : t1s)
    for (double t2 : t2s) {
      MatchRow row{t1, t2};
      double loss_sum = 0;
      std::size_t loss_images = 0;
      for (const auto& img : images) {
        const auto anchors = acfd::generate_anchors(acfd::padded_size(img.size));
        std::vector<acfd::Box> regressed = anchors.boxes;
        if (!img.deltas.empty()) {
          if (img.deltas.size() != anchors.size())
            throw InputError(img.file + ": " + std::to_string(img.deltas.size()) + " deltas for " +
                             std::to_string(anchors.size()) + " anchors");
          for (std::size_t i = 0; i < anchors.size(); ++i) regressed[i] = acfd::decode(anchors.boxes[i], img.deltas[i]);
        }
        const auto m = acfd::dam_match(anchors, regressed, img.gts, t1, t2);
        row.faces += img.gts.size();
        row.matched += m.count(acfd::MatchLabel::matched);
        row.compensated += m.count(acfd::MatchLabel::compensated);
        row.negative += m.count(acfd::MatchLabel::negative);
        std::vector<std::size_t> per_face(img.gts.size(), 0);
        for (auto g : m.assigned_gt)
          if (g != acfd::kNoGt) ++per_face[g];
        row.faces_without_anchor += std::size_t(std::count(per_face.begin(), per_face.end(), 0u));
        if (!img.scores.empty()) {
          if (img.scores.size() != anchors.size()) throw InputError(img.file + ": one score per anchor required");
          if (img.deltas.empty()) throw InputError(img.file + ": scores need deltas");
          acfd::LossConfig<double> cfg;
          cfg.margin = a.margin;
          cfg.lambda_reg = cfg.lambda_cls = a.lambda;
          std::vector<acfd::Pred4<double>> preds(img.deltas.begin(), img.deltas.end());
          loss_sum += acfd::total_loss<double>(m, preds, img.scores, cfg).total;
          ++loss_images;
        }
      }
      if (loss_images) {
        row.has_loss = true;
        row.loss = loss_sum / double(loss_images);
      }
      rows.push_back(row);
    }

  auto per_face = [](const MatchRow& r) {
    return r.faces ? double(r.matched + r.compensated) / double(r.faces) : 0.0;
  };
  if (a.json_out) {
    json out = json::array();
    for (const auto& r : rows) {
      json j{{"t1", format_threshold(r.t1)},
             {"t2", format_threshold(r.t2)},
             {"images", images.size()},
             {"faces", r.faces},
             {"matched", r.matched},
             {"compensated", r.compensated},
             {"negative", r.negative},
             {"anchors_per_face", per_face(r)},
             {"faces_without_anchor", r.faces_without_anchor}};
      if (r.has_loss) j["mean_loss"] = r.loss;
      out.push_back(j);
    }
    std::cout << out.dump(2) << "\n";
  } else if (a.csv) {
    std::cout << "t1,t2,images,faces,matched,compensated,negative,anchors_per_face,faces_without_anchor,mean_loss\n";
    for (const auto& r : rows)
      std::cout << format_threshold(r.t1) << "," << format_threshold(r.t2) << "," << images.size() << "," << r.faces
                << "," << r.matched << "," << r.compensated << "," << r.negative << "," << std::fixed
                << std::setprecision(4) << per_face(r) << "," << r.faces_without_anchor << ","
                << (r.has_loss ? std::to_string(r.loss) : "") << "\n"
                << std::defaultfloat;
  } else {
    std::cout << std::left << std::setw(7) << "t1" << std::setw(7) << "t2" << std::setw(10) << "faces" << std::setw(10)
              << "label1" << std::setw(10) << "label2" << std::setw(11) << "negative" << std::setw(12)
              << "per_face" << std::setw(10) << "missed" << "loss\n";
    for (const auto& r : rows) {
      std::ostringstream pf;
      pf << std::fixed << std::setprecision(3) << per_face(r);
      std::cout << std::left << std::setw(7) << format_threshold(r.t1) << std::setw(7) << format_threshold(r.t2)
                << std::setw(10) << r.faces << std::setw(10) << r.matched << std::setw(10) << r.compensated
                << std::setw(11) << r.negative << std::setw(12) << pf.str() << std::setw(10)
                << r.faces_without_anchor << (r.has_loss ? std::to_string(r.loss) : "-") << "\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  std::string image, model, image_id, output;
  std::vector<std::string> scales;
  std::string single_scale;
  double conf = 0.08;
  double nms_iou = 0.55;
  std::vector<float> mean{0.5f, 0.5f, 0.5f};
};

int cmd_detect(const DetectArgs& a) {
  check_unit(a.conf, "--conf");
  check_unit(a.nms_iou, "--nms-iou");
  if (a.mean.size() != 3) throw UsageError("--mean takes three values");
  if (!a.single_scale.empty() && !a.scales.empty()) throw UsageError("--scales and --single-scale are exclusive");
  acfd::DetectOptions opts;
  if (!a.single_scale.empty()) opts.scales = {parse_scale(a.single_scale)};
  if (!a.scales.empty()) {
    opts.scales.clear();
    for (const auto& s : a.scales) opts.scales.push_back(parse_scale(s));
  }
  opts.post.conf_thresh = a.conf;
  opts.post.nms_iou = a.nms_iou;
  opts.mean = {a.mean[0], a.mean[1], a.mean[2]};

  acfd::Image img;
  try {
    img = acfd::read_ppm(a.image);
  } catch (const acfd::FormatError& e) {
    throw InputError(a.image + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  auto model = load_model(a.model);
  const auto dets = acfd::detect(model, img, opts);
  const std::string id = a.image_id.empty() ? a.image : a.image_id;
  const std::string text = acfd::detections_jsonl(id, dets);
  if (a.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(a.output, std::ios::binary);
    if (!out) throw InputError("cannot write " + a.output);
    out << text;
  }
  std::cerr << dets.size() << " detections\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string model;
  std::size_t repeats = 20;
  std::size_t size = 256;
  std::size_t width = 8;
  std::uint64_t seed = 0;
  bool csv = false;
};

struct Timing {
  double median = 0, p95 = 0;
};

Timing summarize(std::vector<double> ms) {
  std::sort(ms.begin(), ms.end());
  const std::size_t n = ms.size();
  Timing t;
  t.median = n % 2 ? ms[n / 2] : 0.5 * (ms[n / 2 - 1] + ms[n / 2]);
  t.p95 = ms[std::min(n - 1, std::size_t(std::ceil(0.95 * double(n))) - 1)];
  return t;
}

int cmd_bench(const BenchArgs& a) {
  if (a.repeats == 0) throw UsageError("--repeats must be >= 1");
  if (a.size == 0 || a.size % 128 != 0) throw UsageError("--size must be a positive multiple of 128");
  acfd::Model<float> model =
      a.model.empty() ? acfd::make_model<float>(acfd::ModelConfig::tiny(a.width), a.seed) : load_model(a.model);
  if (acfd::is_fused(model)) throw UsageError("bench needs an unfused model to compare against");
  const auto fused = acfd::fuse_model(model);
  acfd::Rng rng(a.seed + 1);
  const auto input = acfd::random_uniform<float>({1, 3, a.size, a.size}, rng);

  acfd::MacTally macs_unfused, macs_fused;
  acfd::model_forward(model, input, &macs_unfused);
  acfd::model_forward(fused, input, &macs_fused);

  // Interleave the two forms so drift in machine load affects both alike.
  std::vector<double> t_unfused, t_fused;
  for (std::size_t r = 0; r < a.repeats; ++r) {
    for (int form = 0; form < 2; ++form) {
      const auto start = std::chrono::steady_clock::now();
      auto out = acfd::model_forward(form == 0 ? model : fused, input);
      const auto stop = std::chrono::steady_clock::now();
      (form == 0 ? t_unfused : t_fused).push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
  }
  const Timing u = summarize(t_unfused), f = summarize(t_fused);
  const bool with_p95 = a.repeats > 1;
  const double speedup = u.median / f.median;
  if (a.csv) {
    std::cout << "form,repeats,size,median_ms,p95_ms,macs\n";
    auto row = [&](const char* name, const Timing& t, std::size_t macs) {
      std::cout << name << "," << a.repeats << "," << a.size << "," << std::fixed << std::setprecision(3) << t.median
                << "," << (with_p95 ? std::to_string(t.p95) : "") << "," << macs << "\n";
    };
    row("unfused", u, macs_unfused.macs);
    row("fused", f, macs_fused.macs);
  } else {
    std::cout << "input " << a.size << "x" << a.size << ", " << a.repeats << " repeats\n";
    auto line = [&](const char* name, const Timing& t, std::size_t macs) {
      std::cout << std::left << std::setw(9) << name << "median " << std::fixed << std::setprecision(3) << t.median
                << " ms";
      if (with_p95) std::cout << "  p95 " << t.p95 << " ms";
      std::cout << "  MACs " << macs << "\n";
    };
    line("unfused", u, macs_unfused.macs);
    line("fused", f, macs_fused.macs);
    std::cout << "speedup  " << std::setprecision(3) << speedup << "x\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ACFD cartoon face detector tools"};
  app.require_subcommand(1);

  InitArgs init;
  auto* c_init = app.add_subcommand("init", "Write a seeded random model container");
  c_init->add_option("output", init.output, "Output .acfd path")->required();
  c_init->add_option("--config", init.config, "tiny or full")->capture_default_str();
  c_init->add_option("--width", init.width, "Channel width of the tiny config")->capture_default_str();
  c_init->add_option("--seed", init.seed, "Weight seed")->capture_default_str();

  FuseArgs fuse;
  auto* c_fuse = app.add_subcommand("fuse", "Fold batch norms and merge ACBs into plain convolutions");
  c_fuse->add_option("input", fuse.input, "Unfused container")->required();
  c_fuse->add_option("output", fuse.output, "Fused container to write")->required();
  c_fuse->add_option("--seed", fuse.seed, "Probe input seed")->capture_default_str();
  c_fuse->add_option("--probe-size", fuse.probe, "Probe image side (multiple of 128)")->capture_default_str();

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "Run the property-check battery");
  c_verify->add_option("--seed", verify.seed, "Seed for randomized checks")->capture_default_str();
  c_verify->add_flag("--json", verify.json_out, "Machine-readable report");
  c_verify->add_flag("--inject-fault", verify.inject_fault, "Perturb one fused weight (self-test of the harness)");

  MatchArgs match;
  auto* c_match = app.add_subcommand("match", "Anchor matching statistics over annotated images");
  c_match->add_option("annotations", match.annotations, "JSON array of {file, boxes, [height, width]}")->required();
  c_match->add_option("--predictions", match.predictions, "JSON object: file -> {deltas, [scores]}");
  c_match->add_option("--t1", match.t1, "Step-one IoU thresholds (comma list)")->delimiter(',')->capture_default_str();
  c_match->add_option("--t2", match.t2, "Step-two IoU thresholds (comma list, 'inf' disables)")
      ->delimiter(',')
      ->capture_default_str();
  c_match->add_option("--margin", match.margin, "Classification margin")->capture_default_str();
  c_match->add_option("--lambda", match.lambda, "Weight of compensated-anchor terms")->capture_default_str();
  c_match->add_flag("--json", match.json_out, "JSON output");
  c_match->add_flag("--csv", match.csv, "CSV output");

  DetectArgs det;
  auto* c_detect = app.add_subcommand("detect", "Multi-scale detection on a binary PPM image");
  c_detect->add_option("image", det.image, "Input image (P6 PPM)")->required();
  c_detect->add_option("model", det.model, "Model container")->required();
  c_detect->add_option("--scales", det.scales, "Test sizes HxW (comma list)")->delimiter(',');
  c_detect->add_option("--single-scale", det.single_scale, "One test size HxW");
  c_detect->add_option("--conf", det.conf, "Confidence threshold")->capture_default_str();
  c_detect->add_option("--nms-iou", det.nms_iou, "NMS IoU threshold")->capture_default_str();
  c_detect->add_option("--mean", det.mean, "Per-channel mean (three values)")->delimiter(',');
  c_detect->add_option("--image-id", det.image_id, "image_id written to each line (default: image path)");
  c_detect->add_option("-o,--output", det.output, "Write JSON lines here instead of stdout");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time unfused vs fused forwards");
  c_bench->add_option("model", bench.model, "Unfused container (default: seeded tiny model)");
  c_bench->add_option("--repeats", bench.repeats, "Timed forwards per form")->capture_default_str();
  c_bench->add_option("--size", bench.size, "Square input side (multiple of 128)")->capture_default_str();
  c_bench->add_option("--width", bench.width, "Tiny model width when no container is given")->capture_default_str();
  c_bench->add_option("--seed", bench.seed, "Model and input seed")->capture_default_str();
  c_bench->add_flag("--csv", bench.csv, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_init) return cmd_init(init);
    if (*c_fuse) return cmd_fuse(fuse);
    if (*c_verify) return cmd_verify(verify);
    if (*c_match) return cmd_match(match);
    if (*c_detect) return cmd_detect(det);
    if (*c_bench) return cmd_bench(bench);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const acfd::ShapeError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
