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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acfd/backbone.hpp"
#include "acfd/head.hpp"
#include "acfd/init.hpp"
#include "acfd/neck.hpp"
#include "acfd/units.hpp"

namespace acfd {

struct ModelConfig {
  BackboneConfig backbone = BackboneConfig::vovnetv3_51();
  NeckConfig neck;
  HeadConfig head;

  static ModelConfig full() { return {}; }

  /// Small everything: backbone width `channels`, neck/head width `channels`.
  static ModelConfig tiny(std::size_t channels = 8) {
    ModelConfig c;
    c.backbone = BackboneConfig::tiny(channels);
    c.neck = {channels, 1};
    c.head = {channels, 2};
    return c;
  }
};

/// Backbone, neck and heads of the detector.
template <class T>
struct Model {
  ModelConfig config;
  BackboneSpec<T> backbone;
  BifpnSpec<T> neck;
  HeadSpec<T> head;
};

/// Random (seeded) model. Use make_skeleton for an all-zero shell to load into.
template <class T>
Model<T> make_model(const ModelConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  Model<T> m{config, make_backbone<T>(config.backbone, &rng), {}, {}};
  m.neck = make_bifpn<T>(config.backbone.level_channels(), config.neck, &rng);
  HeadConfig hc = config.head;
  hc.width = config.neck.width;
  m.head = make_head<T>(hc, &rng);
  return m;
}

template <class T>
Model<T> make_skeleton(const ModelConfig& config) {
  Model<T> m{config, make_backbone<T>(config.backbone, nullptr), {}, {}};
  m.neck = make_bifpn<T>(config.backbone.level_channels(), config.neck, nullptr);
  HeadConfig hc = config.head;
  hc.width = config.neck.width;
  m.head = make_head<T>(hc, nullptr);
  return m;
}

template <class T>
HeadOutput<T> model_forward(const Model<T>& m, const Tensor4<T>& image, MacTally* tally = nullptr) {
  return head_forward(abifpn_forward(backbone_forward(image, m.backbone, tally), m.neck, tally), m.head, tally);
}

/// Calls f on every swappable unit (ConvBnUnit and AcbUnit) in the model.
template <class M, class F>
void for_each_unit(M& m, F&& f) {
  for (auto& u : m.backbone.stem) f(u);
  for (auto& stage : m.backbone.stages)
    for (auto& block : stage) {
      for (auto& acb : block.acbs) f(acb);
      f(block.projection);
    }
  for (auto& lat : m.neck.laterals) f(lat);
  for (auto& layer : m.neck.layers) {
    for (auto& n : layer.td) f(n.acb);
    for (auto& n : layer.bu) f(n.acb);
  }
  for (auto& acb : m.head.cls_tower) f(acb);
  for (auto& acb : m.head.reg_tower) f(acb);
  f(m.head.cls_out);
  f(m.head.reg_out);
}

/// Folds every batch norm and merges every ACB.
template <class T>
Model<T> fuse_model(Model<T> m) {
  for_each_unit(m, [](auto& u) { u.fuse(); });
  return m;
}

template <class T>
bool is_fused(const Model<T>& m) {
  bool fused = true;
  for_each_unit(m, [&](const auto& u) { fused = fused && u.fused(); });
  return fused;
}

namespace detail {

template <class Conv, class V>
void visit_conv(const std::string& prefix, Conv& conv, V& v) {
  const auto k = conv.kernel();
  v(prefix + ".weight", std::vector<std::size_t>{conv.out_c(), conv.in_c(), k.h, k.w}, conv.weight.data());
  v(prefix + ".bias", std::vector<std::size_t>{conv.out_c()}, std::span(conv.bias));
}

template <class BN, class V>
void visit_bn(const std::string& prefix, BN& bn, V& v) {
  const std::vector<std::size_t> dims{bn.size()};
  v(prefix + ".mean", dims, std::span(bn.mean));
  v(prefix + ".var", dims, std::span(bn.var));
  v(prefix + ".gamma", dims, std::span(bn.gamma));
  v(prefix + ".beta", dims, std::span(bn.beta));
  v(prefix + ".eps", std::vector<std::size_t>{1}, std::span(&bn.eps, 1));
}

template <class Unit, class V>
void visit_convbn(const std::string& prefix, Unit& u, V& v) {
  visit_conv(prefix, u.conv, v);
  if (u.bn) visit_bn(prefix + ".bn", *u.bn, v);
}

template <class Unit, class V>
void visit_acb(const std::string& prefix, Unit& u, V& v) {
  if (auto* acb = std::get_if<0>(&u.form)) {
    visit_conv(prefix + ".square", acb->square.conv, v);
    visit_bn(prefix + ".square.bn", acb->square.bn, v);
    visit_conv(prefix + ".horizontal", acb->horizontal.conv, v);
    visit_bn(prefix + ".horizontal.bn", acb->horizontal.bn, v);
    visit_conv(prefix + ".vertical", acb->vertical.conv, v);
    visit_bn(prefix + ".vertical.bn", acb->vertical.bn, v);
  } else {
    visit_conv(prefix, std::get<1>(u.form).conv, v);
  }
}

}  // namespace detail

/// Visits every parameter array as v(name, dims, span). Names are dotted
/// paths, e.g. backbone.stage1.block0.acb2.square.weight; the visiting order
/// is fixed and defines the serialized layout.
template <class M, class V>
void visit_params(M& m, V&& v) {
  using detail::visit_acb;
  using detail::visit_convbn;
  for (std::size_t i = 0; i < 3; ++i) visit_convbn("backbone.stem.conv" + std::to_string(i + 1), m.backbone.stem[i], v);
  for (std::size_t s = 0; s < kLevels; ++s) {
    auto& stage = m.backbone.stages[s];
    for (std::size_t b = 0; b < stage.size(); ++b) {
      auto& block = stage[b];
      const std::string p = "backbone.stage" + std::to_string(s + 1) + ".block" + std::to_string(b);
      for (std::size_t j = 0; j < block.acbs.size(); ++j) visit_acb(p + ".acb" + std::to_string(j), block.acbs[j], v);
      visit_convbn(p + ".proj", block.projection, v);
      v(p + ".ese.weight", std::vector<std::size_t>{block.ese_weight.rows, block.ese_weight.cols},
        std::span(block.ese_weight.values));
      v(p + ".ese.bias", std::vector<std::size_t>{block.ese_bias.size()}, std::span(block.ese_bias));
    }
  }
  for (std::size_t i = 0; i < kLevels; ++i) visit_convbn("neck.lateral" + std::to_string(i), m.neck.laterals[i], v);
  for (std::size_t r = 0; r < m.neck.layers.size(); ++r) {
    auto& layer = m.neck.layers[r];
    const std::string p = "neck.layer" + std::to_string(r);
    auto node = [&](const std::string& name, auto& n) {
      v(name + ".weights", std::vector<std::size_t>{n.weights.size()}, std::span(n.weights));
      visit_acb(name + ".acb", n.acb, v);
    };
    for (std::size_t i = 0; i + 1 < kLevels; ++i) node(p + ".td" + std::to_string(i), layer.td[i]);
    for (std::size_t i = 0; i + 1 < kLevels; ++i) node(p + ".bu" + std::to_string(i + 1), layer.bu[i]);
  }
  for (std::size_t j = 0; j < m.head.cls_tower.size(); ++j)
    visit_acb("head.cls_tower" + std::to_string(j), m.head.cls_tower[j], v);
  for (std::size_t j = 0; j < m.head.reg_tower.size(); ++j)
    visit_acb("head.reg_tower" + std::to_string(j), m.head.reg_tower[j], v);
  visit_convbn("head.cls_out", m.head.cls_out, v);
  visit_convbn("head.reg_out", m.head.reg_out, v);
}

template <class T>
std::size_t parameter_count(const Model<T>& m) {
  std::size_t total = 0;
  visit_params(m, [&](const std::string&, const std::vector<std::size_t>&, auto data) { total += data.size(); });
  return total;
}

}  // namespace acfd
