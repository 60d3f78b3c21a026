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

#include <cstring>
#include <filesystem>
#include <set>
#include "json.hpp"

#include "acfd/anchors.hpp"
#include "acfd/container.hpp"
#include "acfd/init.hpp"
#include "acfd/model.hpp"

using namespace acfd;
using nlohmann::json;

namespace {

const Model<float>& tiny_model() {
  static const Model<float> m = make_model<float>(ModelConfig::tiny(), 5);
  return m;
}

const Tensor4<float>& tiny_input() {
  static const Tensor4<float> x = [] {
    Rng rng(6);
    return random_uniform<float>({1, 3, 128, 128}, rng);
  }();
  return x;
}

bool bit_identical(const HeadOutput<float>& a, const HeadOutput<float>& b) {
  for (std::size_t l = 0; l < kLevels; ++l) {
    if (a.cls[l].shape() != b.cls[l].shape() || a.reg[l].shape() != b.reg[l].shape()) return false;
    if (std::memcmp(a.cls[l].storage().data(), b.cls[l].storage().data(), a.cls[l].size() * 4) != 0) return false;
    if (std::memcmp(a.reg[l].storage().data(), b.reg[l].storage().data(), a.reg[l].size() * 4) != 0) return false;
  }
  return true;
}

float max_output_diff(const HeadOutput<float>& a, const HeadOutput<float>& b) {
  float d = 0;
  for (std::size_t l = 0; l < kLevels; ++l) d = std::max({d, max_abs_diff(a.cls[l], b.cls[l]), max_abs_diff(a.reg[l], b.reg[l])});
  return d;
}

struct Split {
  json header;
  std::vector<char> payload;
};

Split split(const std::vector<char>& bytes) {
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len |= std::uint64_t(static_cast<unsigned char>(bytes[5 + std::size_t(i)])) << (8 * i);
  Split s;
  s.header = json::parse(bytes.begin() + 13, bytes.begin() + 13 + std::ptrdiff_t(len));
  s.payload.assign(bytes.begin() + 13 + std::ptrdiff_t(len), bytes.end());
  return s;
}

std::vector<char> join(const Split& s) {
  const std::string text = s.header.dump();
  std::vector<char> out{'A', 'C', 'F', 'D', '\0'};
  for (int i = 0; i < 8; ++i) out.push_back(char((std::uint64_t(text.size()) >> (8 * i)) & 0xFF));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), s.payload.begin(), s.payload.end());
  return out;
}

}  // namespace

TEST(Model, TinyForwardShapes) {
  auto out = model_forward(tiny_model(), tiny_input());
  EXPECT_EQ(out.flat_cls().size(), generate_anchors({128, 128}).size());
  for (std::size_t l = 0; l < kLevels; ++l) {
    EXPECT_EQ(out.cls[l].shape(), (Shape4{1, 1, 128 / kStrides[l], 128 / kStrides[l]}));
    EXPECT_TRUE(out.reg[l].all_finite());
  }
}

TEST(Model, SeedDeterminesWeights) {
  auto a = save(make_model<float>(ModelConfig::tiny(), 5));
  EXPECT_EQ(a, save(tiny_model()));
  EXPECT_NE(a, save(make_model<float>(ModelConfig::tiny(), 6)));
}

TEST(Model, FusionDriftAndMacs) {
  auto fused = fuse_model(tiny_model());
  EXPECT_TRUE(is_fused(fused));
  EXPECT_FALSE(is_fused(tiny_model()));
  MacTally before, after;
  auto a = model_forward(tiny_model(), tiny_input(), &before);
  auto b = model_forward(fused, tiny_input(), &after);
  EXPECT_LE(max_output_diff(a, b), 1e-3f);
  EXPECT_LT(after.macs, before.macs);
  EXPECT_LT(parameter_count(fused), parameter_count(tiny_model()));
}

TEST(Model, ParameterNamesAreUniqueAndDotted) {
  std::set<std::string> names;
  visit_params(tiny_model(), [&](const std::string& name, const std::vector<std::size_t>&, std::span<const float>) {
    EXPECT_TRUE(names.insert(name).second) << name;
  });
  EXPECT_TRUE(names.count("backbone.stem.conv1.weight"));
  EXPECT_TRUE(names.count("backbone.stage1.block0.acb0.square.weight"));
  EXPECT_TRUE(names.count("backbone.stage3.block1.ese.weight"));
  EXPECT_TRUE(names.count("neck.layer0.bu5.weights"));
  EXPECT_TRUE(names.count("head.cls_out.bias"));
}

TEST(Container, ConfigJsonRoundTrip) {
  for (auto cfg : {ModelConfig::full(), ModelConfig::tiny(4)}) {
    cfg.backbone.hard_sigmoid = true;
    auto back = config_from_json(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
  }
}

TEST(Container, RoundTripIsBitExact) {
  auto bytes = save(tiny_model());
  EXPECT_EQ(std::memcmp(bytes.data(), "ACFD\0", 5), 0);
  auto loaded = load(bytes);
  EXPECT_FALSE(is_fused(loaded));
  EXPECT_EQ(save(loaded), bytes);
  EXPECT_TRUE(bit_identical(model_forward(loaded, tiny_input()), model_forward(tiny_model(), tiny_input())));
}

TEST(Container, FusedRoundTripAndSize) {
  auto fused = fuse_model(tiny_model());
  auto bytes = save(fused);
  auto raw = save(tiny_model());
  EXPECT_LT(bytes.size(), raw.size());
  auto loaded = load(bytes);
  EXPECT_TRUE(is_fused(loaded));
  EXPECT_TRUE(bit_identical(model_forward(loaded, tiny_input()), model_forward(fused, tiny_input())));
  EXPECT_LE(max_output_diff(model_forward(loaded, tiny_input()), model_forward(tiny_model(), tiny_input())), 1e-3f);
  EXPECT_FALSE(split(bytes).header.dump().find(".square.") != std::string::npos);
}

TEST(Container, FileRoundTrip) {
  auto path = (std::filesystem::temp_directory_path() / "acfd_container_test.acfd").string();
  save_file(path, tiny_model());
  EXPECT_EQ(save(load_file(path)), save(tiny_model()));
  std::filesystem::remove(path);
  EXPECT_THROW(load_file(path), std::runtime_error);
}

TEST(Container, FormatErrors) {
  auto bytes = save(tiny_model());
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(load(bad), FormatError);
  EXPECT_THROW(load(std::vector<char>(4, 'A')), FormatError);
  auto s = split(bytes);
  s.header["format_version"] = 2;
  EXPECT_THROW(load(join(s)), FormatError);
  s = split(bytes);
  s.header.erase("config");
  EXPECT_THROW(load(join(s)), FormatError);
  auto garbled = bytes;
  garbled[13] = '!';
  EXPECT_THROW(load(garbled), FormatError);
}

TEST(Container, CorruptionErrors) {
  auto bytes = save(tiny_model());
  auto truncated = bytes;
  truncated.resize(bytes.size() - 10);
  EXPECT_THROW(load(truncated), CorruptionError);

  auto past = bytes;
  past[5 + 7] = char(0x7F);  // absurd header length
  EXPECT_THROW(load(past), CorruptionError);

  auto s = split(bytes);
  s.header["entries"][0]["dims"][0] = 9999;
  EXPECT_THROW(load(join(s)), CorruptionError);

  s = split(bytes);
  s.header["entries"][1]["offset"] = s.payload.size();
  EXPECT_THROW(load(join(s)), CorruptionError);

  s = split(bytes);
  s.header["entries"].erase(3);
  EXPECT_THROW(load(join(s)), CorruptionError);

  s = split(bytes);
  auto extra = s.header["entries"][0];
  extra["name"] = "head.unknown";
  s.header["entries"].push_back(extra);
  EXPECT_THROW(load(join(s)), CorruptionError);

  // Swap dims of a 4-d kernel while keeping the byte size.
  s = split(bytes);
  for (auto& e : s.header["entries"])
    if (e["name"] == "backbone.stem.conv1.weight") e["dims"] = {3, 8, 3, 3};
  EXPECT_THROW(load(join(s)), CorruptionError);

  // A fused container may not carry ACB branch entries.
  auto fused = split(save(fuse_model(tiny_model())));
  auto branch = fused.header["entries"][0];
  branch["name"] = "backbone.stage1.block0.acb0.square.weight";
  fused.header["entries"].push_back(branch);
  EXPECT_THROW(load(join(fused)), CorruptionError);
}
