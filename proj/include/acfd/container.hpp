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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "acfd/error.hpp"
#include "acfd/model.hpp"

namespace acfd {

// File layout (.acfd):
//   5 bytes   magic "ACFD\0"
//   8 bytes   header length L, little-endian uint64
//   L bytes   JSON manifest {format_version, fused, config, entries[]}
//   payload   little-endian float32 arrays at the manifest's byte offsets

inline constexpr char kMagic[5] = {'A', 'C', 'F', 'D', '\0'};
inline constexpr int kFormatVersion = 1;

inline nlohmann::json config_to_json(const ModelConfig& c) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : c.backbone.stages)
    stages.push_back({{"layer_channels", s.layer_channels},
                      {"out_channels", s.out_channels},
                      {"repeats", s.repeats},
                      {"layer_count", s.layer_count}});
  return {{"backbone",
           {{"stem", c.backbone.stem}, {"stages", stages}, {"hard_sigmoid", c.backbone.hard_sigmoid}}},
          {"neck", {{"width", c.neck.width}, {"repeats", c.neck.repeats}}},
          {"head", {{"width", c.head.width}, {"tower_depth", c.head.tower_depth}}}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  const auto& b = j.at("backbone");
  c.backbone.stem = b.at("stem").get<std::array<std::size_t, 3>>();
  const auto& stages = b.at("stages");
  if (stages.size() != kLevels) throw FormatError("config must list six stages");
  for (std::size_t i = 0; i < kLevels; ++i) {
    const auto& s = stages[i];
    c.backbone.stages[i] = {s.at("layer_channels").get<std::size_t>(), s.at("out_channels").get<std::size_t>(),
                            s.at("repeats").get<std::size_t>(), s.at("layer_count").get<std::size_t>()};
  }
  c.backbone.hard_sigmoid = b.at("hard_sigmoid").get<bool>();
  c.neck.width = j.at("neck").at("width").get<std::size_t>();
  c.neck.repeats = j.at("neck").at("repeats").get<std::size_t>();
  c.head.width = j.at("head").at("width").get<std::size_t>();
  c.head.tower_depth = j.at("head").at("tower_depth").get<std::size_t>();
  return c;
}

namespace detail {

inline void put_u64_le(std::vector<char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_u64_le(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

inline void put_f32_le(std::vector<char>& out, float f) {
  std::uint32_t u = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(char((u >> (8 * i)) & 0xFF));
}

inline float get_f32_le(const char* p) {
  std::uint32_t u = 0;
  for (int i = 0; i < 4; ++i) u |= std::uint32_t(static_cast<unsigned char>(p[i])) << (8 * i);
  return std::bit_cast<float>(u);
}

inline bool is_branch_entry(const std::string& name) {
  return name.find(".square.") != std::string::npos || name.find(".horizontal.") != std::string::npos ||
         name.find(".vertical.") != std::string::npos;
}

}  // namespace detail

/// Serializes the model. The same model always yields the same bytes.
inline std::vector<char> save(const Model<float>& m) {
  nlohmann::json entries = nlohmann::json::array();
  std::vector<char> payload;
  visit_params(m, [&](const std::string& name, const std::vector<std::size_t>& dims, std::span<const float> data) {
    entries.push_back({{"name", name}, {"dims", dims}, {"offset", payload.size()}, {"size", data.size() * 4}});
    for (float f : data) detail::put_f32_le(payload, f);
  });
  nlohmann::json header{{"format_version", kFormatVersion},
                        {"fused", is_fused(m)},
                        {"config", config_to_json(m.config)},
                        {"entries", entries}};
  const std::string text = header.dump();
  std::vector<char> out(std::begin(kMagic), std::end(kMagic));
  detail::put_u64_le(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

/// Parses a container. Bad magic, version or manifest throws FormatError;
/// entries that disagree with the payload or the architecture throw
/// CorruptionError. No partially loaded model is ever returned.
inline Model<float> load(std::span<const char> bytes) {
  if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw FormatError("missing ACFD magic");
  const std::uint64_t header_len = detail::get_u64_le(bytes.data() + sizeof(kMagic));
  const std::size_t header_start = sizeof(kMagic) + 8;
  if (header_len > bytes.size() - header_start) throw CorruptionError("header extends past end of file");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + header_start, bytes.begin() + header_start + std::ptrdiff_t(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("unreadable manifest: ") + e.what());
  }
  if (!header.contains("format_version") || header["format_version"] != kFormatVersion)
    throw FormatError("unsupported format version");

  ModelConfig config;
  bool fused = false;
  struct Entry {
    std::vector<std::size_t> dims;
    std::size_t offset = 0, size = 0;
    bool used = false;
  };
  std::map<std::string, Entry> entries;
  try {
    config = config_from_json(header.at("config"));
    fused = header.at("fused").get<bool>();
    for (const auto& e : header.at("entries")) {
      Entry entry{e.at("dims").get<std::vector<std::size_t>>(), e.at("offset").get<std::size_t>(),
                  e.at("size").get<std::size_t>()};
      entries.emplace(e.at("name").get<std::string>(), std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }

  const std::span<const char> payload = bytes.subspan(header_start + header_len);
  for (const auto& [name, e] : entries) {
    std::size_t count = 1;
    for (auto d : e.dims) count *= d;
    if (count * 4 != e.size) throw CorruptionError("entry " + name + ": dims do not match size");
    if (e.offset > payload.size() || e.size > payload.size() - e.offset)
      throw CorruptionError("entry " + name + " lies outside the payload");
    if (fused && detail::is_branch_entry(name)) throw CorruptionError("fused container holds ACB branch entry " + name);
  }

  Model<float> m = make_skeleton<float>(config);
  if (fused) m = fuse_model(std::move(m));
  visit_params(m, [&](const std::string& name, const std::vector<std::size_t>& dims, std::span<float> data) {
    auto it = entries.find(name);
    if (it == entries.end()) throw CorruptionError("missing entry " + name);
    if (it->second.dims != dims) throw CorruptionError("entry " + name + " has unexpected dims");
    const char* src = payload.data() + it->second.offset;
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = detail::get_f32_le(src + 4 * i);
    it->second.used = true;
  });
  for (const auto& [name, e] : entries)
    if (!e.used) throw CorruptionError("unexpected entry " + name);
  return m;
}

inline void save_file(const std::string& path, const Model<float>& m) {
  auto bytes = save(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

inline std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline Model<float> load_file(const std::string& path) {
  auto bytes = read_bytes(path);
  return load(bytes);
}

}  // namespace acfd
