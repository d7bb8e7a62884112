// Copyright 2026 The PolyLane Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polylane/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace polylane::model {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'P', 'L', 'N', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw CheckpointError("checkpoint is truncated");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

nlohmann::ordered_json header_json(const ModelConfig& config, std::size_t param_count) {
  nlohmann::ordered_json j;
  j["format"] = "polylane-checkpoint";
  j["version"] = kVersion;
  j["layout"] = {{"degree", config.layout.degree}, {"m_max", config.layout.m_max}, {"share_h", config.layout.share_h}};
  j["backbone"] = {{"type", "tiny_cnn"},
                   {"input_width", config.backbone.input.width},
                   {"input_height", config.backbone.input.height},
                   {"downsample", config.backbone.downsample},
                   {"coord_channels", config.backbone.coord_channels},
                   {"channels", config.backbone.channels}};
  j["param_count"] = param_count;
  return j;
}

ModelConfig config_from_header(const nlohmann::json& j) {
  if (j.value("format", "") != "polylane-checkpoint") throw CheckpointError("unknown checkpoint format");
  if (j.at("backbone").value("type", "") != "tiny_cnn") throw CheckpointError("unsupported backbone type");
  ModelConfig c;
  c.layout.degree = j.at("layout").at("degree").get<int>();
  c.layout.m_max = j.at("layout").at("m_max").get<int>();
  c.layout.share_h = j.at("layout").at("share_h").get<bool>();
  const auto& b = j.at("backbone");
  c.backbone.input = {b.at("input_width").get<int>(), b.at("input_height").get<int>()};
  c.backbone.downsample = b.at("downsample").get<int>();
  c.backbone.coord_channels = b.at("coord_channels").get<bool>();
  c.backbone.channels = b.at("channels").get<std::vector<int>>();
  return c;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const LaneModel model(ckpt.config);
  if (ckpt.params.values.size() != model.param_count()) {
    throw CheckpointError("parameter count does not match the model config");
  }
  const std::string header = header_json(ckpt.config, ckpt.params.values.size()).dump();
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  put<std::uint64_t>(out, ckpt.params.values.size());
  for (double v : ckpt.params.values) put<double>(out, v);
  if (!out) throw CheckpointError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a polylane checkpoint");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = get<std::uint64_t>(in);
  if (header_len > (1u << 20)) throw CheckpointError("checkpoint header is implausibly large");
  std::string header(header_len, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(header_len))) throw CheckpointError("checkpoint is truncated");

  Checkpoint ckpt;
  try {
    ckpt.config = config_from_header(nlohmann::json::parse(header));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  const LaneModel model(ckpt.config);
  const auto count = get<std::uint64_t>(in);
  if (count != model.param_count()) throw CheckpointError("checkpoint parameter count does not match its layout");
  ckpt.params.values.resize(count);
  for (auto& v : ckpt.params.values) v = get<double>(in);
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

}  // namespace polylane::model
