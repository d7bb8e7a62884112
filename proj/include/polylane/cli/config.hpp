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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "polylane/dataset/synthetic.hpp"
#include "polylane/model/lane_model.hpp"
#include "polylane/training/loss.hpp"
#include "polylane/training/trainer.hpp"

namespace polylane::cli {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class DatasetSource { kFiles, kSynthetic };

/// Where training and validation data come from. With kFiles, raw_file
/// entries are resolved against the image roots. With kSynthetic, images
/// are generated from the seed and the synthetic section; a validation
/// count of zero means the model is scored on its own training images.
struct DatasetConfig {
  DatasetSource source = DatasetSource::kFiles;
  std::string train_annotations = "data/train.jsonl";
  std::string train_images = "data";
  std::string val_annotations;  // optional
  std::string val_images;
  geometry::ImageSize image_size{1280, 720};  // native annotation resolution
  int synthetic_train = 0;
  int synthetic_val = 0;
};

struct OutputConfig {
  std::string dir = "runs/default";
  std::string checkpoint = "model.ckpt";
  std::string log = "train_log.jsonl";
  std::string report = "report.json";
  int log_every = 1;  // epochs between printed log records
};

/// Everything a run depends on. Serializes to one JSON document.
struct RunConfig {
  std::uint64_t seed = 0;
  model::ModelConfig model;
  training::LossWeights loss;
  training::TrainConfig train;  // train.seed mirrors seed
  DatasetConfig dataset;
  dataset::SyntheticSpec synthetic;
  OutputConfig output;
};

/// Rejects unknown keys and ill-typed values with ConfigError. Missing keys
/// keep their defaults.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::string& path);

/// Every field, keys sorted.
nlohmann::json config_to_json(const RunConfig& config);
/// Canonical text form: config_to_json(config).dump(2) plus a newline.
std::string canonical_config(const RunConfig& config);

/// "default" (the reference hyperparameters) or "overfit" (a small
/// synthetic run). Throws ConfigError for other names.
RunConfig preset(std::string_view name);

/// Applies "section.key=value"; value is read as JSON, or taken as a string
/// when it does not parse.
RunConfig with_override(const RunConfig& config, std::string_view assignment);

}  // namespace polylane::cli
