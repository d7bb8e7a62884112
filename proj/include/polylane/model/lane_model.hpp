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
#include <memory>
#include <span>
#include <vector>

#include <opencv2/core.hpp>

#include "polylane/model/backbone.hpp"
#include "polylane/model/head.hpp"

namespace polylane::model {

struct ModelConfig {
  HeadLayout layout;
  TinyCnnConfig backbone;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Flat parameter vector: backbone parameters first, then the fully
/// connected head (weights [output][feature], then biases).
struct ModelParams {
  std::vector<double> values;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Grayscale 8-bit raster to a 1xHxW tensor, normalized with the mean and
/// standard deviation of ImageNet averaged over RGB.
Tensor image_to_tensor(const cv::Mat& image);

/// Backbone plus fully connected regression head.
class LaneModel {
 public:
  struct Cache {
    Backbone::Cache backbone;
    std::vector<double> features;
  };

  explicit LaneModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  const HeadLayout& layout() const { return config_.layout; }
  const Backbone& backbone() const { return *backbone_; }
  geometry::ImageSize input_size() const { return backbone_->input_size(); }

  std::size_t param_count() const;
  std::size_t head_offset() const { return backbone_->param_count(); }

  ModelParams init_params(std::uint64_t seed) const;

  /// Throws ShapeMismatch unless the image has the configured input size.
  Tensor prepare(const cv::Mat& image) const;

  std::vector<double> forward(const ModelParams& params, const Tensor& input, Cache* cache = nullptr) const;
  std::vector<double> forward(const ModelParams& params, const cv::Mat& image) const;

  /// Accumulates d(raw . output_grad)/d(params) into param_grad, using the
  /// cache filled by forward on the same parameters.
  void backward(const ModelParams& params, const Cache& cache, std::span<const double> output_grad,
                std::span<double> param_grad) const;

  /// Gradient of raw_vector . output_grad for one image.
  ModelParams backward(const ModelParams& params, const cv::Mat& image, std::span<const double> output_grad) const;

 private:
  ModelConfig config_;
  std::shared_ptr<const Backbone> backbone_;
};

}  // namespace polylane::model
