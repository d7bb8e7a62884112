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

#include <cstddef>
#include <span>
#include <vector>

#include "polylane/dataset/random.hpp"
#include "polylane/geometry/polynomial.hpp"
#include "polylane/model/layers.hpp"
#include "polylane/model/tensor.hpp"

namespace polylane::model {

/// Feature extractor: a single-channel image tensor at input_size() to a
/// fixed-length feature vector. Larger networks (EfficientNet, ResNet)
/// would implement this interface.
class Backbone {
 public:
  /// Intermediate tensors kept by forward for the backward pass.
  struct Cache {
    std::vector<Tensor> tensors;
  };

  virtual ~Backbone() = default;

  virtual geometry::ImageSize input_size() const = 0;
  virtual std::size_t feature_dim() const = 0;
  virtual std::size_t param_count() const = 0;

  virtual void init(std::span<double> params, dataset::RandomSource& rng) const = 0;

  virtual std::vector<double> forward(std::span<const double> params, const Tensor& input, Cache* cache) const = 0;

  /// Accumulates d(features . feature_grad)/d(params) into param_grad.
  virtual void backward(std::span<const double> params, const Cache& cache, std::span<const double> feature_grad,
                        std::span<double> param_grad) const = 0;
};

struct TinyCnnConfig {
  geometry::ImageSize input{640, 360};
  int downsample = 4;  // mean pooling factor applied to the input first
  bool coord_channels = true;
  std::vector<int> channels{8, 16, 32, 32};  // one stride-2 3x3 conv + SiLU each

  friend bool operator==(const TinyCnnConfig&, const TinyCnnConfig&) = default;
};

/// Reference backbone: mean pooling, optional coordinate channels, a stack
/// of stride-2 conv + SiLU blocks and global average pooling.
class TinyCnn final : public Backbone {
 public:
  explicit TinyCnn(TinyCnnConfig config);

  const TinyCnnConfig& config() const { return config_; }

  geometry::ImageSize input_size() const override { return config_.input; }
  std::size_t feature_dim() const override;
  std::size_t param_count() const override;

  void init(std::span<double> params, dataset::RandomSource& rng) const override;
  std::vector<double> forward(std::span<const double> params, const Tensor& input, Cache* cache) const override;
  void backward(std::span<const double> params, const Cache& cache, std::span<const double> feature_grad,
                std::span<double> param_grad) const override;

 private:
  TinyCnnConfig config_;
  std::vector<Conv2dShape> convs_;
  std::vector<std::size_t> offsets_;
};

}  // namespace polylane::model
