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

#include "polylane/model/backbone.hpp"

#include <cmath>
#include <stdexcept>

namespace polylane::model {

TinyCnn::TinyCnn(TinyCnnConfig config) : config_(std::move(config)) {
  if (config_.channels.empty()) throw std::invalid_argument("tiny cnn needs at least one conv block");
  if (config_.downsample < 1) throw std::invalid_argument("tiny cnn downsample factor must be >= 1");
  if (config_.input.width / config_.downsample < 1 || config_.input.height / config_.downsample < 1) {
    throw std::invalid_argument("tiny cnn input is smaller than its downsample factor");
  }
  int in_channels = 1 + (config_.coord_channels ? 2 : 0);
  std::size_t offset = 0;
  for (int out_channels : config_.channels) {
    if (out_channels <= 0) throw std::invalid_argument("tiny cnn channel counts must be positive");
    Conv2dShape shape{in_channels, out_channels, 3, 2, 1};
    convs_.push_back(shape);
    offsets_.push_back(offset);
    offset += shape.param_count();
    in_channels = out_channels;
  }
  offsets_.push_back(offset);
}

std::size_t TinyCnn::feature_dim() const { return static_cast<std::size_t>(convs_.back().out_channels); }

std::size_t TinyCnn::param_count() const { return offsets_.back(); }

void TinyCnn::init(std::span<double> params, dataset::RandomSource& rng) const {
  if (params.size() != param_count()) throw std::invalid_argument("tiny cnn: parameter count mismatch");
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    const auto& shape = convs_[i];
    const double fan_in = static_cast<double>(shape.in_channels) * shape.kernel * shape.kernel;
    const double stddev = std::sqrt(2.0 / fan_in);
    auto block = params.subspan(offsets_[i], shape.param_count());
    for (std::size_t w = 0; w < shape.weight_count(); ++w) block[w] = rng.normal(0.0, stddev);
    for (std::size_t b = shape.weight_count(); b < block.size(); ++b) block[b] = 0.0;
  }
}

// Cache layout: [pooled input, z_1, a_1, ..., z_n, a_n]
std::vector<double> TinyCnn::forward(std::span<const double> params, const Tensor& input, Cache* cache) const {
  if (input.channels != 1 || input.width != config_.input.width || input.height != config_.input.height) {
    throw std::invalid_argument("tiny cnn: input tensor has the wrong shape");
  }
  Tensor x = avg_pool_forward(input, config_.downsample);
  if (config_.coord_channels) x = append_coord_channels(x);
  if (cache) {
    cache->tensors.clear();
    cache->tensors.push_back(x);
  }
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    Tensor z = conv2d_forward(x, params.subspan(offsets_[i], convs_[i].param_count()), convs_[i]);
    x = silu_forward(z);
    if (cache) {
      cache->tensors.push_back(std::move(z));
      cache->tensors.push_back(x);
    }
  }
  return global_avg_pool_forward(x);
}

void TinyCnn::backward(std::span<const double> params, const Cache& cache, std::span<const double> feature_grad,
                       std::span<double> param_grad) const {
  const std::size_t n = convs_.size();
  const Tensor& last = cache.tensors.at(2 * n);
  Tensor grad = global_avg_pool_backward(feature_grad, last.channels, last.height, last.width);
  for (std::size_t i = n; i-- > 0;) {
    const Tensor& z = cache.tensors[2 * i + 1];
    const Tensor& conv_in = cache.tensors[2 * i];
    Tensor grad_z = silu_backward(z, grad);
    Tensor grad_in;
    conv2d_backward(conv_in, params.subspan(offsets_[i], convs_[i].param_count()), convs_[i], grad_z,
                    i > 0 ? &grad_in : nullptr, param_grad.subspan(offsets_[i], convs_[i].param_count()));
    grad = std::move(grad_in);
  }
}

}  // namespace polylane::model
