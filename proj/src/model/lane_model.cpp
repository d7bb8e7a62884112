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

#include "polylane/model/lane_model.hpp"

#include <string>

namespace polylane::model {

namespace {

constexpr double kPixelMean = 0.449;
constexpr double kPixelStd = 0.226;

}  // namespace

Tensor image_to_tensor(const cv::Mat& image) {
  if (image.type() != CV_8UC1) throw ShapeMismatch("model input must be an 8-bit single-channel image");
  Tensor t(1, image.rows, image.cols);
  for (int y = 0; y < image.rows; ++y) {
    const auto* row = image.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.cols; ++x) t.at(0, y, x) = (row[x] / 255.0 - kPixelMean) / kPixelStd;
  }
  return t;
}

LaneModel::LaneModel(ModelConfig config)
    : config_(std::move(config)), backbone_(std::make_shared<TinyCnn>(config_.backbone)) {
  if (config_.layout.degree < 0 || config_.layout.m_max < 1) {
    throw std::invalid_argument("head layout needs degree >= 0 and m_max >= 1");
  }
}

std::size_t LaneModel::param_count() const {
  return backbone_->param_count() +
         (backbone_->feature_dim() + 1) * static_cast<std::size_t>(config_.layout.output_dim());
}

ModelParams LaneModel::init_params(std::uint64_t seed) const {
  ModelParams p;
  p.values.assign(param_count(), 0.0);
  dataset::RandomSource rng = dataset::RandomSource(seed).fork("init");
  backbone_->init(std::span<double>(p.values).first(backbone_->param_count()), rng);
  const auto feat = backbone_->feature_dim();
  const auto out = static_cast<std::size_t>(config_.layout.output_dim());
  for (std::size_t i = 0; i < feat * out; ++i) p.values[head_offset() + i] = rng.normal(0.0, 0.01);
  return p;
}

Tensor LaneModel::prepare(const cv::Mat& image) const {
  const auto size = input_size();
  if (image.cols != size.width || image.rows != size.height) {
    throw ShapeMismatch("image is " + std::to_string(image.cols) + "x" + std::to_string(image.rows) +
                        ", model expects " + std::to_string(size.width) + "x" + std::to_string(size.height));
  }
  return image_to_tensor(image);
}

std::vector<double> LaneModel::forward(const ModelParams& params, const Tensor& input, Cache* cache) const {
  if (params.values.size() != param_count()) throw ShapeMismatch("parameter vector has the wrong length");
  const std::span<const double> all(params.values);
  auto features = backbone_->forward(all.first(backbone_->param_count()), input, cache ? &cache->backbone : nullptr);
  auto raw = linear_forward(features, all.subspan(head_offset()), config_.layout.output_dim());
  if (cache) cache->features = std::move(features);
  return raw;
}

std::vector<double> LaneModel::forward(const ModelParams& params, const cv::Mat& image) const {
  return forward(params, prepare(image));
}

void LaneModel::backward(const ModelParams& params, const Cache& cache, std::span<const double> output_grad,
                         std::span<double> param_grad) const {
  if (output_grad.size() != static_cast<std::size_t>(config_.layout.output_dim())) {
    throw ShapeMismatch("output gradient has the wrong length");
  }
  const std::span<const double> all(params.values);
  std::vector<double> feature_grad(cache.features.size());
  linear_backward(cache.features, all.subspan(head_offset()), config_.layout.output_dim(), output_grad, feature_grad,
                  param_grad.subspan(head_offset()));
  backbone_->backward(all.first(backbone_->param_count()), cache.backbone, feature_grad,
                      param_grad.first(backbone_->param_count()));
}

ModelParams LaneModel::backward(const ModelParams& params, const cv::Mat& image,
                                std::span<const double> output_grad) const {
  Cache cache;
  forward(params, prepare(image), &cache);
  ModelParams grad;
  grad.values.assign(param_count(), 0.0);
  backward(params, cache, output_grad, grad.values);
  return grad;
}

}  // namespace polylane::model
