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

#include <cmath>
#include <functional>
#include <sstream>

#include <gtest/gtest.h>
#include <opencv2/core.hpp>

#include "polylane/dataset/random.hpp"
#include "polylane/model/checkpoint.hpp"
#include "polylane/model/head.hpp"
#include "polylane/model/lane_model.hpp"
#include "polylane/model/layers.hpp"

namespace polylane::model {
namespace {

using dataset::RandomSource;

Tensor random_tensor(int c, int h, int w, RandomSource& rng) {
  Tensor t(c, h, w);
  for (double& v : t.data) v = rng.normal(0.0, 1.0);
  return t;
}

std::vector<double> random_vector(std::size_t n, RandomSource& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal(0.0, scale);
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Central differences of f with respect to every entry of x.
std::vector<double> numeric_gradient(std::vector<double>& x, const std::function<double()>& f, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f();
    x[i] = saved - h;
    const double down = f();
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-6});
    worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

TEST(Layout, OutputDimension) {
  EXPECT_EQ((HeadLayout{3, 5, true}).output_dim(), 31);
  for (int k = 1; k <= 5; ++k) {
    for (int m = 1; m <= 6; ++m) {
      EXPECT_EQ((HeadLayout{k, m, true}).output_dim(), m * (k + 3) + 1);
      EXPECT_EQ((HeadLayout{k, m, false}).output_dim(), m * (k + 4));
    }
  }
}

TEST(Decode, SlicesAndSigmoid) {
  const HeadLayout layout;
  std::vector<double> raw(31, 0.0);
  raw[0] = 0.1;
  raw[1] = 0.2;
  raw[layout.offset_index(0)] = 0.4;
  raw[layout.horizon_index()] = 0.3;
  const auto out = decode(raw, layout);
  ASSERT_EQ(out.lanes.size(), 5u);
  const std::vector<double> expected{0.1, 0.2, 0.0, 0.0};
  EXPECT_TRUE(std::equal(expected.begin(), expected.end(), out.lanes[0].poly.coeffs().begin()));
  EXPECT_EQ(out.lanes[0].c, 0.5);
  EXPECT_EQ(out.lanes[0].s, 0.4);
  ASSERT_TRUE(out.h.has_value());
  EXPECT_EQ(*out.h, 0.3);
  EXPECT_FALSE(out.lanes[0].top_y.has_value());
}

TEST(Decode, PerLaneTopWithoutSharing) {
  const HeadLayout layout{3, 5, false};
  std::vector<double> raw(static_cast<std::size_t>(layout.output_dim()), 0.0);
  raw[static_cast<std::size_t>(layout.top_index(2))] = 0.35;
  raw[static_cast<std::size_t>(layout.offset_index(2))] = 0.45;
  const auto out = decode(raw, layout);
  EXPECT_FALSE(out.h.has_value());
  ASSERT_TRUE(out.lanes[2].top_y.has_value());
  EXPECT_EQ(*out.lanes[2].top_y, 0.35);
  EXPECT_EQ(out.lanes[2].s, 0.45);
  EXPECT_EQ(out.horizon(2), 0.35);
}

TEST(Decode, RejectsWrongLength) {
  EXPECT_THROW(decode(std::vector<double>(30), HeadLayout{}), ShapeMismatch);
}

TEST(Decode, DomainTopIsLowerOfOffsetAndHorizon) {
  std::vector<double> raw(31, 0.0);
  const HeadLayout layout;
  raw[layout.offset_index(0)] = 0.5;
  raw[layout.offset_index(1)] = 0.2;
  raw[layout.horizon_index()] = 0.3;
  const auto out = decode(raw, layout);
  EXPECT_EQ(lane_domain(out, 0).top, 0.5);
  EXPECT_EQ(lane_domain(out, 1).top, 0.3);
  EXPECT_EQ(lane_domain(out, 1).bottom, 1.0);
}

TEST(DecodeProperty, EncodeRoundTrip) {
  RandomSource rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const HeadLayout layout{1 + trial % 5, 1 + trial % 6, trial % 2 == 0};
    const auto raw = random_vector(static_cast<std::size_t>(layout.output_dim()), rng, 3.0);
    const auto back = encode(decode(raw, layout), layout);
    ASSERT_EQ(back.size(), raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_NEAR(back[i], raw[i], 1e-9);
  }
}

TEST(Linear, SingleWeightGradient) {
  const std::vector<double> in{2.5};
  const std::vector<double> params{-1.5, 0.25};
  EXPECT_DOUBLE_EQ(linear_forward(in, params, 1)[0], -1.5 * 2.5 + 0.25);
  std::vector<double> grad(2, 0.0);
  std::vector<double> grad_in(1, 0.0);
  const std::vector<double> g{3.0};
  linear_backward(in, params, 1, g, grad_in, grad);
  EXPECT_DOUBLE_EQ(grad[0], 2.5 * 3.0);
  EXPECT_DOUBLE_EQ(grad[1], 3.0);
  EXPECT_DOUBLE_EQ(grad_in[0], -1.5 * 3.0);
}

TEST(LayerGradient, Conv2d) {
  RandomSource rng(1);
  for (const auto& shape : {Conv2dShape{2, 3, 3, 2, 1}, Conv2dShape{3, 2, 3, 1, 1}, Conv2dShape{1, 2, 3, 2, 0}}) {
    Tensor in = random_tensor(shape.in_channels, 7, 6, rng);
    auto params = random_vector(shape.param_count(), rng);
    const Tensor probe_out = conv2d_forward(in, params, shape);
    const Tensor g = random_tensor(probe_out.channels, probe_out.height, probe_out.width, rng);
    auto objective = [&] { return dot(conv2d_forward(in, params, shape).data, g.data); };

    std::vector<double> grad(params.size(), 0.0);
    Tensor grad_in(in.channels, in.height, in.width);
    conv2d_backward(in, params, shape, g, &grad_in, grad);
    EXPECT_LT(max_relative_error(grad, numeric_gradient(params, objective)), 1e-4);
    EXPECT_LT(max_relative_error(grad_in.data, numeric_gradient(in.data, objective)), 1e-4);
  }
}

TEST(LayerGradient, Silu) {
  RandomSource rng(2);
  Tensor in = random_tensor(2, 5, 4, rng);
  const Tensor g = random_tensor(2, 5, 4, rng);
  auto objective = [&] { return dot(silu_forward(in).data, g.data); };
  const auto analytic = silu_backward(in, g);
  EXPECT_LT(max_relative_error(analytic.data, numeric_gradient(in.data, objective)), 1e-4);
}

TEST(LayerGradient, AvgPool) {
  RandomSource rng(3);
  Tensor in = random_tensor(2, 9, 8, rng);
  const Tensor probe = avg_pool_forward(in, 4);
  const Tensor g = random_tensor(probe.channels, probe.height, probe.width, rng);
  auto objective = [&] { return dot(avg_pool_forward(in, 4).data, g.data); };
  const auto analytic = avg_pool_backward(g, 4, in.height, in.width);
  EXPECT_LT(max_relative_error(analytic.data, numeric_gradient(in.data, objective)), 1e-4);
}

TEST(LayerGradient, GlobalAvgPool) {
  RandomSource rng(4);
  Tensor in = random_tensor(3, 4, 5, rng);
  const auto g = random_vector(3, rng);
  auto objective = [&] { return dot(global_avg_pool_forward(in), g); };
  const auto analytic = global_avg_pool_backward(g, 3, 4, 5);
  EXPECT_LT(max_relative_error(analytic.data, numeric_gradient(in.data, objective)), 1e-4);
}

TEST(LayerGradient, Linear) {
  RandomSource rng(5);
  auto in = random_vector(6, rng);
  auto params = random_vector(4 * 6 + 4, rng);
  const auto g = random_vector(4, rng);
  auto objective = [&] { return dot(linear_forward(in, params, 4), g); };
  std::vector<double> grad(params.size(), 0.0);
  std::vector<double> grad_in(in.size(), 0.0);
  linear_backward(in, params, 4, g, grad_in, grad);
  EXPECT_LT(max_relative_error(grad, numeric_gradient(params, objective)), 1e-4);
  EXPECT_LT(max_relative_error(grad_in, numeric_gradient(in, objective)), 1e-4);
}

TEST(CoordChannels, RangeAndLayout) {
  const Tensor in(1, 3, 5);
  const auto out = append_coord_channels(in);
  ASSERT_EQ(out.channels, 3);
  EXPECT_DOUBLE_EQ(out.at(1, 0, 0), -1.0);
  EXPECT_DOUBLE_EQ(out.at(1, 0, 4), 1.0);
  EXPECT_DOUBLE_EQ(out.at(2, 0, 0), -1.0);
  EXPECT_DOUBLE_EQ(out.at(2, 2, 0), 1.0);
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.backbone.input = {24, 16};
  c.backbone.downsample = 2;
  c.backbone.channels = {3, 4};
  return c;
}

cv::Mat random_image(geometry::ImageSize size, std::uint64_t seed) {
  cv::Mat image(size.height, size.width, CV_8UC1);
  cv::RNG rng(seed);
  rng.fill(image, cv::RNG::UNIFORM, 0, 256);
  return image;
}

TEST(LaneModel, ReferenceOutputLength) {
  const LaneModel model{ModelConfig{}};
  EXPECT_EQ(model.input_size(), (geometry::ImageSize{640, 360}));
  const auto params = model.init_params(0);
  EXPECT_EQ(model.forward(params, random_image({640, 360}, 1)).size(), 31u);
}

TEST(LaneModel, RejectsWrongInputSize) {
  const LaneModel model{ModelConfig{}};
  EXPECT_THROW(model.prepare(random_image({320, 180}, 1)), ShapeMismatch);
}

TEST(LaneModel, DeterministicForward) {
  const LaneModel model(tiny_config());
  const auto params = model.init_params(5);
  EXPECT_EQ(params, model.init_params(5));
  const auto image = random_image({24, 16}, 2);
  EXPECT_EQ(model.forward(params, image), model.forward(params, image));
}

TEST(LaneModel, ZeroHeadWeightsGiveBiases) {
  const LaneModel model(tiny_config());
  auto params = model.init_params(1);
  const auto dim = static_cast<std::size_t>(model.layout().output_dim());
  const std::size_t weights = dim * model.backbone().feature_dim();
  std::fill(params.values.begin() + static_cast<std::ptrdiff_t>(model.head_offset()),
            params.values.begin() + static_cast<std::ptrdiff_t>(model.head_offset() + weights), 0.0);
  RandomSource rng(3);
  for (std::size_t i = 0; i < dim; ++i) params.values[model.head_offset() + weights + i] = rng.normal(0.0, 1.0);
  const auto raw = model.forward(params, random_image({24, 16}, 7));
  for (std::size_t i = 0; i < dim; ++i) EXPECT_EQ(raw[i], params.values[model.head_offset() + weights + i]);
}

TEST(LaneModel, ZeroOutputGradientGivesZeroGradient) {
  const LaneModel model(tiny_config());
  const auto params = model.init_params(1);
  const std::vector<double> g(31, 0.0);
  const auto grad = model.backward(params, random_image({24, 16}, 3), g);
  for (double v : grad.values) EXPECT_EQ(v, 0.0);
}

TEST(LaneModel, GradientMatchesFiniteDifferences) {
  for (bool share_h : {true, false}) {
    auto config = tiny_config();
    config.layout.share_h = share_h;
    const LaneModel model(config);
    auto params = model.init_params(9);
    RandomSource rng(10);
    // Larger head weights so the backbone gradient is not negligible.
    for (std::size_t i = model.head_offset(); i < params.values.size(); ++i) params.values[i] = rng.normal(0.0, 0.5);
    const auto image = random_image({24, 16}, 4);
    const auto g = random_vector(static_cast<std::size_t>(config.layout.output_dim()), rng);
    auto objective = [&] { return dot(model.forward(params, image), g); };
    const auto analytic = model.backward(params, image, g);
    EXPECT_LT(max_relative_error(analytic.values, numeric_gradient(params.values, objective)), 1e-4);
  }
}

TEST(Checkpoint, RoundTripAndDeterministicBytes) {
  const auto config = tiny_config();
  const LaneModel model(config);
  const Checkpoint ckpt{config, model.init_params(3)};
  std::stringstream a;
  std::stringstream b;
  write_checkpoint(a, ckpt);
  write_checkpoint(b, ckpt);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, 8), std::string("PLNCKPT\0", 8));
  const auto back = read_checkpoint(a);
  EXPECT_EQ(back.config, ckpt.config);
  EXPECT_EQ(back.params, ckpt.params);
}

TEST(Checkpoint, RejectsCorruptInput) {
  const auto config = tiny_config();
  const LaneModel model(config);
  std::stringstream ss;
  write_checkpoint(ss, {config, model.init_params(3)});
  const std::string bytes = ss.str();

  std::stringstream bad_magic("XXXXXXXX" + bytes.substr(8));
  EXPECT_THROW(read_checkpoint(bad_magic), CheckpointError);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(read_checkpoint(truncated), CheckpointError);

  std::stringstream out;
  EXPECT_THROW(write_checkpoint(out, {config, ModelParams{{1.0, 2.0}}}), CheckpointError);
}

}  // namespace
}  // namespace polylane::model
