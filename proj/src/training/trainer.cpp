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

#include "polylane/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "polylane/dataset/image.hpp"
#include "polylane/dataset/random.hpp"
#include "polylane/dataset/target.hpp"
#include "polylane/training/optimizer.hpp"

namespace polylane::training {

using dataset::RandomSource;
using model::LaneModel;
using model::ModelParams;

DivergedLoss::DivergedLoss(int epoch, long step, ModelParams last_good)
    : std::runtime_error("loss became non-finite at epoch " + std::to_string(epoch) + ", step " +
                         std::to_string(step)),
      epoch_(epoch),
      step_(step),
      last_good_(std::move(last_good)) {}

namespace {

struct Prepared {
  model::Tensor input;
  dataset::TrainingTarget target;
};

Prepared prepare(const LaneModel& model, const dataset::AnnotatedImage& annotation, const cv::Mat& image) {
  return {model.prepare(dataset::resize_to(image, model.input_size())),
          dataset::build_target(annotation, model.layout().m_max)};
}

void accumulate(LossBreakdown& sum, const LossBreakdown& t) {
  sum.point += t.point;
  sum.offset += t.offset;
  sum.confidence += t.confidence;
  sum.horizon += t.horizon;
  sum.total += t.total;
}

LossBreakdown scaled(LossBreakdown t, double s) {
  t.point *= s;
  t.offset *= s;
  t.confidence *= s;
  t.horizon *= s;
  t.total *= s;
  return t;
}

}  // namespace

TrainResult train(const LaneModel& model, std::span<const TrainingSample> samples, const TrainConfig& config,
                  const LossWeights& weights, const EpochCallback& on_epoch) {
  return train_from(model, model.init_params(config.seed), samples, config, weights, on_epoch);
}

TrainResult train_from(const LaneModel& model, ModelParams initial, std::span<const TrainingSample> samples,
                       const TrainConfig& config, const LossWeights& weights, const EpochCallback& on_epoch) {
  if (samples.empty()) throw std::invalid_argument("training needs at least one sample");
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  if (!(config.lr >= 0.0)) throw std::invalid_argument("learning rate must be non-negative");

  TrainResult result;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.image.cols != s.annotation.image_size.width || s.image.rows != s.annotation.image_size.height) {
      throw std::invalid_argument("sample " + s.annotation.raw_file + ": raster and annotation sizes differ");
    }
    try {
      (void)dataset::build_target(s.annotation, model.layout().m_max);
      usable.push_back(i);
    } catch (const dataset::TooManyLanes&) {
      if (config.too_many_lanes == TooManyLanesPolicy::kError) throw;
      ++result.dropped_images;
    }
  }
  if (usable.empty()) throw std::invalid_argument("every training sample was dropped");

  // Without augmentation the inputs never change; prepare them once.
  std::vector<std::optional<Prepared>> fixed(samples.size());
  if (!config.augment) {
    for (std::size_t i : usable) fixed[i] = prepare(model, samples[i].annotation, samples[i].image);
  }

  const RandomSource root(config.seed);
  RandomSource shuffle_rng = root.fork("shuffle");
  const RandomSource augment_root = root.fork("augment");

  ModelParams params = std::move(initial);
  Adam adam(params.values.size());
  std::vector<double> grad(params.values.size());
  long step = 0;
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order = usable;
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    const double lr = cosine_lr(config.lr, epoch, config.cosine_period);
    LossBreakdown epoch_sum;

    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      LossBreakdown batch_sum;
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        std::optional<Prepared> local;
        const Prepared* item = nullptr;
        if (fixed[idx]) {
          item = &*fixed[idx];
        } else {
          RandomSource rng = augment_root.fork(static_cast<std::uint64_t>(epoch) * samples.size() + idx);
          auto [annotation, image] =
              dataset::augment(samples[idx].annotation, samples[idx].image, rng, config.augmentation);
          local = prepare(model, annotation, image);
          item = &*local;
        }
        LaneModel::Cache cache;
        const auto raw = model.forward(params, item->input, &cache);
        const auto loss = total_loss_with_gradient(raw, model.layout(), item->target, weights);
        if (!std::isfinite(loss.terms.total)) throw DivergedLoss(epoch, step, params);
        accumulate(batch_sum, loss.terms);
        model.backward(params, cache, loss.grad, grad);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : grad) g *= inv;
      for (double g : grad) {
        if (!std::isfinite(g)) throw DivergedLoss(epoch, step, params);
      }
      adam.step(params.values, grad, lr);
      ++step;
      accumulate(epoch_sum, batch_sum);
    }

    EpochRecord record{epoch, step, scaled(epoch_sum, 1.0 / static_cast<double>(order.size())), lr};
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  result.params = std::move(params);
  return result;
}

LossBreakdown dataset_loss(const LaneModel& model, const ModelParams& params, std::span<const TrainingSample> samples,
                           const LossWeights& weights) {
  LossBreakdown sum;
  int count = 0;
  for (const auto& s : samples) {
    const auto item = prepare(model, s.annotation, s.image);
    const auto raw = model.forward(params, item.input);
    accumulate(sum, total_loss_with_gradient(raw, model.layout(), item.target, weights).terms);
    ++count;
  }
  return count > 0 ? scaled(sum, 1.0 / count) : sum;
}

}  // namespace polylane::training
