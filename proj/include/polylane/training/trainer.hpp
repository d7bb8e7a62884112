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
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <opencv2/core.hpp>

#include "polylane/dataset/augment.hpp"
#include "polylane/model/lane_model.hpp"
#include "polylane/training/loss.hpp"

namespace polylane::training {

enum class TooManyLanesPolicy { kDrop, kError };

struct TrainConfig {
  double lr = 3e-4;
  int cosine_period = 770;  // epochs
  int batch_size = 16;
  int epochs = 2695;
  std::uint64_t seed = 0;
  double conf_threshold = 0.5;
  bool augment = true;
  dataset::AugmentConfig augmentation;
  TooManyLanesPolicy too_many_lanes = TooManyLanesPolicy::kDrop;
};

/// Grayscale raster with its pixel-space lanes; sizes must agree.
struct TrainingSample {
  dataset::AnnotatedImage annotation;
  cv::Mat image;
};

struct EpochRecord {
  int epoch = 0;
  long step = 0;  // optimizer steps taken after this epoch
  LossBreakdown loss;  // mean over the epoch's images, before each update
  double lr = 0.0;
};

struct TrainResult {
  model::ModelParams params;
  std::vector<EpochRecord> log;
  int dropped_images = 0;
};

/// Raised when the batch loss becomes non-finite; carries the parameters
/// from before the failing step.
class DivergedLoss : public std::runtime_error {
 public:
  DivergedLoss(int epoch, long step, model::ModelParams last_good);

  int epoch() const { return epoch_; }
  long step() const { return step_; }
  const model::ModelParams& last_good() const { return last_good_; }

 private:
  int epoch_;
  long step_;
  model::ModelParams last_good_;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam with per-epoch cosine annealing. Deterministic in
/// config.seed: initialization, shuffling and augmentation draw from
/// separate forks of the seed, and gradients are reduced in batch order.
TrainResult train(const model::LaneModel& model, std::span<const TrainingSample> samples, const TrainConfig& config,
                  const LossWeights& weights, const EpochCallback& on_epoch = {});

/// Same, starting from the given parameters instead of a fresh init.
TrainResult train_from(const model::LaneModel& model, model::ModelParams initial,
                       std::span<const TrainingSample> samples, const TrainConfig& config,
                       const LossWeights& weights, const EpochCallback& on_epoch = {});

/// Mean loss over the samples without augmentation.
LossBreakdown dataset_loss(const model::LaneModel& model, const model::ModelParams& params,
                           std::span<const TrainingSample> samples, const LossWeights& weights);

}  // namespace polylane::training
