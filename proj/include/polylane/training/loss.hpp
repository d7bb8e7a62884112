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

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polylane/dataset/target.hpp"
#include "polylane/model/head.hpp"

namespace polylane::training {

struct LossWeights {
  double w_p = 300.0;
  double w_s = 1.0;
  double w_c = 1.0;
  double w_h = 1.0;
  double tau_loss_px = 20.0;

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

class EmptyLane : public std::invalid_argument {
 public:
  EmptyLane() : std::invalid_argument("point loss needs at least one ground-truth point") {}
};

/// Logits are clamped to this magnitude before the cross entropy.
inline constexpr double kLogitClamp = 50.0;

/// Mean over the ground-truth points of r_i^2, where r_i = p(y_i) - x_i is
/// kept only when |r_i| > tau and set to zero otherwise. Coordinates and tau
/// are normalized.
double point_loss(const geometry::Polynomial& p, std::span<const geometry::Point> gt, double tau);
double point_loss(const model::LanePrediction& pred, std::span<const geometry::Point> gt, double tau);

/// Binary cross entropy of sigmoid(logit) against target, fused and stable.
double bce_with_logit(double logit, double target);

/// Unweighted terms; total is the weighted sum.
struct LossBreakdown {
  double point = 0.0;
  double offset = 0.0;
  double confidence = 0.0;
  double horizon = 0.0;
  double total = 0.0;
};

/// The multi-task loss for one image.
///
///   total = w_p L_p + w_s L_s + w_c L_c + w_h L_h
///
/// L_p and L_s average over the M annotated slots only; L_c averages binary
/// cross entropy over all m_max slots; L_h is the squared horizon error (or,
/// with per-lane top-y, the mean over annotated slots of (top_j - s*_j)^2).
/// tau_loss_px is converted with the target's image width.
LossBreakdown total_loss(const model::ModelOutput& out, const dataset::TrainingTarget& target, const LossWeights& w);

struct LossWithGradient {
  LossBreakdown terms;
  std::vector<double> grad;  // d total / d raw output
};

/// Same loss evaluated straight from the raw head output, with its exact
/// gradient. The gradient is zero inside the tau dead zone and for clamped
/// logits.
LossWithGradient total_loss_with_gradient(std::span<const double> raw, const model::HeadLayout& layout,
                                          const dataset::TrainingTarget& target, const LossWeights& w);

}  // namespace polylane::training
