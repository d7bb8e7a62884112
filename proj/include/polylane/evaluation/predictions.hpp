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

#include "polylane/dataset/annotation.hpp"
#include "polylane/evaluation/metrics.hpp"
#include "polylane/model/head.hpp"

namespace polylane::evaluation {

/// Ground-truth and prediction files do not cover the same images.
class RecordMismatch : public std::runtime_error {
 public:
  explicit RecordMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Lanes of a decoded model output with confidence >= conf_threshold, as
/// curves over their domain in an image of the given size.
std::vector<PredictedLane> detections(const model::ModelOutput& out, ImageSize size, double conf_threshold = 0.5);

/// Prediction record for one image: every lane sampled at the gt rows,
/// kMissingX where the lane is undefined or left of the frame.
dataset::ImageAnnotation sample_predictions(std::span<const PredictedLane> preds, const dataset::ImageAnnotation& gt);

/// Lanes of a prediction record as sample lists; lanes without any point
/// are skipped.
std::vector<PredictedLane> lanes_from_record(const dataset::ImageAnnotation& record);

/// Scores prediction records against ground truth, pairing them by raw_file.
/// Throws RecordMismatch when the two sets of raw_file keys differ.
MetricAccumulator evaluate_records(std::span<const dataset::ImageAnnotation> gt,
                                   std::span<const dataset::ImageAnnotation> pred, double tau_acc = kTauAcc,
                                   double eps = kEpsilon);

}  // namespace polylane::evaluation
