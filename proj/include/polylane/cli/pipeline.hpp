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
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

#include "polylane/cli/config.hpp"
#include "polylane/dataset/annotation.hpp"
#include "polylane/evaluation/metrics.hpp"
#include "polylane/model/head.hpp"
#include "polylane/model/lane_model.hpp"
#include "polylane/training/trainer.hpp"

namespace polylane::cli {

/// A data problem the user has to fix: missing or unreadable input files.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Annotation records with their grayscale rasters, index-aligned.
struct LabeledSet {
  std::vector<dataset::ImageAnnotation> records;
  std::vector<cv::Mat> images;  // CV_8UC1 at each record's image_size
};

/// Reads an annotation file and the images it names, resolved against
/// image_root. Throws DataError naming the first missing path.
LabeledSet load_labeled_set(const std::string& annotations, const std::string& image_root, geometry::ImageSize size);

/// Generator seed of the synthetic training ("train") or validation ("val")
/// images of a run.
std::uint64_t synthetic_seed(const RunConfig& config, std::string_view split);

/// Training and evaluation sets for a run. The evaluation set is the
/// training set itself when no validation data is configured.
struct RunData {
  LabeledSet train;
  LabeledSet eval;
  bool eval_is_train = true;
};
RunData load_run_data(const RunConfig& config);

std::vector<training::TrainingSample> training_samples(const LabeledSet& set);

/// Resizes a grayscale raster to the model input and decodes the head.
model::ModelOutput predict(const model::LaneModel& model, const model::ModelParams& params, const cv::Mat& gray);

struct ModelEvaluation {
  evaluation::MetricAccumulator metrics;
  std::vector<dataset::ImageAnnotation> predictions;  // sampled at the gt rows
};

/// Runs the model on every image, samples confident lanes at the gt rows
/// and scores the resulting prediction records.
ModelEvaluation evaluate_model(const model::LaneModel& model, const model::ModelParams& params,
                               const LabeledSet& set, double conf_threshold);

/// Polylines of the confident lanes in pixels of an image of the given
/// size, one vertex per pixel row over each lane's domain (edges resolved
/// to the nearest row).
std::vector<std::vector<cv::Point2d>> lane_polylines(const model::ModelOutput& out, geometry::ImageSize size,
                                                     double conf_threshold);

/// Draws the polylines anti-aliased on a copy of a BGR image.
cv::Mat draw_overlay(const cv::Mat& bgr, const std::vector<std::vector<cv::Point2d>>& lanes);

}  // namespace polylane::cli
