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

#include "polylane/cli/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <opencv2/imgproc.hpp>

#include "polylane/dataset/image.hpp"
#include "polylane/dataset/random.hpp"
#include "polylane/dataset/synthetic.hpp"
#include "polylane/evaluation/predictions.hpp"

namespace polylane::cli {

namespace fs = std::filesystem;

LabeledSet load_labeled_set(const std::string& annotations, const std::string& image_root,
                            geometry::ImageSize size) {
  if (!fs::exists(annotations)) throw DataError("annotation file not found: " + annotations);
  LabeledSet set;
  set.records = dataset::load_annotations(annotations, size);
  set.images.reserve(set.records.size());
  for (const auto& r : set.records) {
    const auto path = (fs::path(image_root) / r.raw_file).string();
    if (!fs::exists(path)) throw DataError("image not found: " + path);
    cv::Mat gray = dataset::load_gray(path);
    if (gray.cols != size.width || gray.rows != size.height) {
      throw DataError(path + " is " + std::to_string(gray.cols) + "x" + std::to_string(gray.rows) + ", expected " +
                      std::to_string(size.width) + "x" + std::to_string(size.height));
    }
    set.images.push_back(std::move(gray));
  }
  return set;
}

std::uint64_t synthetic_seed(const RunConfig& config, std::string_view split) {
  return dataset::RandomSource(config.seed).fork("synthetic-" + std::string(split)).engine()();
}

namespace {

LabeledSet synthetic_set(const RunConfig& config, std::string_view split, int count) {
  auto data = dataset::generate_synthetic(synthetic_seed(config, split), count, config.synthetic);
  return {std::move(data.annotations), std::move(data.images)};
}

}  // namespace

RunData load_run_data(const RunConfig& config) {
  RunData data;
  const auto& d = config.dataset;
  if (d.source == DatasetSource::kSynthetic) {
    if (d.synthetic_train < 1) throw ConfigError("'dataset.synthetic_train' must be positive for synthetic runs");
    data.train = synthetic_set(config, "train", d.synthetic_train);
    if (d.synthetic_val > 0) {
      data.eval = synthetic_set(config, "val", d.synthetic_val);
      data.eval_is_train = false;
    }
  } else {
    data.train = load_labeled_set(d.train_annotations, d.train_images, d.image_size);
    if (!d.val_annotations.empty()) {
      data.eval = load_labeled_set(d.val_annotations, d.val_images.empty() ? d.train_images : d.val_images,
                                   d.image_size);
      data.eval_is_train = false;
    }
  }
  if (data.eval_is_train) data.eval = data.train;
  return data;
}

std::vector<training::TrainingSample> training_samples(const LabeledSet& set) {
  std::vector<training::TrainingSample> samples;
  samples.reserve(set.records.size());
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    samples.push_back({dataset::to_annotated(set.records[i]), set.images[i]});
  }
  return samples;
}

model::ModelOutput predict(const model::LaneModel& model, const model::ModelParams& params, const cv::Mat& gray) {
  const auto raw = model.forward(params, dataset::resize_to(gray, model.input_size()));
  return model::decode(raw, model.layout());
}

ModelEvaluation evaluate_model(const model::LaneModel& model, const model::ModelParams& params,
                               const LabeledSet& set, double conf_threshold) {
  ModelEvaluation result;
  result.predictions.reserve(set.records.size());
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& gt = set.records[i];
    const auto out = predict(model, params, set.images[i]);
    const auto lanes = evaluation::detections(out, gt.image_size, conf_threshold);
    result.predictions.push_back(evaluation::sample_predictions(lanes, gt));
  }
  result.metrics = evaluation::evaluate_records(set.records, result.predictions);
  return result;
}

std::vector<std::vector<cv::Point2d>> lane_polylines(const model::ModelOutput& out, geometry::ImageSize size,
                                                     double conf_threshold) {
  std::vector<std::vector<cv::Point2d>> lines;
  for (std::size_t j = 0; j < out.lanes.size(); ++j) {
    if (out.lanes[j].c < conf_threshold) continue;
    const auto domain = model::lane_domain(out, j);
    // Same half-pixel edge rule as the evaluation.
    const int first = static_cast<int>(std::ceil(domain.top * size.height - 0.5));
    const int last = static_cast<int>(std::floor(domain.bottom * size.height + 0.5));
    std::vector<cv::Point2d> line;
    for (int y = std::max(first, 0); y <= std::min(last, size.height - 1); ++y) {
      line.emplace_back(out.lanes[j].poly(static_cast<double>(y) / size.height) * size.width, y);
    }
    if (line.size() >= 2) lines.push_back(std::move(line));
  }
  return lines;
}

cv::Mat draw_overlay(const cv::Mat& bgr, const std::vector<std::vector<cv::Point2d>>& lanes) {
  static const cv::Scalar kColors[] = {{0, 255, 0}, {0, 0, 255}, {255, 0, 0}, {0, 255, 255}, {255, 0, 255},
                                       {255, 255, 0}};
  constexpr int kShift = 4;  // fractional bits for sub-pixel vertices
  cv::Mat canvas = bgr.clone();
  for (std::size_t j = 0; j < lanes.size(); ++j) {
    std::vector<cv::Point> fixed;
    fixed.reserve(lanes[j].size());
    for (const auto& p : lanes[j]) {
      const double x = std::clamp(p.x, -1e5, 1e5);
      fixed.emplace_back(static_cast<int>(std::lround(x * (1 << kShift))),
                         static_cast<int>(std::lround(p.y * (1 << kShift))));
    }
    cv::polylines(canvas, fixed, false, kColors[j % std::size(kColors)], 2, cv::LINE_AA, kShift);
  }
  return canvas;
}

}  // namespace polylane::cli
