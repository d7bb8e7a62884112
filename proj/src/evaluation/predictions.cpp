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

#include "polylane/evaluation/predictions.hpp"

#include <map>
#include <set>

namespace polylane::evaluation {

std::vector<PredictedLane> detections(const model::ModelOutput& out, ImageSize size, double conf_threshold) {
  std::vector<PredictedLane> lanes;
  for (std::size_t j = 0; j < out.lanes.size(); ++j) {
    if (out.lanes[j].c < conf_threshold) continue;
    const auto domain = model::lane_domain(out, j);
    lanes.push_back(PredictedLane::from_curve(out.lanes[j].poly, domain.top, domain.bottom, size));
  }
  return lanes;
}

dataset::ImageAnnotation sample_predictions(std::span<const PredictedLane> preds, const dataset::ImageAnnotation& gt) {
  dataset::ImageAnnotation record;
  record.raw_file = gt.raw_file;
  record.h_samples = gt.h_samples;
  record.image_size = gt.image_size;
  for (const auto& pred : preds) {
    std::vector<double> xs;
    xs.reserve(gt.h_samples.size());
    for (double y : gt.h_samples) {
      const auto x = pred.x_at(y);
      xs.push_back(x && *x >= 0.0 ? *x : dataset::kMissingX);
    }
    record.lanes.push_back(std::move(xs));
  }
  return record;
}

std::vector<PredictedLane> lanes_from_record(const dataset::ImageAnnotation& record) {
  std::vector<PredictedLane> lanes;
  for (const auto& xs : record.lanes) {
    PointList points;
    for (std::size_t i = 0; i < xs.size() && i < record.h_samples.size(); ++i) {
      if (xs[i] >= 0.0) points.push_back({xs[i], record.h_samples[i]});
    }
    if (!points.empty()) lanes.push_back(PredictedLane::from_samples(std::move(points)));
  }
  return lanes;
}

MetricAccumulator evaluate_records(std::span<const dataset::ImageAnnotation> gt,
                                   std::span<const dataset::ImageAnnotation> pred, double tau_acc, double eps) {
  std::map<std::string, const dataset::ImageAnnotation*> by_name;
  for (const auto& p : pred) {
    if (!by_name.emplace(p.raw_file, &p).second) throw RecordMismatch("duplicate prediction for " + p.raw_file);
  }
  std::set<std::string> seen;
  for (const auto& g : gt) {
    if (!by_name.count(g.raw_file)) throw RecordMismatch("no prediction for " + g.raw_file);
    if (!seen.insert(g.raw_file).second) throw RecordMismatch("duplicate ground truth for " + g.raw_file);
  }
  if (seen.size() != by_name.size()) {
    for (const auto& [name, record] : by_name) {
      if (!seen.count(name)) throw RecordMismatch("prediction for unknown image " + name);
    }
  }

  MetricAccumulator acc(tau_acc, eps);
  for (const auto& g : gt) {
    const auto preds = lanes_from_record(*by_name.at(g.raw_file));
    const auto gts = g.lane_points();
    acc.add(preds, gts, g.image_size, g.raw_file);
  }
  return acc;
}

}  // namespace polylane::evaluation
