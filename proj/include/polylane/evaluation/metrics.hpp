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

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polylane/geometry/polynomial.hpp"

namespace polylane::evaluation {

using geometry::ImageSize;
using geometry::Point;
using geometry::PointList;

inline constexpr double kTauAcc = 20.0;   // pixels
inline constexpr double kEpsilon = 0.85;  // point fraction for a true positive

/// A predicted lane in pixel space: either a normalized polynomial valid on
/// a vertical domain, or explicit samples as read from a prediction file.
class PredictedLane {
 public:
  static PredictedLane from_curve(geometry::Polynomial normalized, double top, double bottom, ImageSize size);
  static PredictedLane from_samples(PointList pixels);

  /// x at row y, or nothing when y is outside the domain (curves) or has
  /// no sample (sample lists). Curve domain edges are resolved to the
  /// nearest pixel row: rows within half a pixel of an edge are inside.
  std::optional<double> x_at(double y_px) const;

  /// Horizontal position used by the deviation metric: curves are
  /// evaluated without domain clipping, samples as in x_at.
  std::optional<double> position_at(double y_px) const;

  /// x at the lowest point of the lane.
  double bottom_x() const;

  bool is_curve() const { return is_curve_; }
  const geometry::Polynomial& curve() const { return curve_; }
  double top() const { return top_; }
  double bottom() const { return bottom_; }
  const PointList& samples() const { return samples_; }

 private:
  bool is_curve_ = true;
  geometry::Polynomial curve_;
  double top_ = 0.0;
  double bottom_ = 1.0;
  ImageSize size_;
  PointList samples_;
};

/// Fraction of ground-truth points whose predicted x is within tau_acc
/// pixels (strictly). Points the prediction does not cover count as misses.
double lane_accuracy(const PredictedLane& pred, std::span<const Point> gt, double tau_acc = kTauAcc);

struct MatchPair {
  int gt = 0;
  int pred = 0;
  double accuracy = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<int> unmatched_gt;
  std::vector<int> unmatched_pred;
};

struct ImageScore {
  double acc = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  MatchResult match;
};

/// Greedy one-to-one matching in descending accuracy order. Ties go to the
/// smaller mean |dx| over hit points, then to lane content, so the result
/// does not depend on the order of either list. Pairs with zero
/// accuracy are never formed. A pair is a true positive when its accuracy
/// reaches eps.
///
///   acc = sum of paired accuracies / #gt   (1 when there is no gt)
///   fp  = #predictions outside true-positive pairs / #predictions  (0 if none)
///   fn  = #gt outside true-positive pairs / #gt                     (0 if none)
ImageScore match_and_score(std::span<const PredictedLane> preds, std::span<const PointList> gts,
                           double tau_acc = kTauAcc, double eps = kEpsilon);

/// Per-image acc under the best one-to-one assignment, by exhaustive search.
/// Exponential; meant for images with a handful of lanes.
double optimal_assignment_accuracy(std::span<const PredictedLane> preds, std::span<const PointList> gts,
                                   double tau_acc = kTauAcc);

class NoEgoLane : public std::runtime_error {
 public:
  NoEgoLane() : std::runtime_error("image has no ground-truth lane to define an ego lane") {}
};

/// Indices of the ego-lane markings: the gt lane whose bottom point is the
/// closest to the bottom center on the left (x < W/2) and on the right
/// (x >= W/2), each when present.
std::vector<int> ego_lanes(std::span<const PointList> gts, ImageSize size);

/// Lane position deviation of one image in pixels: for every ego marking,
/// the mean |x_pred(y) - x| over its points, using the prediction it was
/// matched to (or the prediction with the nearest bottom x); then the mean
/// over markings. Returns nothing when no ego marking can be compared
/// (no predictions). Throws NoEgoLane when there is no gt lane.
std::optional<double> image_lpd(std::span<const PredictedLane> preds, std::span<const PointList> gts,
                                const MatchResult& match, ImageSize size);

struct MetricReport {
  double acc = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double lpd = 0.0;
  int n_images = 0;
  int n_lpd_images = 0;  // images contributing to lpd
};

/// An image where greedy matching scored below the exhaustive optimum.
struct MatchingDiscrepancy {
  std::string image;
  double greedy_acc = 0.0;
  double optimal_acc = 0.0;
};

/// Running means over images. Images with at most max_oracle_lanes lanes on
/// both sides are also scored with the exhaustive matcher.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(double tau_acc = kTauAcc, double eps = kEpsilon, int max_oracle_lanes = 6);

  ImageScore add(std::span<const PredictedLane> preds, std::span<const PointList> gts, ImageSize size,
                 const std::string& image = {});

  MetricReport report() const;
  const std::vector<MatchingDiscrepancy>& discrepancies() const { return discrepancies_; }
  double max_matching_gap() const { return max_gap_; }
  int oracle_checked() const { return oracle_checked_; }

 private:
  double tau_acc_;
  double eps_;
  int max_oracle_lanes_;
  double acc_sum_ = 0.0;
  double fp_sum_ = 0.0;
  double fn_sum_ = 0.0;
  double lpd_sum_ = 0.0;
  int n_ = 0;
  int n_lpd_ = 0;
  int oracle_checked_ = 0;
  double max_gap_ = 0.0;
  std::vector<MatchingDiscrepancy> discrepancies_;
};

}  // namespace polylane::evaluation
