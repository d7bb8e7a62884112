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
#include <vector>

#include "polylane/dataset/annotation.hpp"
#include "polylane/evaluation/metrics.hpp"

namespace polylane::evaluation {

inline constexpr int kMinUpperBoundDegree = 1;
inline constexpr int kMaxUpperBoundDegree = 5;

struct UpperBoundResult {
  int degree = 3;
  MetricReport report;
  int fallback_fits = 0;  // lanes refit as straight lines
  int oracle_checked = 0;
  double max_matching_gap = 0.0;
  std::vector<MatchingDiscrepancy> discrepancies;
};

/// Fits every gt lane with a degree-K least-squares polynomial over its own
/// rows and scores the fits as predictions against the same ground truth.
/// Lanes with too few distinct rows fall back to a straight line.
/// Throws std::invalid_argument unless 1 <= degree <= 5.
UpperBoundResult upper_bound(std::span<const dataset::ImageAnnotation> annotations, int degree);

/// The fit used for one lane, as a prediction over [min y, max y].
/// Sets *fallback when the straight-line fallback was needed.
PredictedLane fit_lane(const PointList& lane, int degree, ImageSize size, bool* fallback = nullptr);

}  // namespace polylane::evaluation
