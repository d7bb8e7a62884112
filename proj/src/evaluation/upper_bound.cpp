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

#include "polylane/evaluation/upper_bound.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace polylane::evaluation {

PredictedLane fit_lane(const PointList& lane, int degree, ImageSize size, bool* fallback) {
  PointList normalized;
  normalized.reserve(lane.size());
  for (const auto& p : lane) normalized.push_back({p.x / size.width, p.y / size.height});
  const auto [lo, hi] = std::minmax_element(normalized.begin(), normalized.end(),
                                            [](const Point& a, const Point& b) { return a.y < b.y; });
  const double top = lo->y;
  const double bottom = hi->y;
  if (fallback) *fallback = false;
  try {
    return PredictedLane::from_curve(geometry::fit_least_squares(normalized, degree), top, bottom, size);
  } catch (const geometry::DegenerateFit&) {
    if (degree == 1) throw;
    if (fallback) *fallback = true;
    return PredictedLane::from_curve(geometry::fit_least_squares(normalized, 1), top, bottom, size);
  }
}

UpperBoundResult upper_bound(std::span<const dataset::ImageAnnotation> annotations, int degree) {
  if (degree < kMinUpperBoundDegree || degree > kMaxUpperBoundDegree) {
    throw std::invalid_argument("upper-bound degree must be in 1..5, got " + std::to_string(degree));
  }
  UpperBoundResult result;
  result.degree = degree;
  MetricAccumulator acc;
  for (const auto& a : annotations) {
    const auto gts = a.lane_points();
    std::vector<PredictedLane> fits;
    fits.reserve(gts.size());
    for (const auto& lane : gts) {
      bool fallback = false;
      fits.push_back(fit_lane(lane, degree, a.image_size, &fallback));
      if (fallback) ++result.fallback_fits;
    }
    acc.add(fits, gts, a.image_size, a.raw_file);
  }
  result.report = acc.report();
  result.oracle_checked = acc.oracle_checked();
  result.max_matching_gap = acc.max_matching_gap();
  result.discrepancies = acc.discrepancies();
  return result;
}

}  // namespace polylane::evaluation
