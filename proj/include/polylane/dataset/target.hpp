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

#include <stdexcept>
#include <vector>

#include "polylane/dataset/annotation.hpp"

namespace polylane::dataset {

/// Regression target for one output slot, in normalized coordinates.
struct LaneTarget {
  PointList points;     // empty for padding slots
  double s_star = 0.0;  // smallest y of the lane
  double c_star = 0.0;  // 1 for annotated slots, 0 for padding
};

struct TrainingTarget {
  std::vector<LaneTarget> lanes;  // exactly m_max slots
  double h_star = 1.0;
  int num_lanes = 0;  // M
  ImageSize image_size;
};

class TooManyLanes : public std::runtime_error {
 public:
  TooManyLanes(int lanes, int m_max);
  int lanes() const { return lanes_; }
  int m_max() const { return m_max_; }

 private:
  int lanes_;
  int m_max_;
};

/// Pixel to normalized coordinates ([0, 1] of width and height).
PointList normalize(const PointList& pixels, ImageSize size);
PointList to_pixels(const PointList& normalized, ImageSize size);

/// The point with the largest y (closest to the bottom of the image).
geometry::Point bottom_point(const PointList& lane);

/// Sorts the lanes by the x of their bottom-most point and fills the
/// confidence, vertical offset and horizon targets. Images without lanes
/// get h_star = 1 (the bottom row). Throws TooManyLanes if the image has
/// more usable lanes than m_max.
TrainingTarget build_target(const AnnotatedImage& a, int m_max);
TrainingTarget build_target(const ImageAnnotation& a, int m_max);

}  // namespace polylane::dataset
