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

#include <array>
#include <variant>

#include "polylane/geometry/polynomial.hpp"

namespace polylane::geometry {

/// Rotation about the image center (W/2, H/2). Positive angles rotate
/// counter-clockwise as displayed, matching cv::getRotationMatrix2D.
struct Rotation {
  double degrees = 0.0;
};

/// Mirror about the vertical center line: x' = W - x.
struct HorizontalFlip {};

/// Keep the window [x, x + width] x [y, y + height]; the output frame
/// has the window's size and origin at its top-left corner.
struct Crop {
  double x = 0.0;
  double y = 0.0;
  int width = 0;
  int height = 0;
};

using AffineTransform = std::variant<Rotation, HorizontalFlip, Crop>;

/// Row-major 2x3 matrix mapping (x, y, 1) to (x', y').
using AffineMatrix = std::array<double, 6>;

AffineMatrix to_matrix(const AffineTransform& t, ImageSize size);

/// Frame size after applying t to an image of the given size.
ImageSize output_size(const AffineTransform& t, ImageSize size);

Point apply(const AffineMatrix& m, Point p);

/// Maps pixel-space points through t. Points leaving the output frame
/// [0, W'] x [0, H'] are dropped and the survivors are re-sorted by y with
/// duplicate rows removed. Fewer than two survivors yield an empty list.
PointList transform_points(const PointList& points, const AffineTransform& t, ImageSize size);

}  // namespace polylane::geometry
