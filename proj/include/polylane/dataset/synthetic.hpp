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
#include <utility>
#include <vector>

#include <opencv2/core.hpp>

#include "polylane/dataset/annotation.hpp"

namespace polylane::dataset {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Parameters of the desk-scale synthetic road generator.
///
/// Each lane is x(y) = vx + (b - vx) u + sum_k kappa_k (1 - u)^k with
/// u = (y - horizon) / (1 - horizon), a polynomial of `degree` in y. All
/// lanes of an image share the vanishing point and curvature terms, so they
/// never cross. Coordinates are normalized unless noted otherwise.
struct SyntheticSpec {
  ImageSize image_size{640, 360};
  int min_lanes = 0;
  int max_lanes = 4;
  int degree = 3;
  /// kappa_k ranges for k = 2..degree; missing entries mean zero.
  std::vector<Range> curvature{{-0.12, 0.12}, {-0.08, 0.08}};
  Range horizon{0.32, 0.42};
  Range vanishing_x{0.42, 0.58};
  Range lane_spacing{0.22, 0.30};  // bottom-row distance between neighbours
  Range top_margin{0.03, 0.10};    // lane top below the horizon
  int first_row = 80;              // pixel rows of the annotation grid
  int row_step = 5;
  double x_noise_px = 0.0;  // Gaussian noise on annotated x only
  double background_level = 70.0;
  double background_noise = 25.0;
  double lane_level = 225.0;
  double stroke_width_bottom_px = 7.0;
  double stroke_width_top_px = 1.5;
};

struct SyntheticDataset {
  std::vector<cv::Mat> images;  // CV_8UC1
  std::vector<ImageAnnotation> annotations;
  /// Planted lane curves (normalized), ordered like annotations[i].lanes.
  std::vector<std::vector<geometry::Polynomial>> planted;
};

/// Deterministic in (seed, n_images, spec); image i depends only on the
/// seed and i.
SyntheticDataset generate_synthetic(std::uint64_t seed, int n_images, const SyntheticSpec& spec);

}  // namespace polylane::dataset
