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

#include <utility>

#include <opencv2/core.hpp>

#include "polylane/dataset/annotation.hpp"
#include "polylane/dataset/random.hpp"

namespace polylane::dataset {

struct AugmentConfig {
  double probability = 10.0 / 11.0;
  double max_rotation_deg = 10.0;
  double flip_probability = 0.5;
  /// Crop window at the reference resolution; other resolutions use the
  /// same fraction of the frame.
  ImageSize crop{1152, 648};
  ImageSize crop_reference{1280, 720};
};

/// One concrete draw of the augmentation pipeline, applied as
/// rotate -> flip -> crop.
struct AugmentPlan {
  bool apply = false;
  double rotation_deg = 0.0;
  bool flip = false;
  int crop_x = 0;
  int crop_y = 0;
  ImageSize crop_size;
};

ImageSize crop_size_for(const AugmentConfig& cfg, ImageSize image);

AugmentPlan sample_plan(RandomSource& rng, const AugmentConfig& cfg, ImageSize image);

/// Applies the plan to the raster and to every lane. Lanes left with fewer
/// than two points inside the frame are dropped. The raster must match
/// a.image_size.
std::pair<AnnotatedImage, cv::Mat> apply_plan(const AugmentPlan& plan, const AnnotatedImage& a, const cv::Mat& image);

std::pair<AnnotatedImage, cv::Mat> augment(const AnnotatedImage& a, const cv::Mat& image, RandomSource& rng,
                                           const AugmentConfig& cfg = {});

}  // namespace polylane::dataset
