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

#include "polylane/dataset/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <opencv2/imgproc.hpp>

#include "polylane/geometry/transform.hpp"

namespace polylane::dataset {

using geometry::AffineTransform;

ImageSize crop_size_for(const AugmentConfig& cfg, ImageSize image) {
  const double fx = static_cast<double>(cfg.crop.width) / cfg.crop_reference.width;
  const double fy = static_cast<double>(cfg.crop.height) / cfg.crop_reference.height;
  return {std::clamp(static_cast<int>(std::lround(fx * image.width)), 1, image.width),
          std::clamp(static_cast<int>(std::lround(fy * image.height)), 1, image.height)};
}

AugmentPlan sample_plan(RandomSource& rng, const AugmentConfig& cfg, ImageSize image) {
  AugmentPlan plan;
  plan.crop_size = image;
  plan.apply = rng.bernoulli(cfg.probability);
  if (!plan.apply) return plan;
  plan.rotation_deg = rng.uniform(-cfg.max_rotation_deg, cfg.max_rotation_deg);
  plan.flip = rng.bernoulli(cfg.flip_probability);
  plan.crop_size = crop_size_for(cfg, image);
  plan.crop_x = rng.uniform_int(0, image.width - plan.crop_size.width);
  plan.crop_y = rng.uniform_int(0, image.height - plan.crop_size.height);
  return plan;
}

namespace {

cv::Mat warp(const cv::Mat& image, const AffineTransform& t, ImageSize size) {
  const auto m = geometry::to_matrix(t, size);
  const cv::Mat matrix = (cv::Mat_<double>(2, 3) << m[0], m[1], m[2], m[3], m[4], m[5]);
  cv::Mat out;
  cv::warpAffine(image, out, matrix, image.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar::all(0));
  return out;
}

AnnotatedImage transform_lanes(const AnnotatedImage& a, const AffineTransform& t) {
  AnnotatedImage out;
  out.raw_file = a.raw_file;
  out.image_size = geometry::output_size(t, a.image_size);
  for (const auto& lane : a.lanes) {
    auto moved = geometry::transform_points(lane, t, a.image_size);
    if (!moved.empty()) out.lanes.push_back(std::move(moved));
  }
  return out;
}

}  // namespace

std::pair<AnnotatedImage, cv::Mat> apply_plan(const AugmentPlan& plan, const AnnotatedImage& a, const cv::Mat& image) {
  if (image.cols != a.image_size.width || image.rows != a.image_size.height) {
    throw std::invalid_argument("raster size does not match the annotation's image size");
  }
  if (!plan.apply) return {a, image.clone()};

  AnnotatedImage lanes = a;
  cv::Mat raster = image;
  if (plan.rotation_deg != 0.0) {
    const AffineTransform t = geometry::Rotation{plan.rotation_deg};
    raster = warp(raster, t, lanes.image_size);
    lanes = transform_lanes(lanes, t);
  }
  if (plan.flip) {
    cv::Mat flipped;
    cv::flip(raster, flipped, 1);
    raster = flipped;
    lanes = transform_lanes(lanes, geometry::HorizontalFlip{});
  }
  const geometry::Crop crop{static_cast<double>(plan.crop_x), static_cast<double>(plan.crop_y), plan.crop_size.width,
                            plan.crop_size.height};
  if (crop.width > 0 && crop.height > 0 &&
      (crop.width != lanes.image_size.width || crop.height != lanes.image_size.height || crop.x != 0 || crop.y != 0)) {
    raster = raster(cv::Rect(plan.crop_x, plan.crop_y, crop.width, crop.height)).clone();
    lanes = transform_lanes(lanes, crop);
  }
  return {std::move(lanes), raster.clone()};
}

std::pair<AnnotatedImage, cv::Mat> augment(const AnnotatedImage& a, const cv::Mat& image, RandomSource& rng,
                                           const AugmentConfig& cfg) {
  return apply_plan(sample_plan(rng, cfg, a.image_size), a, image);
}

}  // namespace polylane::dataset
