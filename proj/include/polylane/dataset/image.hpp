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

#include <string>

#include <opencv2/core.hpp>

#include "polylane/geometry/polynomial.hpp"

namespace polylane::dataset {

/// Loads an image as 8-bit grayscale. Throws std::runtime_error if the file
/// cannot be decoded.
cv::Mat load_gray(const std::string& path);
cv::Mat load_color(const std::string& path);

/// Writes a lossless PNG. Throws std::runtime_error on failure.
void save_png(const std::string& path, const cv::Mat& image);

/// Area resampling when shrinking, bilinear when enlarging.
cv::Mat resize_to(const cv::Mat& image, geometry::ImageSize size);

}  // namespace polylane::dataset
