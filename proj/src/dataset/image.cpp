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

#include "polylane/dataset/image.hpp"

#include <stdexcept>
#include <vector>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace polylane::dataset {

cv::Mat load_gray(const std::string& path) {
  cv::Mat img = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (img.empty()) throw std::runtime_error("cannot read image: " + path);
  return img;
}

cv::Mat load_color(const std::string& path) {
  cv::Mat img = cv::imread(path, cv::IMREAD_COLOR);
  if (img.empty()) throw std::runtime_error("cannot read image: " + path);
  return img;
}

void save_png(const std::string& path, const cv::Mat& image) {
  const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 6};
  if (!cv::imwrite(path, image, params)) throw std::runtime_error("cannot write image: " + path);
}

cv::Mat resize_to(const cv::Mat& image, geometry::ImageSize size) {
  if (image.cols == size.width && image.rows == size.height) return image;
  cv::Mat out;
  const bool shrinking = size.width <= image.cols && size.height <= image.rows;
  cv::resize(image, out, cv::Size(size.width, size.height), 0, 0, shrinking ? cv::INTER_AREA : cv::INTER_LINEAR);
  return out;
}

}  // namespace polylane::dataset
