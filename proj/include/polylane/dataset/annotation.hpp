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

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polylane/geometry/polynomial.hpp"

namespace polylane::dataset {

using geometry::ImageSize;
using geometry::PointList;

/// Marks "no point at this row" in a serialized lane.
inline constexpr double kMissingX = -2.0;

/// One record of a TuSimple-style annotation (or prediction) file.
///
/// lanes[j][i] is the x position of lane j at row h_samples[i]; negative
/// values mean the lane has no point on that row. image_size is not part of
/// the serialized record; loaders fill it from configuration.
struct ImageAnnotation {
  std::string raw_file;
  std::vector<double> h_samples;
  std::vector<std::vector<double>> lanes;
  ImageSize image_size;

  /// Pixel-space point lists, one per lane that has at least two points.
  std::vector<PointList> lane_points() const;

  friend bool operator==(const ImageAnnotation&, const ImageAnnotation&) = default;
};

/// Lanes as explicit pixel-space point lists. Augmentation produces this
/// form because transformed points no longer share rows.
struct AnnotatedImage {
  std::string raw_file;
  ImageSize image_size;
  std::vector<PointList> lanes;
};

AnnotatedImage to_annotated(const ImageAnnotation& a);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason);

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

/// Reads newline-delimited JSON records with keys "lanes", "h_samples" and
/// "raw_file". Blank lines are ignored; any other malformed line throws
/// ParseError carrying its 1-based line number.
std::vector<ImageAnnotation> parse_annotations(std::istream& in, ImageSize image_size = {});
std::vector<ImageAnnotation> parse_annotations(std::string_view text, ImageSize image_size = {});
std::vector<ImageAnnotation> load_annotations(const std::string& path, ImageSize image_size = {});

/// One line, without the trailing newline. Integral values are written as
/// JSON integers so TuSimple files round-trip byte for byte.
std::string serialize_annotation(const ImageAnnotation& a);
void write_annotations(std::ostream& out, const std::vector<ImageAnnotation>& records);
void save_annotations(const std::string& path, const std::vector<ImageAnnotation>& records);

}  // namespace polylane::dataset
