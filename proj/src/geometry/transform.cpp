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

#include "polylane/geometry/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polylane::geometry {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

AffineMatrix to_matrix(const AffineTransform& t, ImageSize size) {
  const double w = size.width;
  const double h = size.height;
  return std::visit(
      Overloaded{
          [&](const Rotation& r) -> AffineMatrix {
            const double theta = r.degrees * std::numbers::pi / 180.0;
            const double a = std::cos(theta);
            const double b = std::sin(theta);
            const double cx = 0.5 * w;
            const double cy = 0.5 * h;
            return {a, b, (1.0 - a) * cx - b * cy, -b, a, b * cx + (1.0 - a) * cy};
          },
          [&](const HorizontalFlip&) -> AffineMatrix { return {-1.0, 0.0, w, 0.0, 1.0, 0.0}; },
          [&](const Crop& c) -> AffineMatrix { return {1.0, 0.0, -c.x, 0.0, 1.0, -c.y}; },
      },
      t);
}

ImageSize output_size(const AffineTransform& t, ImageSize size) {
  if (const auto* crop = std::get_if<Crop>(&t)) {
    return {crop->width, crop->height};
  }
  return size;
}

Point apply(const AffineMatrix& m, Point p) {
  return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
}

PointList transform_points(const PointList& points, const AffineTransform& t, ImageSize size) {
  const AffineMatrix m = to_matrix(t, size);
  const ImageSize out_size = output_size(t, size);

  PointList out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const Point q = apply(m, p);
    if (q.x >= 0.0 && q.x <= out_size.width && q.y >= 0.0 && q.y <= out_size.height) {
      out.push_back(q);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return a.y < b.y; });
  out.erase(std::unique(out.begin(), out.end(), [](const Point& a, const Point& b) { return a.y == b.y; }),
            out.end());
  if (out.size() < 2) out.clear();
  return out;
}

}  // namespace polylane::geometry
