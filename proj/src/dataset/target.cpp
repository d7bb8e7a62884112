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

#include "polylane/dataset/target.hpp"

#include <algorithm>
#include <string>

namespace polylane::dataset {

TooManyLanes::TooManyLanes(int lanes, int m_max)
    : std::runtime_error("image has " + std::to_string(lanes) + " lanes but the model has " +
                         std::to_string(m_max) + " slots"),
      lanes_(lanes),
      m_max_(m_max) {}

PointList normalize(const PointList& pixels, ImageSize size) {
  PointList out;
  out.reserve(pixels.size());
  for (const auto& p : pixels) out.push_back({p.x / size.width, p.y / size.height});
  return out;
}

PointList to_pixels(const PointList& normalized, ImageSize size) {
  PointList out;
  out.reserve(normalized.size());
  for (const auto& p : normalized) out.push_back({p.x * size.width, p.y * size.height});
  return out;
}

geometry::Point bottom_point(const PointList& lane) {
  return *std::max_element(lane.begin(), lane.end(),
                           [](const geometry::Point& a, const geometry::Point& b) { return a.y < b.y; });
}

TrainingTarget build_target(const AnnotatedImage& a, int m_max) {
  std::vector<const PointList*> usable;
  for (const auto& lane : a.lanes) {
    if (lane.size() >= 2) usable.push_back(&lane);
  }
  const int m = static_cast<int>(usable.size());
  if (m > m_max) throw TooManyLanes(m, m_max);

  std::stable_sort(usable.begin(), usable.end(), [](const PointList* l, const PointList* r) {
    return bottom_point(*l).x < bottom_point(*r).x;
  });

  TrainingTarget t;
  t.image_size = a.image_size;
  t.num_lanes = m;
  t.lanes.resize(static_cast<std::size_t>(m_max));
  for (int j = 0; j < m; ++j) {
    auto& slot = t.lanes[static_cast<std::size_t>(j)];
    slot.points = normalize(*usable[static_cast<std::size_t>(j)], a.image_size);
    slot.s_star = slot.points.front().y;
    for (const auto& p : slot.points) slot.s_star = std::min(slot.s_star, p.y);
    slot.c_star = 1.0;
  }
  t.h_star = 1.0;
  if (m > 0) {
    t.h_star = t.lanes.front().s_star;
    for (int j = 0; j < m; ++j) t.h_star = std::min(t.h_star, t.lanes[static_cast<std::size_t>(j)].s_star);
  }
  return t;
}

TrainingTarget build_target(const ImageAnnotation& a, int m_max) { return build_target(to_annotated(a), m_max); }

}  // namespace polylane::dataset
