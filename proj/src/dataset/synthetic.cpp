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

#include "polylane/dataset/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "polylane/dataset/random.hpp"

namespace polylane::dataset {

namespace {

using geometry::Polynomial;

// Coefficients of (alpha y + beta)^k, lowest power first.
std::vector<double> affine_power(double alpha, double beta, int k) {
  std::vector<double> out{1.0};
  for (int i = 0; i < k; ++i) {
    std::vector<double> next(out.size() + 1, 0.0);
    for (std::size_t j = 0; j < out.size(); ++j) {
      next[j] += beta * out[j];
      next[j + 1] += alpha * out[j];
    }
    out = std::move(next);
  }
  return out;
}

struct LaneLayout {
  Polynomial curve;
  double top = 0.0;
};

struct ImageLayout {
  double horizon = 0.0;
  std::vector<LaneLayout> lanes;
};

ImageLayout sample_layout(RandomSource& rng, const SyntheticSpec& spec) {
  ImageLayout layout;
  layout.horizon = rng.uniform(spec.horizon.lo, spec.horizon.hi);
  const double vx = rng.uniform(spec.vanishing_x.lo, spec.vanishing_x.hi);
  const int m = rng.uniform_int(spec.min_lanes, spec.max_lanes);
  const double spacing = rng.uniform(spec.lane_spacing.lo, spec.lane_spacing.hi);
  const double center = 0.5 + rng.uniform(-0.25, 0.25) * spacing;

  std::vector<double> kappa(static_cast<std::size_t>(std::max(spec.degree - 1, 0)), 0.0);
  for (std::size_t k = 0; k < kappa.size() && k < spec.curvature.size(); ++k) {
    kappa[k] = rng.uniform(spec.curvature[k].lo, spec.curvature[k].hi);
  }

  // u = alpha y + beta, 1 - u = -alpha y + (1 - beta)
  const double alpha = 1.0 / (1.0 - layout.horizon);
  const double beta = -layout.horizon * alpha;
  for (int j = 0; j < m; ++j) {
    const double bottom_x = center + (j - 0.5 * (m - 1)) * spacing + rng.uniform(-0.02, 0.02);
    std::vector<double> coeffs(static_cast<std::size_t>(spec.degree) + 1, 0.0);
    // vx + (b - vx) u
    coeffs[0] += vx + (bottom_x - vx) * beta;
    if (spec.degree >= 1) coeffs[1] += (bottom_x - vx) * alpha;
    for (std::size_t k = 0; k < kappa.size(); ++k) {
      const auto term = affine_power(-alpha, 1.0 - beta, static_cast<int>(k) + 2);
      for (std::size_t i = 0; i < term.size(); ++i) coeffs[i] += kappa[k] * term[i];
    }
    LaneLayout lane{Polynomial(std::move(coeffs)), layout.horizon + rng.uniform(spec.top_margin.lo, spec.top_margin.hi)};
    layout.lanes.push_back(std::move(lane));
  }
  return layout;
}

std::vector<int> annotation_rows(const SyntheticSpec& spec) {
  std::vector<int> rows;
  for (int r = spec.first_row; r < spec.image_size.height; r += spec.row_step) rows.push_back(r);
  return rows;
}

cv::Mat render(const ImageLayout& layout, RandomSource& rng, const SyntheticSpec& spec) {
  const int w = spec.image_size.width;
  const int h = spec.image_size.height;
  cv::Mat canvas(h, w, CV_64FC1);
  for (int y = 0; y < h; ++y) {
    auto* row = canvas.ptr<double>(y);
    const double shade = spec.background_level * (0.6 + 0.4 * y / h);
    for (int x = 0; x < w; ++x) {
      row[x] = shade + rng.uniform(-spec.background_noise, spec.background_noise);
    }
  }
  for (const auto& lane : layout.lanes) {
    const int first = std::max(0, static_cast<int>(std::ceil(lane.top * h)));
    for (int y = first; y < h; ++y) {
      const double yn = static_cast<double>(y) / h;
      const double u = (yn - layout.horizon) / (1.0 - layout.horizon);
      const double half = 0.5 * (spec.stroke_width_top_px + (spec.stroke_width_bottom_px - spec.stroke_width_top_px) * u);
      const double xc = lane.curve(yn) * w;
      const int x0 = std::max(0, static_cast<int>(std::floor(xc - half - 1.0)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(xc + half + 1.0)));
      auto* row = canvas.ptr<double>(y);
      for (int x = x0; x <= x1; ++x) {
        const double coverage = std::clamp(half + 0.5 - std::fabs(x - xc), 0.0, 1.0);
        row[x] = row[x] * (1.0 - coverage) + spec.lane_level * coverage;
      }
    }
  }
  cv::Mat out;
  canvas.convertTo(out, CV_8UC1);  // saturating, round-to-nearest
  return out;
}

}  // namespace

SyntheticDataset generate_synthetic(std::uint64_t seed, int n_images, const SyntheticSpec& spec) {
  if (spec.min_lanes < 0 || spec.max_lanes < spec.min_lanes) {
    throw std::invalid_argument("synthetic lane count range is invalid");
  }
  if (spec.degree < 1) throw std::invalid_argument("synthetic lane degree must be at least 1");
  if (spec.row_step <= 0 || spec.image_size.width <= 0 || spec.image_size.height <= 0) {
    throw std::invalid_argument("synthetic image size and row step must be positive");
  }

  const RandomSource root(seed);
  const auto rows = annotation_rows(spec);
  SyntheticDataset out;
  for (int i = 0; i < n_images; ++i) {
    RandomSource rng = root.fork(static_cast<std::uint64_t>(i));
    RandomSource layout_rng = rng.fork("layout");
    RandomSource noise_rng = rng.fork("annotation-noise");
    RandomSource texture_rng = rng.fork("texture");

    // Re-draw layouts whose lanes leave too few points inside the frame.
    ImageLayout layout;
    std::vector<std::vector<double>> lanes;
    for (int attempt = 0; attempt < 100; ++attempt) {
      layout = sample_layout(layout_rng, spec);
      lanes.clear();
      bool ok = true;
      for (const auto& lane : layout.lanes) {
        std::vector<double> xs;
        int inside = 0;
        for (int r : rows) {
          const double yn = static_cast<double>(r) / spec.image_size.height;
          const double x = lane.curve(yn) * spec.image_size.width;
          if (yn >= lane.top && x >= 0.0 && x < spec.image_size.width) {
            xs.push_back(x);
            ++inside;
          } else {
            xs.push_back(kMissingX);
          }
        }
        if (inside < 5) ok = false;
        lanes.push_back(std::move(xs));
      }
      if (ok) break;
    }
    for (auto& lane : lanes) {
      for (double& x : lane) {
        if (x == kMissingX || spec.x_noise_px <= 0.0) continue;
        x = std::clamp(x + noise_rng.normal(0.0, spec.x_noise_px), 0.0, spec.image_size.width - 1e-9);
      }
    }

    char name[64];
    std::snprintf(name, sizeof(name), "synthetic/%06d.png", i);
    ImageAnnotation a;
    a.raw_file = name;
    a.image_size = spec.image_size;
    a.h_samples.assign(rows.begin(), rows.end());
    a.lanes = std::move(lanes);

    std::vector<geometry::Polynomial> planted;
    for (const auto& lane : layout.lanes) planted.push_back(lane.curve);

    out.images.push_back(render(layout, texture_rng, spec));
    out.annotations.push_back(std::move(a));
    out.planted.push_back(std::move(planted));
  }
  return out;
}

}  // namespace polylane::dataset
