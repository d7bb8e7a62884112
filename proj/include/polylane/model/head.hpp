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

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polylane/geometry/polynomial.hpp"

namespace polylane::model {

class ShapeMismatch : public std::runtime_error {
 public:
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Arrangement of the fully connected output vector.
///
/// Per lane slot the block is [a_0..a_K, s, c_logit] when the horizon is
/// shared, with h appended after the last block. Without sharing every
/// block is [a_0..a_K, s, top_y, c_logit] and there is no trailing h.
struct HeadLayout {
  int degree = 3;
  int m_max = 5;
  bool share_h = true;

  int lane_block() const { return degree + (share_h ? 3 : 4); }
  int output_dim() const { return m_max * lane_block() + (share_h ? 1 : 0); }

  int coeff_index(int lane, int k) const { return lane * lane_block() + k; }
  int offset_index(int lane) const { return lane * lane_block() + degree + 1; }
  /// Only valid when !share_h.
  int top_index(int lane) const { return lane * lane_block() + degree + 2; }
  int logit_index(int lane) const { return lane * lane_block() + lane_block() - 1; }
  /// Only valid when share_h.
  int horizon_index() const { return m_max * lane_block(); }

  friend bool operator==(const HeadLayout&, const HeadLayout&) = default;
};

struct LanePrediction {
  geometry::Polynomial poly;
  double s = 0.0;  // vertical offset, normalized
  double c = 0.0;  // confidence in [0, 1]
  std::optional<double> top_y;  // per-lane horizon when h is not shared
};

struct ModelOutput {
  std::vector<LanePrediction> lanes;
  std::optional<double> h;

  /// Upper limit of lane j: the shared h or the lane's own top-y.
  double horizon(std::size_t lane) const;
};

double sigmoid(double x);
double logit(double p);

/// Slices the raw vector; only the confidence logits are transformed.
ModelOutput decode(std::span<const double> raw, const HeadLayout& layout);

/// Inverse of decode (confidences go through the logit).
std::vector<double> encode(const ModelOutput& out, const HeadLayout& layout);

/// Normalized vertical domain [top, bottom] of a decoded lane: the curve is
/// valid below both its own offset s and the horizon.
struct LaneDomain {
  double top = 0.0;
  double bottom = 1.0;
};
LaneDomain lane_domain(const ModelOutput& out, std::size_t lane);

}  // namespace polylane::model
