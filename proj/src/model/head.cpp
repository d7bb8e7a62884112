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

#include "polylane/model/head.hpp"

#include <algorithm>
#include <cmath>

namespace polylane::model {

double ModelOutput::horizon(std::size_t lane) const {
  if (h) return *h;
  return lanes.at(lane).top_y.value_or(0.0);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

ModelOutput decode(std::span<const double> raw, const HeadLayout& layout) {
  if (raw.size() != static_cast<std::size_t>(layout.output_dim())) {
    throw ShapeMismatch("raw output has " + std::to_string(raw.size()) + " values, layout expects " +
                        std::to_string(layout.output_dim()));
  }
  ModelOutput out;
  out.lanes.reserve(static_cast<std::size_t>(layout.m_max));
  for (int j = 0; j < layout.m_max; ++j) {
    std::vector<double> coeffs(raw.begin() + layout.coeff_index(j, 0),
                               raw.begin() + layout.coeff_index(j, layout.degree) + 1);
    LanePrediction lane{geometry::Polynomial(std::move(coeffs)), raw[layout.offset_index(j)],
                        sigmoid(raw[layout.logit_index(j)]), std::nullopt};
    if (!layout.share_h) lane.top_y = raw[layout.top_index(j)];
    out.lanes.push_back(std::move(lane));
  }
  if (layout.share_h) out.h = raw[layout.horizon_index()];
  return out;
}

std::vector<double> encode(const ModelOutput& out, const HeadLayout& layout) {
  if (out.lanes.size() != static_cast<std::size_t>(layout.m_max)) {
    throw ShapeMismatch("model output has " + std::to_string(out.lanes.size()) + " lanes, layout expects " +
                        std::to_string(layout.m_max));
  }
  std::vector<double> raw(static_cast<std::size_t>(layout.output_dim()), 0.0);
  for (int j = 0; j < layout.m_max; ++j) {
    const auto& lane = out.lanes[static_cast<std::size_t>(j)];
    if (lane.poly.degree() != layout.degree) throw ShapeMismatch("lane polynomial degree differs from layout");
    for (int k = 0; k <= layout.degree; ++k) raw[layout.coeff_index(j, k)] = lane.poly.coeffs()[k];
    raw[layout.offset_index(j)] = lane.s;
    raw[layout.logit_index(j)] = logit(lane.c);
    if (!layout.share_h) raw[layout.top_index(j)] = lane.top_y.value_or(0.0);
  }
  if (layout.share_h) raw[layout.horizon_index()] = out.h.value_or(1.0);
  return raw;
}

LaneDomain lane_domain(const ModelOutput& out, std::size_t lane) {
  return {std::max(out.lanes.at(lane).s, out.horizon(lane)), 1.0};
}

}  // namespace polylane::model
