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

#include "polylane/training/loss.hpp"

#include <algorithm>
#include <cmath>

namespace polylane::training {

using model::HeadLayout;

namespace {

double horner(std::span<const double> coeffs, double y) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * y + *it;
  return acc;
}

}  // namespace

double point_loss(const geometry::Polynomial& p, std::span<const geometry::Point> gt, double tau) {
  if (gt.empty()) throw EmptyLane();
  double sum = 0.0;
  for (const auto& pt : gt) {
    const double r = p(pt.y) - pt.x;
    if (std::fabs(r) > tau) sum += r * r;
  }
  return sum / static_cast<double>(gt.size());
}

double point_loss(const model::LanePrediction& pred, std::span<const geometry::Point> gt, double tau) {
  return point_loss(pred.poly, gt, tau);
}

double bce_with_logit(double logit, double target) {
  const double z = std::clamp(logit, -kLogitClamp, kLogitClamp);
  return std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::fabs(z)));
}

LossBreakdown total_loss(const model::ModelOutput& out, const dataset::TrainingTarget& target, const LossWeights& w) {
  HeadLayout layout;
  layout.m_max = static_cast<int>(out.lanes.size());
  layout.degree = out.lanes.empty() ? 0 : out.lanes.front().poly.degree();
  layout.share_h = out.h.has_value();
  const auto raw = model::encode(out, layout);
  return total_loss_with_gradient(raw, layout, target, w).terms;
}

LossWithGradient total_loss_with_gradient(std::span<const double> raw, const HeadLayout& layout,
                                          const dataset::TrainingTarget& target, const LossWeights& w) {
  if (raw.size() != static_cast<std::size_t>(layout.output_dim())) {
    throw model::ShapeMismatch("raw output length does not match the head layout");
  }
  if (target.lanes.size() != static_cast<std::size_t>(layout.m_max)) {
    throw model::ShapeMismatch("target has " + std::to_string(target.lanes.size()) + " slots, layout expects " +
                               std::to_string(layout.m_max));
  }
  LossWithGradient result;
  auto& terms = result.terms;
  auto& grad = result.grad;
  grad.assign(raw.size(), 0.0);

  const int m = target.num_lanes;
  const double tau = w.tau_loss_px / target.image_size.width;
  const auto ncoef = static_cast<std::size_t>(layout.degree) + 1;

  if (m > 0) {
    const double per_lane = 1.0 / m;
    for (int j = 0; j < m; ++j) {
      const auto& lane = target.lanes[static_cast<std::size_t>(j)];
      if (lane.points.empty()) throw EmptyLane();
      const auto coeffs = raw.subspan(static_cast<std::size_t>(layout.coeff_index(j, 0)), ncoef);
      const double n = static_cast<double>(lane.points.size());
      double sum = 0.0;
      for (const auto& pt : lane.points) {
        const double r = horner(coeffs, pt.y) - pt.x;
        if (!(std::fabs(r) > tau)) continue;
        sum += r * r;
        const double dr = w.w_p * per_lane * 2.0 * r / n;
        double power = 1.0;
        for (std::size_t k = 0; k < ncoef; ++k) {
          grad[static_cast<std::size_t>(layout.coeff_index(j, static_cast<int>(k)))] += dr * power;
          power *= pt.y;
        }
      }
      terms.point += sum / n * per_lane;

      const double ds = raw[static_cast<std::size_t>(layout.offset_index(j))] - lane.s_star;
      terms.offset += ds * ds * per_lane;
      grad[static_cast<std::size_t>(layout.offset_index(j))] += w.w_s * per_lane * 2.0 * ds;

      if (!layout.share_h) {
        const double dt = raw[static_cast<std::size_t>(layout.top_index(j))] - lane.s_star;
        terms.horizon += dt * dt * per_lane;
        grad[static_cast<std::size_t>(layout.top_index(j))] += w.w_h * per_lane * 2.0 * dt;
      }
    }
  }

  if (layout.share_h) {
    const double dh = raw[static_cast<std::size_t>(layout.horizon_index())] - target.h_star;
    terms.horizon = dh * dh;
    grad[static_cast<std::size_t>(layout.horizon_index())] = w.w_h * 2.0 * dh;
  }

  const double per_slot = 1.0 / layout.m_max;
  for (int j = 0; j < layout.m_max; ++j) {
    const auto idx = static_cast<std::size_t>(layout.logit_index(j));
    const double c_star = target.lanes[static_cast<std::size_t>(j)].c_star;
    terms.confidence += bce_with_logit(raw[idx], c_star) * per_slot;
    if (std::fabs(raw[idx]) <= kLogitClamp) grad[idx] = w.w_c * per_slot * (model::sigmoid(raw[idx]) - c_star);
  }

  terms.total = w.w_p * terms.point + w.w_s * terms.offset + w.w_c * terms.confidence + w.w_h * terms.horizon;
  return result;
}

}  // namespace polylane::training
