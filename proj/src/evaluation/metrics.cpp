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

#include "polylane/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace polylane::evaluation {

namespace {

constexpr double kRowTolerance = 1e-6;  // pixels
constexpr double kDomainSnap = 0.5;  // pixels; domain edges resolve to the nearest row

std::vector<std::vector<double>> accuracy_matrix(std::span<const PredictedLane> preds, std::span<const PointList> gts,
                                                 double tau_acc) {
  std::vector<std::vector<double>> acc(gts.size(), std::vector<double>(preds.size(), 0.0));
  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (std::size_t p = 0; p < preds.size(); ++p) acc[g][p] = lane_accuracy(preds[p], gts[g], tau_acc);
  }
  return acc;
}

// Mean |dx| over the gt points the prediction hits.
double hit_deviation(const PredictedLane& pred, const PointList& gt, double tau_acc) {
  double sum = 0.0;
  int hits = 0;
  for (const auto& pt : gt) {
    const auto x = pred.x_at(pt.y);
    if (x && std::fabs(*x - pt.x) < tau_acc) {
      sum += std::fabs(*x - pt.x);
      ++hits;
    }
  }
  return hits ? sum / hits : 0.0;
}

// Content of a lane as a flat list, for order-independent tie-breaking.
std::vector<double> content_key(const PredictedLane& lane) {
  std::vector<double> key;
  if (lane.is_curve()) {
    key = {0.0, lane.top(), lane.bottom()};
    key.insert(key.end(), lane.curve().coeffs().begin(), lane.curve().coeffs().end());
  } else {
    key = {1.0};
    for (const auto& p : lane.samples()) {
      key.push_back(p.y);
      key.push_back(p.x);
    }
  }
  return key;
}

std::vector<double> content_key(const PointList& lane) {
  std::vector<double> key;
  for (const auto& p : lane) {
    key.push_back(p.y);
    key.push_back(p.x);
  }
  return key;
}

Point bottom_of(const PointList& lane) {
  return *std::max_element(lane.begin(), lane.end(), [](const Point& a, const Point& b) { return a.y < b.y; });
}

}  // namespace

PredictedLane PredictedLane::from_curve(geometry::Polynomial normalized, double top, double bottom, ImageSize size) {
  PredictedLane lane;
  lane.is_curve_ = true;
  lane.curve_ = std::move(normalized);
  lane.top_ = top;
  lane.bottom_ = bottom;
  lane.size_ = size;
  return lane;
}

PredictedLane PredictedLane::from_samples(PointList pixels) {
  PredictedLane lane;
  lane.is_curve_ = false;
  std::sort(pixels.begin(), pixels.end(), [](const Point& a, const Point& b) { return a.y < b.y; });
  lane.samples_ = std::move(pixels);
  return lane;
}

std::optional<double> PredictedLane::x_at(double y_px) const {
  if (is_curve_) {
    if (y_px < top_ * size_.height - kDomainSnap || y_px > bottom_ * size_.height + kDomainSnap) return std::nullopt;
    return curve_(y_px / size_.height) * size_.width;
  }
  auto it = std::lower_bound(samples_.begin(), samples_.end(), y_px - kRowTolerance,
                             [](const Point& p, double y) { return p.y < y; });
  if (it != samples_.end() && std::fabs(it->y - y_px) <= kRowTolerance) return it->x;
  return std::nullopt;
}

std::optional<double> PredictedLane::position_at(double y_px) const {
  if (is_curve_) return curve_(y_px / size_.height) * size_.width;
  return x_at(y_px);
}

double PredictedLane::bottom_x() const {
  if (is_curve_) return curve_(bottom_) * size_.width;
  return samples_.empty() ? 0.0 : samples_.back().x;
}

double lane_accuracy(const PredictedLane& pred, std::span<const Point> gt, double tau_acc) {
  if (gt.empty()) return 0.0;
  int hits = 0;
  for (const auto& pt : gt) {
    const auto x = pred.x_at(pt.y);
    if (x && std::fabs(*x - pt.x) < tau_acc) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gt.size());
}

ImageScore match_and_score(std::span<const PredictedLane> preds, std::span<const PointList> gts, double tau_acc,
                           double eps) {
  const auto acc = accuracy_matrix(preds, gts, tau_acc);
  struct Candidate {
    double accuracy;
    double deviation;
    int pred;
    int gt;
  };
  std::vector<Candidate> candidates;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (acc[g][p] > 0.0) {
        candidates.push_back(
            {acc[g][p], hit_deviation(preds[p], gts[g], tau_acc), static_cast<int>(p), static_cast<int>(g)});
      }
    }
  }
  std::vector<std::vector<double>> pred_keys;
  std::vector<std::vector<double>> gt_keys;
  for (const auto& p : preds) pred_keys.push_back(content_key(p));
  for (const auto& g : gts) gt_keys.push_back(content_key(g));
  // Ties fall back to lane content, so the outcome does not depend on list
  // order; indices only separate lanes that are identical.
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    if (a.deviation != b.deviation) return a.deviation < b.deviation;
    const auto& pa = pred_keys[static_cast<std::size_t>(a.pred)];
    const auto& pb = pred_keys[static_cast<std::size_t>(b.pred)];
    if (pa != pb) return pa < pb;
    const auto& ga = gt_keys[static_cast<std::size_t>(a.gt)];
    const auto& gb = gt_keys[static_cast<std::size_t>(b.gt)];
    if (ga != gb) return ga < gb;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });

  ImageScore score;
  std::vector<bool> gt_used(gts.size(), false);
  std::vector<bool> pred_used(preds.size(), false);
  int true_positives = 0;
  double acc_sum = 0.0;
  for (const auto& c : candidates) {
    if (gt_used[static_cast<std::size_t>(c.gt)] || pred_used[static_cast<std::size_t>(c.pred)]) continue;
    gt_used[static_cast<std::size_t>(c.gt)] = true;
    pred_used[static_cast<std::size_t>(c.pred)] = true;
    score.match.pairs.push_back({c.gt, c.pred, c.accuracy});
    acc_sum += c.accuracy;
    if (c.accuracy >= eps) ++true_positives;
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gt_used[g]) score.match.unmatched_gt.push_back(static_cast<int>(g));
  }
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (!pred_used[p]) score.match.unmatched_pred.push_back(static_cast<int>(p));
  }

  const double n_gt = static_cast<double>(gts.size());
  const double n_pred = static_cast<double>(preds.size());
  score.acc = gts.empty() ? 1.0 : acc_sum / n_gt;
  score.fp = preds.empty() ? 0.0 : (n_pred - true_positives) / n_pred;
  score.fn = gts.empty() ? 0.0 : (n_gt - true_positives) / n_gt;
  return score;
}

double optimal_assignment_accuracy(std::span<const PredictedLane> preds, std::span<const PointList> gts,
                                   double tau_acc) {
  if (gts.empty()) return 1.0;
  const auto acc = accuracy_matrix(preds, gts, tau_acc);
  std::vector<bool> used(preds.size(), false);
  std::function<double(std::size_t)> best = [&](std::size_t g) -> double {
    if (g == gts.size()) return 0.0;
    double result = best(g + 1);  // leave this gt unassigned
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (used[p]) continue;
      used[p] = true;
      result = std::max(result, acc[g][p] + best(g + 1));
      used[p] = false;
    }
    return result;
  };
  return best(0) / static_cast<double>(gts.size());
}

std::vector<int> ego_lanes(std::span<const PointList> gts, ImageSize size) {
  const double center = 0.5 * size.width;
  int left = -1;
  int right = -1;
  double left_x = -std::numeric_limits<double>::infinity();
  double right_x = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (gts[g].empty()) continue;
    const double x = bottom_of(gts[g]).x;
    if (x < center) {
      if (x > left_x) {
        left_x = x;
        left = static_cast<int>(g);
      }
    } else if (x < right_x) {
      right_x = x;
      right = static_cast<int>(g);
    }
  }
  std::vector<int> out;
  if (left >= 0) out.push_back(left);
  if (right >= 0) out.push_back(right);
  return out;
}

std::optional<double> image_lpd(std::span<const PredictedLane> preds, std::span<const PointList> gts,
                                const MatchResult& match, ImageSize size) {
  const auto ego = ego_lanes(gts, size);
  if (ego.empty()) throw NoEgoLane();
  if (preds.empty()) return std::nullopt;

  double sum = 0.0;
  int markings = 0;
  for (int g : ego) {
    const auto& lane = gts[static_cast<std::size_t>(g)];
    int pred = -1;
    for (const auto& pair : match.pairs) {
      if (pair.gt == g) pred = pair.pred;
    }
    if (pred < 0) {
      const double gx = bottom_of(lane).x;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < preds.size(); ++p) {
        const double d = std::fabs(preds[p].bottom_x() - gx);
        if (d < best) {
          best = d;
          pred = static_cast<int>(p);
        }
      }
    }
    double deviation = 0.0;
    int points = 0;
    for (const auto& pt : lane) {
      if (const auto x = preds[static_cast<std::size_t>(pred)].position_at(pt.y)) {
        deviation += std::fabs(*x - pt.x);
        ++points;
      }
    }
    if (points > 0) {
      sum += deviation / points;
      ++markings;
    }
  }
  if (markings == 0) return std::nullopt;
  return sum / markings;
}

MetricAccumulator::MetricAccumulator(double tau_acc, double eps, int max_oracle_lanes)
    : tau_acc_(tau_acc), eps_(eps), max_oracle_lanes_(max_oracle_lanes) {}

ImageScore MetricAccumulator::add(std::span<const PredictedLane> preds, std::span<const PointList> gts, ImageSize size,
                                  const std::string& image) {
  auto score = match_and_score(preds, gts, tau_acc_, eps_);
  acc_sum_ += score.acc;
  fp_sum_ += score.fp;
  fn_sum_ += score.fn;
  ++n_;
  if (!gts.empty()) {
    if (const auto lpd = image_lpd(preds, gts, score.match, size)) {
      lpd_sum_ += *lpd;
      ++n_lpd_;
    }
  }
  if (static_cast<int>(gts.size()) <= max_oracle_lanes_ && static_cast<int>(preds.size()) <= max_oracle_lanes_) {
    const double optimal = optimal_assignment_accuracy(preds, gts, tau_acc_);
    ++oracle_checked_;
    const double gap = optimal - score.acc;
    max_gap_ = std::max(max_gap_, gap);
    if (gap > 1e-12) discrepancies_.push_back({image, score.acc, optimal});
  }
  return score;
}

MetricReport MetricAccumulator::report() const {
  MetricReport r;
  r.n_images = n_;
  r.n_lpd_images = n_lpd_;
  if (n_ > 0) {
    r.acc = acc_sum_ / n_;
    r.fp = fp_sum_ / n_;
    r.fn = fn_sum_ / n_;
  }
  if (n_lpd_ > 0) r.lpd = lpd_sum_ / n_lpd_;
  return r;
}

}  // namespace polylane::evaluation
