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

#include "polylane/geometry/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace polylane::geometry {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw std::invalid_argument("polynomial needs at least one coefficient");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("polynomial coefficients must be finite");
    }
  }
}

Polynomial Polynomial::zero(int degree) {
  if (degree < 0) {
    throw std::invalid_argument("polynomial degree must be non-negative");
  }
  return Polynomial(std::vector<double>(static_cast<std::size_t>(degree) + 1, 0.0));
}

double Polynomial::operator()(double y) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * y + *it;
  }
  return acc;
}

double eval_poly(const Polynomial& p, double y) { return p(y); }

bool is_valid_point_list(std::span<const Point> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) return false;
    if (i > 0 && !(points[i].y > points[i - 1].y)) return false;
  }
  return true;
}

namespace {

std::size_t count_distinct_y(std::span<const Point> points) {
  std::vector<double> ys;
  ys.reserve(points.size());
  for (const auto& p : points) ys.push_back(p.y);
  std::sort(ys.begin(), ys.end());
  return static_cast<std::size_t>(std::unique(ys.begin(), ys.end()) - ys.begin());
}

// Coefficients of q(alpha * y + beta) given the coefficients of q.
std::vector<double> compose_affine(const Eigen::VectorXd& q, double alpha, double beta) {
  const auto n = static_cast<std::size_t>(q.size());
  std::vector<double> out(n, 0.0);
  out[0] = q[static_cast<Eigen::Index>(n - 1)];
  std::size_t len = 1;
  for (std::size_t k = n - 1; k-- > 0;) {
    // out <- out * (alpha y + beta) + q_k
    for (std::size_t i = len; i-- > 0;) {
      out[i + 1] += alpha * out[i];
      out[i] *= beta;
    }
    ++len;
    out[0] += q[static_cast<Eigen::Index>(k)];
  }
  return out;
}

}  // namespace

Polynomial fit_least_squares(std::span<const Point> points, int degree) {
  if (degree < 0) {
    throw std::invalid_argument("fit degree must be non-negative");
  }
  const auto unknowns = static_cast<std::size_t>(degree) + 1;
  if (count_distinct_y(points) < unknowns) {
    throw DegenerateFit("degree " + std::to_string(degree) + " fit needs " +
                        std::to_string(unknowns) + " distinct y values, got " +
                        std::to_string(count_distinct_y(points)));
  }

  double y_min = points.front().y;
  double y_max = points.front().y;
  for (const auto& p : points) {
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  const double center = 0.5 * (y_min + y_max);
  const double half_range = y_max > y_min ? 0.5 * (y_max - y_min) : 1.0;

  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(unknowns);
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double t = (points[static_cast<std::size_t>(i)].y - center) / half_range;
    double power = 1.0;
    for (Eigen::Index k = 0; k < cols; ++k) {
      design(i, k) = power;
      power *= t;
    }
    rhs[i] = points[static_cast<std::size_t>(i)].x;
  }
  const Eigen::VectorXd scaled = design.householderQr().solve(rhs);
  return Polynomial(compose_affine(scaled, 1.0 / half_range, -center / half_range));
}

double squared_residual(const Polynomial& p, std::span<const Point> points) {
  double sum = 0.0;
  for (const auto& pt : points) {
    const double r = p(pt.y) - pt.x;
    sum += r * r;
  }
  return sum;
}

}  // namespace polylane::geometry
