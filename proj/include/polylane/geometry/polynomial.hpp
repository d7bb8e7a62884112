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

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polylane::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Ordered lane points, y strictly increasing. The coordinate space
/// (normalized or pixels) is carried by the surrounding context.
using PointList = std::vector<Point>;

/// Width and height in pixels.
struct ImageSize {
  int width = 1280;
  int height = 720;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Raised when a least-squares fit has fewer distinct y values than unknowns.
class DegenerateFit : public std::runtime_error {
 public:
  explicit DegenerateFit(const std::string& what) : std::runtime_error(what) {}
};

/// x = a_0 + a_1 y + ... + a_K y^K.
class Polynomial {
 public:
  /// The zero polynomial of degree 0.
  Polynomial() : coeffs_(1, 0.0) {}

  /// Throws std::invalid_argument on an empty or non-finite coefficient list.
  explicit Polynomial(std::vector<double> coeffs);

  static Polynomial zero(int degree);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const { return coeffs_; }

  /// Horner evaluation.
  double operator()(double y) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

double eval_poly(const Polynomial& p, double y);

/// Returns true if y is strictly increasing and every coordinate is finite.
bool is_valid_point_list(std::span<const Point> points);

/// Least-squares polynomial x = p(y) of the given degree.
///
/// The y values are centered and scaled to [-1, 1] before the design matrix
/// is formed; the system is solved with a Householder QR decomposition and
/// the coefficients are mapped back to the unscaled variable.
///
/// Throws DegenerateFit when fewer than degree + 1 distinct y values exist.
Polynomial fit_least_squares(std::span<const Point> points, int degree);

/// Sum of squared residuals of p over the points.
double squared_residual(const Polynomial& p, std::span<const Point> points);

}  // namespace polylane::geometry
