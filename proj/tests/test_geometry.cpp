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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "polylane/geometry/polynomial.hpp"
#include "polylane/geometry/transform.hpp"

namespace polylane::geometry {
namespace {

double power_sum(const std::vector<double>& a, double y) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * std::pow(y, static_cast<double>(k));
  return sum;
}

TEST(Polynomial, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Polynomial(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(Polynomial({1.0, NAN}), std::invalid_argument);
  EXPECT_THROW(Polynomial({INFINITY}), std::invalid_argument);
  EXPECT_EQ(Polynomial::zero(3).degree(), 3);
}

TEST(Polynomial, EvaluatesSmallCases) {
  EXPECT_DOUBLE_EQ(eval_poly(Polynomial({2.0, 3.0}), 1.0), 5.0);
  EXPECT_DOUBLE_EQ(eval_poly(Polynomial({0.0, 0.0, 1.0}), 0.5), 0.25);
}

TEST(Polynomial, HornerMatchesPowerSum) {
  EXPECT_NEAR(eval_poly(Polynomial({1.0, -2.0, 3.0, -4.0}), 0.7), power_sum({1.0, -2.0, 3.0, -4.0}, 0.7), 1e-12);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> ys(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(1 + trial % 6);
    for (double& v : a) v = coef(rng);
    const double y = ys(rng);
    EXPECT_NEAR(Polynomial(a)(y), power_sum(a, y), 1e-12);
  }
}

TEST(Fit, RecoversLine) {
  const PointList pts{{1.0, 0.0}, {2.0, 0.5}, {3.0, 1.0}, {5.0, 2.0}};
  const auto p = fit_least_squares(pts, 1);
  ASSERT_EQ(p.degree(), 1);
  EXPECT_NEAR(p.coeffs()[0], 1.0, 1e-9);
  EXPECT_NEAR(p.coeffs()[1], 2.0, 1e-9);
}

TEST(Fit, RecoversCubicFromFourPoints) {
  PointList pts;
  for (double y : {0.1, 0.4, 0.7, 1.0}) pts.push_back({y * y * y, y});
  const auto p = fit_least_squares(pts, 3);
  const std::vector<double> expected{0.0, 0.0, 0.0, 1.0};
  for (int k = 0; k <= 3; ++k) EXPECT_NEAR(p.coeffs()[k], expected[k], 1e-6);
}

TEST(Fit, ThrowsOnTooFewDistinctRows) {
  const PointList pts{{1.0, 0.2}, {2.0, 0.5}, {3.0, 0.8}};
  EXPECT_THROW(fit_least_squares(pts, 3), DegenerateFit);
  const PointList repeated{{1.0, 0.2}, {2.0, 0.2}, {3.0, 0.2}};
  EXPECT_THROW(fit_least_squares(repeated, 1), DegenerateFit);
}

TEST(Fit, NoisyQuadraticBeatsRandomPerturbations) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.02);
  PointList pts;
  for (int i = 0; i < 10; ++i) {
    const double y = 0.3 + 0.07 * i;
    pts.push_back({0.2 + 0.5 * y - 0.3 * y * y + noise(rng), y});
  }
  const auto best = fit_least_squares(pts, 2);
  const double best_res = squared_residual(best, pts);
  std::normal_distribution<double> step(0.0, 0.05);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> c(best.coeffs().begin(), best.coeffs().end());
    for (double& v : c) v += step(rng);
    EXPECT_LE(best_res, squared_residual(Polynomial(c), pts) + 1e-15);
  }
}

TEST(FitProperty, InterpolatesWhenPointsEqualUnknowns) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(-2.0, 2.0);
  for (int degree = 0; degree <= 5; ++degree) {
    for (int trial = 0; trial < 20; ++trial) {
      PointList pts;
      for (int i = 0; i <= degree; ++i) pts.push_back({xs(rng), 0.1 + 0.15 * i});
      const auto p = fit_least_squares(pts, degree);
      for (const auto& pt : pts) EXPECT_NEAR(p(pt.y), pt.x, 1e-9);
    }
  }
}

TEST(FitProperty, ResidualNonIncreasingInDegree) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    PointList pts;
    for (int i = 0; i < 30; ++i) pts.push_back({xs(rng), 0.3 + 0.02 * i});
    double previous = INFINITY;
    for (int degree = 0; degree <= 5; ++degree) {
      const double r = squared_residual(fit_least_squares(pts, degree), pts);
      EXPECT_LE(r, previous * (1.0 + 1e-9) + 1e-15);
      previous = r;
    }
  }
}

TEST(FitProperty, TwoPointLineIsLinearInterpolation) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Point a{u(rng), 0.2 + 0.3 * u(rng)};
    const Point b{u(rng), 0.6 + 0.3 * u(rng)};
    const auto p = fit_least_squares(PointList{a, b}, 1);
    const double t = u(rng);
    const double y = a.y + t * (b.y - a.y);
    EXPECT_NEAR(p(y), a.x + t * (b.x - a.x), 1e-9);
  }
}

TEST(PointList, Validity) {
  EXPECT_TRUE(is_valid_point_list(PointList{{0.0, 1.0}, {0.0, 2.0}}));
  EXPECT_FALSE(is_valid_point_list(PointList{{0.0, 2.0}, {0.0, 2.0}}));
  EXPECT_FALSE(is_valid_point_list(PointList{{NAN, 1.0}, {0.0, 2.0}}));
}

TEST(Transform, FlipMirrorsX) {
  const PointList pts{{100.0, 300.0}, {200.0, 400.0}};
  const auto out = transform_points(pts, HorizontalFlip{}, {1280, 720});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].x, 1180.0);
  EXPECT_DOUBLE_EQ(out[0].y, 300.0);
}

TEST(Transform, ZeroRotationIsIdentity) {
  const PointList pts{{10.0, 20.0}, {640.0, 360.0}, {1000.0, 700.0}};
  const auto out = transform_points(pts, Rotation{0.0}, {1280, 720});
  ASSERT_EQ(out.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(out[i].x, pts[i].x, 1e-12);
    EXPECT_NEAR(out[i].y, pts[i].y, 1e-12);
  }
}

TEST(Transform, RotationFixesCenter) {
  const auto m = to_matrix(Rotation{10.0}, {1280, 720});
  const auto c = apply(m, {640.0, 360.0});
  EXPECT_NEAR(c.x, 640.0, 1e-9);
  EXPECT_NEAR(c.y, 360.0, 1e-9);
}

TEST(Transform, CropShiftsAndDrops) {
  const PointList pts{{50.0, 10.0}, {200.0, 100.0}, {300.0, 200.0}, {400.0, 700.0}};
  const Crop crop{100.0, 50.0, 400, 300};
  const auto out = transform_points(pts, crop, {1280, 720});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].x, 100.0);
  EXPECT_DOUBLE_EQ(out[0].y, 50.0);
  EXPECT_EQ(output_size(crop, {1280, 720}), (ImageSize{400, 300}));
}

TEST(Transform, SingleSurvivorGivesEmptyList) {
  const PointList pts{{10.0, 10.0}, {5000.0, 20.0}};
  EXPECT_TRUE(transform_points(pts, Rotation{0.0}, {1280, 720}).empty());
}

TEST(TransformProperty, DoubleFlipIsIdentity) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> xs(0.0, 1280.0);
  for (int trial = 0; trial < 100; ++trial) {
    PointList pts;
    for (int i = 0; i < 8; ++i) pts.push_back({xs(rng), 200.0 + 50.0 * i});
    const auto twice = transform_points(transform_points(pts, HorizontalFlip{}, {1280, 720}), HorizontalFlip{},
                                        {1280, 720});
    ASSERT_EQ(twice.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_NEAR(twice[i].x, pts[i].x, 1e-9);
  }
}

TEST(TransformProperty, OutputRowsStrictlyIncrease) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> xs(0.0, 1280.0);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    PointList pts;
    for (int i = 0; i < 20; ++i) pts.push_back({xs(rng), 300.0 + 20.0 * i});
    const auto out = transform_points(pts, Rotation{angle(rng)}, {1280, 720});
    if (!out.empty()) {
      EXPECT_TRUE(is_valid_point_list(out));
      EXPECT_GE(out.size(), 2u);
    }
    for (const auto& p : out) {
      EXPECT_GE(p.x, 0.0);
      EXPECT_LE(p.x, 1280.0);
      EXPECT_GE(p.y, 0.0);
      EXPECT_LE(p.y, 720.0);
    }
  }
}

}  // namespace
}  // namespace polylane::geometry
