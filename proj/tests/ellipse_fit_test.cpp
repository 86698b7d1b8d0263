// Copyright 2026 The polnli Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polnli/ellipse_fit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "polnli/figures.hpp"
#include "test_support.hpp"

namespace polnli {
namespace {

using testing::kPi;

std::vector<Point2> trace(const RotatedParameters& p, int n = 90, double shift = 0.0) {
  std::vector<Point2> pts;
  for (int k = 0; k < n; ++k) {
    const double phi0 = 2 * kPi * k / n;
    pts.push_back({n_rotated(1, phi0, p) + shift, n_rotated(2, phi0, p) + shift});
  }
  return pts;
}

TEST(EllipseFitTest, FigureSixRotations) {
  for (double psi : {1.8, 3.5}) {
    const auto fit = fit_ellipse(trace(presets::fig6a(psi)));
    EXPECT_NEAR(fit.psi, std::fmod(psi, kPi), 1e-3);
    EXPECT_LT(fit.conic_residual, 1e-10);
    EXPECT_NEAR(fit.r1, 0.6, 1e-9);
    EXPECT_NEAR(fit.r2, 0.3, 1e-9);
    EXPECT_NEAR(fit.level, 2.0, 1e-9);
    EXPECT_TRUE(fit.flags.empty());
    const auto est = estimate_from_ellipse(fit);
    EXPECT_NEAR(est.tbar, 0.6, 1e-9);
    EXPECT_NEAR(est.dt, 0.6, 1e-9);
    EXPECT_NEAR(est.dphi, 0.0, 1e-12);
    EXPECT_FALSE(est.phibar.has_value());
  }
}

TEST(EllipseFitTest, RotationsGiveDistinctEllipses) {
  const auto a = fit_ellipse(trace(presets::fig6a(1.8)));
  const auto b = fit_ellipse(trace(presets::fig6a(3.5)));
  // Normalize so f = 1 before comparing.
  EXPECT_GT(std::abs(a.conic.b / a.conic.f - b.conic.b / b.conic.f), 1e-3);
  EXPECT_GT(std::abs(a.psi - b.psi), 0.5);
}

TEST(EllipseFitTest, ConicPassesThroughInputPoints) {
  const auto pts = trace(presets::fig6a(1.8), 40);
  const auto fit = fit_ellipse(pts);
  const double scale = std::hypot(fit.conic.a, fit.conic.b, fit.conic.c) * 4.0;
  for (const auto& p : pts) EXPECT_LT(std::abs(fit.conic(p.x, p.y)) / scale, 1e-9);
}

TEST(EllipseFitTest, IsotropicLossFigureSixB) {
  for (double psi : {0.4, 1.8, 2.9}) {
    const auto fit = fit_ellipse(trace(presets::fig6b(psi)), SampleClass::isotropic_loss);
    EXPECT_NEAR(fit.psi, psi, 1e-9);
    const auto est = estimate_from_ellipse(fit);
    EXPECT_NEAR(est.tbar, 0.6, 1e-9);
    EXPECT_NEAR(est.dt, 0.0, 1e-9);
    EXPECT_NEAR(est.dphi, kPi / 2, 1e-9);
  }
}

TEST(EllipseFitTest, ReversedTraversalMirrorsRotation) {
  auto pts = trace(presets::fig6a(0.5));
  std::vector<Point2> rev(pts.rbegin(), pts.rend());
  EXPECT_NEAR(fit_ellipse(rev).psi, kPi - 0.5, 1e-9);
}

TEST(EllipseFitTest, ShiftedCenterIsFlaggedNotFatal) {
  auto pts = trace(presets::fig6a(1.0));
  for (auto& p : pts) p.x += 0.3;
  const auto fit = fit_ellipse(pts);
  EXPECT_NEAR(fit.center.x - fit.center.y, 0.3, 1e-9);
  EXPECT_NE(std::find(fit.flags.begin(), fit.flags.end(), "center_off_diagonal"), fit.flags.end());
}

TEST(EllipseFitTest, TranslationInvariance) {
  const auto a = fit_ellipse(trace(presets::fig6a(1.8)));
  const auto b = fit_ellipse(trace(presets::fig6a(1.8), 90, 1e3));
  EXPECT_NEAR(a.phase_lag, b.phase_lag, 1e-9);
  EXPECT_NEAR(b.center.x - a.center.x, 1e3, 1e-6);
}

TEST(EllipseFitTest, CircleIsFlagged) {
  // Equal fringe amplitudes need C1 = C2: tbar = dt / 2.
  for (double psi : {kPi / 4, 3 * kPi / 4}) {
    const RotatedParameters p{1.0, 0.3, 0.6, 0.0, 0.0, psi};
    const auto fit = fit_ellipse(trace(p));
    EXPECT_NE(std::find(fit.flags.begin(), fit.flags.end(), "circular_ellipse"), fit.flags.end());
    EXPECT_NEAR(fit.psi, psi, 1e-9);
  }
}

TEST(EllipseFitTest, LineIsDegenerate) {
  // psi = 0: both fringes in phase.
  try {
    fit_ellipse(trace(presets::fig6a(0.0)));
    FAIL() << "expected UnidentifiableError";
  } catch (const UnidentifiableError& e) {
    EXPECT_EQ(e.flag(), "degenerate_conic");
  }
  std::vector<Point2> line;
  for (int k = 0; k < 20; ++k) line.push_back({1.0 + k, 2.0 + 3.0 * k});
  EXPECT_THROW(fit_ellipse(line), UnidentifiableError);
}

TEST(EllipseFitTest, InputValidation) {
  auto pts = trace(presets::fig6a(1.8), 5);
  EXPECT_THROW(fit_ellipse(pts), NumericError);
  pts = trace(presets::fig6a(1.8), 10);
  pts[2].y = std::nan("");
  EXPECT_THROW(fit_ellipse(pts), NumericError);
  pts = trace(presets::fig6a(1.8), 10);
  try {
    fit_ellipse(pts, SampleClass::general);
    FAIL() << "expected UnidentifiableError";
  } catch (const UnidentifiableError& e) {
    EXPECT_EQ(e.flag(), "sample_class_required");
  }
}

TEST(EllipseFitTest, NoisyTraceStaysClose) {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g(0.0, 1e-3);
  auto pts = trace(presets::fig6a(1.8), 200);
  for (auto& p : pts) {
    p.x += g(rng);
    p.y += g(rng);
  }
  const auto fit = fit_ellipse(pts);
  EXPECT_NEAR(fit.psi, 1.8, 1e-2);
  EXPECT_NEAR(fit.r1, 0.6, 1e-2);
}

}  // namespace
}  // namespace polnli
