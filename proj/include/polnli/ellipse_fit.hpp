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

// Direct least-squares ellipse fit (Halir-Flusser form of the Fitzgibbon
// constraint 4ac - b^2 = 1) and the Lissajous reading of the fitted conic
// for the (N1, N2) curve of the rotated-sample experiment.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polnli/analytic_signals.hpp"
#include "polnli/errors.hpp"
#include "polnli/estimation.hpp"

namespace polnli {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// a x^2 + b xy + c y^2 + d x + e y + f = 0
struct Conic {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0, f = 0.0;

  double operator()(double x, double y) const {
    return a * x * x + b * x * y + c * y * y + d * x + e * y + f;
  }
};

struct EllipseFit {
  Conic conic;  // in the input coordinates
  Point2 center;
  double level = 0.0;      // mean of the center coordinates
  double r1 = 0.0;         // half-amplitude of x over level
  double r2 = 0.0;         // half-amplitude of y over level
  double phase_lag = 0.0;  // phase of x minus phase of y, (-pi, pi]
  RotatedAmplitudes amplitudes;
  double psi = 0.0;
  double conic_residual = 0.0;
  std::vector<std::string> flags;
};

namespace detail {

struct Normalization {
  double mx = 0.0, my = 0.0, s = 1.0;
};

inline Normalization normalize_points(std::span<const Point2> pts) {
  Normalization n;
  for (const auto& p : pts) {
    n.mx += p.x;
    n.my += p.y;
  }
  n.mx /= static_cast<double>(pts.size());
  n.my /= static_cast<double>(pts.size());
  double ss = 0.0;
  for (const auto& p : pts) ss += (p.x - n.mx) * (p.x - n.mx) + (p.y - n.my) * (p.y - n.my);
  n.s = std::sqrt(ss / (2.0 * static_cast<double>(pts.size())));
  return n;
}

inline double shoelace_area(std::span<const Point2> pts) {
  double area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[(i + 1) % pts.size()];
    area += p.x * q.y - q.x * p.y;
  }
  return 0.5 * area;
}

}  // namespace detail

/// Fitted conic in normalized coordinates u = (x - mx)/s, v = (y - my)/s.
/// Throws UnidentifiableError("degenerate_conic") for collinear input or
/// when no ellipse-constrained solution exists.
inline Conic fit_conic_normalized(std::span<const Point2> pts, const detail::Normalization& n) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd D1(m, 3), D2(m, 3);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double u = (pts[static_cast<std::size_t>(i)].x - n.mx) / n.s;
    const double v = (pts[static_cast<std::size_t>(i)].y - n.my) / n.s;
    D1.row(i) << u * u, u * v, v * v;
    D2.row(i) << u, v, 1.0;
  }
  const Eigen::Matrix3d S1 = D1.transpose() * D1;
  const Eigen::Matrix3d S2 = D1.transpose() * D2;
  const Eigen::Matrix3d S3 = D2.transpose() * D2;

  Eigen::FullPivLU<Eigen::Matrix3d> lu(S3);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw UnidentifiableError("degenerate_conic", "points are collinear");
  const Eigen::Matrix3d T = -lu.solve(S2.transpose());
  const Eigen::Matrix3d M = S1 + S2 * T;
  Eigen::Matrix3d R;
  R.row(0) = M.row(2) / 2.0;
  R.row(1) = -M.row(1);
  R.row(2) = M.row(0) / 2.0;

  Eigen::EigenSolver<Eigen::Matrix3d> es(R);
  if (es.info() != Eigen::Success) throw NumericError("ellipse fit: eigensolver failed");

  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::Matrix<double, 6, 1> best;
  bool found = false;
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3cd vc = es.eigenvectors().col(k);
    if (vc.imag().norm() > 1e-9 * vc.norm()) continue;
    const Eigen::Vector3d a1 = vc.real();
    if (4.0 * a1(0) * a1(2) - a1(1) * a1(1) <= 0.0) continue;
    Eigen::Matrix<double, 6, 1> coef;
    coef << a1, T * a1;
    coef.normalize();
    const double cost = (D1 * coef.head<3>() + D2 * coef.tail<3>()).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best = coef;
      found = true;
    }
  }
  if (!found) throw UnidentifiableError("degenerate_conic", "no elliptical solution");
  return {best(0), best(1), best(2), best(3), best(4), best(5)};
}

/// Fit the Lissajous ellipse traced by (N1, N2) as phi0 advances. Points
/// must be in scan order: the traversal sense fixes the sign of the phase
/// lag, which the point set alone cannot.
inline EllipseFit fit_ellipse(std::span<const Point2> pts,
                              SampleClass cls = SampleClass::isotropic_phase) {
  if (pts.size() < 6) throw NumericError("fit_ellipse: need at least 6 points");
  for (const auto& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw NumericError("fit_ellipse: non-finite point");
    }
  }
  const auto n = detail::normalize_points(pts);
  if (!(n.s > 0.0)) throw UnidentifiableError("degenerate_conic", "all points coincide");
  const Conic q = fit_conic_normalized(pts, n);

  EllipseFit out;
  {
    double ss = 0.0;
    for (const auto& p : pts) {
      const double r = q((p.x - n.mx) / n.s, (p.y - n.my) / n.s);
      ss += r * r;
    }
    out.conic_residual = std::sqrt(ss / static_cast<double>(pts.size()));
  }

  // Center and the quadratic form at the center.
  Eigen::Matrix2d H;
  H << 2.0 * q.a, q.b, q.b, 2.0 * q.c;
  const Eigen::Vector2d c0 = H.fullPivLu().solve(Eigen::Vector2d(-q.d, -q.e));
  const double fc = -(q.f + 0.5 * (q.d * c0(0) + q.e * c0(1)));
  if (fc == 0.0) throw UnidentifiableError("degenerate_conic", "conic passes through its center");
  const double a = q.a / fc;
  const double b = q.b / fc;
  const double c = q.c / fc;
  if (!(a > 0.0) || !(c > 0.0)) throw UnidentifiableError("degenerate_conic", "not an ellipse");

  // x = X cos(p + lag), y = Y cos(p):  x^2/X^2 - 2 xy cos(lag)/(XY) + y^2/Y^2 = sin^2(lag)
  const double cos_lag = std::clamp(-b / (2.0 * std::sqrt(a * c)), -1.0, 1.0);
  const double sin2 = 1.0 - cos_lag * cos_lag;
  if (sin2 < 1e-12) throw UnidentifiableError("degenerate_conic", "ellipse collapsed to a line");
  const double X = n.s / std::sqrt(a * sin2);
  const double Y = n.s / std::sqrt(c * sin2);

  out.center = {n.mx + n.s * c0(0), n.my + n.s * c0(1)};
  out.level = 0.5 * (out.center.x + out.center.y);
  if (!(out.level > 0.0)) throw NumericError("fit_ellipse: center must have positive counts");
  out.r1 = X / out.level;
  out.r2 = Y / out.level;
  if (std::abs(out.center.x - out.center.y) > 1e-6 * out.level) {
    out.flags.emplace_back("center_off_diagonal");
  }

  const double area = detail::shoelace_area(pts);
  const double sin_lag = std::copysign(std::sqrt(sin2), area);
  out.phase_lag = std::atan2(sin_lag, cos_lag);
  if (std::abs(out.r1 - out.r2) < 1e-9 * std::max(out.r1, out.r2) && std::abs(cos_lag) < 1e-9) {
    out.flags.emplace_back("circular_ellipse");
  }

  // Back to the input frame: substitute u = (x - mx)/s, v = (y - my)/s.
  {
    const double s2 = n.s * n.s;
    Conic g;
    g.a = q.a / s2;
    g.b = q.b / s2;
    g.c = q.c / s2;
    g.d = q.d / n.s - (2.0 * q.a * n.mx + q.b * n.my) / s2;
    g.e = q.e / n.s - (2.0 * q.c * n.my + q.b * n.mx) / s2;
    g.f = q.f + (q.a * n.mx * n.mx + q.b * n.mx * n.my + q.c * n.my * n.my) / s2 -
          (q.d * n.mx + q.e * n.my) / n.s;
    out.conic = g;
  }

  switch (cls) {
    case SampleClass::isotropic_phase:
      out.amplitudes = {0.0, out.r1, 0.0, out.r2};
      out.psi = wrap_half_turn(0.5 * out.phase_lag);
      break;
    case SampleClass::isotropic_loss:
      out.amplitudes = {0.0, out.r1, -out.r2, 0.0};
      out.psi = wrap_half_turn(0.5 * (out.phase_lag + 0.5 * std::numbers::pi));
      break;
    case SampleClass::general:
      throw UnidentifiableError("sample_class_required",
                                "the ellipse alone does not fix a general rotated sample");
  }
  return out;
}

/// Sample estimate from an ellipse fit. The mean phase is not observable.
inline SampleEstimate estimate_from_ellipse(const EllipseFit& fit) {
  auto est = recover_rotated_params(fit.amplitudes);
  est.psi = fit.psi;
  est.residuals["conic_residual"] = fit.conic_residual;
  for (const auto& f : fit.flags) est.flags.push_back(f);
  return est;
}

}  // namespace polnli
