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

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "polnli/errors.hpp"

namespace polnli {

struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd std_error;  // from sigma^2 (X^T X)^{-1}
  double residual_rms = 0.0;
  double sigma = 0.0;  // residual scale with n - p degrees of freedom
};

/// Ordinary least squares. Throws NumericError on a rank-deficient design.
inline LinearFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto n = X.rows();
  const auto p = X.cols();
  if (n < p) throw NumericError("least_squares: fewer observations than parameters");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) throw NumericError("least_squares: rank-deficient design matrix");

  LinearFit fit;
  fit.coef = qr.solve(y);
  const Eigen::VectorXd r = y - X * fit.coef;
  const double ss = r.squaredNorm();
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
  fit.sigma = n > p ? std::sqrt(ss / static_cast<double>(n - p)) : 0.0;
  const Eigen::MatrixXd cov = (X.transpose() * X).inverse();
  fit.std_error = fit.sigma * cov.diagonal().cwiseSqrt();
  return fit;
}

struct HarmonicTerm {
  double multiplier = 0.0;  // the regressor phase is multiplier * x
  std::complex<double> amplitude;
  double std_error = 0.0;  // per quadrature
};

struct HarmonicFit {
  double dc = 0.0;
  double dc_std_error = 0.0;
  std::vector<HarmonicTerm> terms;
  double residual_rms = 0.0;
};

/// Fit y_j ~ dc + sum_k Re(Z_k exp(i m_k x_j)). Z_k = a_k - i b_k for the
/// cosine/sine coefficients a_k, b_k.
inline HarmonicFit fit_harmonics(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> multipliers) {
  if (x.size() != y.size()) throw NumericError("fit_harmonics: x and y differ in length");
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto k = static_cast<Eigen::Index>(multipliers.size());
  Eigen::MatrixXd X(n, 1 + 2 * k);
  Eigen::VectorXd Y(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    X(j, 0) = 1.0;
    for (Eigen::Index h = 0; h < k; ++h) {
      const double phase = multipliers[static_cast<std::size_t>(h)] * x[static_cast<std::size_t>(j)];
      X(j, 1 + 2 * h) = std::cos(phase);
      X(j, 2 + 2 * h) = std::sin(phase);
    }
    Y(j) = y[static_cast<std::size_t>(j)];
  }
  const auto lin = least_squares(X, Y);

  HarmonicFit out;
  out.dc = lin.coef(0);
  out.dc_std_error = lin.std_error(0);
  out.residual_rms = lin.residual_rms;
  for (Eigen::Index h = 0; h < k; ++h) {
    HarmonicTerm t;
    t.multiplier = multipliers[static_cast<std::size_t>(h)];
    t.amplitude = {lin.coef(1 + 2 * h), -lin.coef(2 + 2 * h)};
    const double ea = lin.std_error(1 + 2 * h);
    const double eb = lin.std_error(2 + 2 * h);
    t.std_error = std::sqrt(0.5 * (ea * ea + eb * eb));
    out.terms.push_back(t);
  }
  return out;
}

template <int P>
struct LmResult {
  Eigen::Matrix<double, P, 1> params;
  double sse = 0.0;
  int iterations = 0;
};

/// Levenberg-Marquardt for small fixed-size parameter vectors. `model(p, r, J)`
/// fills residuals r (length n) and the Jacobian J (n x P) at p.
template <int P, class Model>
LmResult<P> levenberg_marquardt(Model&& model, Eigen::Matrix<double, P, 1> p, int max_iter = 200) {
  using Vec = Eigen::Matrix<double, P, 1>;
  using Mat = Eigen::Matrix<double, P, P>;
  Eigen::VectorXd r;
  Eigen::Matrix<double, Eigen::Dynamic, P> J;
  Eigen::VectorXd r_try;
  Eigen::Matrix<double, Eigen::Dynamic, P> J_try;

  model(p, r, J);
  double sse = r.squaredNorm();
  double lambda = 1e-3;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Mat A = J.transpose() * J;
    const Vec g = J.transpose() * r;
    bool accepted = false;
    Vec step = Vec::Zero();
    while (lambda < 1e16) {
      Mat damped = A;
      damped.diagonal() += lambda * A.diagonal().cwiseMax(1e-300);
      step = damped.ldlt().solve(-g);
      const Vec p_try = p + step;
      model(p_try, r_try, J_try);
      const double sse_try = r_try.squaredNorm();
      if (std::isfinite(sse_try) && sse_try <= sse) {
        p = p_try;
        r.swap(r_try);
        J.swap(J_try);
        sse = sse_try;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || step.norm() <= 1e-15 * (1.0 + p.norm())) break;
  }
  return {p, sse, it};
}

}  // namespace polnli
