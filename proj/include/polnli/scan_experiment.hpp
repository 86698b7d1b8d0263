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
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "polnli/analytic_signals.hpp"
#include "polnli/errors.hpp"
#include "polnli/interferometer.hpp"
#include "polnli/least_squares.hpp"
#include "polnli/scan_schedule.hpp"

namespace polnli {

enum class GainRegime { exact, lowgain };

enum class NoiseMode { noiseless, poisson };

struct NoiseModel {
  double counts_per_unit_N = 1.0;  // detector integration scale
  std::uint64_t seed = 0;
  NoiseMode mode = NoiseMode::noiseless;

  void validate() const {
    if (!(counts_per_unit_N > 0.0) || !std::isfinite(counts_per_unit_N)) {
      throw ConfigError("noise.counts_per_unit_N", "must be finite and > 0");
    }
  }
};

/// One measurement. phi0 and delta_phase are the commanded scan phases
/// (rate * step); the hidden offsets of the schedule are not recorded.
struct ScanRecord {
  std::int64_t step = 0;
  double phi0 = 0.0;
  double delta_phase = 0.0;
  double expected_N = 0.0;
  double counts = 0.0;

  friend bool operator==(const ScanRecord&, const ScanRecord&) = default;
};

struct TimeSeries {
  std::vector<ScanRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  template <class Field>
  std::vector<double> column(Field ScanRecord::*field) const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(static_cast<double>(r.*field));
    return out;
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

/// Configuration seen at step t: the signal-arm scan multiplies t_s by a
/// phase, the differential scan splits its phase symmetrically over the two
/// sample axes so the mean phase is untouched.
inline InterferometerConfig config_at_step(const InterferometerConfig& cfg, const ScanSchedule& s,
                                           double t) {
  InterferometerConfig out = cfg;
  out.signal.t_s *= std::polar(1.0, s.xi_bar + s.phi0_at(t));
  const double d = s.delta_xi + s.delta_at(t);
  out.sample.t_perp *= std::polar(1.0, 0.5 * d);
  out.sample.t_par *= std::polar(1.0, -0.5 * d);
  return out;
}

inline TimeSeries simulate_scan(const InterferometerConfig& cfg, const ScanSchedule& schedule,
                                const NoiseModel& noise, GainRegime regime) {
  cfg.validate();
  schedule.validate();
  noise.validate();

  SignalParameters lowgain_params;
  if (regime == GainRegime::lowgain) lowgain_params = signal_parameters(cfg);

  std::mt19937_64 rng(noise.seed);
  TimeSeries series;
  series.records.reserve(static_cast<std::size_t>(schedule.n_samples));
  for (std::int64_t step = 0; step < schedule.n_samples; ++step) {
    const double t = static_cast<double>(step);
    ScanRecord rec;
    rec.step = step;
    rec.phi0 = schedule.phi0_at(t);
    rec.delta_phase = schedule.delta_at(t);
    rec.expected_N = regime == GainRegime::exact
                         ? photon_number_exact(config_at_step(cfg, schedule, t))
                         : n_lowgain_timescan(t, schedule, lowgain_params);
    const double mean = std::max(0.0, rec.expected_N * noise.counts_per_unit_N);
    if (noise.mode == NoiseMode::noiseless) {
      rec.counts = rec.expected_N * noise.counts_per_unit_N;
    } else if (mean > 0.0) {
      std::poisson_distribution<std::int64_t> draw(mean);
      rec.counts = static_cast<double>(draw(rng));
    }
    series.records.push_back(rec);
  }
  return series;
}

/// Sample removed, quarter-wave plates at pi/4 and 3pi/4, lossless signal arm.
inline InterferometerConfig calibration_config(const InterferometerConfig& base) {
  InterferometerConfig cfg = base;
  const auto pair = qwp_inverse_pair();
  cfg.wp1 = pair.wp1;
  cfg.wp2 = pair.wp2;
  cfg.sample = SampleAxes::removed();
  cfg.signal.t_s = {1.0, 0.0};
  cfg.psi = 0.0;
  return cfg;
}

inline ScanSchedule signal_calibration_schedule(ScanSchedule s) {
  s.rate_delta = 0.0;
  return s;
}

inline ScanSchedule idler_calibration_schedule(ScanSchedule s) {
  s.rate_phi0 = 0.0;
  return s;
}

struct CalibrationResult {
  double xi_bar = 0.0;    // (-pi, pi]
  double delta_xi = 0.0;  // (-pi, pi]; (xi_bar + pi, delta_xi + 2 pi) is the same state
  double scale = 0.0;     // fitted mean counts, 2 V kappa
  double signal_fringe = 0.0;
  double idler_fringe = 0.0;
  double residual_rms = 0.0;
};

namespace detail {

inline bool held_fixed(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo <= 1e-12 * (1.0 + std::abs(*hi));
}

// Minimum usable fringe: five standard errors, and never below 1e-9 of the
// mean level so noiseless data with a vanishing fringe are still rejected.
inline double fringe_floor(const HarmonicFit& fit) {
  return std::max(5.0 * fit.terms.front().std_error, 1e-9 * std::abs(fit.dc));
}

}  // namespace detail

/// Recover the scan offsets from two no-sample scans: one scanning only the
/// signal arm, one scanning only the differential idler phase. The model
/// counts = s [1 + cos((delta_xi + delta)/2) cos(xi_bar + phi0)] is fitted
/// jointly to both series.
inline CalibrationResult calibrate(const TimeSeries& signal_scan, const TimeSeries& idler_scan) {
  if (signal_scan.size() < 8 || idler_scan.size() < 8) {
    throw NumericError("calibrate: each scan needs at least 8 samples");
  }
  const auto sig_phi0 = signal_scan.column(&ScanRecord::phi0);
  const auto sig_delta = signal_scan.column(&ScanRecord::delta_phase);
  const auto sig_counts = signal_scan.column(&ScanRecord::counts);
  const auto idl_phi0 = idler_scan.column(&ScanRecord::phi0);
  const auto idl_delta = idler_scan.column(&ScanRecord::delta_phase);
  const auto idl_counts = idler_scan.column(&ScanRecord::counts);
  if (!detail::held_fixed(sig_delta)) {
    throw NumericError("calibrate: the signal scan must hold the differential phase fixed");
  }
  if (!detail::held_fixed(idl_phi0)) {
    throw NumericError("calibrate: the idler scan must hold the signal-arm phase fixed");
  }

  const double one[] = {1.0};
  const double half[] = {0.5};
  const auto sig_fit = fit_harmonics(sig_phi0, sig_counts, one);
  const auto idl_fit = fit_harmonics(idl_delta, idl_counts, half);
  const Complex z_sig = sig_fit.terms.front().amplitude;
  const Complex z_idl = idl_fit.terms.front().amplitude;
  if (std::abs(z_sig) < detail::fringe_floor(sig_fit)) {
    throw UnidentifiableError("uncalibratable", "signal-arm fringe is below the noise floor");
  }
  if (std::abs(z_idl) < detail::fringe_floor(idl_fit)) {
    throw UnidentifiableError("uncalibratable", "idler-arm fringe is below the noise floor");
  }

  // Stack both scans: columns (phi0, delta, counts).
  const std::size_t n = signal_scan.size() + idler_scan.size();
  std::vector<double> phi0(sig_phi0), delta(sig_delta), counts(sig_counts);
  phi0.insert(phi0.end(), idl_phi0.begin(), idl_phi0.end());
  delta.insert(delta.end(), idl_delta.begin(), idl_delta.end());
  counts.insert(counts.end(), idl_counts.begin(), idl_counts.end());

  using Vec3 = Eigen::Matrix<double, 3, 1>;
  auto model = [&](const Vec3& p, Eigen::VectorXd& r, Eigen::Matrix<double, Eigen::Dynamic, 3>& J) {
    r.resize(static_cast<Eigen::Index>(n));
    J.resize(static_cast<Eigen::Index>(n), 3);
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = static_cast<Eigen::Index>(j);
      const double ch = std::cos(p(2) + 0.5 * delta[j]);
      const double sh = std::sin(p(2) + 0.5 * delta[j]);
      const double cx = std::cos(p(1) + phi0[j]);
      const double sx = std::sin(p(1) + phi0[j]);
      r(row) = p(0) * (1.0 + ch * cx) - counts[j];
      J(row, 0) = 1.0 + ch * cx;
      J(row, 1) = -p(0) * ch * sx;
      J(row, 2) = -p(0) * sh * cx;
    }
  };

  // Starting point from the harmonic phases, plus a coarse grid to escape
  // the wrong sign branch when one fringe is weak.
  const double scale0 = 0.5 * (sig_fit.dc + idl_fit.dc);
  const double p0_fixed = idl_phi0.front();
  const double xi0 = std::arg(z_sig);
  const double sign = std::cos(xi0 + p0_fixed) >= 0.0 ? 1.0 : -1.0;
  const double h0 = std::arg(sign * z_idl);
  std::vector<Vec3> starts = {Vec3(scale0, xi0, h0)};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      starts.emplace_back(scale0, 0.5 * std::numbers::pi * a, 0.25 * std::numbers::pi * b);
    }
  }
  LmResult<3> best;
  best.params = starts.front();
  best.sse = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    const auto res = levenberg_marquardt<3>(model, s);
    if (res.sse < best.sse) best = res;
  }

  double xi = best.params(1);
  double h = wrap_angle(best.params(2));
  if (std::abs(h) > 0.5 * std::numbers::pi) {
    h -= std::copysign(std::numbers::pi, h);
    xi += std::numbers::pi;
  }
  CalibrationResult out;
  out.xi_bar = wrap_angle(xi);
  out.delta_xi = 2.0 * h;
  out.scale = best.params(0);
  out.signal_fringe = std::abs(z_sig);
  out.idler_fringe = std::abs(z_idl);
  out.residual_rms = std::sqrt(best.sse / static_cast<double>(n));
  return out;
}

}  // namespace polnli
