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

// Parameter recovery from measured series: harmonic regression for the
// dual-rate Fourier protocol, sinusoid fits for the two rotated-sample
// waveplate settings, and the algebraic inversion of their amplitudes.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polnli/analytic_signals.hpp"
#include "polnli/errors.hpp"
#include "polnli/least_squares.hpp"
#include "polnli/optical_elements.hpp"
#include "polnli/scan_experiment.hpp"

namespace polnli {

struct SampleEstimate {
  double t_perp = 0.0;
  double t_par = 0.0;
  double tbar = 0.0;
  double dt = 0.0;
  std::optional<double> phibar;
  double dphi = 0.0;
  std::optional<double> psi;
  std::map<std::string, double> residuals;
  std::vector<std::string> flags;

  bool has_flag(std::string_view f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
  }
};

/// Flags marking a parameter the data could not fix. Estimates carrying one
/// are still reported but count as failures at the command line.
inline bool is_unidentifiable_flag(std::string_view f) {
  return f == "psi_unidentifiable" || f == "dt_sign_unidentifiable" || f == "par_axis_dark" ||
         f == "perp_axis_dark";
}

/// Reduce a sample rotation to [0, pi); a half turn maps the sample onto itself.
inline double wrap_half_turn(double psi) {
  double r = std::fmod(psi, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  if (r >= std::numbers::pi) r -= std::numbers::pi;
  return r;
}

// --- Fourier protocol ---

struct HarmonicComponent {
  double frequency = 0.0;  // rad/step
  Complex amplitude;       // cosine-phase amplitude: term is Re(amplitude e^{i f t})
  double std_error = 0.0;
};

struct HarmonicDecomposition {
  double omega_scan = 0.0;
  double dc = 0.0;
  double dc_std_error = 0.0;
  std::vector<HarmonicComponent> harmonics;  // [omega/2, 3 omega/2]
  double residual_rms = 0.0;

  const HarmonicComponent& half() const { return harmonics.at(0); }
  const HarmonicComponent& three_half() const { return harmonics.at(1); }
};

/// Least-squares fit of counts(step) at the beat frequencies omega/2 and
/// 3 omega/2. The series must span at least one beat period 4 pi / omega.
inline HarmonicDecomposition harmonic_regress(const TimeSeries& series, double omega_scan) {
  if (!(omega_scan > 0.0) || !std::isfinite(omega_scan)) {
    throw NumericError("harmonic_regress: scan rate must be positive");
  }
  const auto steps = series.column(&ScanRecord::step);
  if (steps.size() < 5) throw NumericError("harmonic_regress: series too short");
  const double span = steps.back() - steps.front() + 1.0;
  if (span * omega_scan < 4.0 * std::numbers::pi * (1.0 - 1e-9)) {
    throw NumericError("harmonic_regress: series shorter than one beat period");
  }
  const double multipliers[] = {0.5 * omega_scan, 1.5 * omega_scan};
  const auto fit = fit_harmonics(steps, series.column(&ScanRecord::counts), multipliers);

  HarmonicDecomposition d;
  d.omega_scan = omega_scan;
  d.dc = fit.dc;
  d.dc_std_error = fit.dc_std_error;
  d.residual_rms = fit.residual_rms;
  for (const auto& t : fit.terms) d.harmonics.push_back({t.multiplier, t.amplitude, t.std_error});
  return d;
}

/// Common rate of the two commanded phase columns. Throws NumericError when
/// the signal and idler arms were scanned at different rates.
inline double equal_scan_rate(const TimeSeries& series) {
  if (series.size() < 2) throw NumericError("scan rate: series too short");
  const auto& first = series.records.front();
  const auto& last = series.records.back();
  const double steps = static_cast<double>(last.step - first.step);
  if (steps <= 0.0) throw NumericError("scan rate: steps must increase");
  const double r0 = (last.phi0 - first.phi0) / steps;
  const double rd = (last.delta_phase - first.delta_phase) / steps;
  if (std::abs(r0 - rd) > 1e-12 * (1.0 + std::abs(r0))) {
    throw NumericError("scan rate: signal and idler arms must be scanned at the same rate");
  }
  return r0;
}

struct ScanOffsets {
  double xi_bar = 0.0;
  double delta_xi = 0.0;
};

/// Read the sample off the beat spectrum. Assumes |t_s| = 1 and the
/// quarter-wave pair at pi/4, 3pi/4, where the omega/2 peak carries the
/// parallel axis and the 3 omega/2 peak the perpendicular axis.
inline SampleEstimate extract_sample_fourier(const HarmonicDecomposition& d, double A_hat,
                                             const ScanOffsets& offsets) {
  if (!(A_hat > 0.0)) throw NumericError("extract_sample_fourier: beating amplitude must be > 0");
  SampleEstimate est;

  auto magnitude = [&](const HarmonicComponent& h, const char* flag) {
    double t = 4.0 * std::abs(h.amplitude) / A_hat;
    if (t > 1.05) est.flags.emplace_back(flag);
    return std::min(t, 1.0);
  };
  est.t_par = magnitude(d.half(), "t_par_out_of_range");
  est.t_perp = magnitude(d.three_half(), "t_perp_out_of_range");

  // A peak indistinguishable from zero carries no phase.
  auto dark = [&](const HarmonicComponent& h) {
    return std::abs(h.amplitude) <= std::max(3.0 * h.std_error, 1e-12 * std::abs(d.dc));
  };
  const bool par_dark = dark(d.half());
  const bool perp_dark = dark(d.three_half());

  // kappa_+ = exp(i (phi_perp + xi_bar + delta_xi/2)), eps_+ = exp(i (phi_par + xi_bar - delta_xi/2))
  double phi_perp = std::arg(d.three_half().amplitude) - offsets.xi_bar - 0.5 * offsets.delta_xi;
  double phi_par = std::arg(d.half().amplitude) - offsets.xi_bar + 0.5 * offsets.delta_xi;
  if (par_dark && perp_dark) {
    throw UnidentifiableError("no_beating", "neither beat peak rises above the noise");
  }
  if (par_dark) {
    est.flags.emplace_back("par_axis_dark");
    phi_par = phi_perp;
  } else if (perp_dark) {
    est.flags.emplace_back("perp_axis_dark");
    phi_perp = phi_par;
  }

  est.dphi = wrap_angle(phi_perp - phi_par);
  est.phibar = wrap_angle(phi_par + 0.5 * est.dphi);
  est.tbar = 0.5 * (est.t_perp + est.t_par);
  est.dt = est.t_perp - est.t_par;
  est.residuals["harmonic_rms_relative"] = d.residual_rms / std::abs(d.dc);
  return est;
}

// --- rotated sample ---

/// Fit of counts = offset [1 + B sin(x) + C cos(x)], x = reference + phi0.
/// Only amplitude and phase of the fringe are observable: with no reference
/// given, the gauge B = 0 is used and phase_reference is the fitted phase.
struct SinusoidFit {
  double offset = 0.0;
  double B = 0.0;
  double C = 0.0;
  double phase_reference = 0.0;
  double amplitude = 0.0;  // sqrt(B^2 + C^2)
  double phase = 0.0;      // counts = offset [1 + amplitude cos(phi0 + phase)]
  double amplitude_std_error = 0.0;
  double residual_rms = 0.0;  // relative to offset
};

inline SinusoidFit fit_sinusoid(const TimeSeries& series,
                                std::optional<double> reference = std::nullopt) {
  const auto phi0 = series.column(&ScanRecord::phi0);
  if (phi0.size() < 8) throw NumericError("fit_sinusoid: need at least 8 samples");
  if (!detail::held_fixed(series.column(&ScanRecord::delta_phase))) {
    throw NumericError("fit_sinusoid: only phi0 may be scanned");
  }
  const double rate = (phi0.back() - phi0.front()) / static_cast<double>(phi0.size() - 1);
  if (std::abs(rate) > std::numbers::pi / 4.0 + 1e-12) {
    throw NumericError("fit_sinusoid: under-sampled, fewer than 8 points per period");
  }
  if (std::abs(rate) * static_cast<double>(phi0.size()) < 2.0 * std::numbers::pi * (1.0 - 1e-9)) {
    throw NumericError("fit_sinusoid: scan shorter than one period");
  }

  const double one[] = {1.0};
  const auto fit = fit_harmonics(phi0, series.column(&ScanRecord::counts), one);
  if (!(fit.dc > 0.0)) throw NumericError("fit_sinusoid: mean level must be positive");

  SinusoidFit out;
  out.offset = fit.dc;
  const Complex z = fit.terms.front().amplitude / fit.dc;
  out.amplitude = std::abs(z);
  out.phase = out.amplitude > 0.0 ? std::arg(z) : 0.0;
  out.amplitude_std_error = fit.terms.front().std_error / fit.dc;
  out.residual_rms = fit.residual_rms / fit.dc;
  out.phase_reference = reference.value_or(out.phase);
  out.C = out.amplitude * std::cos(out.phase - out.phase_reference);
  out.B = -out.amplitude * std::sin(out.phase - out.phase_reference);
  return out;
}

/// Invert B1 = -(dt/2) sin(dphi/2), C1 = tbar cos(dphi/2),
/// B2 = -tbar sin(dphi/2), C2 = (dt/2) cos(dphi/2).
/// dphi is returned in (-pi, pi]; for C1 < 0 the fit gauge is flipped so
/// tbar > 0, which shifts dphi by 2 pi and the mean phase by pi.
inline SampleEstimate recover_rotated_params(const RotatedAmplitudes& a) {
  if (std::hypot(a.C1, a.B2) < 1e-14) {
    throw UnidentifiableError("tbar_unidentifiable", "C1 and B2 both vanish");
  }
  SampleEstimate est;
  const double sign = a.C1 < 0.0 ? -1.0 : 1.0;
  if (sign < 0.0) est.flags.emplace_back("c1_negative_flipped");

  double dphi = a.C1 != 0.0 ? -2.0 * std::atan(a.B2 / a.C1) : std::numbers::pi;
  est.dphi = wrap_angle(dphi);
  est.tbar = std::hypot(a.C1, a.B2);

  const double c2 = sign * a.C2;
  if (c2 == 0.0) {
    est.dt = 2.0 * std::abs(a.B1);
    if (a.B1 != 0.0) est.flags.emplace_back("dt_sign_unidentifiable");
  } else {
    est.dt = 2.0 * std::copysign(std::hypot(c2, a.B1), c2);
  }
  est.t_perp = est.tbar + 0.5 * est.dt;
  est.t_par = est.tbar - 0.5 * est.dt;

  const auto back = amplitude_relations(est.tbar, est.dt, est.dphi);
  est.residuals["amplitude_consistency"] =
      std::max({std::abs(back.B1 - sign * a.B1), std::abs(back.C1 - sign * a.C1),
                std::abs(back.B2 - sign * a.B2), std::abs(back.C2 - sign * a.C2)});
  return est;
}

/// Prior on the rotated sample. The two fringes fix only their amplitudes
/// and phases; one of these assumptions (or a known mean phase) closes the
/// system.
enum class SampleClass {
  isotropic_phase,  // dphi = 0
  isotropic_loss,   // dt = 0
  general,          // needs the mean phase from elsewhere
};

namespace detail {

// Axis naming: rotating the sample by pi/2 maps (dt, dphi, psi) to
// (-dt, -dphi, psi + pi/2). The perpendicular axis is taken as the more
// transmissive one, or the one with the larger phase when dt = 0.
inline bool canonical_axes(const SampleEstimate& e) {
  constexpr double tol = 1e-12;
  if (std::abs(e.dt) > tol) return e.dt > 0.0;
  return e.dphi >= -tol;
}

inline bool physical(const SampleEstimate& e) {
  constexpr double tol = 1e-9;
  return e.t_perp <= 1.0 + tol && e.t_par >= -tol && e.t_par <= 1.0 + tol && e.t_perp >= -tol;
}

}  // namespace detail

/// Combine the setting-1 (WP at pi/4, 3pi/4) and setting-2 (both at pi/4)
/// fits. Phases of both fits refer to the commanded phi0; xi_bar is the
/// calibrated signal-arm offset. mean_phase is used only for
/// SampleClass::general.
inline SampleEstimate solve_two_setting(const SinusoidFit& s1, const SinusoidFit& s2,
                                        SampleClass cls, std::optional<double> mean_phase = {},
                                        double xi_bar = 0.0) {
  const double R1 = s1.amplitude;
  const double R2 = s2.amplitude;
  const double th1 = s1.phase;
  const double th2 = s2.phase;
  const double weak2 = std::max(3.0 * s2.amplitude_std_error, 1e-12);

  if (cls == SampleClass::isotropic_phase || cls == SampleClass::isotropic_loss) {
    RotatedAmplitudes a;
    double two_psi = 0.0;
    if (cls == SampleClass::isotropic_phase) {
      a = {0.0, R1, 0.0, R2};
      two_psi = th1 - th2;
    } else {
      a = {0.0, R1, -R2, 0.0};
      two_psi = th1 - th2 + 0.5 * std::numbers::pi;
    }
    auto est = recover_rotated_params(a);
    est.phibar = wrap_angle(th1 - xi_bar);
    est.psi = wrap_half_turn(0.5 * two_psi);
    if (R2 <= weak2) est.flags.emplace_back("psi_unidentifiable");
    return est;
  }

  if (!mean_phase) {
    throw UnidentifiableError("mean_phase_required",
                              "a general rotated sample needs the mean phase as input");
  }
  const double ref = *mean_phase + xi_bar;
  const double B1 = -R1 * std::sin(th1 - ref);
  const double C1 = R1 * std::cos(th1 - ref);

  // (B2, C2) lie on the circle of radius R2 with B2 C2 = B1 C1.
  double s = R2 > 0.0 ? 2.0 * B1 * C1 / (R2 * R2) : 0.0;
  bool inconsistent = std::abs(s) > 1.0 + 1e-6;
  s = std::clamp(s, -1.0, 1.0);
  const double beta_a = 0.5 * std::asin(s);
  const double roots[] = {beta_a, 0.5 * std::numbers::pi - beta_a};

  std::vector<SampleEstimate> candidates;
  for (double beta : roots) {
    for (double twin : {0.0, std::numbers::pi}) {
      const double b = beta + twin;
      const RotatedAmplitudes a{B1, C1, R2 * std::sin(b), R2 * std::cos(b)};
      SampleEstimate est;
      try {
        est = recover_rotated_params(a);
      } catch (const UnidentifiableError&) {
        continue;
      }
      if (!detail::canonical_axes(est)) continue;
      // N2 phase: th2 = ref - 2 psi - atan2(B2, C2)
      est.psi = wrap_half_turn(0.5 * (ref - std::atan2(a.B2, a.C2) - th2));
      est.phibar = wrap_angle(*mean_phase + (est.has_flag("c1_negative_flipped") ? std::numbers::pi : 0.0));
      candidates.push_back(est);
    }
  }
  if (candidates.empty()) throw UnidentifiableError("tbar_unidentifiable", "no admissible solution");

  std::vector<SampleEstimate> admissible;
  for (const auto& c : candidates) {
    if (detail::physical(c)) admissible.push_back(c);
  }
  auto& pool = admissible.empty() ? candidates : admissible;
  std::sort(pool.begin(), pool.end(), [](const SampleEstimate& x, const SampleEstimate& y) {
    return std::abs(x.dphi) < std::abs(y.dphi);
  });
  SampleEstimate best = pool.front();
  if (pool.size() > 1 && (std::abs(pool[1].dphi - best.dphi) > 1e-9 ||
                          std::abs(pool[1].dt - best.dt) > 1e-9)) {
    best.flags.emplace_back("retardance_root_ambiguity");
  }
  if (admissible.empty()) best.flags.emplace_back("unphysical_transmission");
  if (inconsistent) best.flags.emplace_back("amplitude_inconsistency");
  return best;
}

}  // namespace polnli
