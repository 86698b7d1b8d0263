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
#include <numbers>

#include "polnli/mode_algebra.hpp"

namespace polnli {

/// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

/// Parametric down-conversion in one crystal. V = |v|^2 is the mean number
/// of generated photons per mode; the pump phase lives entirely in v.
struct CrystalGain {
  double V = 0.0;
  double pump_phase = 0.0;

  Complex u() const { return {std::sqrt(1.0 + V), 0.0}; }
  Complex v() const { return std::polar(std::sqrt(V), pump_phase); }
};

struct WaveplateSetting {
  double gamma = 0.0;  // axis orientation
  double theta = 0.0;  // retardation
};

/// SU(2) coefficients of a waveplate, M = [[tau, rho], [-rho*, tau*]].
struct WaveplateCoeffs {
  Complex tau{1.0, 0.0};
  Complex rho{0.0, 0.0};
};

inline WaveplateCoeffs waveplate_coeffs(const WaveplateSetting& w) {
  const double c = std::cos(w.gamma);
  const double s = std::sin(w.gamma);
  const Complex tau = c * c * std::polar(1.0, -0.5 * w.theta) + s * s * std::polar(1.0, 0.5 * w.theta);
  const Complex rho{0.0, std::sin(2.0 * w.gamma) * std::sin(0.5 * w.theta)};
  return {tau, rho};
}

inline constexpr WaveplateSetting quarter_wave(double gamma) {
  return {gamma, std::numbers::pi / 2.0};
}

struct WaveplatePair {
  WaveplateSetting wp1;
  WaveplateSetting wp2;
};

/// Two quarter-wave plates at pi/4 and 3pi/4: WP2 undoes WP1. Used for
/// calibration and as the first rotated-sample setting.
inline constexpr WaveplatePair qwp_inverse_pair() {
  return {quarter_wave(std::numbers::pi / 4.0), quarter_wave(3.0 * std::numbers::pi / 4.0)};
}

/// Two aligned quarter-wave plates at pi/4 (second rotated-sample setting;
/// without a sample this is the erasure configuration).
inline constexpr WaveplatePair qwp_aligned_pair() {
  return {quarter_wave(std::numbers::pi / 4.0), quarter_wave(std::numbers::pi / 4.0)};
}

struct RotatedWaveplates {
  WaveplateCoeffs wp1;
  WaveplateCoeffs wp2;
};

/// Fold a sample rotation psi into the two waveplates: WP1 -> R(psi) WP1 and
/// WP2 -> WP2 R(-psi).
inline RotatedWaveplates rotated_wp_coeffs(const WaveplateCoeffs& wp1, const WaveplateCoeffs& wp2,
                                           double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  RotatedWaveplates out;
  out.wp1.tau = wp1.tau * c + std::conj(wp1.rho) * s;
  out.wp1.rho = -std::conj(wp1.tau) * s + wp1.rho * c;
  out.wp2.tau = wp2.tau * c - wp2.rho * s;
  out.wp2.rho = wp2.tau * s + wp2.rho * c;
  return out;
}

inline RotatedWaveplates rotated_wp_coeffs(const WaveplateSetting& w1, const WaveplateSetting& w2,
                                           double psi) {
  return rotated_wp_coeffs(waveplate_coeffs(w1), waveplate_coeffs(w2), psi);
}

/// Complex transmissions of the two sample axes. Loss ports are completed
/// with real nonnegative reflection amplitudes.
struct SampleAxes {
  Complex t_perp{1.0, 0.0};
  Complex t_par{1.0, 0.0};

  static SampleAxes removed() { return {}; }

  static SampleAxes from_polar(double perp_mag, double perp_phase, double par_mag, double par_phase) {
    return {std::polar(perp_mag, perp_phase), std::polar(par_mag, par_phase)};
  }

  /// Axes with given mean phase and retardance.
  static SampleAxes from_mean_and_retardance(double perp_mag, double par_mag, double phibar,
                                             double dphi) {
    return from_polar(perp_mag, phibar + 0.5 * dphi, par_mag, phibar - 0.5 * dphi);
  }

  double r_perp() const { return std::sqrt(std::max(0.0, 1.0 - std::norm(t_perp))); }
  double r_par() const { return std::sqrt(std::max(0.0, 1.0 - std::norm(t_par))); }
  double phi_perp() const { return std::arg(t_perp); }
  double phi_par() const { return std::arg(t_par); }
};

/// Beam splitter C in the signal arm. t_s = 0 blocks the arm.
struct SignalControl {
  Complex t_s{1.0, 0.0};

  double r_s() const { return std::sqrt(std::max(0.0, 1.0 - std::norm(t_s))); }
};

/// Path amplitudes below this are treated as absent.
inline constexpr double kDegeneratePathAmplitude = 1e-14;

/// Mean/differential transmission and phase of the idler arm as seen by the
/// detected mode.
struct SampleSummary {
  double tbar = 0.0;
  double dt = 0.0;
  double phibar = 0.0;
  double dphi = 0.0;
  double phi_tau = 0.0;
  double phi_rho = 0.0;
  double dPhi = 0.0;
  double Phibar_offset = 0.0;  // (phi_tau + phi_rho)/2; add phi0 to get Phibar
  bool perp_path_degenerate = false;
  bool par_path_degenerate = false;
};

inline SampleSummary sample_summary(const SampleAxes& sample, const WaveplateCoeffs& wp1,
                                    const WaveplateCoeffs& wp2) {
  SampleSummary s;
  const Complex tau_path = wp2.tau * wp1.tau;
  const Complex rho_path = wp2.rho * std::conj(wp1.rho);
  const double perp_amp = std::abs(tau_path) * std::abs(sample.t_perp);
  const double par_amp = std::abs(rho_path) * std::abs(sample.t_par);

  s.tbar = perp_amp + par_amp;
  s.dt = 2.0 * (perp_amp - par_amp);
  s.phibar = 0.5 * (sample.phi_perp() + sample.phi_par());
  s.dphi = sample.phi_perp() - sample.phi_par();

  s.perp_path_degenerate = std::abs(tau_path) < kDegeneratePathAmplitude;
  s.par_path_degenerate = std::abs(rho_path) < kDegeneratePathAmplitude;
  s.phi_tau = s.perp_path_degenerate ? 0.0 : std::arg(tau_path);
  s.phi_rho = s.par_path_degenerate ? 0.0 : std::arg(rho_path);
  s.dPhi = s.phi_tau - s.phi_rho;
  s.Phibar_offset = 0.5 * (s.phi_tau + s.phi_rho);
  return s;
}

}  // namespace polnli
