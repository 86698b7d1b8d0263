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

// Exact composition of the interferometer: NLC1 -> (C | WP1 -> sample axes
// -> WP2) -> NLC2. The detected signal mode is built by operator
// substitution, so it holds at any parametric gain.

#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "polnli/errors.hpp"
#include "polnli/mode_algebra.hpp"
#include "polnli/optical_elements.hpp"

namespace polnli {

struct InterferometerConfig {
  CrystalGain gain1;
  CrystalGain gain2;
  SignalControl signal;
  WaveplateSetting wp1;
  WaveplateSetting wp2;
  SampleAxes sample;
  double psi = 0.0;  // sample rotation against the initial idler polarization
  bool equal_gain_check = false;

  bool equal_gains() const { return gain1.V == gain2.V; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

namespace detail {

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Transmission magnitudes may exceed one by rounding only.
inline constexpr double kTransmissionSlack = 1e-12;

inline void check_gain(const CrystalGain& g, const std::string& key) {
  if (!finite(g.V) || g.V < 0.0) throw ConfigError(key + ".V", "must be finite and >= 0");
  if (!finite(g.pump_phase)) throw ConfigError(key + ".pump_phase", "must be finite");
}

inline void check_transmission(const Complex& t, const std::string& key) {
  if (!finite(t)) throw ConfigError(key, "must be finite");
  if (std::abs(t) > 1.0 + kTransmissionSlack) throw ConfigError(key, "magnitude must be <= 1");
}

}  // namespace detail

inline void InterferometerConfig::validate() const {
  detail::check_gain(gain1, "interferometer.gain1");
  detail::check_gain(gain2, "interferometer.gain2");
  detail::check_transmission(signal.t_s, "interferometer.signal.t_mag");
  if (!detail::finite(wp1.gamma)) throw ConfigError("interferometer.wp1.gamma", "must be finite");
  if (!detail::finite(wp1.theta)) throw ConfigError("interferometer.wp1.theta", "must be finite");
  if (!detail::finite(wp2.gamma)) throw ConfigError("interferometer.wp2.gamma", "must be finite");
  if (!detail::finite(wp2.theta)) throw ConfigError("interferometer.wp2.theta", "must be finite");
  detail::check_transmission(sample.t_perp, "interferometer.sample.t_perp_mag");
  detail::check_transmission(sample.t_par, "interferometer.sample.t_par_mag");
  if (!detail::finite(psi)) throw ConfigError("interferometer.psi", "must be finite");
  if (equal_gain_check && !equal_gains()) {
    throw ConfigError("interferometer.gain2.V", "equal_gain_check requires gain1.V == gain2.V");
  }
}

/// Every complex coefficient of the chain, with the sample rotation already
/// folded into the waveplates.
struct ChainCoefficients {
  Complex u1, v1, u2, v2;
  Complex t_s, r_s;
  WaveplateCoeffs wp1, wp2;
  Complex t_perp, r_perp;
  Complex t_par, r_par;
};

inline ChainCoefficients resolve_chain(const InterferometerConfig& cfg) {
  const auto wps = rotated_wp_coeffs(waveplate_coeffs(cfg.wp1), waveplate_coeffs(cfg.wp2), cfg.psi);
  ChainCoefficients c;
  c.u1 = cfg.gain1.u();
  c.v1 = cfg.gain1.v();
  c.u2 = cfg.gain2.u();
  c.v2 = cfg.gain2.v();
  c.t_s = cfg.signal.t_s;
  c.r_s = cfg.signal.r_s();
  c.wp1 = wps.wp1;
  c.wp2 = wps.wp2;
  c.t_perp = cfg.sample.t_perp;
  c.r_perp = cfg.sample.r_perp();
  c.t_par = cfg.sample.t_par;
  c.r_par = cfg.sample.r_par();
  return c;
}

/// The detected output mode d_s expressed in the vacuum inputs.
inline OperatorExpansion detected_mode(const ChainCoefficients& c) {
  using M = ModeLabel;
  const auto a_s = pure_mode(M::a_s);
  const auto a_i = pure_mode(M::a_i);
  const auto l_s = pure_mode(M::l_s);
  const auto l_i = pure_mode(M::l_i);
  const auto l_perp = pure_mode(M::l_perp);
  const auto l_par = pure_mode(M::l_par);

  // NLC1
  const auto b_s = linear_combine({{c.u1, a_s}, {c.v1, adjoint(a_i)}});
  const auto b_i = linear_combine({{c.u1, a_i}, {c.v1, adjoint(a_s)}});
  // signal control C
  const auto b_s_prime = linear_combine({{c.t_s, b_s}, {c.r_s, l_s}});
  // WP1
  const auto c_perp = linear_combine({{c.wp1.tau, b_i}, {c.wp1.rho, l_i}});
  const auto c_par = linear_combine({{-std::conj(c.wp1.rho), b_i}, {std::conj(c.wp1.tau), l_i}});
  // sample axes
  const auto c_perp_prime = linear_combine({{c.t_perp, c_perp}, {c.r_perp, l_perp}});
  const auto c_par_prime = linear_combine({{c.t_par, c_par}, {c.r_par, l_par}});
  // WP2, keeping only the original idler polarization
  const auto b_i_prime = linear_combine({{c.wp2.tau, c_perp_prime}, {c.wp2.rho, c_par_prime}});
  // NLC2
  return linear_combine({{c.u2, b_s_prime}, {c.v2, adjoint(b_i_prime)}});
}

inline OperatorExpansion detected_mode(const InterferometerConfig& cfg) {
  return detected_mode(resolve_chain(cfg));
}

struct OutputCoefficients {
  Complex alpha_s, alpha_i;
  Complex beta_s, beta_i, beta_perp, beta_par;

  /// |alpha_s|^2 - |alpha_i|^2 + |beta_s|^2 - |beta_i|^2 - |beta_perp|^2 - |beta_par|^2 - 1
  double commutator_defect() const {
    return std::norm(alpha_s) - std::norm(alpha_i) + std::norm(beta_s) - std::norm(beta_i) -
           std::norm(beta_perp) - std::norm(beta_par) - 1.0;
  }

  double photon_number() const {
    return std::norm(alpha_i) + std::norm(beta_i) + std::norm(beta_perp) + std::norm(beta_par);
  }
};

inline OutputCoefficients output_coefficients(const OperatorExpansion& d_s) {
  using M = ModeLabel;
  return {d_s.ann(M::a_s),  d_s.cre(M::a_i),    d_s.ann(M::l_s),
          d_s.cre(M::l_i),  d_s.cre(M::l_perp), d_s.cre(M::l_par)};
}

inline OutputCoefficients output_coefficients(const ChainCoefficients& c) {
  return output_coefficients(detected_mode(c));
}

inline OutputCoefficients output_coefficients(const InterferometerConfig& cfg) {
  return output_coefficients(detected_mode(cfg));
}

inline double photon_number_exact(const ChainCoefficients& c) {
  return vacuum_photon_number(detected_mode(c));
}

inline double photon_number_exact(const InterferometerConfig& cfg) {
  return photon_number_exact(resolve_chain(cfg));
}

/// The three additive contributions to alpha_i: signal path through C, and
/// idler paths through the perpendicular and parallel sample axes.
struct PathAmplitudes {
  Complex signal;
  Complex perp;
  Complex par;

  Complex sum() const { return signal + perp + par; }
};

inline PathAmplitudes three_path_decomposition(const ChainCoefficients& c) {
  PathAmplitudes p;
  p.signal = c.u2 * c.t_s * c.v1;
  p.perp = c.v2 * std::conj(c.wp2.tau * c.t_perp * c.wp1.tau * c.u1);
  p.par = -c.v2 * std::conj(c.wp2.rho * c.t_par * std::conj(c.wp1.rho) * c.u1);
  return p;
}

inline PathAmplitudes three_path_decomposition(const InterferometerConfig& cfg) {
  return three_path_decomposition(resolve_chain(cfg));
}

}  // namespace polnli
