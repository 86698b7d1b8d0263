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

// Closed-form photon numbers for equal crystal gains. These do not call into
// the operator composer, so agreement between the two is a real cross-check.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "polnli/errors.hpp"
#include "polnli/interferometer.hpp"
#include "polnli/optical_elements.hpp"
#include "polnli/scan_schedule.hpp"

namespace polnli {

/// Everything the closed forms depend on. Phases: phibar/dphi describe the
/// sample, Phibar/dPhi the interferometer (control phase plus waveplates).
struct SignalParameters {
  double V = 0.0;
  double ts_mag = 1.0;
  double tbar = 0.0;
  double dt = 0.0;
  double phibar = 0.0;
  double dphi = 0.0;
  double Phibar = 0.0;
  double dPhi = 0.0;
};

struct BeatingParameters {
  double A = 0.0;
  double Vbar = 0.0;
  double Vdelta = 0.0;
  double phibar = 0.0;
  double dphi = 0.0;
  double Phibar = 0.0;
  double dPhi = 0.0;
};

/// Interferometer phase phi0 = arg(u1 u2 v1 v2* t_s) with real u.
inline double control_phase(const InterferometerConfig& cfg) {
  const double ts_phase = std::abs(cfg.signal.t_s) > 0.0 ? std::arg(cfg.signal.t_s) : 0.0;
  return cfg.gain1.pump_phase - cfg.gain2.pump_phase + ts_phase;
}

/// Requires equal gains. The sample rotation is honored through the rotated
/// waveplate coefficients.
inline SignalParameters signal_parameters(const InterferometerConfig& cfg) {
  if (!cfg.equal_gains()) {
    throw ConfigError("interferometer.gain2.V", "closed-form signals require equal crystal gains");
  }
  const auto wps = rotated_wp_coeffs(waveplate_coeffs(cfg.wp1), waveplate_coeffs(cfg.wp2), cfg.psi);
  const auto s = sample_summary(cfg.sample, wps.wp1, wps.wp2);
  SignalParameters p;
  p.V = cfg.gain1.V;
  p.ts_mag = std::abs(cfg.signal.t_s);
  p.tbar = s.tbar;
  p.dt = s.dt;
  p.phibar = s.phibar;
  p.dphi = s.dphi;
  p.Phibar = control_phase(cfg) + s.Phibar_offset;
  p.dPhi = s.dPhi;
  return p;
}

inline BeatingParameters beating_parameters(const SignalParameters& p) {
  const double ts2 = p.ts_mag * p.ts_mag;
  BeatingParameters b;
  b.A = 2.0 * p.V * (ts2 + 1.0);
  b.Vdelta = p.ts_mag * p.dt / (ts2 + 1.0);
  b.Vbar = 2.0 * p.ts_mag * p.tbar / (ts2 + 1.0);
  b.phibar = p.phibar;
  b.dphi = p.dphi;
  b.Phibar = p.Phibar;
  b.dPhi = p.dPhi;
  return b;
}

inline double n_lowgain(const BeatingParameters& b) {
  const double half_x = 0.5 * (b.dphi + b.dPhi);
  const double y = b.phibar + b.Phibar;
  return 0.5 * b.A *
         (1.0 + b.Vdelta * std::cos(half_x) * std::cos(y) - b.Vbar * std::sin(half_x) * std::sin(y));
}

/// Photon number to first order in V.
inline double n_lowgain(const SignalParameters& p) { return n_lowgain(beating_parameters(p)); }

/// Shift the interferometer phases by the schedule at step t.
inline SignalParameters advance(const SignalParameters& p, const ScanSchedule& s, double t) {
  SignalParameters q = p;
  q.Phibar += s.xi_bar + s.phi0_at(t);
  q.dphi += s.delta_xi + s.delta_at(t);
  return q;
}

inline double n_lowgain_timescan(double t, const ScanSchedule& s, const SignalParameters& p) {
  return n_lowgain(advance(p, s, t));
}

/// Discrete spectrum of an equal-rate scan:
/// N(t) = dc + Re(amp_half e^{i w t/2}) + Re(amp_threehalf e^{i 3 w t/2}).
struct FourierModel {
  double omega_scan = 0.0;
  double dc = 0.0;
  Complex amp_half;
  Complex amp_threehalf;
  Complex epsilon_plus{1.0, 0.0};
  Complex kappa_plus{1.0, 0.0};
};

inline FourierModel fourier_model(const SignalParameters& p, const ScanSchedule& s) {
  if (s.rate_phi0 != s.rate_delta) {
    throw ConfigError("schedule.rate_delta", "the Fourier model needs rate_phi0 == rate_delta");
  }
  const auto b = beating_parameters(p);
  const double x0 = p.dphi + p.dPhi + s.delta_xi;
  const double y0 = p.phibar + p.Phibar + s.xi_bar;
  FourierModel m;
  m.omega_scan = s.rate_phi0;
  m.dc = 0.5 * b.A;
  m.epsilon_plus = std::polar(1.0, y0 - 0.5 * x0 + std::numbers::pi);
  m.kappa_plus = std::polar(1.0, y0 + 0.5 * x0);
  m.amp_half = 0.25 * b.A * (b.Vbar - b.Vdelta) * m.epsilon_plus;
  m.amp_threehalf = 0.25 * b.A * (b.Vbar + b.Vdelta) * m.kappa_plus;
  return m;
}

namespace detail {

// Idler self-interference term |b'_i <- b_i|^2 written with the sample summary.
inline double idler_seed_transmission(const SignalParameters& p) {
  const double half_x = 0.5 * (p.dphi + p.dPhi);
  const double c = std::cos(half_x);
  const double s = std::sin(half_x);
  return 0.25 * p.dt * p.dt * c * c + p.tbar * p.tbar * s * s;
}

}  // namespace detail

/// Photon number including the V^2 terms.
inline double n_highgain(const SignalParameters& p) {
  return n_lowgain(p) * (1.0 + p.V) - p.V * p.V + p.V * p.V * detail::idler_seed_transmission(p);
}

/// Fringe visibility in phibar along dphi + dPhi = pi.
inline double highgain_visibility(const SignalParameters& p) {
  const double ts = p.ts_mag;
  return 2.0 * ts * (1.0 + p.V) * p.tbar / (1.0 + ts * ts * (1.0 + p.V) + p.tbar * p.tbar * p.V);
}

/// Signal arm blocked (t_s = 0): idler-only up-conversion signal.
inline double n_blocked(const SignalParameters& p) {
  return p.V + p.V * p.V * detail::idler_seed_transmission(p);
}

// --- rotated sample, two quarter-wave plate settings ---

struct RotatedParameters {
  double V = 0.0;
  double tbar = 0.0;
  double dt = 0.0;
  double phibar = 0.0;
  double dphi = 0.0;
  double psi = 0.0;
};

struct RotatedAmplitudes {
  double B1 = 0.0;
  double C1 = 0.0;
  double B2 = 0.0;
  double C2 = 0.0;
};

inline RotatedAmplitudes amplitude_relations(double tbar, double dt, double dphi) {
  const double s = std::sin(0.5 * dphi);
  const double c = std::cos(0.5 * dphi);
  return {-0.5 * dt * s, tbar * c, -tbar * s, 0.5 * dt * c};
}

/// Low-gain signal for setting 1 (WP at pi/4 and 3pi/4, psi cancels) or
/// setting 2 (both WP at pi/4, mean phase shifted by -2 psi); |t_s| = 1.
inline double n_rotated(int setting, double phi0, const RotatedParameters& p) {
  const auto a = amplitude_relations(p.tbar, p.dt, p.dphi);
  switch (setting) {
    case 1: {
      const double x = p.phibar + phi0;
      return 2.0 * p.V * (1.0 + a.B1 * std::sin(x) + a.C1 * std::cos(x));
    }
    case 2: {
      const double x = p.phibar + phi0 - 2.0 * p.psi;
      return 2.0 * p.V * (1.0 + a.B2 * std::sin(x) + a.C2 * std::cos(x));
    }
    default:
      throw std::invalid_argument("n_rotated: setting must be 1 or 2");
  }
}

}  // namespace polnli
