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

#include "polnli/analytic_signals.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "polnli/interferometer.hpp"
#include "polnli/least_squares.hpp"
#include "test_support.hpp"

namespace polnli {
namespace {

using testing::kPi;

// Extremes of the exact photon number over a full turn of the control phase.
std::pair<double, double> control_phase_extremes(InterferometerConfig cfg, int n = 720) {
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < n; ++k) {
    cfg.signal.t_s = std::polar(std::abs(cfg.signal.t_s), 2 * kPi * k / n);
    const double v = photon_number_exact(cfg);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

TEST(LowGainTest, VisibilityFromExactComposer) {
  // dphi = 0 puts dphi + dPhi on the -pi line for the quarter-wave pair.
  const auto [lo, hi] = control_phase_extremes(testing::qwp_config(1e-6, 0.9, 0.9, 0.0, 0.0));
  EXPECT_NEAR((hi - lo) / (hi + lo), 0.9, 1e-5);
  const auto p = signal_parameters(testing::qwp_config(1e-6, 0.9, 0.9, 0.0, 0.0));
  EXPECT_NEAR(beating_parameters(p).Vbar, 0.9, 1e-15);
}

TEST(LowGainTest, NoDiattenuationNoRetardanceIsFlat) {
  SignalParameters p{0.2, 1.0, 0.7, 0.0, 0.3, 0.0, 0.0, 0.0};
  for (double y : {0.0, 0.5, 2.0}) {
    p.Phibar = y;
    EXPECT_DOUBLE_EQ(n_lowgain(p), 0.5 * beating_parameters(p).A);
  }
}

TEST(LowGainTest, ZeroGain) {
  const SignalParameters p{0.0, 1.0, 0.7, 0.2, 0.3, 0.4, 0.5, 0.6};
  EXPECT_EQ(n_lowgain(p), 0.0);
}

TEST(LowGainTest, BeatingParameterDefinitions) {
  const SignalParameters p{0.5, 0.8, 0.55, 0.7, 0.0, 0.0, 0.0, 0.0};
  const auto b = beating_parameters(p);
  EXPECT_DOUBLE_EQ(b.A, 2 * 0.5 * (0.64 + 1));
  EXPECT_DOUBLE_EQ(b.Vbar, 2 * 0.8 * 0.55 / 1.64);
  EXPECT_DOUBLE_EQ(b.Vdelta, 0.8 * 0.7 / 1.64);
}

TEST(LowGainTest, LinearInGainLimit) {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 20; ++k) {
    auto cfg = testing::random_config(rng, true);
    cfg.psi = 0.0;
    std::vector<double> err;
    for (double V : {1e-3, 1e-4, 1e-5}) {
      cfg.gain1.V = cfg.gain2.V = V;
      const double n = photon_number_exact(cfg);
      err.push_back(std::abs(n - n_lowgain(signal_parameters(cfg))) / V);
    }
    if (err[0] < 1e-9) continue;  // second-order term happens to vanish
    EXPECT_NEAR(err[0] / err[1], 10.0, 0.1);
    EXPECT_NEAR(err[1] / err[2], 10.0, 0.1);
  }
}

TEST(TimeScanTest, CalibrationSignalReducesToTwoCosines) {
  const double V = 0.01;
  const auto p = signal_parameters(testing::qwp_config(V, 1.0, 1.0, 0.0, 0.0));
  const ScanSchedule s{0.7, 1.1, 0.05, 0.03, 100};
  for (int t = 0; t < 100; ++t) {
    const double expected = 2 * V * (1 + std::cos((1.1 + 0.03 * t) / 2) * std::cos(0.7 + 0.05 * t));
    EXPECT_NEAR(n_lowgain_timescan(t, s, p), expected, 1e-15);
  }
}

TEST(TimeScanTest, NoRatesIsConstant) {
  const auto p = signal_parameters(testing::qwp_config(0.01, 0.9, 0.2, 0.4, 0.9));
  const ScanSchedule s{0.3, -0.2, 0.0, 0.0, 16};
  for (int t = 0; t < 16; ++t) EXPECT_EQ(n_lowgain_timescan(t, s, p), n_lowgain_timescan(0, s, p));
}

TEST(TimeScanTest, GridMatchesPointwiseModel) {
  const auto base = signal_parameters(testing::qwp_config(0.01, 0.9, 0.2, 0.0, 0.0));
  const ScanSchedule s{0.0, 0.0, 0.1, 0.07, 64};
  for (int i = 0; i < 16; ++i) {
    for (int t = 0; t < 64; t += 7) {
      auto p = base;
      p.phibar = 0.2 * i;
      auto q = p;
      q.Phibar += 0.1 * t;
      q.dphi += 0.07 * t;
      EXPECT_NEAR(n_lowgain_timescan(t, s, p), n_lowgain(q), 1e-16);
    }
  }
}

TEST(FourierModelTest, MatchesDiscreteRegression) {
  const auto p = signal_parameters(testing::qwp_config(0.01, 0.9, 0.2, 0.4, 0.9));
  const double w = 2 * kPi / 50;
  const ScanSchedule s{0.3, -1.2, w, w, 400};  // four beat periods
  std::vector<double> t, n;
  for (int k = 0; k < 400; ++k) {
    t.push_back(k);
    n.push_back(n_lowgain_timescan(k, s, p));
  }
  const double mult[] = {w / 2, 3 * w / 2};
  const auto fit = fit_harmonics(t, n, mult);
  const auto m = fourier_model(p, s);
  EXPECT_NEAR(fit.dc, m.dc, 1e-15);
  EXPECT_LT(std::abs(fit.terms[0].amplitude - m.amp_half), 1e-15);
  EXPECT_LT(std::abs(fit.terms[1].amplitude - m.amp_threehalf), 1e-15);
  EXPECT_NEAR(std::abs(m.amp_threehalf) / std::abs(m.amp_half), 4.5, 1e-12);
  EXPECT_NEAR(std::abs(m.epsilon_plus), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(m.kappa_plus), 1.0, 1e-12);
}

TEST(FourierModelTest, SymmetricAxesShareThePhase) {
  const double phibar = 0.6;
  const auto p = signal_parameters(testing::qwp_config(0.01, 0.7, 0.7, phibar, 0.0));
  const auto m = fourier_model(p, {0.0, 0.0, 0.1, 0.1, 100});
  EXPECT_NEAR(testing::angle_diff(std::arg(m.kappa_plus), phibar), 0.0, 1e-14);
  EXPECT_NEAR(testing::angle_diff(std::arg(m.epsilon_plus), phibar), 0.0, 1e-14);
}

TEST(FourierModelTest, DarkParallelAxis) {
  const auto p = signal_parameters(testing::qwp_config(0.01, 0.7, 0.0, 0.1, 0.0));
  EXPECT_LT(std::abs(fourier_model(p, {0.0, 0.0, 0.1, 0.1, 100}).amp_half), 1e-18);
}

TEST(FourierModelTest, RejectsUnequalRates) {
  const auto p = signal_parameters(testing::qwp_config(0.01, 0.7, 0.5, 0.1, 0.0));
  EXPECT_THROW(fourier_model(p, {0.0, 0.0, 0.1, 0.2, 100}), ConfigError);
}

TEST(HighGainTest, VisibilityBound) {
  for (double ts : {0.5, 1.0}) {
    for (double tbar : {0.2, 0.85}) {
      SignalParameters p{0.0, ts, tbar, 0.0, 0.0, 0.0, 0.0, 0.0};
      const double vbar = beating_parameters(p).Vbar;
      EXPECT_NEAR(highgain_visibility(p), vbar, 1e-15);
      for (double V : {0.1, 1.0, 3.0, 10.0}) {
        p.V = V;
        EXPECT_GE(highgain_visibility(p), vbar);
      }
    }
  }
}

// Along dphi + dPhi = pi the high-gain signal is a pure sinusoid in the mean
// phase whose visibility is the closed form.
TEST(HighGainTest, VisibilityMatchesExactFringe) {
  for (double V : {0.1, 1.0, 3.0}) {
    // dphi = 0 puts dphi + dPhi on the -pi line, which carries the same fringe.
    const auto cfg = testing::qwp_config(V, 0.9, 0.8, 0.0, 0.0);
    const auto [lo, hi] = control_phase_extremes(cfg);
    EXPECT_NEAR((hi - lo) / (hi + lo), highgain_visibility(signal_parameters(cfg)), 1e-5);
  }
}

TEST(HighGainTest, BlockedSignalAgainstComposer) {
  auto cfg = testing::qwp_config(1.0, 0.9, 0.8, 0.0, 0.0);
  cfg.signal.t_s = 0.0;
  const auto p = signal_parameters(cfg);
  EXPECT_NEAR(p.tbar, 0.85, 1e-15);
  EXPECT_NEAR(p.dt, 0.1, 1e-15);
  EXPECT_NEAR(n_blocked(p), 1.7225, 1e-12);
  EXPECT_NEAR(n_blocked(p), photon_number_exact(cfg), 1e-12);
}

TEST(HighGainTest, BlockedScalesLinearlyAtLowGain) {
  SignalParameters p{0.0, 0.0, 0.85, 0.1, 0.0, 1.0, 0.0, 0.0};
  for (double V : {1e-2, 1e-4, 1e-6}) {
    p.V = V;
    EXPECT_NEAR(n_blocked(p) / V, 1.0, 2 * V);
  }
  // fringe amplitude in dphi grows as V^2
  auto amplitude = [&](double V) {
    p.V = V;
    p.dphi = 0.0;
    const double a = n_blocked(p);
    p.dphi = kPi;
    return std::abs(a - n_blocked(p));
  };
  EXPECT_NEAR(amplitude(2.0) / amplitude(1.0), 4.0, 1e-12);
}

TEST(HighGainTest, DecompositionOfClosedForms) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0), a(-kPi, kPi), g(0.0, 5.0);
  for (int k = 0; k < 500; ++k) {
    const double tbar = u(rng);
    const SignalParameters p{g(rng), u(rng), tbar, (2 * u(rng) - 1) * tbar, a(rng), a(rng), a(rng), a(rng)};
    const double lhs = n_highgain(p);
    const double rhs = n_lowgain(p) * (1 + p.V) + n_blocked(p) - p.V * (p.V + 1);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(RotatedSignalTest, SettingOneIgnoresRotation) {
  const RotatedParameters a{1.0, 0.6, 0.6, 0.3, 0.2, 1.8};
  auto b = a;
  b.psi = 3.5;
  for (int k = 0; k < 50; ++k) {
    EXPECT_EQ(n_rotated(1, 0.1 * k, a), n_rotated(1, 0.1 * k, b));
  }
}

TEST(RotatedSignalTest, SettingTwoCovariance) {
  const RotatedParameters a{1.0, 0.5, 0.3, 0.3, 0.7, 1.1};
  auto b = a;
  const double d = 0.37;
  b.psi += d;
  for (int k = 0; k < 50; ++k) {
    EXPECT_NEAR(n_rotated(2, 0.1 * k + 2 * d, b), n_rotated(2, 0.1 * k, a), 1e-14);
  }
  EXPECT_THROW(n_rotated(3, 0.0, a), std::invalid_argument);
}

TEST(RotatedSignalTest, AmplitudesWithoutRetardance) {
  const auto a = amplitude_relations(0.6, 0.6, 0.0);
  EXPECT_EQ(a.B1, 0.0);
  EXPECT_EQ(a.B2, 0.0);
  EXPECT_DOUBLE_EQ(a.C1, 0.6);
  EXPECT_DOUBLE_EQ(a.C2, 0.3);
}

TEST(RotatedSignalTest, FigureSixExtrema) {
  const RotatedParameters p{1.0, 0.6, 0.6, 0.0, 0.0, 1.8};
  double lo1 = 1e9, hi1 = -1e9, lo2 = 1e9, hi2 = -1e9;
  for (int k = 0; k < 3600; ++k) {
    const double x = 2 * kPi * k / 3600;
    lo1 = std::min(lo1, n_rotated(1, x, p));
    hi1 = std::max(hi1, n_rotated(1, x, p));
    lo2 = std::min(lo2, n_rotated(2, x, p));
    hi2 = std::max(hi2, n_rotated(2, x, p));
  }
  EXPECT_NEAR((hi1 - lo1) / 4, 0.6, 1e-6);
  EXPECT_NEAR((hi2 - lo2) / 4, 0.3, 1e-6);
}

// The two settings against the exact composer with the sample rotated.
TEST(RotatedSignalTest, MatchesComposerAtLowGain) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0), a(-kPi, kPi);
  const double V = 1e-8;
  for (int k = 0; k < 50; ++k) {
    const double perp = u(rng), par = u(rng), phibar = a(rng), dphi = 0.9 * a(rng), psi = a(rng);
    const RotatedParameters p{V, 0.5 * (perp + par), perp - par, phibar, dphi, psi};
    for (int setting : {1, 2}) {
      InterferometerConfig cfg = testing::qwp_config(V, perp, par, phibar, dphi);
      const auto pair = setting == 1 ? qwp_inverse_pair() : qwp_aligned_pair();
      cfg.wp1 = pair.wp1;
      cfg.wp2 = pair.wp2;
      cfg.psi = psi;
      for (double phi0 : {0.0, 1.0, 2.5, -2.0}) {
        cfg.signal.t_s = std::polar(1.0, phi0);
        EXPECT_NEAR(photon_number_exact(cfg) / V, n_rotated(setting, phi0, p) / V, 1e-6)
            << "setting " << setting << " draw " << k;
      }
    }
  }
}

}  // namespace
}  // namespace polnli
