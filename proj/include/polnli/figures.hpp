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

// Built-in parameter presets and the gridded data behind each figure.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "polnli/analytic_signals.hpp"
#include "polnli/errors.hpp"
#include "polnli/interferometer.hpp"
#include "polnli/io.hpp"

namespace polnli {

struct NamedTable {
  std::string name;  // file stem
  CsvTable table;
};

namespace presets {

/// Aligned sample between the quarter-wave pair at pi/4, 3pi/4.
inline InterferometerConfig qwp_sample(double V, double perp_mag, double par_mag, double ts_mag = 1.0) {
  InterferometerConfig cfg;
  cfg.gain1 = {V, 0.0};
  cfg.gain2 = {V, 0.0};
  cfg.signal.t_s = {ts_mag, 0.0};
  const auto pair = qwp_inverse_pair();
  cfg.wp1 = pair.wp1;
  cfg.wp2 = pair.wp2;
  cfg.sample = SampleAxes::from_polar(perp_mag, 0.0, par_mag, 0.0);
  return cfg;
}

inline InterferometerConfig fig3a(double V = 1e-3) { return qwp_sample(V, 0.9, 0.9); }
inline InterferometerConfig fig3b(double V = 1e-3) { return qwp_sample(V, 0.9, 0.2); }
inline InterferometerConfig fig4(double V) { return qwp_sample(V, 0.9, 0.8); }
inline InterferometerConfig fig5(double V) { return qwp_sample(V, 0.9, 0.8, 0.0); }

inline RotatedParameters fig6a(double psi = 1.8) { return {1.0, 0.6, 0.6, 0.0, 0.0, psi}; }
inline RotatedParameters fig6b(double psi = 1.8) {
  return {1.0, 0.6, 0.0, 0.0, 0.5 * std::numbers::pi, psi};
}

inline const std::vector<double>& fig5b_gains() {
  static const std::vector<double> v = {0.5, 1.0, 2.0};
  return v;
}

}  // namespace presets

namespace detail {

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
  return out;
}

// Sample summary of cfg with the combined phases dphi + dPhi = x and
// phibar + Phibar = y.
inline SignalParameters at_phases(const InterferometerConfig& cfg, double x, double y) {
  auto p = signal_parameters(cfg);
  p.dphi = x;
  p.dPhi = 0.0;
  p.phibar = y;
  p.Phibar = 0.0;
  return p;
}

inline NamedTable lowgain_map(const char* name, const InterferometerConfig& cfg) {
  NamedTable out{name, {{"dphi_plus_dPhi", "phibar_plus_Phibar", "N_over_V"}, {}}};
  const double V = cfg.gain1.V;
  for (double x : linspace(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi, 121)) {
    for (double y : linspace(0.0, 2.0 * std::numbers::pi, 61)) {
      out.table.rows.push_back({x, y, n_lowgain(at_phases(cfg, x, y)) / V});
    }
  }
  return out;
}

// N_hg against gain and one phase, the other phase held on its dashed line.
inline NamedTable highgain_map(const char* name, bool scan_mean_phase) {
  NamedTable out{name, {{"V", scan_mean_phase ? "phibar_plus_Phibar" : "dphi_plus_dPhi", "N", "N_over_V"}, {}}};
  auto gains = linspace(0.0, 2.0, 41);
  gains.front() = 1e-6;
  for (double V : gains) {
    const auto cfg = presets::fig4(V);
    for (double phase : linspace(0.0, 4.0 * std::numbers::pi, 161)) {
      const auto p = scan_mean_phase ? at_phases(cfg, std::numbers::pi, phase)
                                     : at_phases(cfg, phase, std::numbers::pi);
      const double n = n_highgain(p);
      out.table.rows.push_back({V, phase, n, n / V});
    }
  }
  return out;
}

}  // namespace detail

inline const std::vector<std::string_view>& figure_ids() {
  static const std::vector<std::string_view> ids = {"fig3a", "fig3b", "fig4a", "fig4b", "fig5b", "fig6"};
  return ids;
}

/// Tables for one figure id. Throws ConfigError for an unknown id.
inline std::vector<NamedTable> figure_tables(std::string_view id) {
  using detail::linspace;
  if (id == "fig3a") return {detail::lowgain_map("fig3a", presets::fig3a())};
  if (id == "fig3b") return {detail::lowgain_map("fig3b", presets::fig3b())};
  if (id == "fig4a") return {detail::highgain_map("fig4a", true)};
  if (id == "fig4b") return {detail::highgain_map("fig4b", false)};
  if (id == "fig5b") {
    std::vector<NamedTable> out;
    for (double V : presets::fig5b_gains()) {
      NamedTable t{"fig5b_V" + format_double(V), {{"dphi_plus_dPhi", "N"}, {}}};
      const auto cfg = presets::fig5(V);
      for (double x : linspace(0.0, 4.0 * std::numbers::pi, 161)) {
        t.table.rows.push_back({x, n_blocked(detail::at_phases(cfg, x, 0.0))});
      }
      out.push_back(std::move(t));
    }
    return out;
  }
  if (id == "fig6") {
    const auto phi0 = linspace(0.0, 2.0 * std::numbers::pi, 201);
    std::vector<NamedTable> out;
    for (const char row : {'a', 'b'}) {
      NamedTable t{std::string("fig6") + row + "_lines", {{"phi0", "N1", "N2_psi_1.8", "N2_psi_3.5"}, {}}};
      const auto p1 = row == 'a' ? presets::fig6a(1.8) : presets::fig6b(1.8);
      const auto p2 = row == 'a' ? presets::fig6a(3.5) : presets::fig6b(3.5);
      for (double x : phi0) {
        t.table.rows.push_back({x, n_rotated(1, x, p1), n_rotated(2, x, p1), n_rotated(2, x, p2)});
      }
      out.push_back(std::move(t));
    }
    for (double psi : {1.8, 3.5}) {
      NamedTable t{"fig6_ellipse_psi_" + format_double(psi), {{"phi0", "N1_a", "N2_a", "N1_b", "N2_b"}, {}}};
      const auto pa = presets::fig6a(psi);
      const auto pb = presets::fig6b(psi);
      for (double x : phi0) {
        t.table.rows.push_back(
            {x, n_rotated(1, x, pa), n_rotated(2, x, pa), n_rotated(1, x, pb), n_rotated(2, x, pb)});
      }
      out.push_back(std::move(t));
    }
    return out;
  }
  throw ConfigError("figure", "unknown figure id '" + std::string(id) + "'");
}

}  // namespace polnli
