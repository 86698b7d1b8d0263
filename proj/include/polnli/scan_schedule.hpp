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

#include <cmath>
#include <cstdint>

#include "polnli/errors.hpp"

namespace polnli {

/// Phase-scan plan. Time is the dimensionless step index; rates are radians
/// per step. At step t the signal-arm phase is advanced by
/// xi_bar + rate_phi0 * t and the retardance by delta_xi + rate_delta * t.
/// The offsets model the unknown interferometer state at t = 0.
struct ScanSchedule {
  double xi_bar = 0.0;
  double delta_xi = 0.0;
  double rate_phi0 = 0.0;
  double rate_delta = 0.0;
  std::int64_t n_samples = 8;

  void validate() const {
    if (!std::isfinite(xi_bar)) throw ConfigError("schedule.xi_bar", "must be finite");
    if (!std::isfinite(delta_xi)) throw ConfigError("schedule.delta_xi", "must be finite");
    if (!std::isfinite(rate_phi0)) throw ConfigError("schedule.rate_phi0", "must be finite");
    if (!std::isfinite(rate_delta)) throw ConfigError("schedule.rate_delta", "must be finite");
    if (n_samples < 8) throw ConfigError("schedule.n_samples", "must be >= 8");
  }

  /// Commanded (offset-free) signal-arm phase at step t.
  double phi0_at(double t) const { return rate_phi0 * t; }
  /// Commanded (offset-free) differential phase at step t.
  double delta_at(double t) const { return rate_delta * t; }
};

}  // namespace polnli
