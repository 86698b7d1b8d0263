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

// Bosonic mode operators written as linear combinations of the six vacuum
// input modes of the interferometer. Only vacuum expectation values of
// quadratic forms are needed, so an operator is fully described by the
// amplitudes of each input annihilator and creator.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string_view>

namespace polnli {

using Complex = std::complex<double>;

enum class ModeLabel : std::size_t {
  a_s = 0,  // signal vacuum at NLC1
  a_i,      // idler vacuum at NLC1
  l_s,      // loss port of the signal control C
  l_i,      // unpopulated polarization entering at WP1
  l_perp,   // loss of the perpendicular sample axis
  l_par,    // loss of the parallel sample axis
};

inline constexpr std::size_t kModeCount = 6;

inline constexpr std::array<ModeLabel, kModeCount> kAllModes = {
    ModeLabel::a_s,  ModeLabel::a_i,    ModeLabel::l_s,
    ModeLabel::l_i,  ModeLabel::l_perp, ModeLabel::l_par};

constexpr std::string_view to_string(ModeLabel m) {
  switch (m) {
    case ModeLabel::a_s: return "a_s";
    case ModeLabel::a_i: return "a_i";
    case ModeLabel::l_s: return "l_s";
    case ModeLabel::l_i: return "l_i";
    case ModeLabel::l_perp: return "l_perp";
    case ModeLabel::l_par: return "l_par";
  }
  return "?";
}

class OperatorExpansion {
 public:
  using Amplitudes = std::array<Complex, kModeCount>;

  /// The zero operator.
  OperatorExpansion() = default;

  OperatorExpansion(const Amplitudes& ann, const Amplitudes& cre) : ann_(ann), cre_(cre) {}

  const Complex& ann(ModeLabel m) const { return ann_[index(m)]; }
  const Complex& cre(ModeLabel m) const { return cre_[index(m)]; }

  const Amplitudes& ann_amplitudes() const { return ann_; }
  const Amplitudes& cre_amplitudes() const { return cre_; }

  bool is_finite() const {
    for (std::size_t k = 0; k < kModeCount; ++k) {
      if (!std::isfinite(ann_[k].real()) || !std::isfinite(ann_[k].imag()) ||
          !std::isfinite(cre_[k].real()) || !std::isfinite(cre_[k].imag())) {
        return false;
      }
    }
    return true;
  }

  friend OperatorExpansion operator+(const OperatorExpansion& x, const OperatorExpansion& y) {
    OperatorExpansion out;
    for (std::size_t k = 0; k < kModeCount; ++k) {
      out.ann_[k] = x.ann_[k] + y.ann_[k];
      out.cre_[k] = x.cre_[k] + y.cre_[k];
    }
    return out;
  }

  friend OperatorExpansion operator*(const Complex& c, const OperatorExpansion& x) {
    OperatorExpansion out;
    for (std::size_t k = 0; k < kModeCount; ++k) {
      out.ann_[k] = c * x.ann_[k];
      out.cre_[k] = c * x.cre_[k];
    }
    return out;
  }

  friend bool operator==(const OperatorExpansion&, const OperatorExpansion&) = default;

 private:
  static constexpr std::size_t index(ModeLabel m) { return static_cast<std::size_t>(m); }

  Amplitudes ann_{};
  Amplitudes cre_{};
};

struct ExpansionTerm {
  Complex coefficient;
  OperatorExpansion expansion;
};

inline OperatorExpansion pure_mode(ModeLabel m) {
  OperatorExpansion::Amplitudes ann{};
  ann[static_cast<std::size_t>(m)] = 1.0;
  return OperatorExpansion(ann, {});
}

/// Hermitian conjugate: annihilators and creators swap, amplitudes conjugate.
inline OperatorExpansion adjoint(const OperatorExpansion& x) {
  OperatorExpansion::Amplitudes ann{};
  OperatorExpansion::Amplitudes cre{};
  for (std::size_t k = 0; k < kModeCount; ++k) {
    ann[k] = std::conj(x.cre_amplitudes()[k]);
    cre[k] = std::conj(x.ann_amplitudes()[k]);
  }
  return OperatorExpansion(ann, cre);
}

inline OperatorExpansion linear_combine(std::span<const ExpansionTerm> terms) {
  if (terms.empty()) {
    throw std::invalid_argument("linear_combine: at least one term is required");
  }
  OperatorExpansion out;
  for (const auto& term : terms) {
    out = out + term.coefficient * term.expansion;
  }
  return out;
}

inline OperatorExpansion linear_combine(std::initializer_list<ExpansionTerm> terms) {
  return linear_combine(std::span<const ExpansionTerm>(terms.begin(), terms.size()));
}

/// <0| x^dagger x |0> = sum_m |cre[m]|^2.
inline double vacuum_photon_number(const OperatorExpansion& x) {
  double n = 0.0;
  for (const auto& c : x.cre_amplitudes()) n += std::norm(c);
  return n;
}

/// [x, x^dagger] - 1. Zero for a canonical mode, -1 for the zero operator.
inline double commutator_defect(const OperatorExpansion& x) {
  double s = 0.0;
  for (const auto& c : x.ann_amplitudes()) s += std::norm(c);
  for (const auto& c : x.cre_amplitudes()) s -= std::norm(c);
  return s - 1.0;
}

}  // namespace polnli
