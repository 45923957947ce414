// Copyright 2026 The grwm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>

#include "grwm/errors.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

/// Collapse constants. Lengths are in simulation length units, rates in
/// inverse simulation time units. The physical defaults (alpha = 1e-7 m,
/// lambda = 1e-16 1/s) make jumps unobservable on desk-scale runs, so
/// experiments use `amplified()` and the factor is carried along for reporting.
struct CollapseParameters {
  double alpha_length = 1e-7;
  double lambda_base = 1e-16;
  double reference_mass = 1.0;      // m0: nucleon mass
  double rate_mass_exponent = 1.0;  // lambda_k ~ (m_k / m0)^exponent
  double csl_gamma = 0.0;
  double noise_amplitude = 1.0;  // 1 = noise strength consistent with csl_gamma
  double time_unit_scale = 1.0;  // physical seconds per simulation time unit (metadata)
  double lambda_amplification = 1.0;

  void validate() const {
    if (!(alpha_length > 0.0)) throw ParameterError("alpha_length must be > 0");
    if (!(lambda_base >= 0.0)) throw ParameterError("lambda_base must be >= 0");
    if (!(reference_mass > 0.0)) throw ParameterError("reference_mass must be > 0");
    if (!std::isfinite(rate_mass_exponent)) throw ParameterError("rate_mass_exponent must be finite");
    if (!(csl_gamma >= 0.0)) throw ParameterError("csl_gamma must be >= 0");
    if (!(noise_amplitude >= 0.0)) throw ParameterError("noise_amplitude must be >= 0");
    if (!(time_unit_scale > 0.0)) throw ParameterError("time_unit_scale must be > 0");
    if (!(lambda_amplification > 0.0)) throw ParameterError("lambda_amplification must be > 0");
  }

  /// Copy with lambda_base multiplied by `factor`; the factor is accumulated
  /// in lambda_amplification.
  CollapseParameters amplified(double factor) const {
    if (!(factor > 0.0)) throw ParameterError("amplification factor must be > 0");
    CollapseParameters out = *this;
    out.lambda_base *= factor;
    out.lambda_amplification *= factor;
    return out;
  }

  friend bool operator==(const CollapseParameters&, const CollapseParameters&) = default;
};

/// lambda_base * (mass / reference_mass)^rate_mass_exponent.
inline double effective_rate(const ParticleSpec& particle, const CollapseParameters& params) {
  return params.lambda_base *
         std::pow(particle.mass / params.reference_mass, params.rate_mass_exponent);
}

inline constexpr double kElectronMassRatio = 1.0 / 1836.15267343;  // m_e / m_p

}  // namespace grwm
