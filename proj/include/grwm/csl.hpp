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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "grwm/branch_state.hpp"
#include "grwm/errors.hpp"
#include "grwm/parameters.hpp"
#include "grwm/rng.hpp"
#include "grwm/unitary.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

/// Discrete white noise for one time step: one value per cell with mean 0 and
/// variance 1 / (cell_width * step_width).
struct NoiseField {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  double step_width = 0.0;

  static NoiseField draw(std::span<const double> cell_widths, double dt, Rng& rng,
                         std::uint64_t seed = 0, std::uint64_t step = 0) {
    if (!(dt > 0.0)) throw ParameterError("NoiseField: dt must be > 0");
    NoiseField n{{}, seed, step, dt};
    n.values.reserve(cell_widths.size());
    for (double w : cell_widths) n.values.push_back(standard_normal(rng) / std::sqrt(w * dt));
    return n;
  }

  static NoiseField draw(const SpatialGrid& grid, double dt, Rng& rng, std::uint64_t seed = 0,
                         std::uint64_t step = 0) {
    const std::vector<double> widths(grid.cell_count(), grid.cell_width());
    return draw(widths, dt, rng, seed, step);
  }

  static NoiseField silent(std::size_t cells, double dt) {
    return {std::vector<double>(cells, 0.0), 0, 0, dt};
  }
};

// The continuous collapse equation is integrated in its linear form
//
//   d phi = [ -i H dt + a sum_j A_j o dB_j - g sum_j A_j^2 dt ] phi,
//
// with A_j = (mass in cell j) / sqrt(w_j), a = noise_amplitude * sqrt(gamma) / m0
// and g = gamma / m0^2, then renormalized. The Hamiltonian part is one
// unitary_step (Lie splitting); the diagonal part is applied exactly for a
// frozen increment, phi_c *= exp(sum_j a mu_cj dB_j - g mu_cj^2 dt).
//
// The increment is dB_j = sqrt(w_j) V_j dt + 2 a <A_j> dt: the raw white noise
// shifted by the current mean mass. With noise_amplitude = 1 this is the
// Girsanov-cooked measure under which the renormalized solution reproduces
// Born statistics and branch weights are martingales.

namespace detail {

struct CslCoefficients {
  double a = 0.0;
  double g = 0.0;
  bool active() const { return a != 0.0 || g != 0.0; }
};

inline CslCoefficients csl_coefficients(const CollapseParameters& p) {
  return {p.noise_amplitude * std::sqrt(p.csl_gamma) / p.reference_mass,
          p.csl_gamma / (p.reference_mass * p.reference_mass)};
}

inline std::vector<double> multiply_normalized_exponentials(std::vector<double> exponents) {
  const double top = *std::max_element(exponents.begin(), exponents.end());
  for (auto& e : exponents) e = std::exp(e - top);
  return exponents;
}

}  // namespace detail

inline WaveFunction csl_step(const WaveFunction& psi, const NoiseField& noise, double dt,
                             const CollapseParameters& params,
                             const Hamiltonian& hamiltonian = Hamiltonian::zero()) {
  if (!(dt > 0.0)) throw ParameterError("csl_step: dt must be > 0");
  const auto& grid = psi.grid();
  const std::size_t L = grid.cell_count();
  if (noise.values.size() != L) throw ParameterError("csl_step: noise field does not match grid");

  WaveFunction evolved = unitary_step(psi, hamiltonian, dt);
  const auto coeff = detail::csl_coefficients(params);
  if (!coeff.active()) return evolved;

  const double sqrt_w = std::sqrt(grid.cell_width());
  std::vector<double> mean_a(L, 0.0);
  for (std::size_t k = 0; k < evolved.particle_count(); ++k) {
    const auto rho = marginal_density(evolved, k);
    const double m = evolved.particles()[k].mass;
    for (std::size_t j = 0; j < L; ++j) mean_a[j] += m * rho[j] * grid.cell_width() / sqrt_w;
  }
  std::vector<double> increment(L);
  for (std::size_t j = 0; j < L; ++j) {
    increment[j] = sqrt_w * noise.values[j] * dt + 2.0 * coeff.a * mean_a[j] * dt;
  }

  const std::size_t n = evolved.particle_count();
  const auto amps_in = evolved.amplitudes();
  std::vector<double> exponents(amps_in.size());
  for (std::size_t flat = 0; flat < amps_in.size(); ++flat) {
    const auto idx = evolved.decode(flat);
    double e = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      bool seen = false;
      for (std::size_t q = 0; q < k; ++q) seen = seen || idx[q] == idx[k];
      if (seen) continue;
      double cell_mass = 0.0;
      for (std::size_t q = k; q < n; ++q) {
        if (idx[q] == idx[k]) cell_mass += evolved.particles()[q].mass;
      }
      const double mu = cell_mass / sqrt_w;
      e += coeff.a * mu * increment[idx[k]] - coeff.g * mu * mu * dt;
    }
    exponents[flat] = e;
  }
  const auto factors = detail::multiply_normalized_exponentials(std::move(exponents));
  std::vector<Complex> amps(amps_in.begin(), amps_in.end());
  double norm2 = 0.0;
  for (std::size_t flat = 0; flat < amps.size(); ++flat) {
    amps[flat] *= factors[flat];
    norm2 += std::norm(amps[flat]);
  }
  if (!(norm2 > 1e-300)) throw ZeroStateError("csl_step: norm underflow");
  return WaveFunction::normalize(std::move(amps), grid,
                                 {evolved.particles().begin(), evolved.particles().end()},
                                 evolved.time());
}

/// Branch-level version: regions play the role of cells.
inline BranchState csl_step(const BranchState& state, const NoiseField& noise, double dt,
                            const CollapseParameters& params) {
  if (!(dt > 0.0)) throw ParameterError("csl_step: dt must be > 0");
  const auto& regions = state.regions();
  if (noise.values.size() != regions.size()) {
    throw ParameterError("csl_step: noise field does not match region list");
  }
  const auto coeff = detail::csl_coefficients(params);
  if (!coeff.active()) return state.with_time(state.time() + dt);

  const auto weights = state.weights();
  std::vector<double> sqrt_w(regions.size());
  for (std::size_t r = 0; r < regions.size(); ++r) sqrt_w[r] = std::sqrt(regions[r].width);
  std::vector<double> increment(regions.size());
  for (std::size_t r = 0; r < regions.size(); ++r) {
    double mean_mass = 0.0;
    for (std::size_t b = 0; b < weights.size(); ++b) {
      mean_mass += weights[b] * state.particle_mass() *
                   static_cast<double>(state.branches()[b].occupancy[r]);
    }
    increment[r] = sqrt_w[r] * noise.values[r] * dt + 2.0 * coeff.a * (mean_mass / sqrt_w[r]) * dt;
  }
  std::vector<double> exponents(weights.size(), 0.0);
  for (std::size_t b = 0; b < weights.size(); ++b) {
    for (std::size_t r = 0; r < regions.size(); ++r) {
      const double mu = state.particle_mass() *
                        static_cast<double>(state.branches()[b].occupancy[r]) / sqrt_w[r];
      exponents[b] += coeff.a * mu * increment[r] - coeff.g * mu * mu * dt;
    }
  }
  const auto factors = detail::multiply_normalized_exponentials(std::move(exponents));
  std::vector<Complex> amps;
  amps.reserve(weights.size());
  for (std::size_t b = 0; b < weights.size(); ++b) {
    amps.push_back(state.branches()[b].amplitude * factors[b]);
  }
  return state.with_amplitudes(amps).with_time(state.time() + dt);
}

}  // namespace grwm
