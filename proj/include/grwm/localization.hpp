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
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "grwm/branch_state.hpp"
#include "grwm/errors.hpp"
#include "grwm/parameters.hpp"
#include "grwm/rng.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

struct JumpEvent {
  double time = 0.0;
  std::size_t particle = 0;
  double center = 0.0;
  std::vector<double> pre_jump_branch_weights;
};

/// Amplitude multiplier exp(-(x - c)^2 / (4 alpha^2)); its square is a
/// Gaussian of standard deviation alpha.
inline double localization_factor(double x, double center, double alpha) {
  const double d = x - center;
  return std::exp(-d * d / (4.0 * alpha * alpha));
}

/// Multiplies particle k's coordinate by the localization Gaussian and renormalizes.
inline WaveFunction apply_localization(const WaveFunction& psi, std::size_t k, double center,
                                       const CollapseParameters& params) {
  if (k >= psi.particle_count()) throw IndexError("apply_localization: particle index out of range");
  if (!psi.grid().contains(center)) throw ParameterError("apply_localization: center outside grid");
  const std::size_t L = psi.grid().cell_count();
  std::vector<double> factor(L);
  for (std::size_t i = 0; i < L; ++i) {
    factor[i] = localization_factor(psi.grid().center(i), center, params.alpha_length);
  }
  const std::size_t stride = psi.stride(k);
  std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  double norm2 = 0.0;
  for (std::size_t flat = 0; flat < amps.size(); ++flat) {
    amps[flat] *= factor[(flat / stride) % L];
    norm2 += std::norm(amps[flat]);
  }
  if (!(norm2 * psi.volume_element() > 1e-300)) {
    throw ZeroStateError("apply_localization: post-jump state below the norm floor");
  }
  return WaveFunction::normalize(std::move(amps), psi.grid(),
                                 {psi.particles().begin(), psi.particles().end()}, psi.time());
}

/// Born weights over candidate centers (cell centers) for a jump of particle k:
/// p(c) ~ <psi| L_k(c)^dag L_k(c) |psi> = sum_i rho_k(i) exp(-(x_i - c)^2 / (2 alpha^2)).
inline std::vector<double> localization_center_weights(const WaveFunction& psi, std::size_t k,
                                                       const CollapseParameters& params) {
  const auto rho = marginal_density(psi, k);
  const auto& grid = psi.grid();
  const std::size_t L = grid.cell_count();
  std::vector<double> w(L, 0.0);
  for (std::size_t c = 0; c < L; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      const double g = localization_factor(grid.center(i), grid.center(c), params.alpha_length);
      s += rho[i] * g * g;
    }
    w[c] = s;
  }
  return w;
}

/// Decides which particles jump during [t, t + dt] (each independently with
/// probability lambda_k dt) and draws a Born-weighted center for each.
inline std::vector<JumpEvent> sample_jumps(const WaveFunction& psi, double dt,
                                           const CollapseParameters& params, Rng& rng) {
  if (!(dt > 0.0)) throw ParameterError("sample_jumps: dt must be > 0");
  double total = 0.0;
  for (const auto& p : psi.particles()) total += effective_rate(p, params);
  if (total * dt >= 0.1) {
    throw StepTooLargeError("sample_jumps: sum_k lambda_k * dt = " + std::to_string(total * dt) +
                            " must stay below 0.1");
  }
  std::vector<JumpEvent> events;
  for (std::size_t k = 0; k < psi.particle_count(); ++k) {
    const double rate = effective_rate(psi.particles()[k], params);
    if (rate <= 0.0) continue;
    if (uniform01(rng) >= rate * dt) continue;
    const auto weights = localization_center_weights(psi, k, params);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    events.push_back({psi.time() + dt, k, psi.grid().center(pick(rng)), {}});
  }
  return events;
}

// -- Branch-level jumps ------------------------------------------------------
//
// Inside a BranchState every particle sits at its region's center in each
// branch, so a localization on particle k multiplies branch b by
// exp(-(x_{b,k} - c)^2 / (4 alpha^2)). The center density is the Born mixture
// sum_b |a_b|^2 N(c; x_{b,k}, alpha^2), sampled by picking a branch then a
// Gaussian offset.

inline BranchState apply_branch_localization(const BranchState& state, std::size_t k,
                                             double center, const CollapseParameters& params) {
  std::vector<Complex> amps;
  amps.reserve(state.branches().size());
  for (std::size_t b = 0; b < state.branches().size(); ++b) {
    const double x = state.regions()[state.region_of_particle(b, k)].center;
    amps.push_back(state.branches()[b].amplitude * localization_factor(x, center, params.alpha_length));
  }
  return state.with_amplitudes(amps);
}

/// Draws the particle and center of one branch-level jump.
inline JumpEvent sample_branch_jump(const BranchState& state, double time,
                                    const CollapseParameters& params, Rng& rng) {
  const auto weights = state.weights();
  std::uniform_int_distribution<std::size_t> pick_particle(0, state.particle_count() - 1);
  const std::size_t k = pick_particle(rng);
  std::discrete_distribution<std::size_t> pick_branch(weights.begin(), weights.end());
  const std::size_t b = pick_branch(rng);
  const double x = state.regions()[state.region_of_particle(b, k)].center;
  return {time, k, x + params.alpha_length * standard_normal(rng), weights};
}

}  // namespace grwm
