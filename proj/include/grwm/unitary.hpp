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
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "grwm/errors.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

/// H = sum_k p_k^2 / (2 m_k) + sum_k V(x_k) on the periodic grid.
struct Hamiltonian {
  bool kinetic = true;
  std::vector<double> potential;  // per cell; empty means V = 0
  double hbar = 1.0;

  static Hamiltonian free_particle() { return {}; }
  static Hamiltonian zero() { return {false, {}, 1.0}; }
  static Hamiltonian with_potential(std::vector<double> v) { return {true, std::move(v), 1.0}; }

  bool is_zero() const {
    if (kinetic) return false;
    for (double v : potential) {
      if (v != 0.0) return false;
    }
    return true;
  }
};

/// Angular wavenumbers of the discrete Fourier modes, in FFT order.
inline std::vector<double> fft_wavenumbers(const SpatialGrid& grid) {
  const std::size_t L = grid.cell_count();
  std::vector<double> k(L);
  const double dk = 2.0 * std::numbers::pi / grid.length();
  for (std::size_t j = 0; j < L; ++j) {
    const auto signed_j = j < (L + 1) / 2 ? static_cast<double>(j)
                                          : static_cast<double>(j) - static_cast<double>(L);
    k[j] = signed_j * dk;
  }
  return k;
}

namespace detail {

inline void apply_potential_phase(std::vector<Complex>& amps, const WaveFunction& shape,
                                  const std::vector<double>& potential, double factor) {
  if (potential.empty()) return;
  const std::size_t n = shape.particle_count();
  for (std::size_t flat = 0; flat < amps.size(); ++flat) {
    const auto idx = shape.decode(flat);
    double v = 0.0;
    for (std::size_t k = 0; k < n; ++k) v += potential[idx[k]];
    amps[flat] *= std::polar(1.0, -v * factor);
  }
}

}  // namespace detail

/// One Strang split-step: half potential kick, exact kinetic propagation in
/// momentum space along every particle axis, half potential kick.
inline WaveFunction unitary_step(const WaveFunction& psi, const Hamiltonian& h, double dt) {
  if (!(dt > 0.0)) throw ParameterError("unitary_step: dt must be > 0");
  const std::size_t L = psi.grid().cell_count();
  if (!h.potential.empty() && h.potential.size() != L) {
    throw ParameterError("unitary_step: potential must have one entry per cell");
  }
  if (h.is_zero()) return psi.with_time(psi.time() + dt);

  std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  detail::apply_potential_phase(amps, psi, h.potential, 0.5 * dt / h.hbar);

  if (h.kinetic) {
    const auto k = fft_wavenumbers(psi.grid());
    Eigen::FFT<double> fft;
    std::vector<Complex> line(L), spectrum(L);
    for (std::size_t axis = 0; axis < psi.particle_count(); ++axis) {
      const double mass = psi.particles()[axis].mass;
      std::vector<Complex> phase(L);
      for (std::size_t j = 0; j < L; ++j) {
        phase[j] = std::polar(1.0, -h.hbar * k[j] * k[j] * dt / (2.0 * mass));
      }
      const std::size_t stride = psi.stride(axis);
      const std::size_t block = stride * L;
      for (std::size_t base = 0; base < amps.size(); base += block) {
        for (std::size_t offset = 0; offset < stride; ++offset) {
          for (std::size_t j = 0; j < L; ++j) line[j] = amps[base + offset + j * stride];
          fft.fwd(spectrum, line);
          for (std::size_t j = 0; j < L; ++j) spectrum[j] *= phase[j];
          fft.inv(line, spectrum);
          for (std::size_t j = 0; j < L; ++j) amps[base + offset + j * stride] = line[j];
        }
      }
    }
  }

  detail::apply_potential_phase(amps, psi, h.potential, 0.5 * dt / h.hbar);
  return WaveFunction::normalize(std::move(amps), psi.grid(),
                                 {psi.particles().begin(), psi.particles().end()}, psi.time() + dt);
}

/// Probability distribution over Fourier modes of a single-particle state.
inline std::vector<double> momentum_distribution(const WaveFunction& psi) {
  if (psi.particle_count() != 1) throw ParameterError("momentum_distribution: single particle only");
  std::vector<Complex> line(psi.amplitudes().begin(), psi.amplitudes().end());
  std::vector<Complex> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, line);
  double total = 0.0;
  std::vector<double> out(spectrum.size());
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    out[j] = std::norm(spectrum[j]);
    total += out[j];
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace grwm
