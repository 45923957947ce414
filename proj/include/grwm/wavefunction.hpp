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

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grwm/errors.hpp"
#include "grwm/grid.hpp"

namespace grwm {

using Complex = std::complex<double>;

struct ParticleSpec {
  std::string label;
  double mass = 1.0;

  friend bool operator==(const ParticleSpec&, const ParticleSpec&) = default;
};

inline void validate_particle(const ParticleSpec& p) {
  if (!(p.mass > 0.0) || !std::isfinite(p.mass)) {
    throw ParameterError("particle '" + p.label + "': mass must be positive");
  }
}

/// Default particle list: `n` nucleon-mass particles labelled p0, p1, ...
inline std::vector<ParticleSpec> default_particles(std::size_t n) {
  std::vector<ParticleSpec> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back({"p" + std::to_string(k), 1.0});
  return out;
}

/// Exact N-particle wavefunction over the N-fold product of a 1D grid.
///
/// Amplitudes are cell-sampled and stored with particle 0 as the slowest
/// index: flat = ((i0 * L) + i1) * L + i2. The stored state always satisfies
/// sum |a|^2 * w^N = 1.
class WaveFunction {
 public:
  static constexpr std::size_t kMaxParticles = 3;

  /// Scales `raw` by a single positive real so the result is normalized.
  static WaveFunction normalize(std::vector<Complex> raw, SpatialGrid grid,
                                std::vector<ParticleSpec> particles, double time = 0.0) {
    check_shape(raw.size(), grid, particles);
    const double volume = std::pow(grid.cell_width(), static_cast<double>(particles.size()));
    double norm2 = 0.0;
    for (const auto& a : raw) norm2 += std::norm(a);
    norm2 *= volume;
    if (!(norm2 > 1e-300) || !std::isfinite(norm2)) {
      throw ZeroStateError("cannot normalize a zero (or non-finite) state");
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& a : raw) a *= scale;
    return WaveFunction(std::move(grid), std::move(particles), std::move(raw), time);
  }

  static WaveFunction normalize(std::vector<Complex> raw, SpatialGrid grid, std::size_t n,
                                double time = 0.0) {
    return normalize(std::move(raw), std::move(grid), default_particles(n), time);
  }

  const SpatialGrid& grid() const { return grid_; }
  std::span<const ParticleSpec> particles() const { return particles_; }
  std::size_t particle_count() const { return particles_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }
  double time() const { return time_; }

  /// w^N, the configuration-space volume of one sample.
  double volume_element() const {
    return std::pow(grid_.cell_width(), static_cast<double>(particles_.size()));
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s * volume_element();
  }

  double total_mass() const {
    double m = 0.0;
    for (const auto& p : particles_) m += p.mass;
    return m;
  }

  /// Probability of configuration `flat`.
  double probability(std::size_t flat) const {
    return std::norm(amplitudes_[flat]) * volume_element();
  }

  /// Stride of particle k's index in the flat layout.
  std::size_t stride(std::size_t k) const {
    std::size_t s = 1;
    for (std::size_t j = k + 1; j < particles_.size(); ++j) s *= grid_.cell_count();
    return s;
  }

  std::array<std::size_t, kMaxParticles> decode(std::size_t flat) const {
    std::array<std::size_t, kMaxParticles> idx{};
    const std::size_t L = grid_.cell_count();
    for (std::size_t k = particles_.size(); k-- > 0;) {
      idx[k] = flat % L;
      flat /= L;
    }
    return idx;
  }

  WaveFunction with_time(double t) const {
    WaveFunction out = *this;
    out.time_ = t;
    return out;
  }

  bool compatible_with(const WaveFunction& other) const {
    return grid_ == other.grid_ && particles_ == other.particles_;
  }

 private:
  WaveFunction(SpatialGrid grid, std::vector<ParticleSpec> particles,
               std::vector<Complex> amplitudes, double time)
      : grid_(std::move(grid)),
        particles_(std::move(particles)),
        amplitudes_(std::move(amplitudes)),
        time_(time) {}

  static void check_shape(std::size_t n_amp, const SpatialGrid& grid,
                          const std::vector<ParticleSpec>& particles) {
    if (particles.empty() || particles.size() > kMaxParticles) {
      throw ParameterError("WaveFunction holds 1.." + std::to_string(kMaxParticles) +
                           " particles; use BranchState for more");
    }
    for (const auto& p : particles) validate_particle(p);
    std::size_t expected = 1;
    for (std::size_t k = 0; k < particles.size(); ++k) expected *= grid.cell_count();
    if (n_amp != expected) {
      throw ParameterError("amplitude array has " + std::to_string(n_amp) +
                           " entries, expected cell_count^N = " + std::to_string(expected));
    }
  }

  SpatialGrid grid_;
  std::vector<ParticleSpec> particles_;
  std::vector<Complex> amplitudes_;
  double time_ = 0.0;
};

/// Renormalized linear combination sum_j c_j psi_j.
inline WaveFunction superpose(std::span<const std::pair<Complex, WaveFunction>> terms) {
  if (terms.empty()) throw ZeroStateError("superpose: no terms");
  const WaveFunction& first = terms.front().second;
  std::vector<Complex> acc(first.size(), Complex{0.0, 0.0});
  for (const auto& [c, psi] : terms) {
    if (!psi.compatible_with(first)) {
      throw IncompatibleStateError("superpose: states differ in grid or particle list");
    }
    const auto amps = psi.amplitudes();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * amps[i];
  }
  return WaveFunction::normalize(std::move(acc), first.grid(),
                                 {first.particles().begin(), first.particles().end()},
                                 first.time());
}

inline WaveFunction superpose(std::initializer_list<std::pair<Complex, WaveFunction>> terms) {
  return superpose(std::span<const std::pair<Complex, WaveFunction>>(terms.begin(), terms.size()));
}

/// Tensor product of single-particle factors.
inline WaveFunction product_state(std::span<const WaveFunction> factors) {
  if (factors.empty()) throw EmptyProductError("product_state: empty factor list");
  const SpatialGrid& grid = factors.front().grid();
  std::vector<ParticleSpec> particles;
  for (const auto& f : factors) {
    if (!(f.grid() == grid)) throw IncompatibleStateError("product_state: factors on different grids");
    if (f.particle_count() != 1) {
      throw ParameterError("product_state: factors must be single-particle states");
    }
    particles.push_back(f.particles().front());
  }
  if (particles.size() > WaveFunction::kMaxParticles) {
    throw ParameterError("product_state: at most 3 factors");
  }
  const std::size_t L = grid.cell_count();
  std::vector<Complex> amps{Complex{1.0, 0.0}};
  for (const auto& f : factors) {
    std::vector<Complex> next(amps.size() * L);
    const auto fa = f.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
      for (std::size_t j = 0; j < L; ++j) next[i * L + j] = amps[i] * fa[j];
    }
    amps = std::move(next);
  }
  return WaveFunction::normalize(std::move(amps), grid, std::move(particles),
                                 factors.front().time());
}

inline WaveFunction product_state(std::initializer_list<WaveFunction> factors) {
  return product_state(std::span<const WaveFunction>(factors.begin(), factors.size()));
}

/// Position probability density of particle k (integrates to 1 against cell_width).
inline std::vector<double> marginal_density(const WaveFunction& psi, std::size_t k) {
  if (k >= psi.particle_count()) {
    throw IndexError("marginal_density: particle index " + std::to_string(k) + " out of range");
  }
  const std::size_t L = psi.grid().cell_count();
  const std::size_t stride = psi.stride(k);
  const double w = psi.grid().cell_width();
  const double other_volume = psi.volume_element() / w;
  std::vector<double> out(L, 0.0);
  const auto amps = psi.amplitudes();
  for (std::size_t flat = 0; flat < amps.size(); ++flat) {
    out[(flat / stride) % L] += std::norm(amps[flat]);
  }
  for (auto& v : out) v *= other_volume;
  return out;
}

/// Gaussian packet whose probability density has standard deviation `sigma`.
inline WaveFunction gaussian_packet(const SpatialGrid& grid, const ParticleSpec& particle,
                                    double center, double sigma, double wavenumber = 0.0) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_packet: sigma must be positive");
  std::vector<Complex> amps(grid.cell_count());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double x = grid.center(i);
    const double d = x - center;
    amps[i] = std::exp(-d * d / (4.0 * sigma * sigma)) * std::polar(1.0, wavenumber * x);
  }
  return WaveFunction::normalize(std::move(amps), grid, {particle});
}

/// Single particle entirely inside one cell.
inline WaveFunction cell_eigenstate(const SpatialGrid& grid, const ParticleSpec& particle,
                                    std::size_t cell) {
  if (cell >= grid.cell_count()) throw IndexError("cell_eigenstate: cell out of range");
  std::vector<Complex> amps(grid.cell_count(), Complex{0.0, 0.0});
  amps[cell] = 1.0;
  return WaveFunction::normalize(std::move(amps), grid, {particle});
}

/// Single particle spread uniformly over a set of cells.
inline WaveFunction uniform_over(const SpatialGrid& grid, const ParticleSpec& particle,
                                 std::span<const std::size_t> cells) {
  std::vector<Complex> amps(grid.cell_count(), Complex{0.0, 0.0});
  for (auto c : cells) {
    if (c >= grid.cell_count()) throw IndexError("uniform_over: cell out of range");
    amps[c] = 1.0;
  }
  return WaveFunction::normalize(std::move(amps), grid, {particle});
}

}  // namespace grwm
