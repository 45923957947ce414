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
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grwm/branch_state.hpp"
#include "grwm/errors.hpp"
#include "grwm/partition.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

inline constexpr double kDefaultEta = 0.1;
/// Cells carrying less than this fraction of the total mass have no defined ratio.
inline constexpr double kMassFloorRelative = 1e-12;

/// First and second moments of the mass operator integrated over each cell set.
/// For a set S, M_S = sum_k m_k [x_k in S]; its distribution is read off |psi|^2.
struct MassMoments {
  std::vector<double> mean;    // E[M_S]
  std::vector<double> second;  // E[M_S^2]

  std::vector<double> variance() const {
    std::vector<double> v(mean.size());
    for (std::size_t s = 0; s < v.size(); ++s) v[s] = std::max(0.0, second[s] - mean[s] * mean[s]);
    return v;
  }
};

namespace detail {

inline MassMoments wavefunction_moments(const WaveFunction& psi,
                                        std::span<const std::size_t> owner, std::size_t sets) {
  MassMoments out{std::vector<double>(sets, 0.0), std::vector<double>(sets, 0.0)};
  const std::size_t n = psi.particle_count();
  const auto amps = psi.amplitudes();
  const double volume = psi.volume_element();
  std::array<std::size_t, WaveFunction::kMaxParticles> touched{};
  std::array<double, WaveFunction::kMaxParticles> mass{};
  for (std::size_t flat = 0; flat < amps.size(); ++flat) {
    const double p = std::norm(amps[flat]) * volume;
    if (p == 0.0) continue;
    const auto idx = psi.decode(flat);
    std::size_t used = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t s = owner[idx[k]];
      std::size_t slot = 0;
      while (slot < used && touched[slot] != s) ++slot;
      if (slot == used) {
        touched[used] = s;
        mass[used] = 0.0;
        ++used;
      }
      mass[slot] += psi.particles()[k].mass;
    }
    for (std::size_t slot = 0; slot < used; ++slot) {
      out.mean[touched[slot]] += p * mass[slot];
      out.second[touched[slot]] += p * mass[slot] * mass[slot];
    }
  }
  return out;
}

inline std::vector<std::size_t> identity_owner(std::size_t n) {
  std::vector<std::size_t> owner(n);
  for (std::size_t i = 0; i < n; ++i) owner[i] = i;
  return owner;
}

}  // namespace detail

inline MassMoments mass_moments(const WaveFunction& psi) {
  const std::size_t L = psi.grid().cell_count();
  return detail::wavefunction_moments(psi, detail::identity_owner(L), L);
}

inline MassMoments mass_moments(const WaveFunction& psi, const MassObservablePartition& partition) {
  const auto owner = partition.owner_map(psi.grid().cell_count());
  return detail::wavefunction_moments(psi, owner, partition.determinates.size());
}

inline MassMoments mass_moments(const BranchState& state) {
  const std::size_t R = state.regions().size();
  MassMoments out{std::vector<double>(R, 0.0), std::vector<double>(R, 0.0)};
  for (const auto& b : state.branches()) {
    const double w = std::norm(b.amplitude);
    for (std::size_t r = 0; r < R; ++r) {
      const double m = state.particle_mass() * static_cast<double>(b.occupancy[r]);
      out.mean[r] += w * m;
      out.second[r] += w * m * m;
    }
  }
  return out;
}

inline MassMoments mass_moments(const BranchState& state, const MassObservablePartition& partition) {
  const auto owner = partition.owner_map(state.regions().size());
  const std::size_t S = partition.determinates.size();
  MassMoments out{std::vector<double>(S, 0.0), std::vector<double>(S, 0.0)};
  for (const auto& b : state.branches()) {
    const double w = std::norm(b.amplitude);
    std::vector<double> m(S, 0.0);
    for (std::size_t r = 0; r < owner.size(); ++r) {
      m[owner[r]] += state.particle_mass() * static_cast<double>(b.occupancy[r]);
    }
    for (std::size_t s = 0; s < S; ++s) {
      out.mean[s] += w * m[s];
      out.second[s] += w * m[s] * m[s];
    }
  }
  return out;
}

/// Mass density per cell: sum_k m_k rho_k(x).
inline std::vector<double> mass_density(const WaveFunction& psi) {
  std::vector<double> out(psi.grid().cell_count(), 0.0);
  for (std::size_t k = 0; k < psi.particle_count(); ++k) {
    const auto rho = marginal_density(psi, k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += psi.particles()[k].mass * rho[i];
  }
  return out;
}

/// Mass density per region: expected mass in the region divided by its width.
inline std::vector<double> mass_density(const BranchState& state) {
  auto m = mass_moments(state).mean;
  for (std::size_t r = 0; r < m.size(); ++r) m[r] /= state.regions()[r].width;
  return m;
}

/// Variance of the cell-integrated mass operator (mass^2 units).
inline std::vector<double> mass_variance(const WaveFunction& psi) { return mass_moments(psi).variance(); }
inline std::vector<double> mass_variance(const BranchState& state) { return mass_moments(state).variance(); }

/// sqrt(variance) / mass per cell; cells with mass <= mass_floor are undefined.
inline std::vector<std::optional<double>> accessibility_ratio(std::span<const double> cell_mass,
                                                              std::span<const double> variance,
                                                              double mass_floor) {
  if (cell_mass.size() != variance.size()) {
    throw ParameterError("accessibility_ratio: mean and variance fields differ in size");
  }
  std::vector<std::optional<double>> out(cell_mass.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (cell_mass[i] > mass_floor) out[i] = std::sqrt(variance[i]) / cell_mass[i];
  }
  return out;
}

/// accessible(i) = ratio defined and ratio < eta.
inline std::vector<bool> classify_accessible(std::span<const std::optional<double>> ratio, double eta) {
  if (!(eta > 0.0)) throw ParameterError("classify_accessible: eta must be > 0");
  std::vector<bool> out(ratio.size(), false);
  for (std::size_t i = 0; i < ratio.size(); ++i) out[i] = ratio[i].has_value() && *ratio[i] < eta;
  return out;
}

enum class Accessibility { accessible, non_accessible, undefined };

inline const char* to_string(Accessibility a) {
  switch (a) {
    case Accessibility::accessible: return "accessible";
    case Accessibility::non_accessible: return "non-accessible";
    case Accessibility::undefined: return "undefined";
  }
  return "?";
}

/// Mean, variance, ratio and accessibility over a list of cells or regions.
struct MassDensityField {
  std::vector<std::string> labels;
  std::vector<double> centers;
  std::vector<double> widths;
  std::vector<double> mean;       // mass per unit length
  std::vector<double> cell_mass;  // mean * width
  std::vector<double> variance;
  std::vector<std::optional<double>> ratio;
  std::vector<bool> accessible;
  std::vector<double> smeared_mean;  // empty unless smearing was requested
  double threshold_used = kDefaultEta;
  double total_mass = 0.0;
  double mass_floor = 0.0;

  std::size_t size() const { return mean.size(); }

  Accessibility status(std::size_t i) const {
    if (!ratio[i]) return Accessibility::undefined;
    return accessible[i] ? Accessibility::accessible : Accessibility::non_accessible;
  }

  double integrated_mass() const {
    double s = 0.0;
    for (double m : cell_mass) s += m;
    return s;
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return i;
    }
    throw IndexError("MassDensityField: no cell labelled '" + label + "'");
  }

  /// Same field classified under another threshold.
  MassDensityField reclassified(double eta) const {
    MassDensityField out = *this;
    out.accessible = classify_accessible(ratio, eta);
    out.threshold_used = eta;
    return out;
  }
};

struct FieldOptions {
  std::optional<MassObservablePartition> partition;  // aggregate cells into determinates
  double smear_width = 0.0;                          // > 0 enables Gaussian smearing of the mean
};

namespace detail {

inline MassDensityField assemble_field(std::vector<std::string> labels, std::vector<double> centers,
                                       std::vector<double> widths, const MassMoments& moments,
                                       double total_mass, double eta, double smear_width) {
  MassDensityField f;
  f.labels = std::move(labels);
  f.centers = std::move(centers);
  f.widths = std::move(widths);
  f.cell_mass = moments.mean;
  f.variance = moments.variance();
  f.mean.resize(f.cell_mass.size());
  for (std::size_t i = 0; i < f.mean.size(); ++i) f.mean[i] = f.cell_mass[i] / f.widths[i];
  f.total_mass = total_mass;
  f.mass_floor = kMassFloorRelative * total_mass;
  f.ratio = accessibility_ratio(f.cell_mass, f.variance, f.mass_floor);
  f.accessible = classify_accessible(f.ratio, eta);
  f.threshold_used = eta;
  if (smear_width > 0.0) {
    const std::size_t n = f.size();
    f.smeared_mean.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (f.cell_mass[j] == 0.0) continue;
      double z = 0.0;
      std::vector<double> kernel(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = (f.centers[i] - f.centers[j]) / smear_width;
        kernel[i] = std::exp(-0.5 * d * d);
        z += kernel[i] * f.widths[i];
      }
      for (std::size_t i = 0; i < n; ++i) f.smeared_mean[i] += f.cell_mass[j] * kernel[i] / z;
    }
  }
  return f;
}

}  // namespace detail

inline MassDensityField analyze(const WaveFunction& psi, double eta = kDefaultEta,
                                const FieldOptions& options = {}) {
  const auto& grid = psi.grid();
  std::vector<std::string> labels;
  std::vector<double> centers, widths;
  MassMoments moments;
  if (options.partition) {
    moments = mass_moments(psi, *options.partition);
    for (const auto& d : options.partition->determinates) {
      labels.push_back(d.label);
      double c = 0.0;
      for (auto cell : d.cells) c += grid.center(cell);
      centers.push_back(d.cells.empty() ? 0.0 : c / static_cast<double>(d.cells.size()));
      widths.push_back(std::max<double>(1.0, static_cast<double>(d.cells.size())) * grid.cell_width());
    }
  } else {
    moments = mass_moments(psi);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
      labels.push_back("cell" + std::to_string(i));
      centers.push_back(grid.center(i));
      widths.push_back(grid.cell_width());
    }
  }
  return detail::assemble_field(std::move(labels), std::move(centers), std::move(widths), moments,
                                psi.total_mass(), eta, options.smear_width);
}

inline MassDensityField analyze(const BranchState& state, double eta = kDefaultEta,
                                const FieldOptions& options = {}) {
  std::vector<std::string> labels;
  std::vector<double> centers, widths;
  MassMoments moments;
  const auto& regions = state.regions();
  if (options.partition) {
    moments = mass_moments(state, *options.partition);
    for (const auto& d : options.partition->determinates) {
      labels.push_back(d.label);
      double c = 0.0, w = 0.0;
      for (auto r : d.cells) {
        c += regions[r].center * regions[r].width;
        w += regions[r].width;
      }
      centers.push_back(w > 0.0 ? c / w : 0.0);
      widths.push_back(w > 0.0 ? w : 1.0);
    }
  } else {
    moments = mass_moments(state);
    for (const auto& r : regions) {
      labels.push_back(r.name);
      centers.push_back(r.center);
      widths.push_back(r.width);
    }
  }
  return detail::assemble_field(std::move(labels), std::move(centers), std::move(widths), moments,
                                state.total_mass(), eta, options.smear_width);
}

}  // namespace grwm
