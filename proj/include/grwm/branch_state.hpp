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
#include <complex>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "grwm/errors.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

/// Named interval [center - width/2, center + width/2].
struct Region {
  std::string name;
  double center = 0.0;
  double width = 1.0;

  double lower() const { return center - 0.5 * width; }
  double upper() const { return center + 0.5 * width; }

  friend bool operator==(const Region&, const Region&) = default;
};

/// One macroscopically distinct term: amplitude and particle count per region
/// (aligned with BranchState::regions()).
struct Branch {
  Complex amplitude;
  std::vector<std::size_t> occupancy;
};

/// Macroscopic-N state: a weighted list of occupancy configurations of N
/// identical-mass particles over disjoint regions.
class BranchState {
 public:
  /// Validates the branch structure and rescales amplitudes so the weights sum to 1.
  static BranchState normalized(std::vector<Region> regions, double particle_mass,
                                std::size_t particle_count, std::vector<Branch> branches) {
    validate(regions, particle_mass, particle_count, branches);
    double total = 0.0;
    for (const auto& b : branches) total += std::norm(b.amplitude);
    if (!(total > 1e-300) || !std::isfinite(total)) {
      throw ZeroStateError("BranchState: all branch amplitudes vanish");
    }
    const double scale = 1.0 / std::sqrt(total);
    for (auto& b : branches) b.amplitude *= scale;
    return BranchState(std::move(regions), particle_mass, particle_count, std::move(branches));
  }

  const std::vector<Region>& regions() const { return regions_; }
  double particle_mass() const { return particle_mass_; }
  std::size_t particle_count() const { return particle_count_; }
  const std::vector<Branch>& branches() const { return branches_; }
  double total_mass() const { return particle_mass_ * static_cast<double>(particle_count_); }
  double time() const { return time_; }

  std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(branches_.size());
    for (const auto& b : branches_) w.push_back(std::norm(b.amplitude));
    return w;
  }

  double weight_sum() const {
    double s = 0.0;
    for (const auto& b : branches_) s += std::norm(b.amplitude);
    return s;
  }

  std::size_t region_index(const std::string& name) const {
    for (std::size_t r = 0; r < regions_.size(); ++r) {
      if (regions_[r].name == name) return r;
    }
    throw IndexError("BranchState: no region named '" + name + "'");
  }

  /// Region hosting particle k in branch b. Particles fill regions in
  /// declaration order, so particle labels are a fixed bookkeeping convention.
  std::size_t region_of_particle(std::size_t b, std::size_t k) const {
    if (k >= particle_count_) throw IndexError("BranchState: particle index out of range");
    std::size_t cumulative = 0;
    const auto& occ = branches_.at(b).occupancy;
    for (std::size_t r = 0; r < occ.size(); ++r) {
      cumulative += occ[r];
      if (k < cumulative) return r;
    }
    throw IndexError("BranchState: inconsistent occupancy");
  }

  BranchState with_amplitudes(const std::vector<Complex>& amplitudes) const {
    if (amplitudes.size() != branches_.size()) {
      throw ParameterError("BranchState: amplitude count mismatch");
    }
    std::vector<Branch> next = branches_;
    for (std::size_t b = 0; b < next.size(); ++b) next[b].amplitude = amplitudes[b];
    BranchState out = normalized(regions_, particle_mass_, particle_count_, std::move(next));
    out.time_ = time_;
    return out;
  }

  BranchState with_time(double t) const {
    BranchState out = *this;
    out.time_ = t;
    return out;
  }

 private:
  BranchState(std::vector<Region> regions, double particle_mass, std::size_t particle_count,
              std::vector<Branch> branches)
      : regions_(std::move(regions)),
        particle_mass_(particle_mass),
        particle_count_(particle_count),
        branches_(std::move(branches)) {}

  static void validate(const std::vector<Region>& regions, double particle_mass,
                       std::size_t particle_count, const std::vector<Branch>& branches) {
    if (regions.empty()) throw ParameterError("BranchState: no regions");
    if (!(particle_mass > 0.0)) throw ParameterError("BranchState: particle mass must be positive");
    if (particle_count == 0) throw ParameterError("BranchState: particle count must be >= 1");
    if (branches.empty()) throw ParameterError("BranchState: no branches");
    std::set<std::string> names;
    for (const auto& r : regions) {
      if (!(r.width > 0.0)) throw ParameterError("region '" + r.name + "': width must be positive");
      if (!names.insert(r.name).second) throw ParameterError("duplicate region name '" + r.name + "'");
    }
    std::vector<Region> sorted = regions;
    std::sort(sorted.begin(), sorted.end(),
              [](const Region& a, const Region& b) { return a.lower() < b.lower(); });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].lower() < sorted[i - 1].upper()) {
        throw ParameterError("regions '" + sorted[i - 1].name + "' and '" + sorted[i].name +
                             "' overlap");
      }
    }
    std::set<std::vector<std::size_t>> seen;
    for (const auto& b : branches) {
      if (b.occupancy.size() != regions.size()) {
        throw ParameterError("BranchState: occupancy vector does not match region count");
      }
      std::size_t total = 0;
      for (auto n : b.occupancy) total += n;
      if (total != particle_count) {
        throw ParameterError("BranchState: branch occupancy sums to " + std::to_string(total) +
                             ", expected " + std::to_string(particle_count));
      }
      if (!seen.insert(b.occupancy).second) {
        throw ParameterError("BranchState: branch occupancies must be pairwise distinct");
      }
    }
  }

  std::vector<Region> regions_;
  double particle_mass_;
  std::size_t particle_count_;
  std::vector<Branch> branches_;
  double time_ = 0.0;
};

/// Equal-amplitude superposition of "all N in A" and "all N in B".
inline BranchState superposition_state(std::size_t n, double mass, const Region& a,
                                       const Region& b) {
  const Complex amp{1.0 / std::sqrt(2.0), 0.0};
  return BranchState::normalized({a, b}, mass, n, {{amp, {n, 0}}, {amp, {0, n}}});
}

/// Product state: N/2 particles in A and N/2 in B, with certainty.
inline BranchState product_branch_state(std::size_t n, double mass, const Region& a,
                                        const Region& b) {
  if (n % 2 != 0) throw ParameterError("product_branch_state: N must be even");
  return BranchState::normalized({a, b}, mass, n, {{Complex{1.0, 0.0}, {n / 2, n / 2}}});
}

/// "All in A" with weight p, "all in B" with weight 1 - p.
inline BranchState two_branch_state(std::size_t n, double mass, const Region& a,
                                    const Region& b, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("two_branch_state: p must lie in (0, 1)");
  return BranchState::normalized({a, b}, mass, n,
                                 {{Complex{std::sqrt(p), 0.0}, {n, 0}},
                                  {Complex{std::sqrt(1.0 - p), 0.0}, {0, n}}});
}

}  // namespace grwm
