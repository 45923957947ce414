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
#include <optional>
#include <string>
#include <vector>

#include "grwm/branch_state.hpp"
#include "grwm/errors.hpp"
#include "grwm/partition.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

/// Label of the eigenspace in which the system's mass straddles several
/// determinates. Only appears for states of more than one particle.
inline const std::string kSplitDeterminate = "(split)";

struct DegreeEntry {
  std::string label;
  double degree = 0.0;
};

/// Degrees to which each determinate of a determinable is possessed.
struct DegreeProfile {
  std::string determinable;
  std::vector<DegreeEntry> entries;

  double sum() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.degree;
    return s;
  }

  double degree(const std::string& label) const {
    for (const auto& e : entries) {
      if (e.label == label) return e.degree;
    }
    throw IndexError("DegreeProfile: no determinate '" + label + "'");
  }
};

namespace detail {

inline DegreeProfile finish_profile(const MassObservablePartition& partition,
                                    const std::vector<double>& weights, double split,
                                    bool multi_particle) {
  DegreeProfile out{partition.name, {}};
  for (std::size_t d = 0; d < weights.size(); ++d) {
    out.entries.push_back({partition.determinates[d].label, weights[d]});
  }
  if (multi_particle && split > 0.0) out.entries.push_back({kSplitDeterminate, split});
  return out;
}

}  // namespace detail

/// Degree of each determinate = squared norm of the projection onto "all of the
/// system's mass lies in this determinate's cells".
inline DegreeProfile degree_of(const WaveFunction& psi, const MassObservablePartition& partition) {
  const auto owner = partition.owner_map(psi.grid().cell_count());
  std::vector<double> weights(partition.determinates.size(), 0.0);
  double split = 0.0;
  const auto amps = psi.amplitudes();
  for (std::size_t flat = 0; flat < amps.size(); ++flat) {
    const double p = psi.probability(flat);
    if (p == 0.0) continue;
    const auto idx = psi.decode(flat);
    const std::size_t d = owner[idx[0]];
    bool same = true;
    for (std::size_t k = 1; k < psi.particle_count(); ++k) same = same && owner[idx[k]] == d;
    if (same) {
      weights[d] += p;
    } else {
      split += p;
    }
  }
  return detail::finish_profile(partition, weights, split, psi.particle_count() > 1);
}

/// Branch-level version: a branch counts toward a determinate when all its
/// occupied regions belong to that determinate.
inline DegreeProfile degree_of(const BranchState& state, const MassObservablePartition& partition) {
  const auto owner = partition.owner_map(state.regions().size());
  std::vector<double> weights(partition.determinates.size(), 0.0);
  double split = 0.0;
  for (const auto& b : state.branches()) {
    const double p = std::norm(b.amplitude);
    std::optional<std::size_t> d;
    bool same = true;
    for (std::size_t r = 0; r < b.occupancy.size(); ++r) {
      if (b.occupancy[r] == 0) continue;
      if (!d) {
        d = owner[r];
      } else if (*d != owner[r]) {
        same = false;
      }
    }
    if (same && d) {
      weights[*d] += p;
    } else {
      split += p;
    }
  }
  return detail::finish_profile(partition, weights, split, state.particle_count() > 1);
}

/// Indeterminacy taxonomy. Only the first three are reachable from a degree
/// profile; the relativized and gappy kinds exist as report labels.
enum class Determinacy {
  determinate,
  effectively_determinate,
  indeterminate_glutty_degree,
  indeterminate_glutty_relativized,
  indeterminate_gappy,
};

inline const char* to_string(Determinacy d) {
  switch (d) {
    case Determinacy::determinate: return "determinate";
    case Determinacy::effectively_determinate: return "effectively-determinate";
    case Determinacy::indeterminate_glutty_degree: return "indeterminate-glutty-degree";
    case Determinacy::indeterminate_glutty_relativized: return "indeterminate-glutty-relativized";
    case Determinacy::indeterminate_gappy: return "indeterminate-gappy";
  }
  return "?";
}

/// Degree threshold equivalent to the ratio threshold eta for a two-outcome
/// component: sqrt((1-d)/d) < eta  <=>  1 - d < eta^2 / (1 + eta^2).
inline double degree_threshold_for(double eta) { return eta * eta / (1.0 + eta * eta); }

struct ComponentReport {
  std::string label;
  double degree = 0.0;
  bool present = false;           // degree > 0: the mass is there, accessible or not
  std::optional<double> ratio;    // sqrt((1-d)/d), undefined at d = 0
  bool accessible = false;        // ratio < eta
};

struct IndeterminacyReport {
  Determinacy kind = Determinacy::determinate;
  double ratio_threshold = 0.0;
  double degree_threshold = 0.0;
  std::string dominant;
  std::vector<ComponentReport> components;
};

inline IndeterminacyReport indeterminacy_report(const DegreeProfile& profile, double eta,
                                                std::optional<double> degree_threshold = {}) {
  if (!(eta > 0.0)) throw ParameterError("indeterminacy_report: eta must be > 0");
  if (profile.entries.empty()) throw ParameterError("indeterminacy_report: empty profile");
  IndeterminacyReport out;
  out.ratio_threshold = eta;
  out.degree_threshold = degree_threshold.value_or(degree_threshold_for(eta));
  if (!(out.degree_threshold > 0.0 && out.degree_threshold < 1.0)) {
    throw ParameterError("indeterminacy_report: degree threshold must lie in (0, 1)");
  }
  const auto top = std::max_element(profile.entries.begin(), profile.entries.end(),
                                     [](const auto& a, const auto& b) { return a.degree < b.degree; });
  out.dominant = top->label;
  for (const auto& e : profile.entries) {
    ComponentReport c{e.label, e.degree, e.degree > 0.0, std::nullopt, false};
    if (e.degree > 0.0) {
      c.ratio = std::sqrt(std::max(0.0, 1.0 - e.degree) / e.degree);
      c.accessible = *c.ratio < eta;
    }
    out.components.push_back(c);
  }
  if (std::abs(top->degree - 1.0) <= 1e-12) {
    out.kind = Determinacy::determinate;
  } else if (top->degree > 1.0 - out.degree_threshold) {
    out.kind = Determinacy::effectively_determinate;
  } else {
    out.kind = Determinacy::indeterminate_glutty_degree;
  }
  return out;
}

}  // namespace grwm
