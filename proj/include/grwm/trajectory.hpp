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
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "grwm/branch_state.hpp"
#include "grwm/csl.hpp"
#include "grwm/degree.hpp"
#include "grwm/errors.hpp"
#include "grwm/localization.hpp"
#include "grwm/mass_density.hpp"
#include "grwm/parameters.hpp"
#include "grwm/rng.hpp"
#include "grwm/serialization.hpp"
#include "grwm/unitary.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

inline constexpr const char* kTrajectorySchema = "grwm.trajectory/1";

enum class DynamicsMode { jumps, csl };

inline const char* to_string(DynamicsMode m) { return m == DynamicsMode::jumps ? "jumps" : "csl"; }

inline DynamicsMode dynamics_mode_from(const std::string& s) {
  if (s == "jumps") return DynamicsMode::jumps;
  if (s == "csl") return DynamicsMode::csl;
  throw ParameterError("unknown dynamics mode '" + s + "' (expected jumps|csl)");
}

struct SnapshotSummary {
  double time = 0.0;
  double norm = 1.0;
  double total_mass = 0.0;
  std::vector<double> cell_mass;  // per cell (wavefunction) or region (branch state)
  std::vector<double> variance;
  std::vector<double> branch_weights;
};

struct TrajectoryOptions {
  double t_final = 1.0;
  double dt = 1e-3;  // step for time-stepped evolution; branch-state jumps are event driven
  DynamicsMode mode = DynamicsMode::jumps;
  std::uint64_t seed = 0;
  double snapshot_every = 0.0;  // 0: initial and final snapshots only
  Hamiltonian hamiltonian = Hamiltonian::zero();
  std::optional<MassObservablePartition> branch_partition;  // wavefunction branch weights
  std::size_t max_jumps = 0;                                // 0: unlimited
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  CollapseParameters parameters;
  DynamicsMode mode = DynamicsMode::jumps;
  std::vector<SnapshotSummary> snapshots;
  std::vector<JumpEvent> jumps;
  std::optional<State> final_state;

  std::optional<double> first_jump_time() const {
    if (jumps.empty()) return std::nullopt;
    return jumps.front().time;
  }

  const SnapshotSummary& final_snapshot() const { return snapshots.back(); }

  json to_json() const {
    json snaps = json::array();
    for (const auto& s : snapshots) {
      snaps.push_back({{"time", s.time},
                       {"norm", s.norm},
                       {"total_mass", s.total_mass},
                       {"cell_mass", s.cell_mass},
                       {"variance", s.variance},
                       {"branch_weights", s.branch_weights}});
    }
    json js = json::array();
    for (const auto& e : jumps) {
      js.push_back({{"time", e.time},
                    {"particle", e.particle},
                    {"center", e.center},
                    {"pre_jump_branch_weights", e.pre_jump_branch_weights}});
    }
    return {{"schema_version", kTrajectorySchema},
            {"seed", seed},
            {"mode", grwm::to_string(mode)},
            {"parameters", grwm::to_json(parameters)},
            {"snapshots", snaps},
            {"jumps", js},
            {"final_state", final_state ? grwm::to_json(*final_state) : json(nullptr)}};
  }

  std::string jumps_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "time,particle,center\n";
    for (const auto& e : jumps) out << e.time << ',' << e.particle << ',' << e.center << '\n';
    return out.str();
  }
};

inline SnapshotSummary summarize(const WaveFunction& psi,
                                 const std::optional<MassObservablePartition>& partition) {
  const auto moments = mass_moments(psi);
  SnapshotSummary s;
  s.time = psi.time();
  s.norm = std::sqrt(psi.norm_squared());
  s.cell_mass = moments.mean;
  s.variance = moments.variance();
  for (double m : s.cell_mass) s.total_mass += m;
  if (partition) {
    for (const auto& e : degree_of(psi, *partition).entries) s.branch_weights.push_back(e.degree);
  }
  return s;
}

inline SnapshotSummary summarize(const BranchState& state) {
  const auto moments = mass_moments(state);
  SnapshotSummary s;
  s.time = state.time();
  s.norm = std::sqrt(state.weight_sum());
  s.cell_mass = moments.mean;
  s.variance = moments.variance();
  for (double m : s.cell_mass) s.total_mass += m;
  s.branch_weights = state.weights();
  return s;
}

/// Time-stepped evolution of an exact wavefunction. Jump times are recorded at
/// the midpoint of the step in which they fire.
inline TrajectoryRecord evolve_trajectory(const WaveFunction& initial, const CollapseParameters& params,
                                          const TrajectoryOptions& opt) {
  params.validate();
  if (!(opt.t_final > 0.0)) throw ParameterError("evolve_trajectory: t_final must be > 0");
  if (!(opt.dt > 0.0)) throw ParameterError("evolve_trajectory: dt must be > 0");
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(opt.t_final / opt.dt)));
  const double dt = opt.t_final / static_cast<double>(steps);
  const std::size_t stride =
      opt.snapshot_every > 0.0
          ? static_cast<std::size_t>(std::max(1.0, std::round(opt.snapshot_every / dt)))
          : steps;

  Rng rng(opt.seed);
  TrajectoryRecord rec;
  rec.seed = opt.seed;
  rec.parameters = params;
  rec.mode = opt.mode;
  WaveFunction psi = initial;
  rec.snapshots.push_back(summarize(psi, opt.branch_partition));

  std::size_t step = 0;
  bool stop = false;
  while (step < steps && !stop) {
    const double t0 = psi.time();
    if (opt.mode == DynamicsMode::jumps) {
      auto events = sample_jumps(psi, dt, params, rng);
      std::vector<double> weights;
      if (!events.empty() && opt.branch_partition) {
        for (const auto& e : degree_of(psi, *opt.branch_partition).entries) weights.push_back(e.degree);
      }
      for (auto& e : events) {
        psi = apply_localization(psi, e.particle, e.center, params);
        e.time = t0 + 0.5 * dt;
        e.pre_jump_branch_weights = weights;
        rec.jumps.push_back(std::move(e));
        if (opt.max_jumps != 0 && rec.jumps.size() >= opt.max_jumps) stop = true;
      }
      psi = unitary_step(psi, opt.hamiltonian, dt);
    } else {
      const auto noise = NoiseField::draw(psi.grid(), dt, rng, opt.seed, step);
      psi = csl_step(psi, noise, dt, params, opt.hamiltonian);
    }
    ++step;
    if (step % stride == 0 || step == steps || stop) {
      rec.snapshots.push_back(summarize(psi, opt.branch_partition));
    }
  }
  rec.final_state = psi;
  return rec;
}

/// Branch-level evolution. Jumps are event driven (exact exponential waiting
/// times with total rate N * lambda); csl mode is time-stepped over regions.
inline TrajectoryRecord evolve_trajectory(const BranchState& initial, const CollapseParameters& params,
                                          const TrajectoryOptions& opt) {
  params.validate();
  if (!(opt.t_final > 0.0)) throw ParameterError("evolve_trajectory: t_final must be > 0");
  Rng rng(opt.seed);
  TrajectoryRecord rec;
  rec.seed = opt.seed;
  rec.parameters = params;
  rec.mode = opt.mode;
  BranchState state = initial;
  rec.snapshots.push_back(summarize(state));

  const double t_start = state.time();
  const double t_end = t_start + opt.t_final;
  double next_snapshot = opt.snapshot_every > 0.0 ? t_start + opt.snapshot_every : t_end;

  if (opt.mode == DynamicsMode::jumps) {
    const double rate = effective_rate({"", state.particle_mass()}, params) *
                        static_cast<double>(state.particle_count());
    double t = t_start;
    while (rate > 0.0) {
      const double t_next = t + std::exponential_distribution<double>(rate)(rng);
      while (next_snapshot < std::min(t_next, t_end)) {
        rec.snapshots.push_back(summarize(state.with_time(next_snapshot)));
        next_snapshot += opt.snapshot_every > 0.0 ? opt.snapshot_every : opt.t_final;
      }
      if (t_next > t_end) break;
      auto event = sample_branch_jump(state, t_next, params, rng);
      state = apply_branch_localization(state, event.particle, event.center, params).with_time(t_next);
      t = t_next;
      rec.jumps.push_back(std::move(event));
      if (opt.max_jumps != 0 && rec.jumps.size() >= opt.max_jumps) break;
    }
    const bool stopped_early = opt.max_jumps != 0 && rec.jumps.size() >= opt.max_jumps;
    if (!stopped_early) {
      while (next_snapshot < t_end) {
        rec.snapshots.push_back(summarize(state.with_time(next_snapshot)));
        next_snapshot += opt.snapshot_every > 0.0 ? opt.snapshot_every : opt.t_final;
      }
      state = state.with_time(t_end);
    }
    if (state.time() > rec.snapshots.back().time) rec.snapshots.push_back(summarize(state));
  } else {
    if (!(opt.dt > 0.0)) throw ParameterError("evolve_trajectory: dt must be > 0");
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(opt.t_final / opt.dt)));
    const double dt = opt.t_final / static_cast<double>(steps);
    const std::size_t stride =
        opt.snapshot_every > 0.0
            ? static_cast<std::size_t>(std::max(1.0, std::round(opt.snapshot_every / dt)))
            : steps;
    std::vector<double> widths;
    for (const auto& r : state.regions()) widths.push_back(r.width);
    for (std::size_t step = 1; step <= steps; ++step) {
      const auto noise = NoiseField::draw(widths, dt, rng, opt.seed, step - 1);
      state = csl_step(state, noise, dt, params);
      if (step % stride == 0 || step == steps) rec.snapshots.push_back(summarize(state));
    }
  }
  rec.final_state = state;
  return rec;
}

inline TrajectoryRecord evolve_trajectory(const State& initial, const CollapseParameters& params,
                                          const TrajectoryOptions& opt) {
  return std::visit([&](const auto& s) { return evolve_trajectory(s, params, opt); }, initial);
}

}  // namespace grwm
