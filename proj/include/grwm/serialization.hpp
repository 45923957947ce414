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

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "grwm/branch_state.hpp"
#include "grwm/degree.hpp"
#include "grwm/errors.hpp"
#include "grwm/mass_density.hpp"
#include "grwm/parameters.hpp"
#include "grwm/partition.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

using json = nlohmann::ordered_json;

/// Either tier of state.
using State = std::variant<WaveFunction, BranchState>;

// State documents:
//   {"kind": "wavefunction", "grid": {...}, "particles": [...],
//    "amplitudes": [[re, im], ...], "time": t}
//   {"kind": "branch", "regions": [...], "particle_mass": m, "particle_count": N,
//    "branches": [{"amplitude": [re, im], "occupancy": {"A": n, ...}}, ...]}

inline json to_json(const SpatialGrid& g) {
  return {{"cell_count", g.cell_count()}, {"cell_width", g.cell_width()}, {"origin", g.origin()}};
}

inline json to_json(const WaveFunction& psi) {
  json particles = json::array();
  for (const auto& p : psi.particles()) particles.push_back({{"label", p.label}, {"mass", p.mass}});
  json amps = json::array();
  for (const auto& a : psi.amplitudes()) amps.push_back(json::array({a.real(), a.imag()}));
  return {{"kind", "wavefunction"},
          {"grid", to_json(psi.grid())},
          {"particles", particles},
          {"amplitudes", amps},
          {"time", psi.time()}};
}

inline json to_json(const BranchState& s) {
  json regions = json::array();
  for (const auto& r : s.regions()) {
    regions.push_back({{"name", r.name}, {"center", r.center}, {"width", r.width}});
  }
  json branches = json::array();
  for (const auto& b : s.branches()) {
    json occ = json::object();
    for (std::size_t r = 0; r < s.regions().size(); ++r) occ[s.regions()[r].name] = b.occupancy[r];
    branches.push_back({{"amplitude", json::array({b.amplitude.real(), b.amplitude.imag()})},
                        {"occupancy", occ}});
  }
  return {{"kind", "branch"},
          {"regions", regions},
          {"particle_mass", s.particle_mass()},
          {"particle_count", s.particle_count()},
          {"branches", branches},
          {"time", s.time()}};
}

inline json to_json(const State& s) {
  return std::visit([](const auto& v) { return to_json(v); }, s);
}

namespace detail {

template <class T>
T require(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw FormatError(std::string(where) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(where) + ": bad field '" + key + "': " + e.what());
  }
}

inline Complex complex_from(const json& j, const char* where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw FormatError(std::string(where) + ": amplitude must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline SpatialGrid grid_from_json(const json& j) {
  return SpatialGrid(detail::require<std::size_t>(j, "cell_count", "grid"),
                     detail::require<double>(j, "cell_width", "grid"), j.value("origin", 0.0));
}

/// Reads a wavefunction document. Amplitudes are renormalized on load.
inline WaveFunction wavefunction_from_json(const json& j) {
  const auto grid = grid_from_json(detail::require<json>(j, "grid", "wavefunction"));
  std::vector<ParticleSpec> particles;
  for (const auto& p : detail::require<json>(j, "particles", "wavefunction")) {
    particles.push_back({p.value("label", "p" + std::to_string(particles.size())),
                         detail::require<double>(p, "mass", "particle")});
  }
  std::vector<Complex> amps;
  for (const auto& a : detail::require<json>(j, "amplitudes", "wavefunction")) {
    amps.push_back(detail::complex_from(a, "wavefunction"));
  }
  return WaveFunction::normalize(std::move(amps), grid, std::move(particles), j.value("time", 0.0));
}

inline BranchState branch_state_from_json(const json& j) {
  std::vector<Region> regions;
  for (const auto& r : detail::require<json>(j, "regions", "branch")) {
    regions.push_back({detail::require<std::string>(r, "name", "region"),
                       detail::require<double>(r, "center", "region"), r.value("width", 1.0)});
  }
  std::vector<Branch> branches;
  for (const auto& b : detail::require<json>(j, "branches", "branch")) {
    Branch br{detail::complex_from(detail::require<json>(b, "amplitude", "branch"), "branch"),
              std::vector<std::size_t>(regions.size(), 0)};
    const auto occupancy = detail::require<json>(b, "occupancy", "branch");
    for (const auto& [name, count] : occupancy.items()) {
      std::size_t r = 0;
      while (r < regions.size() && regions[r].name != name) ++r;
      if (r == regions.size()) throw FormatError("branch: occupancy names unknown region '" + name + "'");
      br.occupancy[r] = count.get<std::size_t>();
    }
    branches.push_back(std::move(br));
  }
  auto s = BranchState::normalized(std::move(regions), detail::require<double>(j, "particle_mass", "branch"),
                                   detail::require<std::size_t>(j, "particle_count", "branch"),
                                   std::move(branches));
  return s.with_time(j.value("time", 0.0));
}

inline State state_from_json(const json& j) {
  const auto kind = j.value("kind", std::string{});
  if (kind == "wavefunction") return wavefunction_from_json(j);
  if (kind == "branch") return branch_state_from_json(j);
  throw FormatError("state document: unknown kind '" + kind + "'");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

inline json to_json(const CollapseParameters& p) {
  return {{"alpha_length", p.alpha_length},
          {"lambda_base", p.lambda_base},
          {"reference_mass", p.reference_mass},
          {"rate_mass_exponent", p.rate_mass_exponent},
          {"csl_gamma", p.csl_gamma},
          {"noise_amplitude", p.noise_amplitude},
          {"time_unit_scale", p.time_unit_scale},
          {"lambda_amplification", p.lambda_amplification}};
}

inline CollapseParameters parameters_from_json(const json& j) {
  CollapseParameters p;
  p.alpha_length = j.value("alpha_length", p.alpha_length);
  p.lambda_base = j.value("lambda_base", p.lambda_base);
  p.reference_mass = j.value("reference_mass", p.reference_mass);
  p.rate_mass_exponent = j.value("rate_mass_exponent", p.rate_mass_exponent);
  p.csl_gamma = j.value("csl_gamma", p.csl_gamma);
  p.noise_amplitude = j.value("noise_amplitude", p.noise_amplitude);
  p.time_unit_scale = j.value("time_unit_scale", p.time_unit_scale);
  p.lambda_amplification = j.value("lambda_amplification", p.lambda_amplification);
  p.validate();
  return p;
}

inline MassObservablePartition partition_from_json(const json& j) {
  MassObservablePartition p{j.value("name", std::string{"location"}), {}};
  const auto determinates = detail::require<json>(j, "determinates", "partition");
  for (const auto& [label, cells] : determinates.items()) {
    p.determinates.push_back({label, cells.get<std::vector<std::size_t>>()});
  }
  return p;
}

inline json to_json(const MassDensityField& f) {
  json cells = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) {
    json c = {{"label", f.labels[i]},
              {"center", f.centers[i]},
              {"width", f.widths[i]},
              {"mean", f.mean[i]},
              {"mass", f.cell_mass[i]},
              {"variance", f.variance[i]},
              {"ratio", f.ratio[i] ? json(*f.ratio[i]) : json(nullptr)},
              {"accessible", static_cast<bool>(f.accessible[i])},
              {"status", to_string(f.status(i))}};
    if (!f.smeared_mean.empty()) c["smeared_mean"] = f.smeared_mean[i];
    cells.push_back(c);
  }
  return {{"threshold_eta", f.threshold_used},
          {"mass_floor", f.mass_floor},
          {"total_mass", f.total_mass},
          {"cells", cells}};
}

/// CSV with a comment header carrying the threshold and any extra metadata.
inline std::string field_csv(const MassDensityField& f, const json& metadata = json::object()) {
  std::ostringstream out;
  out.precision(17);
  out << "# threshold_eta=" << json(f.threshold_used).dump() << "\n";
  if (!metadata.empty()) out << "# config=" << metadata.dump() << "\n";
  out << "cell_center,mean,variance,ratio,accessible\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << f.centers[i] << ',' << f.mean[i] << ',' << f.variance[i] << ',';
    if (f.ratio[i]) {
      out << *f.ratio[i];
    } else {
      out << "undefined";
    }
    out << ',' << (f.accessible[i] ? 1 : 0) << '\n';
  }
  return out.str();
}

inline json to_json(const DegreeProfile& p) {
  json entries = json::array();
  for (const auto& e : p.entries) entries.push_back({{"label", e.label}, {"degree", e.degree}});
  return {{"determinable", p.determinable}, {"entries", entries}};
}

inline json to_json(const IndeterminacyReport& r) {
  json comps = json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"label", c.label},
                     {"degree", c.degree},
                     {"present", c.present},
                     {"ratio", c.ratio ? json(*c.ratio) : json(nullptr)},
                     {"accessible", c.accessible}});
  }
  return {{"classification", to_string(r.kind)},
          {"ratio_threshold", r.ratio_threshold},
          {"degree_threshold", r.degree_threshold},
          {"dominant", r.dominant},
          {"components", comps}};
}

}  // namespace grwm
