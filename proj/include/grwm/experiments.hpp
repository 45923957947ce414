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
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "grwm/branch_state.hpp"
#include "grwm/csl.hpp"
#include "grwm/degree.hpp"
#include "grwm/ensemble.hpp"
#include "grwm/errors.hpp"
#include "grwm/localization.hpp"
#include "grwm/mass_density.hpp"
#include "grwm/parameters.hpp"
#include "grwm/partition.hpp"
#include "grwm/report.hpp"
#include "grwm/serialization.hpp"
#include "grwm/trajectory.hpp"
#include "grwm/unitary.hpp"
#include "grwm/wavefunction.hpp"

namespace grwm {

/// Physical per-particle rate; configs scale it by "lambda_amplification".
inline constexpr double kPhysicalLambda = 1e-16;

namespace detail {

/// Defaults overridden by `overrides`; unknown keys are rejected.
inline json resolve_config(json defaults, const json& overrides) {
  if (!overrides.is_null() && !overrides.is_object()) throw ParameterError("experiment config must be an object");
  if (overrides.is_object()) {
    for (const auto& [key, value] : overrides.items()) {
      if (!defaults.contains(key)) throw ParameterError("unknown experiment parameter '" + key + "'");
      defaults[key] = value;
    }
  }
  return defaults;
}

inline ExperimentReport start_report(const std::string& name, json defaults, const json& overrides) {
  ExperimentReport r;
  r.spec.name = name;
  r.spec.parameters = resolve_config(std::move(defaults), overrides);
  r.spec.seed = r.spec.parameters.value("seed", std::uint64_t{0});
  return r;
}

template <class T>
T param(const json& c, const char* key) {
  try {
    return c.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("parameter '") + key + "': " + e.what());
  }
}

inline std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

inline std::string qname(const std::string& prefix, std::size_t n) { return prefix + "_n" + std::to_string(n); }
inline std::string qname(const std::string& prefix, double p) { return prefix + "_p" + fmt(p); }

inline void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("eta must be > 0");
}

inline CollapseParameters collapse_from(const json& c, double alpha, double lambda_base) {
  CollapseParameters p;
  p.alpha_length = alpha;
  p.lambda_base = lambda_base;
  p = p.amplified(param<double>(c, "lambda_amplification"));
  p.validate();
  return p;
}

inline std::vector<double> ratios_or_nan(const MassDensityField& f) {
  std::vector<double> out;
  for (const auto& r : f.ratio) out.push_back(r ? *r : std::nan(""));
  return out;
}

inline json ratio_json(const std::optional<double>& r) { return r ? json(*r) : json(nullptr); }

/// Parameters minus execution hints that cannot change results.
inline json without_hints(json c) {
  c.erase("parallelism");
  return c;
}

inline double branch_norm(const BranchState& s) { return std::sqrt(s.weight_sum()); }

/// The mass a determinate holds in a field built with a region/determinate partition.
inline double field_mass(const MassDensityField& f, const std::string& label) {
  return f.cell_mass[f.index_of(label)];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Superposition vs product

inline json superposition_vs_product_defaults() {
  return {{"n", 1000},
          {"mass", 1.0},
          {"region_width", 1.0},
          {"separation", 10.0},
          {"eta", kDefaultEta},
          {"lambda_amplification", 1.0},
          {"seed", 0}};
}

namespace detail {

struct PairFields {
  MassDensityField plus;
  MassDensityField product;
};

/// The N = 2 instance on the exact tier: a two-cell grid whose cells are A and B.
inline PairFields exact_pair_fields(double mass, double width, double eta) {
  const SpatialGrid grid(2, width, 0.0);
  const std::vector<ParticleSpec> particles{{"p0", mass}, {"p1", mass}};
  auto plus = WaveFunction::normalize({1.0, 0.0, 0.0, 1.0}, grid, particles);
  auto product = WaveFunction::normalize({0.0, 1.0, 0.0, 0.0}, grid, particles);
  return {analyze(plus, eta), analyze(product, eta)};
}

inline double cross_tier_difference(const MassDensityField& branch, const MassDensityField& exact) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    worst = std::max(worst, rel(branch.cell_mass[i], exact.cell_mass[i]));
    worst = std::max(worst, rel(branch.variance[i], exact.variance[i]));
    if (branch.ratio[i].has_value() != exact.ratio[i].has_value()) return 1.0;
    if (branch.ratio[i]) worst = std::max(worst, rel(*branch.ratio[i], *exact.ratio[i]));
  }
  return worst;
}

}  // namespace detail

inline ExperimentReport run_superposition_vs_product(const json& overrides = json::object()) {
  auto r = detail::start_report("superposition-vs-product", superposition_vs_product_defaults(), overrides);
  const auto& c = r.spec.parameters;
  const auto n = detail::param<std::size_t>(c, "n");
  const double m = detail::param<double>(c, "mass");
  const double width = detail::param<double>(c, "region_width");
  const double sep = detail::param<double>(c, "separation");
  const double eta = detail::param<double>(c, "eta");
  detail::check_eta(eta);
  if (n < 2 || n % 2 != 0) throw ParameterError("superposition-vs-product: N must be even and >= 2");

  const Region a{"A", -0.5 * sep, width};
  const Region b{"B", 0.5 * sep, width};
  const auto plus = superposition_state(n, m, a, b);
  const auto product = product_branch_state(n, m, a, b);
  const auto fp = analyze(plus, eta);
  const auto fq = analyze(product, eta);

  const double half = 0.5 * static_cast<double>(n) * m;
  r.measure("plus_mass_A", fp.cell_mass[0]);
  r.measure("plus_mass_B", fp.cell_mass[1]);
  r.measure("product_mass_A", fq.cell_mass[0]);
  r.measure("product_mass_B", fq.cell_mass[1]);
  r.measure("mass_A_relative_difference", std::abs(fp.cell_mass[0] - fq.cell_mass[0]) / fq.cell_mass[0]);
  r.measure("mass_B_relative_difference", std::abs(fp.cell_mass[1] - fq.cell_mass[1]) / fq.cell_mass[1]);
  r.measure("plus_variance_A", fp.variance[0]);
  r.measure("product_variance_A", fq.variance[0]);
  r.measure("plus_ratio_A", fp.ratio[0].value_or(std::nan("")));
  r.measure("plus_ratio_B", fp.ratio[1].value_or(std::nan("")));
  r.measure("product_ratio_A", fq.ratio[0].value_or(std::nan("")));
  r.measure("product_ratio_B", fq.ratio[1].value_or(std::nan("")));
  r.measure("plus_accessible_A", static_cast<bool>(fp.accessible[0]));
  r.measure("plus_accessible_B", static_cast<bool>(fp.accessible[1]));
  r.measure("product_accessible_A", static_cast<bool>(fq.accessible[0]));
  r.measure("product_accessible_B", static_cast<bool>(fq.accessible[1]));
  const bool outside_regime = eta >= 1.0;
  r.measure("eta_outside_regime", outside_regime);

  r.expect("plus_mass_A", Comparator::eq_rel, half, 1e-9);
  r.expect("plus_mass_B", Comparator::eq_rel, half, 1e-9);
  r.expect("product_mass_A", Comparator::eq_rel, half, 1e-9);
  r.expect("product_mass_B", Comparator::eq_rel, half, 1e-9);
  r.expect("mass_A_relative_difference", Comparator::le, 1e-9);
  r.expect("mass_B_relative_difference", Comparator::le, 1e-9);
  r.expect("plus_ratio_A", Comparator::eq_abs, 1.0, 1e-9);
  r.expect("plus_ratio_B", Comparator::eq_abs, 1.0, 1e-9);
  r.expect("product_ratio_A", Comparator::eq_abs, 0.0, 0.0);
  r.expect("product_ratio_B", Comparator::eq_abs, 0.0, 0.0);
  r.expect("product_accessible_A", Comparator::eq_abs, 1.0);
  r.expect("product_accessible_B", Comparator::eq_abs, 1.0);
  // Beyond eta = 1 the ratio test no longer separates the two states.
  r.expect("plus_accessible_A", Comparator::eq_abs, outside_regime ? 1.0 : 0.0);
  r.expect("plus_accessible_B", Comparator::eq_abs, outside_regime ? 1.0 : 0.0);

  const auto exact = detail::exact_pair_fields(m, width, eta);
  const auto plus2 = analyze(superposition_state(2, m, a, b), eta);
  const auto product2 = analyze(product_branch_state(2, m, a, b), eta);
  const double cross = std::max(detail::cross_tier_difference(plus2, exact.plus),
                                detail::cross_tier_difference(product2, exact.product));
  r.measure("cross_tier_n2_max_difference", cross);
  r.expect("cross_tier_n2_max_difference", Comparator::le, 1e-9);

  ConservationTracker t;
  t.observe(fp.integrated_mass(), plus.total_mass(), detail::branch_norm(plus));
  t.observe(fq.integrated_mass(), product.total_mass(), detail::branch_norm(product));
  t.observe(exact.plus.integrated_mass(), 2.0 * m, 1.0);
  t.record(r);

  r.details["plus_field"] = to_json(fp);
  r.details["product_field"] = to_json(fq);
  const auto partition = region_partition(plus);
  r.details["plus_degrees"] = to_json(degree_of(plus, partition));
  r.details["product_degrees"] = to_json(degree_of(product, partition));
  r.details["exact_n2"] = {{"plus_field", to_json(exact.plus)}, {"product_field", to_json(exact.product)}};
  if (outside_regime) {
    r.details["warnings"] = json::array({"eta >= 1 lies outside the small-ratio regime; both states pass"});
  }
  r.evaluate();
  return r;
}

// ---------------------------------------------------------------------------
// Tails persistence

inline json tails_demo_defaults() {
  return {{"separation", 1e-6},
          {"alpha_length", 1e-7},
          {"bump_width", 1e-7},
          {"cells_per_alpha", 16},
          {"margin_alphas", 8.0},
          {"mass", 1.0},
          {"eta", kDefaultEta},
          {"eta_sweep", {0.05, 0.1, 0.3, 0.5}},
          {"lambda_amplification", 1.0},
          {"seed", 0}};
}

/// Post-jump state of the tails demo, with the grid partition used to read it.
struct TailsSetup {
  WaveFunction before;
  WaveFunction after;
  MassObservablePartition partition;
  double left_center = 0.0;
  double right_center = 0.0;
  bool single_bump = false;
};

inline TailsSetup tails_setup(const json& c) {
  const double sep = detail::param<double>(c, "separation");
  const double alpha = detail::param<double>(c, "alpha_length");
  const double width = detail::param<double>(c, "bump_width");
  const double per_alpha = detail::param<double>(c, "cells_per_alpha");
  const double margin = detail::param<double>(c, "margin_alphas");
  const ParticleSpec particle{"p0", detail::param<double>(c, "mass")};
  validate_particle(particle);
  if (!(sep >= 0.0)) throw ParameterError("tails-demo: separation must be >= 0");
  if (!(alpha > 0.0) || !(width > 0.0) || !(per_alpha >= 1.0) || !(margin > 0.0)) {
    throw ParameterError("tails-demo: alpha_length, bump_width, margin must be > 0 and cells_per_alpha >= 1");
  }
  const double cell = alpha / per_alpha;
  const auto n_half = static_cast<std::size_t>(std::ceil((0.5 * sep + margin * alpha) / cell - 1e-9));
  const SpatialGrid grid(2 * n_half, cell, -static_cast<double>(n_half) * cell);

  TailsSetup s{gaussian_packet(grid, particle, -0.5 * sep, width), gaussian_packet(grid, particle, -0.5 * sep, width),
               {}, -0.5 * sep, 0.5 * sep, sep == 0.0};
  if (s.single_bump) {
    std::vector<std::size_t> all(grid.cell_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    s.partition = {"location", {{"bump", all}}};
  } else {
    const Complex h{1.0 / std::sqrt(2.0), 0.0};
    s.before = superpose({{h, gaussian_packet(grid, particle, s.left_center, width)},
                          {h, gaussian_packet(grid, particle, s.right_center, width)}});
    s.partition = split_partition(grid, 0.0, "left", "tail");
  }
  CollapseParameters p;
  p.alpha_length = alpha;
  s.after = apply_localization(s.before, 0, s.left_center, p);
  return s;
}

inline ExperimentReport run_tails_demo(const json& overrides = json::object()) {
  auto r = detail::start_report("tails-demo", tails_demo_defaults(), overrides);
  const auto& c = r.spec.parameters;
  const double eta = detail::param<double>(c, "eta");
  detail::check_eta(eta);
  const auto sweep = detail::param<std::vector<double>>(c, "eta_sweep");
  for (double e : sweep) detail::check_eta(e);
  const double alpha = detail::param<double>(c, "alpha_length");
  const auto s = tails_setup(c);

  FieldOptions opt;
  opt.partition = s.partition;
  const auto before = analyze(s.before, eta, opt);
  const auto after = analyze(s.after, eta, opt);
  const auto degrees = degree_of(s.after, s.partition);

  ConservationTracker t;
  t.observe(before.integrated_mass(), s.before.total_mass(), std::sqrt(s.before.norm_squared()));
  t.observe(after.integrated_mass(), s.after.total_mass(), std::sqrt(s.after.norm_squared()));
  t.record(r);

  if (s.single_bump) {
    r.measure("bump_degree", degrees.degree("bump"));
    r.measure("bump_accessible", static_cast<bool>(after.accessible[0]));
    r.expect("bump_degree", Comparator::eq_abs, 1.0, 1e-12);
    r.expect("bump_accessible", Comparator::eq_abs, 1.0);
  } else {
    const std::size_t left = after.index_of("left");
    const std::size_t tail = after.index_of("tail");
    const double p_tail = degrees.degree("tail");
    r.measure("tail_weight_before", before.cell_mass[tail] / s.before.total_mass());
    r.measure("tail_weight", p_tail);
    r.measure("tail_ratio", after.ratio[tail].value_or(std::nan("")));
    r.measure("tail_ratio_two_outcome", p_tail > 0.0 ? std::sqrt((1.0 - p_tail) / p_tail) : std::nan(""));
    r.measure("left_ratio", after.ratio[left].value_or(std::nan("")));
    r.measure("tail_accessible", static_cast<bool>(after.accessible[tail]));
    r.measure("left_accessible", static_cast<bool>(after.accessible[left]));
    bool tail_hidden = true;
    json per_eta = json::object();
    for (double e : sweep) {
      const auto f = after.reclassified(e);
      tail_hidden = tail_hidden && f.status(tail) == Accessibility::non_accessible;
      per_eta[detail::fmt(e)] = {{"left", to_string(f.status(left))}, {"tail", to_string(f.status(tail))}};
    }
    r.measure("tail_non_accessible_for_all_swept_eta", tail_hidden);
    r.details["verdicts_by_eta"] = per_eta;

    r.expect("tail_weight", Comparator::gt, 0.0);
    r.expect("tail_accessible", Comparator::eq_abs, 0.0);
    r.expect("tail_non_accessible_for_all_swept_eta", Comparator::eq_abs, 1.0);
    if (detail::param<double>(c, "separation") >= 10.0 * alpha) {
      r.expect("tail_weight", Comparator::lt, 1e-9);
      r.expect("left_accessible", Comparator::eq_abs, 1.0);
    }
  }
  r.details["grid"] = to_json(s.after.grid());
  r.details["degrees_after_jump"] = to_json(degrees);
  r.details["field_before"] = to_json(before);
  r.details["field_after"] = to_json(after);
  r.details["jump_center"] = s.left_center;
  r.evaluate();
  return r;
}

// ---------------------------------------------------------------------------
// Counting anomaly

inline json counting_anomaly_defaults() {
  return {{"n_list", {1, 100, 1000}},
          {"in_weight", 0.99},
          {"mass", 1.0},
          {"eta", 0.5},
          {"lambda_amplification", 1.0},
          {"seed", 0}};
}

inline ExperimentReport run_counting_anomaly(const json& overrides = json::object()) {
  auto r = detail::start_report("counting-anomaly", counting_anomaly_defaults(), overrides);
  const auto& c = r.spec.parameters;
  auto ns = detail::param<std::vector<std::size_t>>(c, "n_list");
  const double w = detail::param<double>(c, "in_weight");
  const double m = detail::param<double>(c, "mass");
  const double eta = detail::param<double>(c, "eta");
  detail::check_eta(eta);
  if (ns.empty()) throw ParameterError("counting-anomaly: n_list is empty");
  for (auto n : ns) {
    if (n < 1) throw ParameterError("counting-anomaly: n must be >= 1");
  }
  if (!(w > 0.0 && w < 1.0)) throw ParameterError("counting-anomaly: in_weight must lie in (0, 1)");
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  const Region box{"box", 0.0, 1.0};
  const Region out{"outside", 10.0, 1.0};
  ConservationTracker t;
  std::vector<double> joints;
  json per_n = json::array();
  for (auto n : ns) {
    double joint = 1.0;
    std::size_t accessible = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto marble = two_branch_state(1, m, box, out, w);
      const auto profile = degree_of(marble, region_partition(marble));
      joint *= profile.degree("box");
      const auto field = analyze(marble, eta);
      if (field.accessible[field.index_of("box")]) ++accessible;
      t.observe(field.integrated_mass(), marble.total_mass(), detail::branch_norm(marble));
      if (k == 0 && n == ns.front()) {
        r.details["marble_degrees"] = to_json(profile);
        r.details["marble_field"] = to_json(field);
        r.measure("marble_ratio_in", field.ratio[field.index_of("box")].value_or(std::nan("")));
      }
    }
    joints.push_back(joint);
    r.measure(detail::qname("joint_probability", n), joint);
    r.measure(detail::qname("joint_power_difference", n), std::abs(joint - std::pow(w, static_cast<double>(n))));
    r.measure(detail::qname("accessible_count", n), static_cast<double>(accessible));
    r.expect(detail::qname("joint_power_difference", n), Comparator::le, 1e-12);
    r.expect(detail::qname("accessible_count", n), Comparator::eq_abs, static_cast<double>(n));
    per_n.push_back({{"n", n}, {"joint_probability", joint}, {"accessible_count", accessible}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < joints.size(); ++i) decreasing = decreasing && joints[i] < joints[i - 1];
  r.measure("joint_strictly_decreasing", decreasing);
  r.expect("joint_strictly_decreasing", Comparator::eq_abs, 1.0);
  t.record(r);
  r.details["by_n"] = per_n;
  r.evaluate();
  return r;
}

// ---------------------------------------------------------------------------
// Threshold sweep

inline json threshold_sweep_defaults() {
  return {{"eta_grid", {0.05, 0.1, 0.3, 0.5}},
          {"boundary_etas", {0.9999, 1.0001}},
          {"n", 1000},
          {"eta", kDefaultEta},
          {"lambda_amplification", 1.0},
          {"seed", 0}};
}

struct SuiteState {
  std::string name;
  MassDensityField field;
  double expected_mass = 0.0;
  double norm = 1.0;
};

/// The standard suite: psi-plus, psi-product and the post-jump tails demo.
inline std::vector<SuiteState> standard_suite(std::size_t n) {
  const Region a{"A", -5.0, 1.0};
  const Region b{"B", 5.0, 1.0};
  const auto plus = superposition_state(n, 1.0, a, b);
  const auto product = product_branch_state(n, 1.0, a, b);
  const auto tails = tails_setup(tails_demo_defaults());
  FieldOptions opt;
  opt.partition = tails.partition;
  return {{"psi_plus", analyze(plus), plus.total_mass(), detail::branch_norm(plus)},
          {"psi_product", analyze(product), product.total_mass(), detail::branch_norm(product)},
          {"tails_demo", analyze(tails.after, kDefaultEta, opt), tails.after.total_mass(),
           std::sqrt(tails.after.norm_squared())}};
}

inline ExperimentReport run_threshold_sweep(const json& overrides = json::object()) {
  auto r = detail::start_report("threshold-sweep", threshold_sweep_defaults(), overrides);
  const auto& c = r.spec.parameters;
  const auto grid = detail::param<std::vector<double>>(c, "eta_grid");
  const auto boundary = detail::param<std::vector<double>>(c, "boundary_etas");
  if (grid.empty()) throw ParameterError("threshold-sweep: empty eta grid");
  detail::check_eta(detail::param<double>(c, "eta"));
  json above_one = json::array();
  for (double e : grid) {
    detail::check_eta(e);
    if (e > 1.0) above_one.push_back(e);
  }
  for (double e : boundary) {
    detail::check_eta(e);
    if (e > 1.0) above_one.push_back(e);
  }
  const auto n = detail::param<std::size_t>(c, "n");
  if (n < 2 || n % 2 != 0) throw ParameterError("threshold-sweep: N must be even and >= 2");
  const auto suite = standard_suite(n);

  // mask[eta index][state index] = per-cell verdicts
  auto masks_at = [&](double e) {
    std::vector<std::vector<bool>> out;
    for (const auto& s : suite) out.push_back(classify_accessible(s.field.ratio, e));
    return out;
  };
  std::vector<std::vector<std::vector<bool>>> masks;
  for (double e : grid) masks.push_back(masks_at(e));

  json mask_doc = json::object();
  for (std::size_t s = 0; s < suite.size(); ++s) {
    json per = json::object();
    for (std::size_t g = 0; g < grid.size(); ++g) per[detail::fmt(grid[g])] = masks[g][s];
    mask_doc[suite[s].name] = {{"labels", suite[s].field.labels},
                               {"ratios", detail::ratios_or_nan(suite[s].field)},
                               {"masks", per}};
  }
  json agreement = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < grid.size(); ++j) {
      std::size_t same = 0;
      for (std::size_t s = 0; s < suite.size(); ++s) same += masks[i][s] == masks[j][s] ? 1 : 0;
      row.push_back(same);
    }
    agreement.push_back(row);
  }
  std::set<std::vector<std::vector<bool>>> distinct(masks.begin(), masks.end());
  r.measure("grid_distinct_mask_sets", static_cast<double>(distinct.size()));
  r.expect("grid_distinct_mask_sets", Comparator::eq_abs, 1.0);

  if (boundary.size() == 2) {
    const auto lo = masks_at(boundary[0]);
    const auto hi = masks_at(boundary[1]);
    std::size_t flipped = 0;
    json which = json::array();
    for (std::size_t s = 0; s < suite.size(); ++s) {
      if (lo[s] != hi[s]) {
        ++flipped;
        which.push_back(suite[s].name);
      }
    }
    r.measure("boundary_flipped_states", static_cast<double>(flipped));
    r.measure("boundary_flips_psi_plus", flipped == 1 && which[0] == "psi_plus");
    r.expect("boundary_flipped_states", Comparator::eq_abs, 1.0);
    r.expect("boundary_flips_psi_plus", Comparator::eq_abs, 1.0);
    r.details["boundary"] = {{"etas", boundary}, {"flipped", which}};
  } else if (!boundary.empty()) {
    throw ParameterError("threshold-sweep: boundary_etas must hold two values");
  }

  ConservationTracker t;
  for (const auto& s : suite) t.observe(s.field.integrated_mass(), s.expected_mass, s.norm);
  t.record(r);
  r.details["eta_grid"] = grid;
  r.details["suite"] = mask_doc;
  r.details["agreement_matrix"] = agreement;
  if (!above_one.empty()) r.details["eta_above_one"] = above_one;
  r.evaluate();
  return r;
}

// ---------------------------------------------------------------------------
// Test-particle deflection

inline json test_particle_deflection_defaults() {
  return {{"n", 1000},
          {"mass", 1.0},
          {"region_a_center", 1.0},
          {"region_b_center", -1.0},
          {"region_width", 0.5},
          {"alpha_length", 0.05},
          {"gravity_constant", 1e-4},
          {"x_start", -50.0},
          {"x_end", 50.0},
          {"speed", 1.0},
          {"steps", 2000},
          {"cases", {"plus/mean-field", "product/mean-field", "plus/post-collapse"}},
          {"ensemble", 10000},
          {"parallelism", 0},
          {"eta", kDefaultEta},
          {"lambda_amplification", 1e16},
          {"seed", 20260417}};
}

struct DeflectionGeometry {
  double gravity = 1e-4;
  double x_start = -50.0;
  double x_end = 50.0;
  double speed = 1.0;
  std::size_t steps = 2000;
};

/// Transverse deflection angle of a test particle flying along y = 0 past
/// point masses (y_s, M_s) at x = 0. Velocity Verlet in the plane.
inline double deflection_angle(const std::vector<std::pair<double, double>>& sources, const DeflectionGeometry& g) {
  double x = g.x_start, y = 0.0, vx = g.speed, vy = 0.0;
  const double dt = (g.x_end - g.x_start) / g.speed / static_cast<double>(g.steps);
  auto accel = [&](double px, double py) {
    double ax = 0.0, ay = 0.0;
    for (const auto& [ys, ms] : sources) {
      const double dx = -px;
      const double dy = ys - py;
      const double r2 = dx * dx + dy * dy;
      const double f = g.gravity * ms / (r2 * std::sqrt(r2));
      ax += f * dx;
      ay += f * dy;
    }
    return std::pair{ax, ay};
  };
  auto [ax, ay] = accel(x, y);
  for (std::size_t i = 0; i < g.steps; ++i) {
    vx += 0.5 * dt * ax;
    vy += 0.5 * dt * ay;
    x += dt * vx;
    y += dt * vy;
    std::tie(ax, ay) = accel(x, y);
    vx += 0.5 * dt * ax;
    vy += 0.5 * dt * ay;
  }
  return std::atan2(vy, vx);
}

inline ExperimentReport run_test_particle_deflection(const json& overrides = json::object()) {
  auto r = detail::start_report("test-particle-deflection", test_particle_deflection_defaults(), overrides);
  const auto& c = r.spec.parameters;
  const auto n = detail::param<std::size_t>(c, "n");
  const double m = detail::param<double>(c, "mass");
  const double ya = detail::param<double>(c, "region_a_center");
  const double yb = detail::param<double>(c, "region_b_center");
  const double width = detail::param<double>(c, "region_width");
  const double eta = detail::param<double>(c, "eta");
  detail::check_eta(eta);
  if (!(ya > 0.0) || std::abs(ya + yb) > 1e-12 * std::abs(ya)) {
    throw ParameterError("test-particle-deflection: regions must sit symmetrically at y = +d and y = -d");
  }
  if (n < 2 || n % 2 != 0) throw ParameterError("test-particle-deflection: N must be even and >= 2");
  DeflectionGeometry g{detail::param<double>(c, "gravity_constant"), detail::param<double>(c, "x_start"),
                       detail::param<double>(c, "x_end"), detail::param<double>(c, "speed"),
                       detail::param<std::size_t>(c, "steps")};
  if (!(g.speed > 0.0) || !(g.x_end > g.x_start) || g.steps == 0) {
    throw ParameterError("test-particle-deflection: need speed > 0, x_end > x_start and steps > 0");
  }
  const auto params = detail::collapse_from(c, detail::param<double>(c, "alpha_length"), kPhysicalLambda);

  const Region a{"A", ya, width};
  const Region b{"B", yb, width};
  auto make_state = [&](const std::string& which) {
    if (which == "plus") return superposition_state(n, m, a, b);
    if (which == "product") return product_branch_state(n, m, a, b);
    throw ParameterError("test-particle-deflection: unknown state '" + which + "'");
  };
  auto sources_of = [&](const BranchState& s) {
    const auto f = analyze(s, eta);
    return std::vector<std::pair<double, double>>{{ya, f.cell_mass[0]}, {yb, f.cell_mass[1]}};
  };

  ConservationTracker t;
  json cases = json::array();
  for (const auto& name : detail::param<std::vector<std::string>>(c, "cases")) {
    const auto slash = name.find('/');
    if (slash == std::string::npos) throw ParameterError("test-particle-deflection: case must be state/sourcing");
    const std::string which = name.substr(0, slash);
    const std::string sourcing = name.substr(slash + 1);
    const auto state = make_state(which);
    const std::string key = which + "_" + (sourcing == "mean-field" ? "mean_field" : "post_collapse");
    if (sourcing == "mean-field") {
      const auto f = analyze(state, eta);
      t.observe(f.integrated_mass(), state.total_mass(), detail::branch_norm(state));
      const double angle = deflection_angle(sources_of(state), g);
      r.measure(key + "_deflection", angle);
      r.measure(key + "_deflection_abs", std::abs(angle));
      r.expect(key + "_deflection_abs", Comparator::lt, 1e-12);
      cases.push_back({{"case", name}, {"deflection", angle}, {"source_masses", f.cell_mass}});
    } else if (sourcing == "post-collapse") {
      const auto trajectories = detail::param<std::size_t>(c, "ensemble");
      const auto hint = detail::param<unsigned>(c, "parallelism");
      const double rate = effective_rate({"", m}, params) * static_cast<double>(n);
      if (!(rate > 0.0)) throw ParameterError("test-particle-deflection: post-collapse sourcing needs lambda > 0");
      TrajectoryOptions opt;
      opt.mode = DynamicsMode::jumps;
      opt.max_jumps = 1;
      opt.t_final = 50.0 / rate;
      const auto manifest = run_ensemble(
          {{"case", name}, {"parameters", detail::without_hints(c)}}, trajectories, r.spec.seed, hint == 0 ? default_parallelism() : hint,
          [&](std::size_t, std::uint64_t seed) {
            auto o = opt;
            o.seed = seed;
            const auto rec = evolve_trajectory(state, params, o);
            if (rec.jumps.empty()) throw Error("no collapse before t_final");
            const auto& final_state = std::get<BranchState>(*rec.final_state);
            const auto f = analyze(final_state, eta);
            const double angle = deflection_angle(sources_of(final_state), g);
            TrajectoryDigest d;
            d.values["deflection"] = angle;
            d.values["mass_error"] = std::abs(f.integrated_mass() - final_state.total_mass()) / final_state.total_mass();
            d.values["norm_error"] = std::abs(detail::branch_norm(final_state) - 1.0);
            d.flags["toward_A"] = angle > 0.0;
            d.flags["toward_B"] = angle < 0.0;
            return d;
          });
      const auto& freq = manifest.statistics.frequencies.at("toward_A");
      const double sigma = std::sqrt(0.25 / static_cast<double>(freq.count));
      t.max_mass_error = std::max(t.max_mass_error, manifest.statistics.means.at("mass_error").max);
      t.max_norm_error = std::max(t.max_norm_error, manifest.statistics.means.at("norm_error").max);
      r.measure(key + "_toward_A_frequency", freq.frequency);
      r.measure(key + "_toward_A_deviation", std::abs(freq.frequency - 0.5));
      r.measure(key + "_toward_A_three_sigma", 3.0 * sigma);
      r.measure(key + "_failures", static_cast<double>(manifest.statistics.failures));
      r.measure(key + "_mean_deflection", manifest.statistics.means.at("deflection").mean);
      if (which == "plus") r.expect(key + "_toward_A_deviation", Comparator::le, 3.0 * sigma);
      r.expect(key + "_failures", Comparator::eq_abs, 0.0);
      json hist = json::array();
      for (const auto& d : manifest.digests) {
        if (d.ok) hist.push_back(d.values.at("deflection"));
      }
      cases.push_back({{"case", name},
                       {"toward_A", {{"frequency", freq.frequency}, {"wilson95_low", freq.ci_low},
                                     {"wilson95_high", freq.ci_high}, {"count", freq.count}}},
                       {"toward_B_frequency", manifest.statistics.frequencies.at("toward_B").frequency},
                       {"parameter_hash", manifest.parameter_hash},
                       {"deflections", hist}});
    } else {
      throw ParameterError("test-particle-deflection: unknown sourcing '" + sourcing + "'");
    }
  }
  t.record(r);
  r.details["cases"] = cases;
  r.details["collapse_parameters"] = to_json(params);
  r.evaluate();
  return r;
}

// ---------------------------------------------------------------------------
// Collapse-rate scaling

inline json collapse_rate_scaling_defaults() {
  return {{"n_list", {1, 10, 100}},
          {"mass", 1.0},
          {"lambda_base", kPhysicalLambda},
          {"lambda_amplification", 1e16},
          {"ensemble", 10000},
          {"t_final_factor", 50.0},
          {"t_final_censored", 1.0},
          {"relative_tolerance", 0.05},
          {"parallelism", 0},
          {"eta", kDefaultEta},
          {"seed", 314159}};
}

inline ExperimentReport run_collapse_rate_scaling(const json& overrides = json::object()) {
  auto r = detail::start_report("collapse-rate-scaling", collapse_rate_scaling_defaults(), overrides);
  const auto& c = r.spec.parameters;
  const auto ns = detail::param<std::vector<std::size_t>>(c, "n_list");
  const double m = detail::param<double>(c, "mass");
  const auto trajectories = detail::param<std::size_t>(c, "ensemble");
  const auto hint = detail::param<unsigned>(c, "parallelism");
  const double tol = detail::param<double>(c, "relative_tolerance");
  detail::check_eta(detail::param<double>(c, "eta"));
  if (trajectories < 1000) throw ParameterError("collapse-rate-scaling: ensemble must be >= 1000");
  if (ns.empty()) throw ParameterError("collapse-rate-scaling: n_list is empty");
  CollapseParameters params;
  params.lambda_base = detail::param<double>(c, "lambda_base");
  params = params.amplified(detail::param<double>(c, "lambda_amplification"));
  params.validate();
  const double lambda = effective_rate({"", m}, params);

  const Region a{"A", -5.0, 1.0};
  const Region b{"B", 5.0, 1.0};
  ConservationTracker t;
  json rows = json::array();
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const auto n = ns[k];
    if (n < 1) throw ParameterError("collapse-rate-scaling: N must be >= 1");
    const auto state = superposition_state(n, m, a, b);
    TrajectoryOptions opt;
    opt.mode = DynamicsMode::jumps;
    opt.max_jumps = 1;
    opt.t_final = lambda > 0.0 ? detail::param<double>(c, "t_final_factor") / (static_cast<double>(n) * lambda)
                               : detail::param<double>(c, "t_final_censored");
    const auto manifest = run_ensemble(
        {{"n", n}, {"parameters", detail::without_hints(c)}}, trajectories, child_seed(r.spec.seed, k),
        hint == 0 ? default_parallelism() : hint, [&](std::size_t, std::uint64_t seed) {
          auto o = opt;
          o.seed = seed;
          const auto rec = evolve_trajectory(state, params, o);
          TrajectoryDigest d;
          d.flags["censored"] = rec.jumps.empty();
          if (!rec.jumps.empty()) d.values["first_jump_time"] = rec.jumps.front().time;
          for (const auto& s : rec.snapshots) {
            d.values["mass_error"] = std::max(d.values["mass_error"], std::abs(s.total_mass - state.total_mass()) /
                                                                          state.total_mass());
            d.values["norm_error"] = std::max(d.values["norm_error"], std::abs(s.norm - 1.0));
          }
          return d;
        });
    const auto& st = manifest.statistics;
    const double censored = st.frequencies.at("censored").frequency;
    t.max_mass_error = std::max(t.max_mass_error, st.means.at("mass_error").max);
    t.max_norm_error = std::max(t.max_norm_error, st.means.at("norm_error").max);
    r.measure(detail::qname("censored_fraction", n), censored);
    json row = {{"n", n}, {"censored_fraction", censored}, {"t_final", opt.t_final}};
    if (lambda > 0.0) {
      const double expected = 1.0 / (static_cast<double>(n) * lambda);
      const auto& mean = st.means.at("first_jump_time");
      r.measure(detail::qname("mean_first_jump_time", n), mean.mean);
      r.measure(detail::qname("expected_first_jump_time", n), expected);
      r.measure(detail::qname("relative_error", n), std::abs(mean.mean - expected) / expected);
      r.expect(detail::qname("relative_error", n), Comparator::le, tol);
      row["mean_first_jump_time"] = mean.mean;
      row["std_error"] = mean.std_error;
      row["expected"] = expected;
    } else {
      r.expect(detail::qname("censored_fraction", n), Comparator::eq_abs, 1.0);
    }
    row["parameter_hash"] = manifest.parameter_hash;
    rows.push_back(row);
  }
  t.record(r);
  r.details["lambda_per_particle"] = lambda;
  r.details["collapse_parameters"] = to_json(params);
  r.details["rows"] = rows;
  r.evaluate();
  return r;
}

// ---------------------------------------------------------------------------
// Born statistics of branch selection under jumps

inline json born_statistics_defaults() {
  return {{"weights", {0.5, 0.9}},
          {"n", 10},
          {"mass", 1.0},
          {"alpha_length", 0.01},
          {"lambda_amplification", 1e16},
          {"ensemble", 10000},
          {"parallelism", 0},
          {"eta", kDefaultEta},
          {"seed", 271828}};
}

namespace detail {

inline void record_frequency(ExperimentReport& r, const std::string& key, const FrequencyStat& f, double p) {
  const double tol = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(f.count));
  r.measure(key + "_frequency", f.frequency);
  r.measure(key + "_deviation", std::abs(f.frequency - p));
  r.measure(key + "_three_sigma", tol);
  r.expect(key + "_deviation", Comparator::le, tol);
}

}  // namespace detail

inline ExperimentReport run_born_statistics(const json& overrides = json::object()) {
  auto r = detail::start_report("born-statistics", born_statistics_defaults(), overrides);
  const auto& c = r.spec.parameters;
  const auto ps = detail::param<std::vector<double>>(c, "weights");
  const auto n = detail::param<std::size_t>(c, "n");
  const double m = detail::param<double>(c, "mass");
  const auto trajectories = detail::param<std::size_t>(c, "ensemble");
  const auto hint = detail::param<unsigned>(c, "parallelism");
  const double eta = detail::param<double>(c, "eta");
  detail::check_eta(eta);
  const auto params = detail::collapse_from(c, detail::param<double>(c, "alpha_length"), kPhysicalLambda);
  const double rate = effective_rate({"", m}, params) * static_cast<double>(n);
  if (!(rate > 0.0)) throw ParameterError("born-statistics: lambda must be > 0");

  const Region a{"A", -0.5, 0.1};
  const Region b{"B", 0.5, 0.1};
  ConservationTracker t;
  json rows = json::array();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const double p = ps[k];
    const auto state = two_branch_state(n, m, a, b, p);
    TrajectoryOptions opt;
    opt.mode = DynamicsMode::jumps;
    opt.max_jumps = 1;
    opt.t_final = 50.0 / rate;
    const auto manifest = run_ensemble(
        {{"p", p}, {"parameters", detail::without_hints(c)}}, trajectories, child_seed(r.spec.seed, k),
        hint == 0 ? default_parallelism() : hint, [&](std::size_t, std::uint64_t seed) {
          auto o = opt;
          o.seed = seed;
          const auto rec = evolve_trajectory(state, params, o);
          if (rec.jumps.empty()) throw Error("no collapse before t_final");
          const auto& fin = std::get<BranchState>(*rec.final_state);
          const auto f = analyze(fin, eta);
          TrajectoryDigest d;
          d.flags["selected_A"] = fin.weights()[0] > 0.5;
          d.values["final_weight_A"] = fin.weights()[0];
          d.values["mass_error"] = std::abs(f.integrated_mass() - fin.total_mass()) / fin.total_mass();
          d.values["norm_error"] = std::abs(detail::branch_norm(fin) - 1.0);
          return d;
        });
    const auto& st = manifest.statistics;
    t.max_mass_error = std::max(t.max_mass_error, st.means.at("mass_error").max);
    t.max_norm_error = std::max(t.max_norm_error, st.means.at("norm_error").max);
    detail::record_frequency(r, detail::qname("selected_A", p), st.frequencies.at("selected_A"), p);
    r.measure(detail::qname("failures", p), static_cast<double>(st.failures));
    r.expect(detail::qname("failures", p), Comparator::eq_abs, 0.0);
    const auto& f = st.frequencies.at("selected_A");
    rows.push_back({{"p", p}, {"frequency", f.frequency}, {"wilson95_low", f.ci_low},
                    {"wilson95_high", f.ci_high}, {"count", f.count},
                    {"parameter_hash", manifest.parameter_hash}});
  }
  t.record(r);
  r.details["collapse_parameters"] = to_json(params);
  r.details["rows"] = rows;
  r.evaluate();
  return r;
}

// ---------------------------------------------------------------------------
// Continuous collapse

inline json csl_collapse_defaults() {
  return {{"cells", 8},
          {"cell_width", 1.0},
          {"left_cell", 2},
          {"right_cell", 5},
          {"weights", {0.5, 0.9}},
          {"csl_gamma", 2.0},
          {"dt", 0.01},
          {"steps", 1000},
          {"snapshots", 10},
          {"ensemble", 10000},
          {"parallelism", 0},
          {"eta", kDefaultEta},
          {"lambda_amplification", 1.0},
          {"seed", 161803}};
}

/// Largest amplitude difference between csl_step with a silent field and
/// gamma = 0, and unitary_step, over `steps` steps of a free Gaussian packet.
inline double csl_zero_noise_difference(std::size_t steps = 20) {
  const SpatialGrid grid(128, 0.1, -6.4);
  const auto h = Hamiltonian::free_particle();
  CollapseParameters off;
  off.csl_gamma = 0.0;
  auto a = gaussian_packet(grid, {"p0", 1.0}, -1.0, 0.5, 2.0);
  auto b = a;
  double worst = 0.0;
  const double dt = 0.01;
  for (std::size_t s = 0; s < steps; ++s) {
    a = csl_step(a, NoiseField::silent(grid.cell_count(), dt), dt, off, h);
    b = unitary_step(b, h, dt);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.amplitudes()[i] - b.amplitudes()[i]));
  }
  return worst;
}

inline ExperimentReport run_csl_collapse(const json& overrides = json::object()) {
  auto r = detail::start_report("csl-collapse", csl_collapse_defaults(), overrides);
  const auto& c = r.spec.parameters;
  const auto cells = detail::param<std::size_t>(c, "cells");
  const double width = detail::param<double>(c, "cell_width");
  const auto lc = detail::param<std::size_t>(c, "left_cell");
  const auto rc = detail::param<std::size_t>(c, "right_cell");
  const auto ps = detail::param<std::vector<double>>(c, "weights");
  const double dt = detail::param<double>(c, "dt");
  const auto steps = detail::param<std::size_t>(c, "steps");
  const auto n_snap = detail::param<std::size_t>(c, "snapshots");
  const auto trajectories = detail::param<std::size_t>(c, "ensemble");
  const auto hint = detail::param<unsigned>(c, "parallelism");
  const double eta = detail::param<double>(c, "eta");
  detail::check_eta(eta);
  if (lc >= cells || rc >= cells || lc == rc) throw ParameterError("csl-collapse: bad left/right cells");
  if (steps == 0 || n_snap == 0 || steps % n_snap != 0) {
    throw ParameterError("csl-collapse: steps must be a positive multiple of snapshots");
  }
  CollapseParameters params = detail::collapse_from(c, 1.0, kPhysicalLambda);
  params.csl_gamma = detail::param<double>(c, "csl_gamma");
  params.validate();
  const SpatialGrid grid(cells, width, 0.0);

  const double zero_noise = csl_zero_noise_difference();
  r.measure("zero_noise_max_amplitude_difference", zero_noise);
  r.expect("zero_noise_max_amplitude_difference", Comparator::le, 1e-12);

  ConservationTracker t;
  json rows = json::array();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const double p = ps[k];
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("csl-collapse: weights must lie in (0, 1)");
    std::vector<Complex> amps(cells, Complex{0.0, 0.0});
    amps[lc] = std::sqrt(p);
    amps[rc] = std::sqrt(1.0 - p);
    const auto psi = WaveFunction::normalize(std::move(amps), grid, 1);
    TrajectoryOptions opt;
    opt.mode = DynamicsMode::csl;
    opt.dt = dt;
    opt.t_final = dt * static_cast<double>(steps);
    opt.snapshot_every = dt * static_cast<double>(steps / n_snap);
    const auto manifest = run_ensemble(
        {{"p", p}, {"parameters", detail::without_hints(c)}}, trajectories, child_seed(r.spec.seed, k),
        hint == 0 ? default_parallelism() : hint, [&](std::size_t, std::uint64_t seed) {
          auto o = opt;
          o.seed = seed;
          const auto rec = evolve_trajectory(psi, params, o);
          TrajectoryDigest d;
          double mass_err = 0.0, norm_err = 0.0;
          for (std::size_t s = 0; s < rec.snapshots.size(); ++s) {
            const auto& snap = rec.snapshots[s];
            mass_err = std::max(mass_err, std::abs(snap.total_mass - psi.total_mass()) / psi.total_mass());
            norm_err = std::max(norm_err, std::abs(snap.norm - 1.0));
            for (std::size_t j = 0; j < snap.variance.size(); ++j) {
              d.values["V_s" + std::to_string(s) + "_c" + std::to_string(j)] = snap.variance[j];
            }
          }
          const auto& fin = rec.final_snapshot();
          d.values["mass_error"] = mass_err;
          d.values["norm_error"] = norm_err;
          d.values["final_left_mass"] = fin.cell_mass[lc];
          d.flags["selected_left"] = fin.cell_mass[lc] > 0.5 * psi.total_mass();
          return d;
        });
    const auto& st = manifest.statistics;
    t.max_mass_error = std::max(t.max_mass_error, st.means.at("mass_error").max);
    t.max_norm_error = std::max(t.max_norm_error, st.means.at("norm_error").max);

    std::size_t increases = 0;
    json mean_v = json::array();
    for (std::size_t s = 0; s <= n_snap; ++s) {
      json row = json::array();
      for (std::size_t j = 0; j < cells; ++j) {
        const double v = st.means.at("V_s" + std::to_string(s) + "_c" + std::to_string(j)).mean;
        row.push_back(v);
        if (s > 0) {
          const double prev = st.means.at("V_s" + std::to_string(s - 1) + "_c" + std::to_string(j)).mean;
          if (v > prev) ++increases;
        }
      }
      mean_v.push_back(row);
    }
    r.measure(detail::qname("mean_variance_increases", p), static_cast<double>(increases));
    r.expect(detail::qname("mean_variance_increases", p), Comparator::eq_abs, 0.0);
    detail::record_frequency(r, detail::qname("selected_left", p), st.frequencies.at("selected_left"), p);
    r.measure(detail::qname("failures", p), static_cast<double>(st.failures));
    r.expect(detail::qname("failures", p), Comparator::eq_abs, 0.0);
    const auto& f = st.frequencies.at("selected_left");
    rows.push_back({{"p", p}, {"frequency", f.frequency}, {"wilson95_low", f.ci_low},
                    {"wilson95_high", f.ci_high}, {"count", f.count},
                    {"ensemble_mean_variance", mean_v}, {"parameter_hash", manifest.parameter_hash}});
  }
  t.record(r);
  r.details["collapse_parameters"] = to_json(params);
  r.details["rows"] = rows;
  r.evaluate();
  return r;
}

// ---------------------------------------------------------------------------
// Registry

struct ExperimentEntry {
  std::string name;
  std::string summary;
  std::function<json()> defaults;
  std::function<ExperimentReport(const json&)> run;
};

inline const std::vector<ExperimentEntry>& experiment_registry() {
  static const std::vector<ExperimentEntry> entries = {
      {"superposition-vs-product", "same mass density, opposite accessibility verdicts",
       superposition_vs_product_defaults, run_superposition_vs_product},
      {"tails-demo", "tail weight and accessibility after one localization", tails_demo_defaults, run_tails_demo},
      {"counting-anomaly", "joint in-box probability vs accessible count", counting_anomaly_defaults,
       run_counting_anomaly},
      {"threshold-sweep", "accessibility masks across thresholds", threshold_sweep_defaults, run_threshold_sweep},
      {"test-particle-deflection", "test particle sourced by mean-field or collapsed mass",
       test_particle_deflection_defaults, run_test_particle_deflection},
      {"collapse-rate-scaling", "mean first-jump time against 1/(N lambda)", collapse_rate_scaling_defaults,
       run_collapse_rate_scaling},
      {"born-statistics", "branch-selection frequencies under jumps", born_statistics_defaults, run_born_statistics},
      {"csl-collapse", "continuous collapse: variance decay and Born frequencies", csl_collapse_defaults,
       run_csl_collapse},
  };
  return entries;
}

inline const ExperimentEntry& find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry()) {
    if (e.name == name) return e;
  }
  throw ParameterError("unknown experiment '" + name + "'");
}

inline ExperimentReport run_experiment(const std::string& name, const json& overrides = json::object()) {
  return find_experiment(name).run(overrides);
}

}  // namespace grwm
