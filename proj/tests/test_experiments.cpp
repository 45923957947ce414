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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>

#include "grwm/grwm.hpp"
#include "oracles.hpp"

using namespace grwm;

namespace {

double q(const ExperimentReport& r, const std::string& name) {
  const auto v = r.value(name);
  if (!v) throw std::runtime_error("quantity not measured: " + name);
  return *v;
}

std::string failures_of(const ExperimentReport& r) {
  std::string out;
  for (const auto& o : r.outcomes) {
    if (!o.passed) out += o.check.quantity + " ";
  }
  return out;
}

}  // namespace

TEST(Report, ComparatorsAndEvaluation) {
  EXPECT_TRUE((Check{"x", Comparator::eq_abs, 1.0, 0.1}.accepts(1.05)));
  EXPECT_FALSE((Check{"x", Comparator::eq_rel, 10.0, 0.01}.accepts(10.2)));
  EXPECT_TRUE((Check{"x", Comparator::lt, 1.0}.accepts(0.5)));
  EXPECT_FALSE((Check{"x", Comparator::lt, 1.0}.accepts(1.0)));
  EXPECT_TRUE((Check{"x", Comparator::le, 1.0}.accepts(1.0)));
  EXPECT_TRUE((Check{"x", Comparator::ge, 1.0}.accepts(1.0)));
  EXPECT_FALSE((Check{"x", Comparator::gt, 1.0}.accepts(1.0)));
  EXPECT_EQ(comparator_from("eq_rel"), Comparator::eq_rel);
  EXPECT_THROW(comparator_from("approx"), FormatError);

  ExperimentReport r;
  r.spec.name = "demo";
  r.measure("a", 1.0);
  r.measure("nan", std::nan(""));
  r.expect("a", Comparator::eq_abs, 1.0);
  r.expect("missing", Comparator::le, 0.0);
  r.evaluate();
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.failed_count(), 1u);
  EXPECT_TRUE(r.measured["nan"].is_null());
  EXPECT_FALSE(r.value("nan").has_value());
  const auto j = r.to_json();
  EXPECT_TRUE(j["provenance"].contains("generated_at"));
  EXPECT_FALSE(r.to_json(false)["provenance"].contains("generated_at"));
  EXPECT_NE(r.summary_text().find("(not measured)"), std::string::npos);

  const auto back = report_from_json(j);
  EXPECT_EQ(back.to_json().dump(), j.dump());
}

TEST(Report, ConservationTrackerRecordsWorstCase) {
  ConservationTracker t;
  t.observe(10.0, 10.0, 1.0);
  t.observe(10.0 + 1e-8, 10.0, 1.0 - 1e-13);
  ConservationTracker u;
  u.observe(1.0, 1.0, 1.0 + 3e-13);
  t.merge(u);
  EXPECT_NEAR(t.max_mass_error, 1e-9, 1e-15);
  EXPECT_NEAR(t.max_norm_error, 3e-13, 1e-16);
  ExperimentReport r;
  t.record(r);
  r.evaluate();
  EXPECT_FALSE(r.passed());
}

TEST(Registry, NamesAndErrors) {
  std::set<std::string> names;
  for (const auto& e : experiment_registry()) names.insert(e.name);
  EXPECT_EQ(names, (std::set<std::string>{"superposition-vs-product", "tails-demo", "counting-anomaly",
                                          "threshold-sweep", "test-particle-deflection", "collapse-rate-scaling",
                                          "born-statistics", "csl-collapse"}));
  EXPECT_THROW(find_experiment("nope"), ParameterError);
  EXPECT_THROW(run_experiment("tails-demo", json{{"bogus", 1}}), ParameterError);
  EXPECT_THROW(run_experiment("tails-demo", json{{"eta", "high"}}), ParameterError);
  EXPECT_THROW(run_experiment("tails-demo", json{{"eta", 0.0}}), ParameterError);
  EXPECT_THROW(run_experiment("tails-demo", json::array()), ParameterError);
}

TEST(SuperpositionVsProduct, DefaultsPass) {
  const auto r = run_superposition_vs_product();
  EXPECT_TRUE(r.passed()) << failures_of(r);
  EXPECT_NEAR(q(r, "plus_mass_A"), 500.0, 1e-9 * 500.0);
  EXPECT_NEAR(q(r, "product_mass_B"), 500.0, 1e-9 * 500.0);
  EXPECT_NEAR(q(r, "plus_ratio_A"), 1.0, 1e-9);
  EXPECT_EQ(q(r, "product_ratio_A"), 0.0);
  EXPECT_EQ(q(r, "plus_accessible_A"), 0.0);
  EXPECT_EQ(q(r, "product_accessible_A"), 1.0);
  EXPECT_LE(q(r, "max_norm_error"), 1e-12);
}

TEST(SuperpositionVsProduct, EtaAboveOneIsFlagged) {
  const auto r = run_superposition_vs_product({{"eta", 2.0}});
  EXPECT_EQ(q(r, "eta_outside_regime"), 1.0);
  EXPECT_EQ(q(r, "plus_accessible_A"), 1.0);
  EXPECT_TRUE(r.passed()) << failures_of(r);
  EXPECT_THROW(run_superposition_vs_product({{"n", 7}}), ParameterError);
}

TEST(TailsDemo, TailWeightMatchesContinuousQuadrature) {
  const auto r = run_tails_demo();
  EXPECT_TRUE(r.passed()) << failures_of(r);
  const double alpha = 1e-7;
  const double ref = oracle::post_jump_tail_weight(-5.0 * alpha, 5.0 * alpha, alpha, alpha, -5.0 * alpha, 0.0);
  EXPECT_GT(q(r, "tail_weight"), 0.0);
  EXPECT_LT(q(r, "tail_weight"), 1e-9);
  EXPECT_NEAR(q(r, "tail_weight") / ref, 1.0, 0.1);
  EXPECT_EQ(q(r, "tail_accessible"), 0.0);
  EXPECT_EQ(q(r, "left_accessible"), 1.0);
  EXPECT_EQ(q(r, "tail_non_accessible_for_all_swept_eta"), 1.0);
  EXPECT_NEAR(q(r, "tail_ratio"), q(r, "tail_ratio_two_outcome"), 1e-6 * q(r, "tail_ratio"));
}

TEST(TailsDemo, CloseBumpsAndSingleBump) {
  const double alpha = 1e-7;
  const auto near = run_tails_demo({{"separation", alpha}});
  const double ref = oracle::post_jump_tail_weight(-0.5 * alpha, 0.5 * alpha, alpha, alpha, -0.5 * alpha, 0.0);
  EXPECT_NEAR(q(near, "tail_weight") / ref, 1.0, 0.02);
  const auto single = run_tails_demo({{"separation", 0.0}});
  EXPECT_TRUE(single.passed()) << failures_of(single);
  EXPECT_NEAR(q(single, "bump_degree"), 1.0, 1e-12);
  EXPECT_THROW(run_tails_demo({{"separation", -1.0}}), ParameterError);
}

TEST(CountingAnomaly, JointProbabilityIsAPower) {
  const auto r = run_counting_anomaly();
  EXPECT_TRUE(r.passed()) << failures_of(r);
  EXPECT_NEAR(q(r, "joint_probability_n100"), 0.36603234127322950, 1e-12);
  EXPECT_NEAR(q(r, "joint_probability_n1000"), std::pow(0.99, 1000), 1e-12);
  EXPECT_EQ(q(r, "accessible_count_n1000"), 1000.0);
  EXPECT_NEAR(q(r, "marble_ratio_in"), std::sqrt(0.01 / 0.99), 1e-12);
  EXPECT_THROW(run_counting_anomaly({{"in_weight", 1.0}}), ParameterError);
  EXPECT_THROW(run_counting_anomaly({{"n_list", json::array()}}), ParameterError);
}

TEST(CountingAnomaly, DefaultThresholdDoesNotAdmitTheMarbleAtPointOne) {
  // R_in = sqrt(0.01/0.99) = 0.1005 > 0.1, so no marble is accessible there
  const auto r = run_counting_anomaly({{"eta", 0.1}});
  EXPECT_EQ(q(r, "accessible_count_n100"), 0.0);
  EXPECT_FALSE(r.passed());
}

TEST(ThresholdSweep, MasksAgreeAndBoundaryFlipsOneState) {
  const auto r = run_threshold_sweep();
  EXPECT_TRUE(r.passed()) << failures_of(r);
  EXPECT_EQ(q(r, "grid_distinct_mask_sets"), 1.0);
  EXPECT_EQ(q(r, "boundary_flipped_states"), 1.0);
  EXPECT_THROW(run_threshold_sweep({{"eta_grid", json::array()}}), ParameterError);
  const auto wide = run_threshold_sweep({{"eta_grid", {0.1, 2.0}}});
  EXPECT_TRUE(wide.details.contains("eta_above_one"));
  EXPECT_EQ(q(wide, "grid_distinct_mask_sets"), 2.0);
}

TEST(ThresholdSweep, StandardSuiteDegreesSumToOne) {
  for (const auto& s : standard_suite(1000)) {
    EXPECT_NEAR(s.field.integrated_mass(), s.expected_mass, 1e-9 * s.expected_mass) << s.name;
  }
}

TEST(Deflection, MeanFieldIsNullAndCollapseIsBalanced) {
  const auto r = run_test_particle_deflection({{"ensemble", 2000}, {"parallelism", 2}});
  EXPECT_TRUE(r.passed()) << failures_of(r);
  EXPECT_LT(q(r, "plus_mean_field_deflection_abs"), 1e-12);
  EXPECT_LT(q(r, "product_mean_field_deflection_abs"), 1e-12);
  EXPECT_EQ(q(r, "plus_post_collapse_failures"), 0.0);
  EXPECT_THROW(run_test_particle_deflection({{"region_b_center", -2.0}}), ParameterError);
  EXPECT_THROW(run_test_particle_deflection({{"cases", {"plus/telepathy"}}}), ParameterError);
}

TEST(Deflection, OneSidedSourceBendsTowardIt) {
  DeflectionGeometry g;
  const double up = deflection_angle({{1.0, 500.0}}, g);
  EXPECT_GT(up, 0.0);
  EXPECT_NEAR(deflection_angle({{-1.0, 500.0}}, g), -up, 1e-15);
  // small-angle impulse estimate 2GM/(b v^2), reduced by the finite path
  EXPECT_NEAR(up, 2.0 * 1e-4 * 500.0, 0.05 * up);
}

TEST(RateScaling, MeanFirstJumpTime) {
  const auto r = run_collapse_rate_scaling({{"n_list", {1, 10}}, {"ensemble", 4000}, {"relative_tolerance", 0.1}});
  EXPECT_TRUE(r.passed()) << failures_of(r);
  EXPECT_NEAR(q(r, "expected_first_jump_time_n10"), oracle::first_of_n_mean(10, 1.0), 1e-12);
  EXPECT_THROW(run_collapse_rate_scaling({{"ensemble", 999}}), ParameterError);
  const auto off = run_collapse_rate_scaling({{"n_list", {5}}, {"ensemble", 1000}, {"lambda_base", 0.0}});
  EXPECT_EQ(q(off, "censored_fraction_n5"), 1.0);
  EXPECT_TRUE(off.passed()) << failures_of(off);
}

TEST(BornStatistics, ReducedEnsemblePasses) {
  const auto r = run_born_statistics({{"ensemble", 3000}, {"parallelism", 2}});
  EXPECT_TRUE(r.passed()) << failures_of(r);
  EXPECT_NEAR(q(r, "selected_A_p0.9_frequency"), 0.9, 3.0 * oracle::binomial_sd(0.9, 3000));
}

TEST(CslCollapse, ReducedRunIsWellFormed) {
  const auto r =
      run_csl_collapse({{"ensemble", 300}, {"steps", 400}, {"snapshots", 4}, {"weights", {0.7}}, {"parallelism", 2}});
  EXPECT_LE(q(r, "zero_noise_max_amplitude_difference"), 1e-12);
  EXPECT_EQ(q(r, "failures_p0.7"), 0.0);
  EXPECT_LE(q(r, "max_norm_error"), 1e-12);
  EXPECT_LE(q(r, "max_mass_conservation_error"), 1e-9);
  EXPECT_EQ(r.details["rows"][0]["ensemble_mean_variance"].size(), 5u);
  EXPECT_THROW(run_csl_collapse({{"steps", 10}, {"snapshots", 3}}), ParameterError);
  EXPECT_THROW(run_csl_collapse({{"left_cell", 5}}), ParameterError);
}

TEST(Determinism, SameSeedSameCanonicalReport) {
  const auto a = run_born_statistics(json{{"ensemble", 1500}, {"parallelism", 1}});
  const auto b = run_born_statistics(json{{"ensemble", 1500}, {"parallelism", 4}});
  auto ja = a.to_json(false), jb = b.to_json(false);
  for (auto* j : {&ja, &jb}) {
    (*j)["spec"]["parameters"].erase("parallelism");
  }
  EXPECT_EQ(ja.dump(), jb.dump());
  const auto c = run_born_statistics(json{{"ensemble", 1500}, {"parallelism", 1}});
  EXPECT_EQ(a.to_json(false).dump(), c.to_json(false).dump());
  const auto d = run_born_statistics(json{{"ensemble", 1500}, {"parallelism", 1}, {"seed", 1}});
  EXPECT_NE(a.to_json(false).dump(), d.to_json(false).dump());
}

TEST(Svg, DeterministicOutput) {
  svg::PlotOptions opt;
  opt.title = "a < b";
  opt.h_line = 0.1;
  const std::vector<svg::Series> s{{"x", {0, 1, 2}, {0.0, 0.5, 1.0}, "#000"}};
  const auto one = svg::line_plot(s, opt);
  EXPECT_EQ(one, svg::line_plot(s, opt));
  EXPECT_NE(one.find("a &lt; b"), std::string::npos);
  EXPECT_THROW(svg::line_plot({}, opt), ParameterError);
  EXPECT_NE(svg::histogram({1.0, 2.0, 2.0}, 4, opt).find("<rect"), std::string::npos);
  EXPECT_THROW(svg::histogram({}, 4, opt), ParameterError);
}
