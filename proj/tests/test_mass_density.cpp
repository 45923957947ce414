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
#include <random>
#include <vector>

#include "grwm/grwm.hpp"
#include "oracles.hpp"

using namespace grwm;

namespace {

WaveFunction random_state(std::size_t n, std::size_t cells, const std::vector<double>& masses, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> z;
  std::size_t size = 1;
  for (std::size_t k = 0; k < n; ++k) size *= cells;
  std::vector<Complex> amps(size);
  for (auto& a : amps) a = {z(gen), z(gen)};
  std::vector<ParticleSpec> ps;
  for (std::size_t k = 0; k < n; ++k) ps.push_back({"p" + std::to_string(k), masses[k]});
  return WaveFunction::normalize(amps, SpatialGrid(cells, 0.3, -1.0), ps);
}

const Region kA{"A", -5.0, 1.0};
const Region kB{"B", 5.0, 1.0};

}  // namespace

class MomentsVsBruteForce : public ::testing::TestWithParam<unsigned> {};

TEST_P(MomentsVsBruteForce, MatchesEnumeration) {
  const unsigned seed = GetParam();
  const std::size_t n = 1 + seed % 3;
  const std::vector<double> masses{1.0, 2.5, 0.7};
  const std::vector<double> used(masses.begin(), masses.begin() + static_cast<long>(n));
  const auto psi = random_state(n, 5, used, seed);
  const auto lib = mass_moments(psi);
  const auto ref = oracle::brute_moments({psi.amplitudes().begin(), psi.amplitudes().end()}, 5, used, 0.3);
  double total = 0.0;
  for (std::size_t c = 0; c < 5; ++c) {
    EXPECT_NEAR(lib.mean[c], ref.mean[c], 1e-12);
    EXPECT_NEAR(lib.second[c], ref.second[c], 1e-12);
    EXPECT_GE(lib.variance()[c], 0.0);
    total += lib.mean[c];
  }
  EXPECT_NEAR(total, psi.total_mass(), 1e-12 * psi.total_mass());
  // the density integrates to the same per-cell mass
  const auto dens = mass_density(psi);
  for (std::size_t c = 0; c < 5; ++c) EXPECT_NEAR(dens[c] * 0.3, lib.mean[c], 1e-12);
}

INSTANTIATE_TEST_SUITE_P(RandomStates, MomentsVsBruteForce, ::testing::Range(0u, 12u));

TEST(MassMoments, PartitionAggregatesCells) {
  const auto psi = random_state(2, 6, {1.0, 3.0}, 99);
  MassObservablePartition part{"location", {{"lo", {0, 1, 2}}, {"hi", {3, 4, 5}}}};
  const auto agg = mass_moments(psi, part);
  // brute force on a 2-cell coarse grid
  std::vector<Complex> coarse(4, 0.0);
  double p[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t f = 0; f < psi.size(); ++f) {
    const auto idx = psi.decode(f);
    p[idx[0] / 3][idx[1] / 3] += psi.probability(f);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) coarse[i * 2 + j] = std::sqrt(p[i][j]);
  const auto ref = oracle::brute_moments(coarse, 2, {1.0, 3.0}, 1.0);
  for (int s = 0; s < 2; ++s) {
    EXPECT_NEAR(agg.mean[s], ref.mean[s], 1e-12);
    EXPECT_NEAR(agg.second[s], ref.second[s], 1e-12);
  }
}

TEST(MassMoments, BranchStatesHaveEqualDensityDifferentVariance) {
  const auto plus = superposition_state(1000, 1.0, kA, kB);
  const auto prod = product_branch_state(1000, 1.0, kA, kB);
  const auto mp = mass_moments(plus);
  const auto mq = mass_moments(prod);
  for (int r = 0; r < 2; ++r) {
    EXPECT_NEAR(mp.mean[r], 500.0, 1e-9 * 500.0);
    EXPECT_NEAR(mq.mean[r], 500.0, 1e-9 * 500.0);
    EXPECT_NEAR(mp.variance()[r], 250000.0, 1e-6);
    EXPECT_EQ(mq.variance()[r], 0.0);
  }
  EXPECT_NEAR(mass_density(plus)[0], 500.0, 1e-9);
}

TEST(MassMoments, BranchTierAgreesWithExactTierForTwoParticles) {
  // two particles, two cells: (|AA> + |BB>)/sqrt2 and |AB>
  const SpatialGrid g(2, 1.0, -1.0);
  std::vector<Complex> plus(4, 0.0), prod(4, 0.0);
  plus[0] = plus[3] = 1.0;
  prod[1] = 1.0;
  const auto exact_plus = analyze(WaveFunction::normalize(plus, g, 2));
  const auto exact_prod = analyze(WaveFunction::normalize(prod, g, 2));
  const auto branch_plus = analyze(superposition_state(2, 1.0, kA, kB));
  const auto branch_prod = analyze(product_branch_state(2, 1.0, kA, kB));
  for (int c = 0; c < 2; ++c) {
    EXPECT_NEAR(exact_plus.cell_mass[c], branch_plus.cell_mass[c], 1e-12);
    EXPECT_NEAR(exact_plus.variance[c], branch_plus.variance[c], 1e-12);
    EXPECT_NEAR(exact_prod.variance[c], branch_prod.variance[c], 1e-12);
  }
}

class TwoOutcomeRatio : public ::testing::TestWithParam<double> {};

TEST_P(TwoOutcomeRatio, SquaredRatioLaw) {
  const double p = GetParam();
  const auto s = two_branch_state(50, 2.0, kA, kB, p);
  const auto f = analyze(s);
  EXPECT_NEAR(*f.ratio[0] * *f.ratio[0], (1.0 - p) / p, 1e-9);
  EXPECT_NEAR(*f.ratio[1] * *f.ratio[1], p / (1.0 - p), 1e-9 * p / (1.0 - p));
  // exact single-particle tier on 16 cells
  std::vector<Complex> amps(16, 0.0);
  amps[3] = std::sqrt(p);
  amps[12] = std::sqrt(1.0 - p);
  const auto exact = analyze(WaveFunction::normalize(amps, SpatialGrid(16, 1.0), 1));
  EXPECT_NEAR(*exact.ratio[3] * *exact.ratio[3], (1.0 - p) / p, 1e-9);
  EXPECT_NEAR(*exact.ratio[12] * *exact.ratio[12], p / (1.0 - p), 1e-9 * p / (1.0 - p));
  EXPECT_FALSE(exact.ratio[0].has_value());
  EXPECT_EQ(exact.status(0), Accessibility::undefined);
}

INSTANTIATE_TEST_SUITE_P(Weights, TwoOutcomeRatio, ::testing::Values(0.5, 0.9, 0.99, 0.999));

TEST(Accessibility, ClassificationAndThreshold) {
  const std::vector<std::optional<double>> r{0.05, 0.1, 0.2, std::nullopt};
  const auto acc = classify_accessible(r, 0.1);
  EXPECT_TRUE(acc[0]);
  EXPECT_FALSE(acc[1]);
  EXPECT_FALSE(acc[2]);
  EXPECT_FALSE(acc[3]);
  EXPECT_THROW(classify_accessible(r, 0.0), ParameterError);
  EXPECT_THROW(classify_accessible(r, -1.0), ParameterError);
}

TEST(Accessibility, MonotoneInEta) {
  for (unsigned seed = 0; seed < 6; ++seed) {
    const auto f = analyze(random_state(2, 4, {1.0, 1.0}, seed));
    double prev_count = -1;
    for (double eta : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0}) {
      const auto g = f.reclassified(eta);
      double count = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        count += g.accessible[i];
        if (f.reclassified(eta / 2).accessible[i]) {
          EXPECT_TRUE(g.accessible[i]);
        }
      }
      EXPECT_GE(count, prev_count);
      prev_count = count;
    }
  }
}

TEST(Accessibility, MassFloorLeavesRatioUndefined) {
  const std::vector<double> mass{1.0, 1e-13, 0.0};
  const std::vector<double> var{0.0, 1e-30, 0.0};
  const auto r = accessibility_ratio(mass, var, 1e-12);
  EXPECT_TRUE(r[0].has_value());
  EXPECT_FALSE(r[1].has_value());
  EXPECT_FALSE(r[2].has_value());
  EXPECT_THROW(accessibility_ratio(mass, std::vector<double>{1.0}, 0.0), ParameterError);
}

TEST(Accessibility, EigenstateIsAccessibleEverywhereItHasMass) {
  const auto psi = cell_eigenstate(SpatialGrid(8, 1.0), {"p0", 1.0}, 3);
  const auto f = analyze(psi);
  EXPECT_EQ(f.status(3), Accessibility::accessible);
  EXPECT_EQ(*f.ratio[3], 0.0);
  for (std::size_t i : {0u, 1u, 7u}) EXPECT_EQ(f.status(i), Accessibility::undefined);
}

TEST(Field, PartitionedFieldLabelsAndWidths) {
  const auto psi = random_state(1, 6, {2.0}, 5);
  FieldOptions opt;
  opt.partition = split_partition(psi.grid(), 0.0, "L", "R");
  const auto f = analyze(psi, 0.2, opt);
  EXPECT_EQ(f.labels, (std::vector<std::string>{"L", "R"}));
  EXPECT_NEAR(f.integrated_mass(), 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(f.threshold_used, 0.2);
  EXPECT_THROW(f.index_of("X"), IndexError);
  const auto b = analyze(superposition_state(4, 1.0, kA, kB), 0.1,
                         FieldOptions{MassObservablePartition{"all", {{"both", {0, 1}}}}, 0.0});
  EXPECT_NEAR(b.cell_mass[0], 4.0, 1e-12);
  EXPECT_EQ(*b.ratio[0], 0.0);
}

TEST(Field, SmearingConservesMass) {
  const auto psi = random_state(1, 20, {1.5}, 8);
  const auto f = analyze(psi, 0.1, FieldOptions{std::nullopt, 0.5});
  ASSERT_EQ(f.smeared_mean.size(), f.size());
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += f.smeared_mean[i] * f.widths[i];
  EXPECT_NEAR(total, 1.5, 1e-12);
}

TEST(Field, CsvAndJsonCarryThreshold) {
  const auto f = analyze(superposition_state(10, 1.0, kA, kB));
  const auto csv = field_csv(f, json{{"state", "plus"}});
  EXPECT_EQ(csv.rfind("# threshold_eta=0.1\n", 0), 0u);
  EXPECT_NE(csv.find("cell_center,mean,variance,ratio,accessible"), std::string::npos);
  const auto j = to_json(f);
  EXPECT_EQ(j["threshold_eta"], 0.1);
  EXPECT_EQ(j["cells"][0]["status"], "non-accessible");
}

TEST(Degree, ProfilesSumToOne) {
  for (unsigned seed = 0; seed < 9; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const auto psi = random_state(n, 6, {1.0, 1.0, 1.0}, seed);
    const auto prof = degree_of(psi, split_partition(psi.grid(), 0.0));
    EXPECT_NEAR(prof.sum(), 1.0, 1e-12);
    if (n == 1) {
      EXPECT_EQ(prof.entries.size(), 2u);
    } else {
      EXPECT_EQ(prof.entries.back().label, kSplitDeterminate);
    }
  }
  const auto prod = product_branch_state(4, 1.0, kA, kB);
  const auto pp = degree_of(prod, region_partition(prod));
  EXPECT_NEAR(pp.degree(kSplitDeterminate), 1.0, 1e-15);
  EXPECT_NEAR(pp.sum(), 1.0, 1e-12);
  EXPECT_THROW(pp.degree("nowhere"), IndexError);
}

TEST(Degree, TaxonomyFromProfiles) {
  const auto sure = two_branch_state(1, 1.0, kA, kB, 0.5);
  DegreeProfile det{"location", {{"A", 1.0}, {"B", 0.0}}};
  EXPECT_EQ(indeterminacy_report(det, 0.1).kind, Determinacy::determinate);

  const auto skew = two_branch_state(1, 1.0, kA, kB, 0.99);
  const auto rep = indeterminacy_report(degree_of(skew, region_partition(skew)), 0.1, 0.05);
  EXPECT_EQ(rep.kind, Determinacy::effectively_determinate);
  EXPECT_EQ(rep.dominant, "A");
  ASSERT_EQ(rep.components.size(), 2u);
  EXPECT_TRUE(rep.components[1].present);
  EXPECT_FALSE(rep.components[1].accessible);
  EXPECT_NEAR(*rep.components[1].ratio, std::sqrt(0.99 / 0.01), 1e-9);

  const auto even = indeterminacy_report(degree_of(sure, region_partition(sure)), 0.1, 0.05);
  EXPECT_EQ(even.kind, Determinacy::indeterminate_glutty_degree);
  EXPECT_STREQ(to_string(even.kind), "indeterminate-glutty-degree");

  // the derived degree threshold eta^2/(1+eta^2) is stricter than 0.05 at eta = 0.1
  EXPECT_NEAR(degree_threshold_for(0.1), 0.01 / 1.01, 1e-15);
  EXPECT_EQ(indeterminacy_report(degree_of(skew, region_partition(skew)), 0.1).kind,
            Determinacy::indeterminate_glutty_degree);
  EXPECT_EQ(indeterminacy_report(degree_of(skew, region_partition(skew)), 0.2).kind,
            Determinacy::effectively_determinate);

  EXPECT_THROW(indeterminacy_report(det, 0.0), ParameterError);
  EXPECT_THROW(indeterminacy_report(det, 0.1, 1.5), ParameterError);
  EXPECT_THROW(indeterminacy_report(DegreeProfile{}, 0.1), ParameterError);
}

TEST(Degree, DegreeAccessibilityEquivalenceForTwoOutcomes) {
  // accessible(component) under ratio threshold eta iff 1 - degree < eta^2/(1+eta^2)
  for (double eta : {0.05, 0.1, 0.3, 0.5}) {
    for (double p : {0.5, 0.9, 0.99, 0.999, 0.9999}) {
      const auto s = two_branch_state(1, 1.0, kA, kB, p);
      const auto rep = indeterminacy_report(degree_of(s, region_partition(s)), eta);
      const auto f = analyze(s, eta);
      EXPECT_EQ(rep.components[0].accessible, static_cast<bool>(f.accessible[0]));
      EXPECT_EQ(rep.components[0].accessible, 1.0 - p < degree_threshold_for(eta));
    }
  }
}
