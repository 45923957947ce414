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
#include <complex>
#include <vector>

#include "grwm/grwm.hpp"

using namespace grwm;

namespace {

const SpatialGrid kGrid(8, 0.5, -2.0);
const ParticleSpec kP{"p0", 1.0};

}  // namespace

TEST(SpatialGrid, GeometryAndValidation) {
  EXPECT_DOUBLE_EQ(kGrid.length(), 4.0);
  EXPECT_DOUBLE_EQ(kGrid.center(0), -1.75);
  EXPECT_EQ(kGrid.cell_of(-1.9), 0u);
  EXPECT_EQ(kGrid.cell_of(100.0), 7u);
  EXPECT_THROW(SpatialGrid(1, 1.0), ParameterError);
  EXPECT_THROW(SpatialGrid(4, 0.0), ParameterError);
  EXPECT_THROW(SpatialGrid(4, 1.0, std::nan("")), ParameterError);
}

TEST(WaveFunction, NormalizeScalesToUnitNorm) {
  std::vector<Complex> raw(8, Complex{0.0, 0.0});
  raw[2] = {3.0, 4.0};
  raw[5] = {1.0, 0.0};
  const auto psi = WaveFunction::normalize(raw, kGrid, 1);
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-14);
  // relative phases and ratios are preserved
  EXPECT_NEAR(std::abs(psi.amplitudes()[2] / psi.amplitudes()[5] - Complex(3.0, 4.0)), 0.0, 1e-13);
}

TEST(WaveFunction, RejectsZeroAndBadShapes) {
  EXPECT_THROW(WaveFunction::normalize(std::vector<Complex>(8), kGrid, 1), ZeroStateError);
  EXPECT_THROW(WaveFunction::normalize(std::vector<Complex>(7, 1.0), kGrid, 1), ParameterError);
  EXPECT_THROW(WaveFunction::normalize(std::vector<Complex>(8 * 8 * 8 * 8, 1.0), kGrid, 4), ParameterError);
  EXPECT_THROW(WaveFunction::normalize(std::vector<Complex>(8, 1.0), kGrid, {{"bad", -1.0}}), ParameterError);
}

TEST(WaveFunction, ProductStateLayoutAndMarginals) {
  const auto a = cell_eigenstate(kGrid, kP, 1);
  const auto b = cell_eigenstate(kGrid, {"p1", 2.0}, 6);
  const auto ab = product_state({a, b});
  EXPECT_EQ(ab.particle_count(), 2u);
  EXPECT_EQ(ab.stride(0), 8u);
  EXPECT_EQ(ab.stride(1), 1u);
  EXPECT_NEAR(ab.probability(1 * 8 + 6), 1.0, 1e-14);
  const auto d = ab.decode(1 * 8 + 6);
  EXPECT_EQ(d[0], 1u);
  EXPECT_EQ(d[1], 6u);
  EXPECT_NEAR(marginal_density(ab, 0)[1] * kGrid.cell_width(), 1.0, 1e-14);
  EXPECT_NEAR(marginal_density(ab, 1)[6] * kGrid.cell_width(), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(ab.total_mass(), 3.0);
  EXPECT_THROW(marginal_density(ab, 2), IndexError);
  EXPECT_THROW(product_state(std::span<const WaveFunction>{}), EmptyProductError);
}

TEST(WaveFunction, ProductOfThreeAndTooMany) {
  const auto a = cell_eigenstate(kGrid, kP, 0);
  const auto three = product_state({a, a, a});
  EXPECT_EQ(three.size(), 512u);
  EXPECT_THROW(product_state({a, a, a, a}), ParameterError);
}

TEST(WaveFunction, SuperposeRenormalizesAndChecksCompatibility) {
  const auto a = cell_eigenstate(kGrid, kP, 2);
  const auto b = cell_eigenstate(kGrid, kP, 5);
  const auto s = superpose({{Complex{1.0, 0.0}, a}, {Complex{0.0, 1.0}, b}});
  EXPECT_NEAR(s.norm_squared(), 1.0, 1e-14);
  EXPECT_NEAR(s.probability(2), 0.5, 1e-14);
  EXPECT_NEAR(s.probability(5), 0.5, 1e-14);
  const auto other = cell_eigenstate(SpatialGrid(8, 1.0), kP, 2);
  EXPECT_THROW(superpose({{1.0, a}, {1.0, other}}), IncompatibleStateError);
  EXPECT_THROW(superpose({{1.0, a}, {-1.0, a}}), ZeroStateError);
}

TEST(WaveFunction, GaussianPacketMoments) {
  const SpatialGrid g(400, 0.05, -10.0);
  const auto psi = gaussian_packet(g, kP, 1.0, 0.7);
  const auto rho = marginal_density(psi, 0);
  double mean = 0.0, var = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) mean += g.center(i) * rho[i] * g.cell_width();
  for (std::size_t i = 0; i < rho.size(); ++i) var += std::pow(g.center(i) - mean, 2) * rho[i] * g.cell_width();
  EXPECT_NEAR(mean, 1.0, 1e-9);
  EXPECT_NEAR(std::sqrt(var), 0.7, 1e-6);
  EXPECT_THROW(gaussian_packet(g, kP, 0.0, 0.0), ParameterError);
}

TEST(WaveFunction, UniformOverAndIndexErrors) {
  const std::vector<std::size_t> cells{1, 3};
  const auto psi = uniform_over(kGrid, kP, cells);
  EXPECT_NEAR(psi.probability(1), 0.5, 1e-14);
  EXPECT_THROW(cell_eigenstate(kGrid, kP, 8), IndexError);
  const std::vector<std::size_t> bad{9};
  EXPECT_THROW(uniform_over(kGrid, kP, bad), IndexError);
}

TEST(BranchState, NormalizesWeights) {
  const auto s = BranchState::normalized({{"A", -1.0, 0.5}, {"B", 1.0, 0.5}}, 1.0, 4,
                                         {{Complex{3.0, 0.0}, {4, 0}}, {Complex{0.0, 4.0}, {0, 4}}});
  EXPECT_NEAR(s.weight_sum(), 1.0, 1e-15);
  EXPECT_NEAR(s.weights()[0], 9.0 / 25.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.total_mass(), 4.0);
  EXPECT_EQ(s.region_index("B"), 1u);
  EXPECT_THROW(s.region_index("C"), IndexError);
}

TEST(BranchState, RegionOfParticleFillsInOrder) {
  const auto s = BranchState::normalized({{"A", -1.0, 0.5}, {"B", 1.0, 0.5}}, 1.0, 3,
                                         {{Complex{1.0, 0.0}, {1, 2}}, {Complex{1.0, 0.0}, {3, 0}}});
  EXPECT_EQ(s.region_of_particle(0, 0), 0u);
  EXPECT_EQ(s.region_of_particle(0, 1), 1u);
  EXPECT_EQ(s.region_of_particle(0, 2), 1u);
  EXPECT_EQ(s.region_of_particle(1, 2), 0u);
  EXPECT_THROW(s.region_of_particle(0, 3), IndexError);
}

TEST(BranchState, ValidationFailures) {
  const Region a{"A", 0.0, 1.0};
  const Region b{"B", 5.0, 1.0};
  const Complex one{1.0, 0.0};
  EXPECT_THROW(BranchState::normalized({a, {"C", 0.4, 1.0}}, 1.0, 1, {{one, {1, 0}}}), ParameterError);
  EXPECT_THROW(BranchState::normalized({a, {"A", 5.0, 1.0}}, 1.0, 1, {{one, {1, 0}}}), ParameterError);
  EXPECT_THROW(BranchState::normalized({a, b}, 1.0, 2, {{one, {1, 0}}}), ParameterError);
  EXPECT_THROW(BranchState::normalized({a, b}, 1.0, 1, {{one, {1, 0}}, {one, {1, 0}}}), ParameterError);
  EXPECT_THROW(BranchState::normalized({a, b}, 1.0, 1, {{Complex{0.0, 0.0}, {1, 0}}}), ZeroStateError);
  EXPECT_THROW(BranchState::normalized({a, b}, 0.0, 1, {{one, {1, 0}}}), ParameterError);
  EXPECT_THROW(BranchState::normalized({}, 1.0, 1, {}), ParameterError);
}

TEST(BranchState, Constructors) {
  const Region a{"A", -5.0, 1.0};
  const Region b{"B", 5.0, 1.0};
  const auto plus = superposition_state(10, 1.0, a, b);
  EXPECT_NEAR(plus.weights()[0], 0.5, 1e-15);
  EXPECT_EQ(plus.branches()[0].occupancy, (std::vector<std::size_t>{10, 0}));
  const auto prod = product_branch_state(10, 1.0, a, b);
  EXPECT_EQ(prod.branches().size(), 1u);
  EXPECT_EQ(prod.branches()[0].occupancy, (std::vector<std::size_t>{5, 5}));
  EXPECT_THROW(product_branch_state(3, 1.0, a, b), ParameterError);
  const auto two = two_branch_state(4, 1.0, a, b, 0.9);
  EXPECT_NEAR(two.weights()[0], 0.9, 1e-15);
  EXPECT_THROW(two_branch_state(4, 1.0, a, b, 1.0), ParameterError);
}

TEST(Partition, OwnerMapValidation) {
  const auto split = split_partition(kGrid, 0.0);
  const auto owner = split.owner_map(8);
  EXPECT_EQ(owner[3], 0u);
  EXPECT_EQ(owner[4], 1u);
  MassObservablePartition gap{"location", {{"x", {0, 1}}}};
  EXPECT_THROW(gap.owner_map(3), PartitionError);
  MassObservablePartition overlap{"location", {{"x", {0, 1}}, {"y", {1, 2}}}};
  EXPECT_THROW(overlap.owner_map(3), PartitionError);
  MassObservablePartition outside{"location", {{"x", {0, 5}}}};
  EXPECT_THROW(outside.owner_map(3), PartitionError);
  EXPECT_THROW(MassObservablePartition{}.owner_map(3), PartitionError);
  EXPECT_EQ(cellwise_partition(4).determinates[2].label, "cell2");
}

TEST(Serialization, WaveFunctionRoundTrip) {
  const auto psi = product_state({gaussian_packet(kGrid, kP, 0.0, 0.5, 1.0), cell_eigenstate(kGrid, {"e", 0.5}, 3)});
  const auto back = wavefunction_from_json(json::parse(to_json(psi).dump()));
  ASSERT_TRUE(back.compatible_with(psi));
  for (std::size_t i = 0; i < psi.size(); ++i) {
    EXPECT_NEAR(std::abs(back.amplitudes()[i] - psi.amplitudes()[i]), 0.0, 1e-15);
  }
}

TEST(Serialization, BranchStateRoundTripAndErrors) {
  const auto s = two_branch_state(7, 2.0, {"A", -1.0, 0.5}, {"B", 1.0, 0.5}, 0.3).with_time(1.5);
  const auto back = std::get<BranchState>(state_from_json(to_json(State{s})));
  EXPECT_EQ(back.particle_count(), 7u);
  EXPECT_NEAR(back.weights()[0], 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(back.time(), 1.5);
  EXPECT_THROW(state_from_json(json{{"kind", "other"}}), FormatError);
  EXPECT_THROW(wavefunction_from_json(json{{"kind", "wavefunction"}}), FormatError);
  auto doc = to_json(s);
  doc["branches"][0]["occupancy"] = {{"Z", 7}};
  EXPECT_THROW(branch_state_from_json(doc), FormatError);
}

TEST(Serialization, SampleFilesLoad) {
  const auto eig = state_from_json(read_json_file(GRWM_SAMPLES_DIR "/eigenstate.json"));
  EXPECT_TRUE(std::holds_alternative<WaveFunction>(eig));
  const auto sup = state_from_json(read_json_file(GRWM_SAMPLES_DIR "/superposition_branch.json"));
  EXPECT_EQ(std::get<BranchState>(sup).particle_count(), 1000u);
  EXPECT_THROW(read_json_file("/nonexistent/state.json"), FormatError);
}

TEST(Parameters, ValidationAndAmplification) {
  CollapseParameters p;
  EXPECT_NO_THROW(p.validate());
  const auto q = p.amplified(1e16);
  EXPECT_DOUBLE_EQ(q.lambda_base, 1.0);
  EXPECT_DOUBLE_EQ(q.lambda_amplification, 1e16);
  EXPECT_THROW(p.amplified(0.0), ParameterError);
  p.alpha_length = 0.0;
  EXPECT_THROW(p.validate(), ParameterError);
  EXPECT_DOUBLE_EQ(effective_rate({"x", 2.0}, q), 2.0);
  const auto round = parameters_from_json(to_json(q));
  EXPECT_EQ(round, q);
}

TEST(Rng, ChildSeedsAreStableAndDistinct) {
  EXPECT_EQ(child_seed(1, 0), child_seed(1, 0));
  EXPECT_NE(child_seed(1, 0), child_seed(1, 1));
  EXPECT_NE(child_seed(1, 0), child_seed(2, 0));
  static_assert(fnv1a("") == 0xcbf29ce484222325ULL);
  static_assert(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
