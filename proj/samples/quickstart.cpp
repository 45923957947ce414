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

// Builds the superposition and product states of 1000 particles, prints their
// mass density and accessibility, then collapses the superposition once.

#include <iostream>

#include "grwm/grwm.hpp"

int main() {
  using namespace grwm;
  const Region a{"A", -5.0, 1.0};
  const Region b{"B", 5.0, 1.0};
  const auto plus = superposition_state(1000, 1.0, a, b);
  const auto product = product_branch_state(1000, 1.0, a, b);

  for (const auto& [name, state] : {std::pair{"plus", plus}, std::pair{"product", product}}) {
    const auto field = analyze(state, 0.1);
    std::cout << name << '\n';
    for (std::size_t r = 0; r < field.size(); ++r) {
      std::cout << "  " << field.labels[r] << "  mass " << field.cell_mass[r] << "  ratio "
                << field.ratio[r].value_or(-1.0) << "  " << to_string(field.status(r)) << '\n';
    }
  }

  CollapseParameters params;
  params.alpha_length = 0.01;
  params = params.amplified(1e16);
  TrajectoryOptions opt;
  opt.t_final = 1.0;
  opt.max_jumps = 1;
  opt.seed = 7;
  const auto rec = evolve_trajectory(plus, params, opt);
  const auto& after = std::get<BranchState>(*rec.final_state);
  std::cout << "first jump at t = " << rec.jumps.front().time << ", weights after: " << after.weights()[0] << ' '
            << after.weights()[1] << '\n';
  const auto field = analyze(after, 0.1);
  std::cout << "A is " << to_string(field.status(0)) << ", B is " << to_string(field.status(1)) << '\n';
}
