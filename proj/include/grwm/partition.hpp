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

#include <cstddef>
#include <string>
#include <vector>

#include "grwm/branch_state.hpp"
#include "grwm/errors.hpp"
#include "grwm/grid.hpp"

namespace grwm {

struct Determinate {
  std::string label;
  std::vector<std::size_t> cells;  // grid cells, or region indices for a BranchState
};

/// A determinable (e.g. "location") and its determinates, each owning a set of
/// cells. The cell sets must partition the grid or region list.
struct MassObservablePartition {
  std::string name = "location";
  std::vector<Determinate> determinates;

  /// Owner determinate per cell; throws PartitionError unless the sets are
  /// disjoint and cover [0, cell_count).
  std::vector<std::size_t> owner_map(std::size_t cell_count) const {
    constexpr std::size_t kUnowned = static_cast<std::size_t>(-1);
    if (determinates.empty()) throw PartitionError("partition '" + name + "' has no determinates");
    std::vector<std::size_t> owner(cell_count, kUnowned);
    for (std::size_t d = 0; d < determinates.size(); ++d) {
      for (auto c : determinates[d].cells) {
        if (c >= cell_count) {
          throw PartitionError("partition '" + name + "': cell " + std::to_string(c) +
                               " outside the state space");
        }
        if (owner[c] != kUnowned) {
          throw PartitionError("partition '" + name + "': cell " + std::to_string(c) +
                               " belongs to two determinates");
        }
        owner[c] = d;
      }
    }
    for (std::size_t c = 0; c < cell_count; ++c) {
      if (owner[c] == kUnowned) {
        throw PartitionError("partition '" + name + "' is not exhaustive: cell " +
                             std::to_string(c) + " unassigned");
      }
    }
    return owner;
  }
};

/// One determinate per cell, labelled by cell index.
inline MassObservablePartition cellwise_partition(std::size_t cell_count,
                                                  std::string name = "location") {
  MassObservablePartition p{std::move(name), {}};
  for (std::size_t c = 0; c < cell_count; ++c) p.determinates.push_back({"cell" + std::to_string(c), {c}});
  return p;
}

/// Splits a grid at position `cut`: cells whose center is below it are "left".
inline MassObservablePartition split_partition(const SpatialGrid& grid, double cut,
                                               std::string left = "left",
                                               std::string right = "right") {
  MassObservablePartition p{"location", {{std::move(left), {}}, {std::move(right), {}}}};
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    p.determinates[grid.center(c) < cut ? 0 : 1].cells.push_back(c);
  }
  return p;
}

/// One determinate per region of a BranchState, labelled by region name.
inline MassObservablePartition region_partition(const BranchState& state,
                                                std::string name = "location") {
  MassObservablePartition p{std::move(name), {}};
  for (std::size_t r = 0; r < state.regions().size(); ++r) {
    p.determinates.push_back({state.regions()[r].name, {r}});
  }
  return p;
}

}  // namespace grwm
