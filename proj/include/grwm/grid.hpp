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
#include <cstddef>
#include <string>

#include "grwm/errors.hpp"

namespace grwm {

/// Uniform 1D grid of `cell_count` cells starting at `origin`.
/// Cell i covers [origin + i*w, origin + (i+1)*w) and is sampled at its center.
class SpatialGrid {
 public:
  SpatialGrid(std::size_t cell_count, double cell_width, double origin = 0.0)
      : cell_count_(cell_count), cell_width_(cell_width), origin_(origin) {
    if (cell_count_ < 2) {
      throw ParameterError("SpatialGrid: cell_count must be >= 2, got " +
                           std::to_string(cell_count_));
    }
    if (!(cell_width_ > 0.0) || !std::isfinite(cell_width_)) {
      throw ParameterError("SpatialGrid: cell_width must be positive");
    }
    if (!std::isfinite(origin_)) {
      throw ParameterError("SpatialGrid: origin must be finite");
    }
  }

  std::size_t cell_count() const { return cell_count_; }
  double cell_width() const { return cell_width_; }
  double origin() const { return origin_; }
  double length() const { return cell_width_ * static_cast<double>(cell_count_); }
  double begin() const { return origin_; }
  double end() const { return origin_ + length(); }

  double center(std::size_t i) const {
    return origin_ + (static_cast<double>(i) + 0.5) * cell_width_;
  }

  bool contains(double x) const { return x >= begin() && x <= end(); }

  /// Index of the cell containing x, clamped to the grid.
  std::size_t cell_of(double x) const {
    const double f = std::floor((x - origin_) / cell_width_);
    if (f <= 0.0) return 0;
    const auto i = static_cast<std::size_t>(f);
    return i >= cell_count_ ? cell_count_ - 1 : i;
  }

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  std::size_t cell_count_;
  double cell_width_;
  double origin_;
};

}  // namespace grwm
