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

#include <stdexcept>
#include <string>

namespace grwm {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state collapsed to (numerically) zero norm.
class ZeroStateError : public Error {
 public:
  using Error::Error;
};

/// States that do not share a grid or particle list were combined.
class IncompatibleStateError : public Error {
 public:
  using Error::Error;
};

class EmptyProductError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Invalid numeric parameter or configuration value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The jump probability per step is too large for first-order sampling.
class StepTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A determinable's cell sets overlap or fail to cover the state space.
class PartitionError : public Error {
 public:
  using Error::Error;
};

class EmptyEnsembleError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized input (state, spec, or report document).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace grwm
