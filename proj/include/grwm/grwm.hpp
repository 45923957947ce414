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

#include "grwm/branch_state.hpp"
#include "grwm/csl.hpp"
#include "grwm/degree.hpp"
#include "grwm/ensemble.hpp"
#include "grwm/errors.hpp"
#include "grwm/experiments.hpp"
#include "grwm/grid.hpp"
#include "grwm/localization.hpp"
#include "grwm/mass_density.hpp"
#include "grwm/parameters.hpp"
#include "grwm/partition.hpp"
#include "grwm/report.hpp"
#include "grwm/rng.hpp"
#include "grwm/serialization.hpp"
#include "grwm/svg.hpp"
#include "grwm/trajectory.hpp"
#include "grwm/unitary.hpp"
#include "grwm/version.hpp"
#include "grwm/wavefunction.hpp"
