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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "grwm/errors.hpp"
#include "grwm/rng.hpp"
#include "grwm/serialization.hpp"
#include "grwm/version.hpp"

namespace grwm {

enum class Comparator { eq_abs, eq_rel, lt, le, gt, ge };

inline const char* to_string(Comparator c) {
  switch (c) {
    case Comparator::eq_abs: return "eq_abs";
    case Comparator::eq_rel: return "eq_rel";
    case Comparator::lt: return "lt";
    case Comparator::le: return "le";
    case Comparator::gt: return "gt";
    case Comparator::ge: return "ge";
  }
  return "?";
}

inline Comparator comparator_from(const std::string& s) {
  for (auto c : {Comparator::eq_abs, Comparator::eq_rel, Comparator::lt, Comparator::le, Comparator::gt,
                 Comparator::ge}) {
    if (s == to_string(c)) return c;
  }
  throw FormatError("unknown comparator '" + s + "'");
}

/// A named expectation on one measured quantity.
struct Check {
  std::string quantity;
  Comparator comparator = Comparator::eq_abs;
  double target = 0.0;
  double tolerance = 0.0;

  bool accepts(double v) const {
    switch (comparator) {
      case Comparator::eq_abs: return std::abs(v - target) <= tolerance;
      case Comparator::eq_rel: return std::abs(v - target) <= tolerance * std::abs(target);
      case Comparator::lt: return v < target;
      case Comparator::le: return v <= target;
      case Comparator::gt: return v > target;
      case Comparator::ge: return v >= target;
    }
    return false;
  }

  json to_json() const {
    return {{"quantity", quantity},
            {"comparator", grwm::to_string(comparator)},
            {"target", target},
            {"tolerance", tolerance}};
  }
};

struct CheckOutcome {
  Check check;
  std::optional<double> measured;  // empty when the quantity was never produced
  bool passed = false;
};

struct ExperimentSpec {
  std::string name;
  json parameters = json::object();
  std::uint64_t seed = 0;
  std::vector<Check> expected_checks;

  json to_json() const {
    json checks = json::array();
    for (const auto& c : expected_checks) checks.push_back(c.to_json());
    return {{"name", name}, {"seed", seed}, {"parameters", parameters}, {"expected_checks", checks}};
  }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Result of one experiment run. `generated_at` is the only field that may
/// differ between two runs with the same spec.
struct ExperimentReport {
  ExperimentSpec spec;
  json measured = json::object();  // quantity -> number
  json details = json::object();   // free-form tables and arrays
  std::vector<CheckOutcome> outcomes;
  std::string version = kVersion;
  std::uint64_t parameter_hash = 0;
  std::string generated_at;

  void measure(const std::string& quantity, double value) {
    measured[quantity] = std::isfinite(value) ? json(value) : json(nullptr);
  }
  void measure(const std::string& quantity, bool value) { measure(quantity, value ? 1.0 : 0.0); }

  void expect(std::string quantity, Comparator c, double target, double tolerance = 0.0) {
    spec.expected_checks.push_back({std::move(quantity), c, target, tolerance});
  }

  std::optional<double> value(const std::string& quantity) const {
    if (!measured.contains(quantity) || !measured[quantity].is_number()) return std::nullopt;
    return measured[quantity].get<double>();
  }

  /// Fills one outcome per expected check and stamps provenance.
  void evaluate() {
    outcomes.clear();
    for (const auto& c : spec.expected_checks) {
      const auto v = value(c.quantity);
      outcomes.push_back({c, v, v && c.accepts(*v)});
    }
    json hashed = spec.parameters;
    if (hashed.is_object()) hashed.erase("parallelism");
    parameter_hash = fnv1a(json{{"name", spec.name}, {"seed", spec.seed}, {"parameters", hashed}}.dump());
    generated_at = utc_timestamp();
  }

  bool passed() const {
    for (const auto& o : outcomes) {
      if (!o.passed) return false;
    }
    return true;
  }

  std::size_t failed_count() const {
    std::size_t n = 0;
    for (const auto& o : outcomes) n += o.passed ? 0 : 1;
    return n;
  }

  /// Full document; with_timestamp = false gives the canonical form used for
  /// reproducibility comparisons.
  json to_json(bool with_timestamp = true) const {
    json checks = json::array();
    for (const auto& o : outcomes) {
      json c = o.check.to_json();
      c["measured"] = o.measured ? json(*o.measured) : json(nullptr);
      c["passed"] = o.passed;
      checks.push_back(c);
    }
    json prov = {{"code_version", version}, {"parameter_hash", parameter_hash}};
    if (with_timestamp) prov["generated_at"] = generated_at;
    return {{"schema_version", kReportSchema},
            {"experiment", spec.name},
            {"spec", spec.to_json()},
            {"measured", measured},
            {"details", details},
            {"checks", checks},
            {"passed", passed()},
            {"provenance", prov}};
  }

  std::string summary_text() const {
    std::ostringstream out;
    out.precision(10);
    out << "experiment " << spec.name << "  seed=" << spec.seed;
    if (spec.parameters.contains("eta")) out << "  eta=" << spec.parameters["eta"].dump();
    if (spec.parameters.contains("lambda_amplification")) {
      out << "  lambda_amplification=" << spec.parameters["lambda_amplification"].dump();
    }
    out << "\nparameters " << spec.parameters.dump() << "\n";
    for (const auto& o : outcomes) {
      out << (o.passed ? "  PASS " : "  FAIL ") << o.check.quantity << " = ";
      if (o.measured) {
        out << *o.measured;
      } else {
        out << "(not measured)";
      }
      out << "  [" << to_string(o.check.comparator) << ' ' << o.check.target;
      if (o.check.comparator == Comparator::eq_abs || o.check.comparator == Comparator::eq_rel) {
        out << " tol " << o.check.tolerance;
      }
      out << "]\n";
    }
    out << (passed() ? "all checks passed" : std::to_string(failed_count()) + " check(s) failed") << '\n';
    return out.str();
  }
};

/// Reads back a report document; outcomes are taken as stored.
inline ExperimentReport report_from_json(const json& j) {
  ExperimentReport r;
  const auto& s = detail::require<json>(j, "spec", "report");
  r.spec.name = detail::require<std::string>(s, "name", "report.spec");
  r.spec.seed = s.value("seed", std::uint64_t{0});
  r.spec.parameters = s.value("parameters", json::object());
  for (const auto& c : s.value("expected_checks", json::array())) {
    r.spec.expected_checks.push_back({c.at("quantity").get<std::string>(),
                                      comparator_from(c.at("comparator").get<std::string>()),
                                      c.at("target").get<double>(), c.value("tolerance", 0.0)});
  }
  r.measured = j.value("measured", json::object());
  r.details = j.value("details", json::object());
  for (const auto& c : j.value("checks", json::array())) {
    CheckOutcome o;
    o.check = {c.at("quantity").get<std::string>(), comparator_from(c.at("comparator").get<std::string>()),
               c.at("target").get<double>(), c.value("tolerance", 0.0)};
    if (c.contains("measured") && c["measured"].is_number()) o.measured = c["measured"].get<double>();
    o.passed = c.value("passed", false);
    r.outcomes.push_back(o);
  }
  if (j.contains("provenance")) {
    r.version = j["provenance"].value("code_version", std::string{});
    r.parameter_hash = j["provenance"].value("parameter_hash", std::uint64_t{0});
    r.generated_at = j["provenance"].value("generated_at", std::string{});
  }
  return r;
}

/// Tracks the worst mass-conservation and normalization errors seen in a run.
struct ConservationTracker {
  double max_mass_error = 0.0;  // relative
  double max_norm_error = 0.0;

  void observe(double integrated_mass, double expected_mass, double norm) {
    max_mass_error = std::max(max_mass_error, std::abs(integrated_mass - expected_mass) / expected_mass);
    max_norm_error = std::max(max_norm_error, std::abs(norm - 1.0));
  }

  void merge(const ConservationTracker& o) {
    max_mass_error = std::max(max_mass_error, o.max_mass_error);
    max_norm_error = std::max(max_norm_error, o.max_norm_error);
  }

  void record(ExperimentReport& r) const {
    r.measure("max_mass_conservation_error", max_mass_error);
    r.measure("max_norm_error", max_norm_error);
    r.expect("max_mass_conservation_error", Comparator::le, 1e-9);
    r.expect("max_norm_error", Comparator::le, 1e-12);
  }
};

}  // namespace grwm
