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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "grwm/errors.hpp"
#include "grwm/rng.hpp"
#include "grwm/serialization.hpp"

namespace grwm {

/// Summary of one trajectory: named scalar values and boolean outcomes.
struct TrajectoryDigest {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  std::map<std::string, double> values;
  std::map<std::string, bool> flags;

  std::uint64_t fingerprint() const { return fnv1a(to_json().dump()); }

  json to_json() const {
    json v = json::object();
    for (const auto& [k, x] : values) v[k] = x;
    json f = json::object();
    for (const auto& [k, x] : flags) f[k] = x;
    return {{"index", index}, {"seed", seed}, {"ok", ok}, {"error", error}, {"values", v}, {"flags", f}};
  }
};

struct MeanStat {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct FrequencyStat {
  std::size_t successes = 0;
  std::size_t count = 0;
  double frequency = 0.0;
  double ci_low = 0.0;  // Wilson score, 95%
  double ci_high = 1.0;
};

struct EnsembleStatistics {
  std::size_t trajectories = 0;
  std::size_t failures = 0;
  std::map<std::string, MeanStat> means;
  std::map<std::string, FrequencyStat> frequencies;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for k successes out of n.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = kZ95) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Aggregates successful digests; failed ones are only counted. Digests are
/// processed in index order so the result depends only on the multiset.
inline EnsembleStatistics aggregate(std::span<const TrajectoryDigest> digests) {
  if (digests.empty()) throw EmptyEnsembleError("aggregate: no digests");
  std::vector<const TrajectoryDigest*> order;
  order.reserve(digests.size());
  for (const auto& d : digests) order.push_back(&d);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->index != b->index ? a->index < b->index : a->fingerprint() < b->fingerprint();
  });

  EnsembleStatistics out;
  out.trajectories = digests.size();
  std::map<std::string, std::vector<double>> samples;
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const auto* d : order) {
    if (!d->ok) {
      ++out.failures;
      continue;
    }
    for (const auto& [k, v] : d->values) samples[k].push_back(v);
    for (const auto& [k, f] : d->flags) {
      auto& c = counts[k];
      c.first += f ? 1 : 0;
      ++c.second;
    }
  }
  for (const auto& [k, xs] : samples) {
    MeanStat m;
    m.count = xs.size();
    double sum = 0.0;
    m.min = xs.front();
    m.max = xs.front();
    for (double x : xs) {
      sum += x;
      m.min = std::min(m.min, x);
      m.max = std::max(m.max, x);
    }
    m.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - m.mean) * (x - m.mean);
      m.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    out.means[k] = m;
  }
  for (const auto& [k, c] : counts) {
    FrequencyStat f;
    f.successes = c.first;
    f.count = c.second;
    f.frequency = static_cast<double>(c.first) / static_cast<double>(c.second);
    std::tie(f.ci_low, f.ci_high) = wilson_interval(c.first, c.second);
    out.frequencies[k] = f;
  }
  return out;
}

struct EnsembleManifest {
  std::uint64_t master_seed = 0;
  std::size_t trajectory_count = 0;
  std::uint64_t parameter_hash = 0;
  json spec;
  std::vector<TrajectoryDigest> digests;
  std::vector<std::size_t> failed_indices;
  EnsembleStatistics statistics;

  json to_json() const {
    json means = json::object();
    for (const auto& [k, m] : statistics.means) {
      means[k] = {{"count", m.count}, {"mean", m.mean}, {"std_error", m.std_error},
                  {"min", m.min}, {"max", m.max}};
    }
    json freqs = json::object();
    for (const auto& [k, f] : statistics.frequencies) {
      freqs[k] = {{"successes", f.successes}, {"count", f.count}, {"frequency", f.frequency},
                  {"wilson95_low", f.ci_low}, {"wilson95_high", f.ci_high}};
    }
    json fps = json::array();
    for (const auto& d : digests) fps.push_back(d.fingerprint());
    return {{"master_seed", master_seed},
            {"trajectory_count", trajectory_count},
            {"parameter_hash", parameter_hash},
            {"spec", spec},
            {"failures", statistics.failures},
            {"failed_indices", failed_indices},
            {"digest_fingerprints", fps},
            {"statistics", {{"means", means}, {"frequencies", freqs}}}};
  }

  /// One row per trajectory: index, seed, ok, then every value and flag column.
  std::string digests_csv() const {
    std::vector<std::string> value_keys, flag_keys;
    for (const auto& [k, m] : statistics.means) value_keys.push_back(k);
    for (const auto& [k, f] : statistics.frequencies) flag_keys.push_back(k);
    std::ostringstream out;
    out.precision(17);
    out << "# master_seed=" << master_seed << " parameter_hash=" << parameter_hash << "\n";
    out << "index,seed,ok";
    for (const auto& k : value_keys) out << ',' << k;
    for (const auto& k : flag_keys) out << ',' << k;
    out << '\n';
    for (const auto& d : digests) {
      out << d.index << ',' << d.seed << ',' << (d.ok ? 1 : 0);
      for (const auto& k : value_keys) {
        out << ',';
        if (auto it = d.values.find(k); it != d.values.end()) out << it->second;
      }
      for (const auto& k : flag_keys) {
        out << ',';
        if (auto it = d.flags.find(k); it != d.flags.end()) out << (it->second ? 1 : 0);
      }
      out << '\n';
    }
    return out.str();
  }
};

/// Runs `trajectory(index, seed) -> TrajectoryDigest` for every index with the
/// seed child_seed(master_seed, index). Work is spread over `parallelism`
/// threads; results are stored by index, so the manifest does not depend on
/// the thread count or completion order. Exceptions are recorded per index.
template <class TrajectoryFn>
EnsembleManifest run_ensemble(const json& spec, std::size_t n_trajectories, std::uint64_t master_seed,
                              unsigned parallelism, TrajectoryFn&& trajectory) {
  if (n_trajectories == 0) throw ParameterError("run_ensemble: need at least one trajectory");
  EnsembleManifest manifest;
  manifest.master_seed = master_seed;
  manifest.trajectory_count = n_trajectories;
  manifest.spec = spec;
  manifest.parameter_hash = fnv1a(spec.dump());
  manifest.digests.resize(n_trajectories);

  auto run_one = [&](std::size_t i) {
    const std::uint64_t seed = child_seed(master_seed, i);
    TrajectoryDigest d;
    try {
      d = trajectory(i, seed);
    } catch (const std::exception& e) {
      d = TrajectoryDigest{};
      d.ok = false;
      d.error = e.what();
    }
    d.index = i;
    d.seed = seed;
    manifest.digests[i] = std::move(d);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(n_trajectories)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n_trajectories; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_trajectories; i = next++) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const auto& d : manifest.digests) {
    if (!d.ok) manifest.failed_indices.push_back(d.index);
  }
  manifest.statistics = aggregate(manifest.digests);
  return manifest;
}

inline unsigned default_parallelism() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

}  // namespace grwm
