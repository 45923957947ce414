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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "grwm/grwm.hpp"

namespace grwm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr const char* kOutputDirEnv = "GRWM_OUTPUT_DIR";

/// Effective settings of one invocation after merging the config file and flags.
struct RunConfig {
  std::string subcommand;
  std::string target;  // experiment name, state path or report path
  std::filesystem::path output_dir = ".";
  std::set<std::string> formats{"json"};
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::optional<double> lambda_amplification;
  json overrides = json::object();  // experiment parameters

  json to_json() const {
    return {{"subcommand", subcommand},
            {"target", target},
            {"output_dir", output_dir.string()},
            {"formats", std::vector<std::string>(formats.begin(), formats.end())},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"eta", eta ? json(*eta) : json(nullptr)},
            {"lambda_amplification", lambda_amplification ? json(*lambda_amplification) : json(nullptr)},
            {"overrides", overrides}};
  }
};

class UsageError : public Error {
 public:
  using Error::Error;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + p.string() + "'");
  out << text;
}

inline void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw UsageError("output directory '" + dir.string() + "' is not writable");
  }
  const auto probe = dir / ".grwm_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw UsageError("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

/// "key=value" with value parsed as JSON when possible, else kept as a string.
inline std::pair<std::string, json> parse_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + s + "'");
  const std::string key = s.substr(0, eq);
  const std::string raw = s.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  return {key, value};
}

// -- Field tables ------------------------------------------------------------

/// CSV rendering of a serialized MassDensityField, with threshold and config
/// echoed as comment lines.
inline std::string field_doc_csv(const json& field, const json& config) {
  std::ostringstream out;
  out.precision(17);
  out << "# threshold_eta=" << field.value("threshold_eta", json(0.0)).dump() << "\n";
  out << "# config=" << config.dump() << "\n";
  out << "cell_center,mean,variance,ratio,accessible\n";
  for (const auto& c : field.at("cells")) {
    out << c.at("center").get<double>() << ',' << c.at("mean").get<double>() << ','
        << c.at("variance").get<double>() << ',';
    if (c.at("ratio").is_number()) {
      out << c.at("ratio").get<double>();
    } else {
      out << "undefined";
    }
    out << ',' << (c.at("accessible").get<bool>() ? 1 : 0) << '\n';
  }
  return out.str();
}

inline bool is_field_doc(const json& j) { return j.is_object() && j.contains("cells") && j.contains("threshold_eta"); }

inline std::string field_table(const MassDensityField& f) {
  std::ostringstream out;
  out << std::left << std::setw(10) << "cell" << std::right << std::setw(14) << "center" << std::setw(14) << "M"
      << std::setw(14) << "mass" << std::setw(14) << "V" << std::setw(14) << "R" << "  status\n";
  out << std::setprecision(6);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out << std::left << std::setw(10) << f.labels[i] << std::right << std::setw(14) << f.centers[i] << std::setw(14)
        << f.mean[i] << std::setw(14) << f.cell_mass[i] << std::setw(14) << f.variance[i] << std::setw(14);
    if (f.ratio[i]) {
      out << *f.ratio[i];
    } else {
      out << "undefined";
    }
    out << "  " << to_string(f.status(i)) << '\n';
  }
  return out.str();
}

// -- Plots ---------------------------------------------------------------------

inline std::vector<std::string> echo_lines(const json& parameters) {
  std::vector<std::string> lines;
  std::ostringstream head;
  head << "eta=" << (parameters.contains("eta") ? parameters["eta"].dump() : "n/a")
       << "  lambda_amplification="
       << (parameters.contains("lambda_amplification") ? parameters["lambda_amplification"].dump() : "n/a")
       << "  seed=" << (parameters.contains("seed") ? parameters["seed"].dump() : "n/a");
  lines.push_back(head.str());
  std::string dump = parameters.dump();
  while (!dump.empty()) {
    lines.push_back(dump.substr(0, 110));
    dump = dump.size() > 110 ? dump.substr(110) : std::string{};
  }
  return lines;
}

/// SVG plots derived from a report document: density and ratio profiles for
/// every field it contains, deflection histograms, variance decay curves.
/// Reading the report is the only input; nothing is recomputed.
inline std::vector<std::pair<std::string, std::string>> plots_for_report(const json& report) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string name = report.value("experiment", std::string{"report"});
  const json params = report.contains("spec") ? report["spec"].value("parameters", json::object()) : json::object();
  const auto header = echo_lines(params);

  std::function<void(const std::string&, const json&)> visit = [&](const std::string& path, const json& node) {
    if (is_field_doc(node)) {
      std::vector<double> x, mean, ratio, smeared;
      for (const auto& c : node["cells"]) {
        x.push_back(c["center"].get<double>());
        mean.push_back(c["mean"].get<double>());
        ratio.push_back(c["ratio"].is_number() ? c["ratio"].get<double>() : std::nan(""));
        if (c.contains("smeared_mean")) smeared.push_back(c["smeared_mean"].get<double>());
      }
      svg::PlotOptions o;
      o.title = name + ": mass density " + path;
      o.x_label = "position";
      o.y_label = "M (mass per length)";
      o.header_lines = header;
      std::vector<svg::Series> series{{"mean", x, mean, "#1f77b4"}};
      if (!smeared.empty()) series.push_back({"smeared", x, smeared, "#2ca02c"});
      out.emplace_back(name + "." + path + ".density.svg", svg::line_plot(series, o));
      o.title = name + ": accessibility ratio " + path;
      o.y_label = "R (log scale)";
      o.log_y = true;
      o.h_line = node.value("threshold_eta", kDefaultEta);
      bool any = false;
      for (double r : ratio) any = any || (std::isfinite(r) && r > 0.0);
      if (any) out.emplace_back(name + "." + path + ".ratio.svg", svg::line_plot({{"R", x, ratio, "#ff7f0e"}}, o));
      return;
    }
    if (node.is_object()) {
      for (const auto& [k, v] : node.items()) visit(path.empty() ? k : path + "." + k, v);
    }
  };
  if (report.contains("details")) visit("", report["details"]);

  if (name == "test-particle-deflection" && report.contains("details")) {
    std::size_t i = 0;
    for (const auto& c : report["details"].value("cases", json::array())) {
      if (!c.contains("deflections")) continue;
      svg::PlotOptions o;
      o.title = name + ": " + c.value("case", std::string{}) + " deflection angles";
      o.x_label = "deflection angle (rad), positive = toward A";
      o.y_label = "trajectories";
      o.header_lines = header;
      const auto values = c["deflections"].get<std::vector<double>>();
      if (!values.empty()) {
        out.emplace_back(name + ".case" + std::to_string(i) + ".histogram.svg", svg::histogram(values, 40, o));
      }
      ++i;
    }
  }
  if (name == "csl-collapse" && report.contains("details")) {
    for (const auto& row : report["details"].value("rows", json::array())) {
      const auto v = row["ensemble_mean_variance"];
      std::vector<double> t, total;
      for (std::size_t s = 0; s < v.size(); ++s) {
        double sum = 0.0;
        for (const auto& x : v[s]) sum += x.get<double>();
        t.push_back(static_cast<double>(s));
        total.push_back(sum);
      }
      svg::PlotOptions o;
      o.title = name + ": ensemble-mean variance, p=" + row["p"].dump();
      o.x_label = "snapshot";
      o.y_label = "sum of per-cell V (log scale)";
      o.log_y = true;
      o.header_lines = header;
      out.emplace_back(name + ".p" + row["p"].dump() + ".variance.svg", svg::line_plot({{"V", t, total}}, o));
    }
  }
  return out;
}

// -- Subcommands ---------------------------------------------------------------

inline void apply_common_overrides(const RunConfig& cfg, const json& defaults, json& overrides,
                                   std::optional<std::size_t> n, std::optional<double> in_weight,
                                   std::optional<std::size_t> ensemble) {
  auto put = [&](const char* key, const json& value, const char* flag) {
    if (!defaults.contains(key)) throw UsageError(std::string(flag) + " does not apply to this experiment");
    overrides[key] = value;
  };
  if (cfg.seed) put("seed", *cfg.seed, "--seed");
  if (cfg.eta) put("eta", *cfg.eta, "--eta");
  if (cfg.lambda_amplification) put("lambda_amplification", *cfg.lambda_amplification, "--lambda-amplification");
  if (n) {
    if (defaults.contains("n")) {
      overrides["n"] = *n;
    } else if (defaults.contains("n_list")) {
      overrides["n_list"] = json::array({*n});
    } else {
      throw UsageError("--n does not apply to this experiment");
    }
  }
  if (in_weight) put("in_weight", *in_weight, "--in-weight");
  if (ensemble) put("ensemble", *ensemble, "--ensemble");
}

inline int emit_report(const ExperimentReport& report, const RunConfig& cfg, std::ostream& out) {
  prepare_output_dir(cfg.output_dir);
  const json doc = report.to_json();
  const std::string stem = report.spec.name;
  json config = cfg.to_json();
  config["parameters"] = report.spec.parameters;
  if (cfg.formats.count("json")) {
    json full = doc;
    full["run_config"] = config;
    write_file(cfg.output_dir / (stem + ".report.json"), full.dump(2) + "\n");
    write_file(cfg.output_dir / (stem + ".summary.txt"), report.summary_text());
  }
  if (cfg.formats.count("csv")) {
    std::function<void(const std::string&, const json&)> visit = [&](const std::string& path, const json& node) {
      if (is_field_doc(node)) {
        write_file(cfg.output_dir / (stem + "." + path + ".csv"), field_doc_csv(node, config));
      } else if (node.is_object()) {
        for (const auto& [k, v] : node.items()) visit(path.empty() ? k : path + "." + k, v);
      }
    };
    visit("", doc["details"]);
    std::ostringstream checks;
    checks.precision(17);
    checks << "# config=" << config.dump() << "\n" << "quantity,comparator,target,tolerance,measured,passed\n";
    for (const auto& o : report.outcomes) {
      checks << o.check.quantity << ',' << to_string(o.check.comparator) << ',' << o.check.target << ','
             << o.check.tolerance << ',';
      if (o.measured) checks << *o.measured;
      checks << ',' << (o.passed ? 1 : 0) << '\n';
    }
    write_file(cfg.output_dir / (stem + ".checks.csv"), checks.str());
  }
  if (cfg.formats.count("svg")) {
    for (const auto& [file, text] : plots_for_report(doc)) write_file(cfg.output_dir / file, text);
  }
  out << report.summary_text();
  return report.passed() ? kExitOk : kExitChecksFailed;
}

inline int run_experiment_command(const RunConfig& cfg, std::optional<std::size_t> n,
                                  std::optional<double> in_weight, std::optional<std::size_t> ensemble,
                                  std::ostream& out) {
  const auto& entry = find_experiment(cfg.target);
  const json defaults = entry.defaults();
  json overrides = cfg.overrides;
  apply_common_overrides(cfg, defaults, overrides, n, in_weight, ensemble);
  return emit_report(entry.run(overrides), cfg, out);
}

inline int run_analyze_command(const RunConfig& cfg, const std::optional<std::string>& partition_path,
                               double smear, std::ostream& out) {
  const State state = state_from_json(read_json_file(cfg.target));
  const double eta = cfg.eta.value_or(kDefaultEta);
  if (!(eta > 0.0)) throw UsageError("--eta must be > 0");
  FieldOptions opt;
  opt.smear_width = smear;
  std::optional<MassObservablePartition> partition;
  if (partition_path) partition = partition_from_json(read_json_file(*partition_path));

  MassDensityField field;
  DegreeProfile degrees;
  std::visit(
      [&](const auto& s) {
        field = analyze(s, eta, opt);
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, WaveFunction>) {
          degrees = degree_of(s, partition.value_or(cellwise_partition(s.grid().cell_count())));
        } else {
          degrees = degree_of(s, partition.value_or(region_partition(s)));
        }
      },
      state);
  const auto report = indeterminacy_report(degrees, eta);
  json config = cfg.to_json();
  config["eta"] = eta;
  config["seed"] = cfg.seed.value_or(0);
  config["lambda_amplification"] = cfg.lambda_amplification.value_or(1.0);
  if (partition) config["partition"] = partition_path->c_str();
  config["smear_width"] = smear;

  prepare_output_dir(cfg.output_dir);
  const std::string stem = std::filesystem::path(cfg.target).stem().string();
  const json doc = {{"schema_version", "grwm.analysis/1"},
                    {"config", config},
                    {"field", to_json(field)},
                    {"degrees", to_json(degrees)},
                    {"indeterminacy", to_json(report)},
                    {"provenance", {{"code_version", kVersion}}}};
  if (cfg.formats.count("json")) write_file(cfg.output_dir / (stem + ".analysis.json"), doc.dump(2) + "\n");
  if (cfg.formats.count("csv")) write_file(cfg.output_dir / (stem + ".field.csv"), field_csv(field, config));
  if (cfg.formats.count("svg")) {
    json as_report = {{"experiment", stem}, {"spec", {{"parameters", config}}}, {"details", {{"field", doc["field"]}}}};
    for (const auto& [file, text] : plots_for_report(as_report)) write_file(cfg.output_dir / file, text);
  }

  out << "state " << cfg.target << "  eta=" << eta << "  lambda_amplification=" << config["lambda_amplification"]
      << "  seed=" << config["seed"] << "\n\n";
  out << field_table(field) << "\n";
  out << "degree profile (" << degrees.determinable << ")\n";
  for (const auto& e : degrees.entries) out << "  " << e.label << "  " << e.degree << '\n';
  out << "classification: " << to_string(report.kind) << " (dominant " << report.dominant << ")\n";
  return kExitOk;
}

struct EnsembleOptions {
  std::size_t trajectories = 100;
  std::string mode = "jumps";
  double t_final = 1.0;
  double dt = 1e-3;
  double alpha_length = CollapseParameters{}.alpha_length;
  double csl_gamma = 0.0;
  unsigned parallelism = 0;
  std::size_t max_jumps = 0;
  std::optional<std::string> partition_path;
};

inline int run_ensemble_command(const RunConfig& cfg, const EnsembleOptions& eo, std::ostream& out) {
  const State state = state_from_json(read_json_file(cfg.target));
  const double eta = cfg.eta.value_or(kDefaultEta);
  if (!(eta > 0.0)) throw UsageError("--eta must be > 0");
  CollapseParameters params;
  params.alpha_length = eo.alpha_length;
  params.csl_gamma = eo.csl_gamma;
  params = params.amplified(cfg.lambda_amplification.value_or(1.0));
  params.validate();
  TrajectoryOptions opt;
  opt.mode = dynamics_mode_from(eo.mode);
  opt.t_final = eo.t_final;
  opt.dt = eo.dt;
  opt.max_jumps = eo.max_jumps;
  std::optional<MassObservablePartition> partition;
  if (eo.partition_path) partition = partition_from_json(read_json_file(*eo.partition_path));
  if (const auto* wf = std::get_if<WaveFunction>(&state)) {
    if (!partition) partition = split_partition(wf->grid(), 0.5 * (wf->grid().begin() + wf->grid().end()));
  } else if (!partition) {
    partition = region_partition(std::get<BranchState>(state));
  }
  const std::uint64_t master = cfg.seed.value_or(0);

  json spec = {{"state", cfg.target},
               {"mode", eo.mode},
               {"t_final", eo.t_final},
               {"dt", eo.dt},
               {"max_jumps", eo.max_jumps},
               {"eta", eta},
               {"lambda_amplification", params.lambda_amplification},
               {"parameters", to_json(params)},
               {"partition", partition ? partition->name : std::string{}}};
  const auto manifest = run_ensemble(
      spec, eo.trajectories, master, eo.parallelism == 0 ? default_parallelism() : eo.parallelism,
      [&](std::size_t, std::uint64_t seed) {
        auto o = opt;
        o.seed = seed;
        const auto rec = evolve_trajectory(state, params, o);
        TrajectoryDigest d;
        d.values["jump_count"] = static_cast<double>(rec.jumps.size());
        if (const auto t = rec.first_jump_time()) d.values["first_jump_time"] = *t;
        DegreeProfile degrees = std::visit([&](const auto& s) { return degree_of(s, *partition); }, *rec.final_state);
        const auto report = indeterminacy_report(degrees, eta);
        for (const auto& e : degrees.entries) {
          d.values["final_degree_" + e.label] = e.degree;
          d.flags["selected_" + e.label] = e.label == report.dominant;
        }
        d.flags["effectively_determinate"] = report.kind != Determinacy::indeterminate_glutty_degree;
        const auto& fin = rec.final_snapshot();
        d.values["final_norm_error"] = std::abs(fin.norm - 1.0);
        return d;
      });

  prepare_output_dir(cfg.output_dir);
  json doc = manifest.to_json();
  json config = cfg.to_json();
  config["eta"] = eta;
  config["seed"] = master;
  config["lambda_amplification"] = params.lambda_amplification;
  doc["run_config"] = config;
  doc["provenance"] = {{"code_version", kVersion}};
  if (cfg.formats.count("json")) write_file(cfg.output_dir / "ensemble.manifest.json", doc.dump(2) + "\n");
  if (cfg.formats.count("csv")) {
    write_file(cfg.output_dir / "ensemble.digests.csv", "# config=" + config.dump() + "\n" + manifest.digests_csv());
  }
  out << "ensemble of " << manifest.trajectory_count << " trajectories  master_seed=" << master << "  eta=" << eta
      << "  lambda_amplification=" << params.lambda_amplification << "\n";
  for (const auto& [k, f] : manifest.statistics.frequencies) {
    out << "  " << k << "  " << f.frequency << "  [" << f.ci_low << ", " << f.ci_high << "]\n";
  }
  for (const auto& [k, m] : manifest.statistics.means) {
    out << "  mean " << k << "  " << m.mean << " +- " << m.std_error << '\n';
  }
  out << "failures: " << manifest.statistics.failures << '\n';
  return manifest.statistics.failures == 0 ? kExitOk : kExitChecksFailed;
}

inline int run_plot_command(const RunConfig& cfg, std::ostream& out) {
  const json report = read_json_file(cfg.target);
  prepare_output_dir(cfg.output_dir);
  const auto plots = plots_for_report(report);
  for (const auto& [file, text] : plots) {
    write_file(cfg.output_dir / file, text);
    out << "wrote " << (cfg.output_dir / file).string() << '\n';
  }
  if (plots.empty()) out << "no plottable content in " << cfg.target << '\n';
  return kExitOk;
}

// -- Entry point -----------------------------------------------------------------

/// Parses argv, runs the subcommand, returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"grwm: collapse dynamics, mass density and accessibility analysis"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string out_dir;
  std::string config_path;
  std::vector<std::string> formats;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  double eta = 0.0;
  double amplification = 0.0;
  std::size_t n = 0, ensemble = 0;
  double in_weight = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "output directory (default: $" + std::string(kOutputDirEnv) + " or .)");
    sub->add_option("--config", config_path, "JSON config mirroring the flags; flags win");
    sub->add_option("--format", formats, "output formats: json, csv, svg")
        ->delimiter(',')
        ->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--eta", eta, "accessibility threshold")->check(CLI::PositiveNumber);
    sub->add_option("--lambda-amplification", amplification, "collapse-rate amplification factor")
        ->check(CLI::PositiveNumber);
  };

  auto* exp = app.add_subcommand("experiment", "run a named scenario");
  std::string exp_name;
  bool list = false;
  exp->add_option("name", exp_name, "experiment name");
  exp->add_flag("--list", list, "list experiments and their defaults");
  exp->add_option("--n", n, "particle or object count");
  exp->add_option("--in-weight", in_weight, "per-object in-box weight");
  exp->add_option("--ensemble", ensemble, "trajectories per ensemble");
  exp->add_option("--set", sets, "parameter override key=value (repeatable)");
  add_common(exp);

  auto* ana = app.add_subcommand("analyze", "mass density, variance, ratio, mask and degree tables for a state");
  std::string state_path, partition_path;
  double smear = 0.0;
  ana->add_option("state", state_path, "state JSON file")->required();
  ana->add_option("--partition", partition_path, "partition JSON file");
  ana->add_option("--smear", smear, "Gaussian smearing width (0: off)")->check(CLI::NonNegativeNumber);
  add_common(ana);

  auto* sweep = app.add_subcommand("sweep-threshold", "accessibility masks across a threshold grid");
  std::vector<double> eta_grid;
  sweep->add_option("--eta-grid", eta_grid, "thresholds to compare")->delimiter(',');
  sweep->add_option("--set", sets, "parameter override key=value (repeatable)");
  add_common(sweep);

  auto* ens = app.add_subcommand("ensemble", "run many seeded trajectories of a state");
  EnsembleOptions eo;
  std::string ens_partition;
  ens->add_option("state", state_path, "state JSON file")->required();
  ens->add_option("--trajectories", eo.trajectories, "number of trajectories")->check(CLI::PositiveNumber);
  ens->add_option("--mode", eo.mode, "jumps or csl")->check(CLI::IsMember({"jumps", "csl"}));
  ens->add_option("--t-final", eo.t_final, "evolution time")->check(CLI::PositiveNumber);
  ens->add_option("--dt", eo.dt, "time step")->check(CLI::PositiveNumber);
  ens->add_option("--alpha", eo.alpha_length, "localization length")->check(CLI::PositiveNumber);
  ens->add_option("--csl-gamma", eo.csl_gamma, "continuous collapse strength")->check(CLI::NonNegativeNumber);
  ens->add_option("--max-jumps", eo.max_jumps, "stop after this many jumps (0: no limit)");
  ens->add_option("--parallelism", eo.parallelism, "worker threads (0: hardware)");
  ens->add_option("--partition", ens_partition, "partition JSON file");
  add_common(ens);

  auto* plot = app.add_subcommand("plot", "SVG plots from a report JSON");
  std::string report_path;
  plot->add_option("report", report_path, "report JSON file")->required();
  add_common(plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();

    json file_cfg = json::object();
    if (!config_path.empty()) {
      file_cfg = read_json_file(config_path);
      if (!file_cfg.is_object()) throw UsageError("config file must hold a JSON object");
    }
    auto from_file = [&](const char* key) -> const json* {
      return file_cfg.contains(key) ? &file_cfg[key] : nullptr;
    };
    // Output directory: flag, then config file, then environment, then ".".
    if (sub->count("--out")) {
      cfg.output_dir = out_dir;
    } else if (const auto* v = from_file("out")) {
      cfg.output_dir = v->get<std::string>();
    } else if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
      cfg.output_dir = env;
    }
    if (sub->count("--format")) {
      cfg.formats = {formats.begin(), formats.end()};
    } else if (const auto* v = from_file("format")) {
      cfg.formats.clear();
      for (const auto& f : *v) cfg.formats.insert(f.get<std::string>());
    }
    if (sub->count("--seed")) {
      cfg.seed = seed;
    } else if (const auto* v = from_file("seed")) {
      cfg.seed = v->get<std::uint64_t>();
    }
    if (sub->count("--eta")) {
      cfg.eta = eta;
    } else if (const auto* v = from_file("eta")) {
      cfg.eta = v->get<double>();
    }
    if (cfg.eta && !(*cfg.eta > 0.0)) throw UsageError("eta must be > 0");
    if (sub->count("--lambda-amplification")) {
      cfg.lambda_amplification = amplification;
    } else if (const auto* v = from_file("lambda_amplification")) {
      cfg.lambda_amplification = v->get<double>();
    }
    if (const auto* v = from_file("parameters")) {
      if (!v->is_object()) throw UsageError("config 'parameters' must be an object");
      cfg.overrides = *v;
    }
    for (const auto& s : sets) {
      auto [k, v] = parse_assignment(s);
      cfg.overrides[k] = v;
    }

    if (cfg.subcommand == "experiment") {
      if (list) {
        for (const auto& e : experiment_registry()) {
          out << e.name << "  " << e.summary << "\n    defaults " << e.defaults().dump() << '\n';
        }
        return kExitOk;
      }
      if (exp_name.empty()) {
        if (const auto* v = from_file("name")) exp_name = v->get<std::string>();
      }
      if (exp_name.empty()) throw UsageError("experiment: missing experiment name (see --list)");
      cfg.target = exp_name;
      std::optional<std::size_t> on, oe;
      std::optional<double> ow;
      if (exp->count("--n")) on.emplace(n);
      if (exp->count("--in-weight")) ow.emplace(in_weight);
      if (exp->count("--ensemble")) oe.emplace(ensemble);
      return run_experiment_command(cfg, on, ow, oe, out);
    }
    if (cfg.subcommand == "analyze") {
      cfg.target = state_path;
      std::optional<std::string> pp;
      if (!partition_path.empty()) pp = partition_path;
      return run_analyze_command(cfg, pp, smear, out);
    }
    if (cfg.subcommand == "sweep-threshold") {
      cfg.target = "threshold-sweep";
      if (!eta_grid.empty()) cfg.overrides["eta_grid"] = eta_grid;
      return run_experiment_command(cfg, std::nullopt, std::nullopt, std::nullopt, out);
    }
    if (cfg.subcommand == "ensemble") {
      cfg.target = state_path;
      if (!ens_partition.empty()) eo.partition_path = ens_partition;
      return run_ensemble_command(cfg, eo, out);
    }
    if (cfg.subcommand == "plot") {
      cfg.target = report_path;
      return run_plot_command(cfg, out);
    }
    throw UsageError("unknown subcommand");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad config value: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace grwm::cli
