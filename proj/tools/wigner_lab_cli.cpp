// Copyright 2026 The wigner-lab Authors.
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

// wigner-lab: sample Wigner matrices, inspect spectra, run experiments.
//
//   wigner-lab sample   --ensemble goe --n 50 --seed 7 --out m.csv
//   wigner-lab spectrum --ensemble gue --n 50 --emit gaps --out gaps.csv
//   wigner-lab clt      --config configs/clt_goe.json --threads 4
//
// Exit status: 0 success / all tests pass, 2 a test failed, 1 usage or IO
// error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wigner_lab/experiments.hpp"
#include "wigner_lab/io.hpp"
#include "wigner_lab/spectral.hpp"

namespace {

using namespace wigner_lab;

struct GlobalFlags {
  std::string config;
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  unsigned threads = 1;
  std::string out;
  std::string format = "json";
  bool dump_samples = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* format_opt = nullptr;
};

// Experiment parameters; each one overrides the config only when given.
struct ExperimentFlags {
  std::string ensemble, ensemble_b, atom_file, diag_atom_file, normalization, vectors, functional, group;
  std::size_t n = 0, index = 0, p = 0, q = 0;
  double energy = 0.0, eta = 0.0, threshold = 0.0;
  bool allow_unmatched = false, override_case_a = false;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* cmd) {
    opts["ensemble"] = cmd->add_option("--ensemble", ensemble, "goe, gue, matched_goe, matched_gue, rademacher, custom or file:PATH");
    opts["ensemble_b"] = cmd->add_option("--ensemble-b", ensemble_b, "second ensemble (four-moment)");
    opts["atom_file"] = cmd->add_option("--atom-file", atom_file, "off-diagonal atom JSON for ensemble 'custom'");
    opts["diag_atom_file"] = cmd->add_option("--diag-atom-file", diag_atom_file, "diagonal atom JSON");
    opts["n"] = cmd->add_option("--n", n, "matrix dimension");
    opts["index"] = cmd->add_option("--index", index, "eigenvector index i (1-based, default n/2)");
    opts["p"] = cmd->add_option("--p", p, "coefficient index p (1-based)");
    opts["q"] = cmd->add_option("--q", q, "coefficient index q (1-based)");
    opts["normalization"] = cmd->add_option("--normalization", normalization, "adhoc, random or raw");
    opts["vectors"] = cmd->add_option("--vectors", vectors, "comma list of flat, alternating, basis:K");
    opts["functional"] = cmd->add_option("--functional", functional, "catalog functional as JSON text");
    opts["energy"] = cmd->add_option("--E,--energy", energy, "Re z");
    opts["eta"] = cmd->add_option("--eta", eta, "Im z");
    opts["group"] = cmd->add_option("--group", group, "orthogonal or unitary (haar-compare)");
    opts["threshold"] = cmd->add_option("--threshold", threshold, "override the main test threshold");
    opts["allow_unmatched"] = cmd->add_flag("--allow-unmatched", allow_unmatched, "run four-moment without matching");
    opts["override_case_a"] = cmd->add_flag("--override-case-a", override_case_a, "skip the |a.e1| check");
  }

  bool given(const std::string& key) const { return opts.at(key)->count() > 0; }

  void apply(ExperimentConfig& c) const {
    if (given("ensemble")) c.ensemble = ensemble;
    if (given("ensemble_b")) c.ensemble_b = ensemble_b;
    if (given("atom_file")) c.atom_file = atom_file;
    if (given("diag_atom_file")) c.diag_atom_file = diag_atom_file;
    if (given("n")) c.n = n;
    if (given("index")) c.index = index;
    if (given("p")) c.p = p;
    if (given("q")) c.q = q;
    if (given("normalization")) c.normalization = normalization;
    if (given("vectors")) c.vectors = vectors;
    if (given("functional")) {
      try {
        c.functional = nlohmann::json::parse(functional);
      } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("--functional is not valid JSON: ") + e.what());
      }
    }
    if (given("energy")) c.energy = energy;
    if (given("eta")) c.eta = eta;
    if (given("group")) c.group = group;
    if (given("threshold")) c.threshold = threshold;
    if (given("allow_unmatched")) c.allow_unmatched = allow_unmatched;
    if (given("override_case_a")) c.override_case_a = override_case_a;
  }
};

ExperimentConfig build_config(const std::string& experiment, const GlobalFlags& g, const ExperimentFlags& f) {
  ExperimentConfig c;
  if (!g.config.empty()) c = config_from_json(read_json_file(g.config));
  if (!c.experiment.empty() && c.experiment != experiment)
    throw InvalidArgument("config is for experiment '" + c.experiment + "', not '" + experiment + "'");
  c.experiment = experiment;
  c.threads = default_threads();
  f.apply(c);
  if (g.seed_opt->count()) c.master_seed = g.seed;
  if (g.trials_opt->count()) c.trials = g.trials;
  if (g.threads_opt->count()) c.threads = g.threads;
  if (g.out_opt->count()) c.out = g.out;
  if (g.format_opt->count()) c.format = g.format;
  if (g.dump_samples) c.dump_samples = true;
  return c;
}

int run_sample(const GlobalFlags& g, const std::string& ensemble, std::size_t n, bool binary) {
  const MatrixSample m = sample(spec_by_name(ensemble, n), g.seed);
  const std::string path = g.out.empty() ? (binary ? "matrix.bin" : "matrix.csv") : g.out;
  auto out = open_output(path, binary ? std::ios::out | std::ios::binary : std::ios::out);
  if (binary) write_matrix_binary(out, m.matrix);
  else write_matrix_csv(out, m.matrix);
  if (!out) throw IoError("write to " + path + " failed");
  std::cout << "wrote " << ensemble << " n=" << n << " seed=" << g.seed << " to " << path << '\n';
  return 0;
}

int run_spectrum(const GlobalFlags& g, const std::string& ensemble, std::size_t n, const std::string& emit,
                 const std::string& normalization, std::optional<std::size_t> index) {
  const MatrixSample m = sample(spec_by_name(ensemble, n), g.seed);
  const auto mode = parse_normalization(normalization);
  const auto d = decompose_rescaled(m, trial_normalization(mode, g.seed));
  Table t;
  if (emit == "eigenvalues") {
    t.columns = {"i", "eigenvalue"};
    for (std::size_t i = 1; i <= n; ++i) t.rows.push_back({std::uint64_t{i}, d.eigenvalue(i)});
  } else if (emit == "gaps") {
    t.columns = {"i", "gap"};
    for (std::size_t i = 1; i < n; ++i) t.rows.push_back({std::uint64_t{i}, gap(d, i)});
  } else if (emit == "q") {
    t.columns = {"i", "q"};
    for (std::size_t i = 1; i <= n; ++i) t.rows.push_back({std::uint64_t{i}, q_statistic(d, i)});
  } else if (emit == "coeffs") {
    const std::size_t i = index.value_or(n / 2);
    t.columns = {"p", "re", "im"};
    for (std::size_t p = 1; p <= n; ++p) {
      const Complex u = d.coefficient(i, p);
      t.rows.push_back({std::uint64_t{p}, u.real(), u.imag()});
    }
  } else {
    throw InvalidArgument("unknown --emit '" + emit + "' (eigenvalues, gaps, q or coeffs)");
  }
  const auto format = parse_format(g.format_opt->count() ? g.format : "csv");
  const std::string path = g.out.empty() ? (format == OutputFormat::csv ? "spectrum.csv" : "spectrum.json") : g.out;
  emit_plotdata(t, format, path);
  std::cout << "wrote " << emit << " of " << ensemble << " n=" << n << " to " << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wigner matrix eigenvector experiments", "wigner-lab"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  g.threads = default_threads();
  app.add_option("--config", g.config, "experiment config JSON")->check(CLI::ExistingFile);
  g.seed_opt = app.add_option("--seed", g.seed, "master seed");
  g.trials_opt = app.add_option("--trials", g.trials, "number of trials");
  g.threads_opt = app.add_option("--threads", g.threads, "worker threads (default $WIGNER_LAB_THREADS or 1)");
  g.out_opt = app.add_option("--out", g.out, "output path");
  g.format_opt = app.add_option("--format", g.format, "csv or json");
  app.add_flag("--dump-samples", g.dump_samples, "also write raw samples as CSV");

  std::string sample_ensemble = "goe";
  std::size_t sample_n = 10;
  bool sample_binary = false;
  auto* sample_cmd = app.add_subcommand("sample", "draw one matrix M_n");
  sample_cmd->add_option("--ensemble", sample_ensemble, "built-in ensemble name");
  sample_cmd->add_option("--n", sample_n, "dimension")->check(CLI::PositiveNumber);
  sample_cmd->add_flag("--binary", sample_binary, "little-endian binary instead of CSV");

  std::string spec_ensemble = "goe";
  std::size_t spec_n = 10;
  std::string emit = "eigenvalues";
  std::string spec_norm = "adhoc";
  std::size_t spec_index = 0;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigen-data of A_n = sqrt(n) M_n for one matrix");
  spectrum_cmd->add_option("--ensemble", spec_ensemble, "built-in ensemble name");
  spectrum_cmd->add_option("--n", spec_n, "dimension")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 16));
  spectrum_cmd->add_option("--emit", emit, "eigenvalues, gaps, q or coeffs");
  spectrum_cmd->add_option("--normalization", spec_norm, "adhoc, random or raw");
  auto* spec_index_opt = spectrum_cmd->add_option("--index", spec_index, "eigenvector for --emit coeffs");

  std::map<std::string, ExperimentFlags> flags;
  std::map<std::string, CLI::App*> commands;
  for (const auto& name : experiment_names()) {
    commands[name] = app.add_subcommand(name, "run the " + name + " experiment");
    flags[name].attach(commands[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sample_cmd->parsed()) return run_sample(g, sample_ensemble, sample_n, sample_binary);
    if (spectrum_cmd->parsed()) {
      std::optional<std::size_t> idx;
      if (spec_index_opt->count()) idx = spec_index;
      return run_spectrum(g, spec_ensemble, spec_n, emit, spec_norm, idx);
    }
    for (const auto& [name, cmd] : commands) {
      if (!cmd->parsed()) continue;
      const ExperimentConfig config = build_config(name, g, flags[name]);
      return run(config, std::cout).exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
