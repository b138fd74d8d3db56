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

// Experiment configurations and the runner behind the CLI.
//
// A configuration is one JSON document (schema_version 1). The runner
// writes a report JSON to `out`, plus `<stem>.csv` plot data when format
// is csv and `<stem>.samples.csv` raw samples under dump_samples, and
// prints one verdict line per test. Exit status: 0 all tests pass,
// 2 a test failed, 1 usage or IO error.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "wigner_lab/atom_distribution.hpp"
#include "wigner_lab/ensembles.hpp"
#include "wigner_lab/errors.hpp"
#include "wigner_lab/haar.hpp"
#include "wigner_lab/io.hpp"
#include "wigner_lab/parallel.hpp"
#include "wigner_lab/resolvent.hpp"
#include "wigner_lab/spectral.hpp"
#include "wigner_lab/stats.hpp"

namespace wigner_lab {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"eigvec-dist", "clt",       "four-moment",
                                              "resolvent",   "inverse",   "gap-stats",
                                              "haar-compare", "local-law"};
  return names;
}

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  std::string experiment;
  std::string ensemble = "goe";            // built-in name, "custom" (atom_file) or "file:PATH"
  std::string ensemble_b = "matched_goe";  // second ensemble of four-moment
  std::string atom_file;
  std::string diag_atom_file;
  std::size_t n = 100;
  std::size_t trials = 1000;
  std::uint64_t master_seed = 1;
  std::optional<std::size_t> index;  // eigenvector index i; default floor(n/2)
  std::size_t p = 1;
  std::size_t q = 1;
  std::string normalization = "adhoc";
  std::string vectors = "flat";  // comma list of flat | alternating | basis:K
  std::optional<nlohmann::json> functional;
  bool allow_unmatched = false;
  bool override_case_a = false;
  double energy = 0.0;
  double eta = 0.0;
  std::string group = "orthogonal";
  std::optional<double> threshold;  // overrides the experiment's main threshold
  std::string out = "report.json";
  std::string format = "json";
  bool dump_samples = false;
  unsigned threads = 1;

  std::size_t eigen_index() const { return index.value_or(n / 2); }

  bool operator==(const ExperimentConfig&) const = default;
};

/// Fields that determine the numbers in a report; execution details
/// (threads, output location and format) are left out.
inline nlohmann::json hashed_fields(const ExperimentConfig& c) {
  nlohmann::json j{{"schema_version", c.schema_version},
                   {"experiment", c.experiment},
                   {"ensemble", c.ensemble},
                   {"ensemble_b", c.ensemble_b},
                   {"atom_file", c.atom_file},
                   {"diag_atom_file", c.diag_atom_file},
                   {"n", c.n},
                   {"trials", c.trials},
                   {"master_seed", c.master_seed},
                   {"index", c.index ? nlohmann::json(*c.index) : nlohmann::json(nullptr)},
                   {"p", c.p},
                   {"q", c.q},
                   {"normalization", c.normalization},
                   {"vectors", c.vectors},
                   {"functional", c.functional ? *c.functional : nlohmann::json(nullptr)},
                   {"allow_unmatched", c.allow_unmatched},
                   {"override_case_a", c.override_case_a},
                   {"energy", c.energy},
                   {"eta", c.eta},
                   {"group", c.group},
                   {"threshold", c.threshold ? nlohmann::json(*c.threshold) : nlohmann::json(nullptr)}};
  return j;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j = hashed_fields(c);
  j["out"] = c.out;
  j["format"] = c.format;
  j["dump_samples"] = c.dump_samples;
  j["threads"] = c.threads;
  return j;
}

inline std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(hashed_fields(c).dump()); }

/// Missing keys keep their defaults; unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("configuration must be a JSON object");
  static const std::set<std::string> known{
      "schema_version", "experiment", "ensemble",  "ensemble_b",      "atom_file",
      "diag_atom_file", "n",          "trials",    "master_seed",     "index",
      "p",              "q",          "normalization", "vectors",     "functional",
      "allow_unmatched", "override_case_a", "energy", "eta",          "group",
      "threshold",      "out",        "format",    "dump_samples",    "threads"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw InvalidArgument("unknown configuration key '" + key + "'");

  ExperimentConfig c;
  try {
    c.schema_version = j.value("schema_version", ExperimentConfig::kSchemaVersion);
    if (c.schema_version != ExperimentConfig::kSchemaVersion)
      throw InvalidArgument("unsupported schema_version " + std::to_string(c.schema_version));
    c.experiment = j.value("experiment", c.experiment);
    c.ensemble = j.value("ensemble", c.ensemble);
    c.ensemble_b = j.value("ensemble_b", c.ensemble_b);
    c.atom_file = j.value("atom_file", c.atom_file);
    c.diag_atom_file = j.value("diag_atom_file", c.diag_atom_file);
    c.n = j.value("n", c.n);
    c.trials = j.value("trials", c.trials);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("index") && !j["index"].is_null()) c.index = j["index"].get<std::size_t>();
    c.p = j.value("p", c.p);
    c.q = j.value("q", c.q);
    c.normalization = j.value("normalization", c.normalization);
    c.vectors = j.value("vectors", c.vectors);
    if (j.contains("functional") && !j["functional"].is_null()) c.functional = j["functional"];
    c.allow_unmatched = j.value("allow_unmatched", c.allow_unmatched);
    c.override_case_a = j.value("override_case_a", c.override_case_a);
    c.energy = j.value("energy", c.energy);
    c.eta = j.value("eta", c.eta);
    c.group = j.value("group", c.group);
    if (j.contains("threshold") && !j["threshold"].is_null()) c.threshold = j["threshold"].get<double>();
    c.out = j.value("out", c.out);
    c.format = j.value("format", c.format);
    c.dump_samples = j.value("dump_samples", c.dump_samples);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad configuration value: ") + e.what());
  }
  return c;
}

namespace detail {

inline std::string ensemble_file(const ExperimentConfig& c, const std::string& name) {
  if (name == "custom") return c.atom_file;
  if (name.rfind("file:", 0) == 0) return name.substr(5);
  return {};
}

}  // namespace detail

/// Throws InvalidArgument describing the first problem found.
inline void validate(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw InvalidArgument("unknown experiment '" + c.experiment + "'");
  if (c.n < 2) throw InvalidArgument("n must be >= 2");
  if (c.trials < 1) throw InvalidArgument("trials must be >= 1");
  if (c.threads < 1) throw InvalidArgument("threads must be >= 1");
  parse_format(c.format);
  parse_normalization(c.normalization);
  for (const auto& name : {c.ensemble, c.ensemble_b}) {
    if (name == "custom" && c.atom_file.empty())
      throw InvalidArgument("ensemble 'custom' needs an atom file");
  }
  for (const auto& path : {detail::ensemble_file(c, c.ensemble), detail::ensemble_file(c, c.ensemble_b),
                           c.diag_atom_file})
    if (!path.empty() && !std::filesystem::exists(path))
      throw InvalidArgument("referenced file does not exist: " + path);
}

/// Resolves an ensemble name of the configuration at dimension c.n.
inline WignerSpec make_spec(const ExperimentConfig& c, const std::string& name) {
  const std::string file = detail::ensemble_file(c, name);
  if (file.empty()) return spec_by_name(name, c.n);
  AtomDistribution off = load_atom_file(file);
  const Symmetry symmetry = off.is_real_valued() ? Symmetry::real_symmetric : Symmetry::hermitian;
  AtomDistribution diag = !c.diag_atom_file.empty()
                              ? load_atom_file(c.diag_atom_file)
                              : AtomDistribution::gaussian_real(
                                    0.0, symmetry == Symmetry::real_symmetric ? 2.0 : 1.0);
  return WignerSpec("custom:" + file, c.n, symmetry, std::move(off), std::move(diag));
}

/// Unit vectors from a comma-separated list of rules:
/// flat = (1,...,1)/sqrt(n), alternating = (1,-1,1,...)/sqrt(n), basis:K = e_K.
inline std::vector<Eigen::VectorXd> parse_vectors(const std::string& rules, std::size_t n) {
  std::vector<Eigen::VectorXd> out;
  std::stringstream ss(rules);
  std::string rule;
  const auto dim = static_cast<Eigen::Index>(n);
  while (std::getline(ss, rule, ',')) {
    if (rule == "flat") {
      out.push_back(Eigen::VectorXd::Ones(dim) / std::sqrt(static_cast<double>(n)));
    } else if (rule == "alternating") {
      Eigen::VectorXd a(dim);
      for (Eigen::Index k = 0; k < dim; ++k) a(k) = (k % 2 == 0) ? 1.0 : -1.0;
      out.push_back(a / std::sqrt(static_cast<double>(n)));
    } else if (rule.rfind("basis:", 0) == 0) {
      std::size_t k = 0;
      try {
        k = std::stoul(rule.substr(6));
      } catch (...) {
        throw InvalidArgument("bad vector rule '" + rule + "'");
      }
      if (k < 1 || k > n) throw InvalidArgument("basis index out of range in '" + rule + "'");
      out.push_back(Eigen::VectorXd::Unit(dim, static_cast<Eigen::Index>(k - 1)));
    } else {
      throw InvalidArgument("unknown vector rule '" + rule + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("no projection vectors given");
  return out;
}

/// Default catalog functional of four-moment runs: a Gaussian bump in
/// (lambda_i, Re n P_{i,p,q}) centred at (0, 1) with widths (2, 1).
inline SmoothFunctional default_functional() {
  return SmoothFunctional::gaussian_bump({0, 1}, {0.0, 1.0}, {2.0, 1.0});
}

struct ExperimentResult {
  std::vector<TestReport> tests;
  nlohmann::json summary = nlohmann::json::object();
  Table plot;
  Table samples;

  bool pass() const {
    return std::all_of(tests.begin(), tests.end(), [](const TestReport& t) { return t.pass; });
  }
};

namespace detail {

inline TestReport stamped(TestReport r, const ExperimentConfig& c, std::size_t excluded = 0) {
  r.trials = c.trials;
  r.excluded = excluded;
  r.seed = c.master_seed;
  return r;
}

inline Table value_table(const std::vector<std::uint64_t>& seeds, const std::vector<double>& values,
                         const std::string& column) {
  Table t{{"seed", column}, {}};
  for (std::size_t k = 0; k < values.size(); ++k) t.rows.push_back({seeds[k], values[k]});
  return t;
}

inline ExperimentResult run_eigvec_dist(const ExperimentConfig& c) {
  const WignerSpec spec = make_spec(c, c.ensemble);
  const auto mode = parse_normalization(c.normalization);
  const std::size_t i = c.eigen_index();
  const CoefficientLaw law = goe_gue_reference(spec.symmetry(), c.n, i, c.p, mode);
  const bool real = spec.symmetry() == Symmetry::real_symmetric;
  const double root_n = std::sqrt(static_cast<double>(c.n));

  const auto rows = run_indexed(c.trials, c.threads, [&](std::size_t t) -> std::optional<double> {
    const std::uint64_t seed = derive_seed(c.master_seed, t);
    const auto d = decompose_rescaled(sample(spec, seed), trial_normalization(mode, seed));
    if (!is_simple(d, i)) return std::nullopt;
    const Complex x = root_n * d.coefficient(i, c.p);
    return real ? x.real() : std::abs(x);
  });

  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  for (std::size_t t = 0; t < rows.size(); ++t)
    if (rows[t]) {
      values.push_back(*rows[t]);
      seeds.push_back(derive_seed(c.master_seed, t));
    }
  if (values.size() < 2) throw NumericError("too few usable trials", std::nullopt);
  // GUE coefficients are compared through their modulus.
  const CoefficientLaw reference =
      law.real_valued() ? law : CoefficientLaw{CoefficientLaw::Kind::complex_normal_modulus};
  auto cdf = [&](double x) { return reference.cdf(x); };

  ExperimentResult r;
  const std::size_t excluded = c.trials - values.size();
  r.tests.push_back(stamped(
      TestReport::make("eigvec_ks", ks_statistic(std::span<const double>(values), cdf), c.threshold.value_or(0.05)),
      c, excluded));
  const auto m = mean_and_se(values);
  r.summary = {{"index", i},          {"p", c.p},
               {"mean", m.mean},      {"mean_se", m.standard_error},
               {"variance", sample_variance(values)},
               {"reference_mean", reference.mean()}};
  r.plot = ecdf_table(values, cdf);
  r.samples = value_table(seeds, values, "coefficient");
  return r;
}

inline ExperimentResult run_clt(const ExperimentConfig& c) {
  const WignerSpec spec = make_spec(c, c.ensemble);
  const auto mode = parse_normalization(c.normalization);
  const auto family = parse_vectors(c.vectors, c.n);
  const std::size_t i = c.eigen_index();
  ExperimentResult r;

  if (family.size() == 1) {
    CltThresholds th;
    if (c.threshold) th.ks = *c.threshold;
    const auto rep = clt_projection_experiment(spec, i, family[0], mode, c.trials, c.master_seed, th,
                                               c.override_case_a, c.threads);
    r.tests = {rep.ks, rep.mean, rep.variance};
    r.summary = {{"index", i}, {"mean", rep.sample_mean}, {"variance", rep.sample_variance},
                 {"used", rep.samples.trials()}};
    r.plot = ecdf_table(rep.samples.values, normal_cdf);
    r.samples.columns = {"projection"};
    for (double v : rep.samples.values) r.samples.rows.push_back({v});
    return r;
  }

  const auto rep = orthonormal_family_clt(spec, i, family, mode, c.trials, c.master_seed,
                                          c.threshold.value_or(0.06), c.override_case_a, c.threads);
  for (const auto* group : {&rep.ks, &rep.moments, &rep.correlations})
    r.tests.insert(r.tests.end(), group->begin(), group->end());
  r.summary = {{"index", i}, {"family_size", family.size()}, {"used", rep.samples[0].size()}};
  r.plot = ecdf_table(rep.samples[0], normal_cdf);
  for (std::size_t j = 0; j < rep.samples.size(); ++j)
    r.samples.columns.push_back("projection_" + std::to_string(j + 1));
  for (std::size_t t = 0; t < rep.samples[0].size(); ++t) {
    std::vector<Cell> row;
    for (const auto& s : rep.samples) row.push_back(s[t]);
    r.samples.rows.push_back(std::move(row));
  }
  return r;
}

inline ExperimentResult run_four_moment(const ExperimentConfig& c) {
  const WignerSpec a = make_spec(c, c.ensemble);
  const WignerSpec b = make_spec(c, c.ensemble_b);
  ObservableConfig obs{{{c.eigen_index(), c.p, c.q}}, parse_normalization(c.normalization)};
  const SmoothFunctional g = c.functional ? SmoothFunctional::from_json(*c.functional) : default_functional();
  const auto rep = four_moment_compare(a, b, obs, g, c.trials, c.master_seed, c.allow_unmatched, c.threads);

  ExperimentResult r;
  r.tests = {rep.report};
  r.summary = {{"observable", obs.id()},
               {"functional", g.to_json()},
               {"mean_a", rep.a.mean},
               {"se_a", rep.a.standard_error},
               {"excluded_a", rep.a.excluded + rep.a.errors},
               {"mean_b", rep.b.mean},
               {"se_b", rep.b.standard_error},
               {"excluded_b", rep.b.excluded + rep.b.errors},
               {"hypothesis_violated", rep.hypothesis_violated}};
  r.plot = Table{{"ensemble", "mean", "se"},
                 {{std::uint64_t{0}, rep.a.mean, rep.a.standard_error},
                  {std::uint64_t{1}, rep.b.mean, rep.b.standard_error}}};
  r.samples.columns = {"ensemble", "value"};
  for (double v : rep.a.values) r.samples.rows.push_back({std::uint64_t{0}, v});
  for (double v : rep.b.values) r.samples.rows.push_back({std::uint64_t{1}, v});
  return r;
}

struct ResolventTrial {
  std::uint64_t seed = 0;
  bool singular = false;
  Complex direct;
  Complex spectral;
  double margin = 0.0;
};

/// Per trial: the (p, q) entry of G(z) by both routes and the
/// level-repulsion margin at z. `inverse` fixes z = 0.
inline ExperimentResult run_resolvent(const ExperimentConfig& c, bool inverse) {
  const WignerSpec spec = make_spec(c, c.ensemble);
  const Complex z = inverse ? Complex(0.0, 0.0) : Complex(c.energy, c.eta);
  if (z.imag() < 0.0) throw InvalidArgument("eta must be >= 0");
  const double n = static_cast<double>(c.n);

  const auto trials = run_indexed(c.trials, c.threads, [&](std::size_t t) {
    ResolventTrial out;
    out.seed = derive_seed(c.master_seed, t);
    const MatrixSample m = sample(spec, out.seed);
    const auto d = decompose_rescaled(m, Normalization::raw());
    out.margin = level_repulsion_margin(d, z, c.n);
    try {
      out.direct = resolvent_coeff_direct(m, z, c.p, c.q);
      out.spectral = resolvent_coeff_spectral(d, z, c.p, c.q, c.n);
    } catch (const Singularity&) {
      out.singular = true;
    }
    return out;
  });

  double worst = 0.0;
  std::size_t compared = 0;
  std::size_t singular = 0;
  std::size_t close = 0;  // margin <= n^{-2}
  ExperimentResult r;
  r.plot.columns = {"seed", "re", "im", "margin"};
  for (const auto& t : trials) {
    if (t.margin <= 1.0 / (n * n)) ++close;
    if (t.singular) {
      ++singular;
      continue;
    }
    r.plot.rows.push_back({t.seed, t.direct.real(), t.direct.imag(), t.margin});
    // The inverse is compared on every nonsingular draw; general z only
    // away from the spectrum.
    if (inverse || t.margin >= 1e-6 * n) {
      ++compared;
      worst = std::max(worst, std::abs(t.direct - t.spectral) / (1.0 + std::abs(t.direct)));
    }
  }
  r.tests.push_back(stamped(TestReport::make("route_agreement", worst, 1e-8), c, singular));
  if (z.imag() == 0.0) {
    const double fraction = static_cast<double>(close) / static_cast<double>(c.trials);
    r.tests.push_back(stamped(TestReport::make("level_repulsion", fraction, c.threshold.value_or(0.05)), c));
  }
  r.summary = {{"z_re", z.real()}, {"z_im", z.imag()}, {"compared", compared}, {"singular", singular},
               {"margin_below_n^-2", close}};
  r.samples = r.plot;
  return r;
}

inline ExperimentResult run_gap_stats(const ExperimentConfig& c) {
  const WignerSpec spec = make_spec(c, c.ensemble);
  const double n = static_cast<double>(c.n);
  const std::size_t mid = std::max<std::size_t>(c.n / 2, 1);

  struct Row {
    double min_gap = 0.0;
    double bulk_mean_gap = 0.0;
    double q_mid = 0.0;
  };
  const auto rows = run_indexed(c.trials, c.threads, [&](std::size_t t) {
    const auto d = decompose_rescaled(sample(spec, derive_seed(c.master_seed, t)), Normalization::raw());
    Row row;
    row.min_gap = min_gap(d, 1, c.n - 1);
    const std::size_t lo = std::max<std::size_t>(c.n / 4, 1);
    const std::size_t hi = std::max(lo, std::min(3 * c.n / 4, c.n - 1));
    double sum = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) sum += gap(d, i);
    row.bulk_mean_gap = sum / static_cast<double>(hi - lo + 1);
    try {
      row.q_mid = q_statistic(d, mid);
    } catch (const DegenerateSpectrum&) {
      row.q_mid = std::numeric_limits<double>::infinity();
    }
    return row;
  });

  ExperimentResult r;
  std::size_t small = 0;
  double bulk = 0.0;
  std::vector<double> qs;
  r.plot.columns = {"seed", "min_gap", "bulk_mean_gap", "q_mid"};
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].min_gap <= 1.0 / (n * n)) ++small;
    bulk += rows[t].bulk_mean_gap;
    qs.push_back(rows[t].q_mid);
    r.plot.rows.push_back({derive_seed(c.master_seed, t), rows[t].min_gap, rows[t].bulk_mean_gap, rows[t].q_mid});
  }
  std::sort(qs.begin(), qs.end());
  const double fraction = static_cast<double>(small) / static_cast<double>(c.trials);
  r.tests.push_back(stamped(TestReport::make("small_gap_fraction", fraction, c.threshold.value_or(0.02)), c));
  r.summary = {{"mean_bulk_gap", bulk / static_cast<double>(c.trials)},
               {"median_q_mid", qs[qs.size() / 2]},
               {"min_gap_below_n^-2", small}};
  r.samples = r.plot;
  return r;
}

inline ExperimentResult run_haar_compare(const ExperimentConfig& c) {
  const HaarGroup group = parse_haar_group(c.group);
  const std::size_t row = c.index.value_or(1);
  const std::vector<std::size_t> rows{row};
  const std::vector<std::size_t> cols{c.p};
  const auto draws = run_indexed(c.trials, c.threads, [&](std::size_t t) {
    const HaarMatrix h = haar_sample(group, c.n, derive_seed(c.master_seed, t));
    return minor(h, rows, cols)(0, 0);
  });

  const bool real = group == HaarGroup::orthogonal;
  const CoefficientLaw law{real ? CoefficientLaw::Kind::real_normal
                                : CoefficientLaw::Kind::complex_normal_modulus};
  std::vector<double> values;
  std::vector<double> squares;
  for (const auto& x : draws) {
    values.push_back(real ? x.real() : std::abs(x));
    squares.push_back(std::norm(x));
  }
  auto cdf = [&](double x) { return law.cdf(x); };
  const auto second = mean_and_se(squares);

  ExperimentResult r;
  r.tests.push_back(stamped(
      TestReport::make("haar_ks", ks_statistic(std::span<const double>(values), cdf), c.threshold.value_or(0.03)), c));
  r.tests.push_back(stamped(TestReport::make("haar_second_moment", std::abs(second.mean - 1.0),
                                             3.0 * second.standard_error, second.standard_error),
                            c));
  r.summary = {{"group", c.group}, {"mean_n_u2", second.mean}, {"mean_n_u2_se", second.standard_error}};
  r.plot = ecdf_table(values, cdf);
  r.samples.columns = {"value"};
  for (double v : values) r.samples.rows.push_back({v});
  return r;
}

/// Fraction of seeds whose local law deviation exceeds the level
/// (threshold, default 0.15); passes when at most 5% do.
inline ExperimentResult run_local_law(const ExperimentConfig& c) {
  const WignerSpec spec = make_spec(c, c.ensemble);
  const Complex z(c.energy, c.eta);
  if (!(c.eta > 0.0)) throw InvalidArgument("local-law needs eta > 0");
  const double level = c.threshold.value_or(0.15);
  const auto devs = run_indexed(c.trials, c.threads, [&](std::size_t t) {
    return local_law_deviation(sample(spec, derive_seed(c.master_seed, t)), z);
  });
  std::size_t above = 0;
  ExperimentResult r;
  r.plot.columns = {"seed", "deviation"};
  for (std::size_t t = 0; t < devs.size(); ++t) {
    if (!(devs[t] <= level)) ++above;
    r.plot.rows.push_back({derive_seed(c.master_seed, t), devs[t]});
  }
  std::vector<double> sorted(devs);
  std::sort(sorted.begin(), sorted.end());
  const double fraction = static_cast<double>(above) / static_cast<double>(c.trials);
  r.tests.push_back(stamped(TestReport::make("local_law_exceedance", fraction, 0.05), c));
  r.summary = {{"level", level}, {"median_deviation", sorted[sorted.size() / 2]}, {"max_deviation", sorted.back()}};
  r.samples = r.plot;
  return r;
}

}  // namespace detail

/// Runs the experiment without touching the filesystem.
inline ExperimentResult execute(const ExperimentConfig& c) {
  validate(c);
  if (c.experiment == "eigvec-dist") return detail::run_eigvec_dist(c);
  if (c.experiment == "clt") return detail::run_clt(c);
  if (c.experiment == "four-moment") return detail::run_four_moment(c);
  if (c.experiment == "resolvent") return detail::run_resolvent(c, false);
  if (c.experiment == "inverse") return detail::run_resolvent(c, true);
  if (c.experiment == "gap-stats") return detail::run_gap_stats(c);
  if (c.experiment == "haar-compare") return detail::run_haar_compare(c);
  return detail::run_local_law(c);
}

inline nlohmann::json report_json(const ExperimentConfig& c, const ExperimentResult& r) {
  const std::string hash = config_hash(c);
  nlohmann::json tests = nlohmann::json::array();
  for (auto t : r.tests) {
    t.config_hash = hash;
    tests.push_back(to_json(t));
  }
  return {{"schema_version", ExperimentConfig::kSchemaVersion},
          {"experiment", c.experiment},
          {"config", hashed_fields(c)},
          {"config_hash", hash},
          {"tests", tests},
          {"summary", r.summary},
          {"pass", r.pass()}};
}

/// Output path with the .json extension (if any) replaced by `suffix`.
inline std::string sibling_path(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  if (p.extension() == ".json") p.replace_extension();
  return p.string() + suffix;
}

struct RunOutcome {
  int exit_code = 1;
  nlohmann::json report;
};

/// Executes, writes artifacts, prints verdict lines to `log`.
inline RunOutcome run(const ExperimentConfig& c, std::ostream& log) {
  RunOutcome outcome;
  try {
    const ExperimentResult result = execute(c);
    outcome.report = report_json(c, result);
    write_json_file(c.out, outcome.report);
    if (parse_format(c.format) == OutputFormat::csv && !result.plot.rows.empty())
      emit_plotdata(result.plot, OutputFormat::csv, sibling_path(c.out, ".csv"));
    if (c.dump_samples && !result.samples.rows.empty())
      emit_plotdata(result.samples, OutputFormat::csv, sibling_path(c.out, ".samples.csv"));
    for (const auto& t : result.tests)
      log << (t.pass ? "PASS " : "FAIL ") << c.experiment << ' ' << t.name
          << " statistic=" << format_number(t.statistic) << " threshold=" << format_number(t.threshold)
          << '\n';
    outcome.exit_code = result.pass() ? 0 : 2;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = 1;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = 1;
  }
  return outcome;
}

}  // namespace wigner_lab
