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

// Monte Carlo verdicts: KS distances, moment estimates with jackknife
// errors, smooth functionals of the observable tuple, the four-moment
// comparison between ensembles, and projection central limit experiments.
//
// Every experiment derives per-trial seeds as derive_seed(master, trial)
// and reduces results in trial order, so reports do not depend on the
// number of worker threads.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "wigner_lab/atom_distribution.hpp"
#include "wigner_lab/ensembles.hpp"
#include "wigner_lab/errors.hpp"
#include "wigner_lab/parallel.hpp"
#include "wigner_lab/random.hpp"
#include "wigner_lab/spectral.hpp"

namespace wigner_lab {

/// Cap on the number k of jointly observed coordinates.
inline constexpr std::size_t kMaxJointCoordinates = 5;

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double half_normal_cdf(double x) { return x <= 0.0 ? 0.0 : std::erf(x / std::numbers::sqrt2); }

struct Provenance {
  std::string spec_id;
  std::string observable_id;
  std::uint64_t master_seed = 0;
};

struct EmpiricalSample {
  std::vector<double> values;
  Provenance provenance;

  std::size_t trials() const { return values.size(); }
};

/// Verdict of one fixed-threshold test; pass is statistic <= threshold.
struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  double standard_error = 0.0;
  bool pass = false;
  std::size_t trials = 0;
  std::size_t excluded = 0;
  std::uint64_t seed = 0;
  std::string config_hash;

  static TestReport make(std::string name, double statistic, double threshold,
                         double standard_error = 0.0) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.threshold = threshold;
    r.standard_error = standard_error;
    r.pass = statistic <= threshold;  // false for NaN
    return r;
  }
};

inline nlohmann::json to_json(const TestReport& r) {
  return {{"name", r.name},     {"statistic", r.statistic}, {"threshold", r.threshold},
          {"se", r.standard_error}, {"pass", r.pass},       {"trials", r.trials},
          {"excluded", r.excluded}, {"seed", r.seed},       {"config_hash", r.config_hash}};
}

inline TestReport test_report_from_json(const nlohmann::json& j) {
  TestReport r;
  r.name = j.value("name", "");
  r.statistic = j.at("statistic").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.standard_error = j.value("se", 0.0);
  r.pass = j.at("pass").get<bool>();
  r.trials = j.value("trials", std::size_t{0});
  r.excluded = j.value("excluded", std::size_t{0});
  r.seed = j.value("seed", std::uint64_t{0});
  r.config_hash = j.value("config_hash", "");
  return r;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

/// sup_x |F_n(x) - F(x)|, evaluated at the order statistics as
/// max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|).
template <typename Cdf>
double ks_statistic(std::span<const double> values, Cdf&& reference_cdf) {
  if (values.empty()) throw InvalidArgument("KS statistic of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = reference_cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, std::abs(above), std::abs(below)});
  }
  return d;
}

template <typename Cdf>
double ks_statistic(const EmpiricalSample& sample, Cdf&& reference_cdf) {
  return ks_statistic(std::span<const double>(sample.values), std::forward<Cdf>(reference_cdf));
}

/// sup_x |F_a(x) - F_b(x)| between two empirical distributions.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("KS statistic of an empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(x.size()) -
                             static_cast<double>(j) / static_cast<double>(y.size())));
  }
  return d;
}

/// Asymptotic critical value c(alpha) sqrt((n + m) / (n m)) of the
/// two-sample KS test, with c(alpha) = sqrt(-ln(alpha / 2) / 2).
inline double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

// ---------------------------------------------------------------------------
// Moments

struct MomentEstimate {
  int order = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
};

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;  // sample SD / sqrt(count)
};

inline MeanEstimate mean_and_se(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean of an empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

inline double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw InvalidArgument("variance needs at least two values");
  const double mean = mean_and_se(values).mean;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

/// Plug-in raw moments E x^k with delete-one jackknife standard errors.
inline std::vector<MomentEstimate> moment_report(std::span<const double> values,
                                                 std::span<const int> orders) {
  if (values.size() < 2) throw InvalidArgument("moment report needs at least two values");
  const double n = static_cast<double>(values.size());
  std::vector<MomentEstimate> out;
  for (int k : orders) {
    if (k < 0) throw InvalidArgument("moment orders must be nonnegative");
    std::vector<double> powers(values.size());
    std::transform(values.begin(), values.end(), powers.begin(),
                   [k](double v) { return std::pow(v, k); });
    const double total = std::accumulate(powers.begin(), powers.end(), 0.0);
    // Leave-one-out estimates, accumulated as offsets from the first one so
    // that a constant sample gives exactly zero spread.
    const double first = (total - powers[0]) / (n - 1.0);
    double offset_sum = 0.0;
    double offset_sq = 0.0;
    for (double p : powers) {
      const double offset = (total - p) / (n - 1.0) - first;
      offset_sum += offset;
      offset_sq += offset * offset;
    }
    const double spread = offset_sq - offset_sum * offset_sum / n;
    const double se = std::sqrt(std::max(0.0, (n - 1.0) / n * spread));
    out.push_back({k, total / n, se});
  }
  return out;
}

inline std::vector<MomentEstimate> moment_report(const EmpiricalSample& s,
                                                 std::span<const int> orders) {
  return moment_report(std::span<const double>(s.values), orders);
}

// ---------------------------------------------------------------------------
// Smooth functionals of Phi

/// A catalog of test functions G on the flattened observable tuple (see
/// ObservableTuple::flatten). Each kind has bounded derivatives of every
/// order up to 5 by construction.
class SmoothFunctional {
 public:
  enum class Kind { bounded_polynomial_window, gaussian_bump, coordinate, sine };

  /// G(x) = x_j.
  static SmoothFunctional coordinate(std::size_t j) {
    SmoothFunctional g(Kind::coordinate);
    g.coords_ = {j};
    return g;
  }

  /// G(x) = prod_j exp(-(x_j - c_j)^2 / (2 w_j^2)) over the listed
  /// coordinates; an empty list gives G = 1.
  static SmoothFunctional gaussian_bump(std::vector<std::size_t> coords, std::vector<double> center,
                                        std::vector<double> width) {
    if (coords.size() != center.size() || coords.size() != width.size())
      throw InvalidArgument("gaussian_bump needs one center and width per coordinate");
    for (double w : width)
      if (!(w > 0.0)) throw InvalidArgument("gaussian_bump widths must be > 0");
    SmoothFunctional g(Kind::gaussian_bump);
    g.coords_ = std::move(coords);
    g.center_ = std::move(center);
    g.width_ = std::move(width);
    return g;
  }

  /// G(x) = sin(frequency * x_j).
  static SmoothFunctional sine(std::size_t j, double frequency) {
    SmoothFunctional g(Kind::sine);
    g.coords_ = {j};
    g.center_ = {frequency};
    return g;
  }

  /// G(x) = (1 - t^2)^6 for |t| < 1, else 0, with t = (x_j - center) / half_width.
  /// C^5 across the boundary.
  static SmoothFunctional bounded_polynomial_window(std::size_t j, double center,
                                                    double half_width) {
    if (!(half_width > 0.0)) throw InvalidArgument("window half width must be > 0");
    SmoothFunctional g(Kind::bounded_polynomial_window);
    g.coords_ = {j};
    g.center_ = {center};
    g.width_ = {half_width};
    return g;
  }

  Kind kind() const { return kind_; }

  double operator()(std::span<const double> x) const {
    for (auto j : coords_)
      if (j >= x.size())
        throw IndexError("functional coordinate " + std::to_string(j) + " outside tuple of size " +
                         std::to_string(x.size()));
    switch (kind_) {
      case Kind::coordinate:
        return x[coords_[0]];
      case Kind::gaussian_bump: {
        double exponent = 0.0;
        for (std::size_t a = 0; a < coords_.size(); ++a) {
          const double t = (x[coords_[a]] - center_[a]) / width_[a];
          exponent += t * t;
        }
        return std::exp(-0.5 * exponent);
      }
      case Kind::sine:
        return std::sin(center_[0] * x[coords_[0]]);
      case Kind::bounded_polynomial_window: {
        const double t = (x[coords_[0]] - center_[0]) / width_[0];
        if (std::abs(t) >= 1.0) return 0.0;
        return std::pow(1.0 - t * t, 6);
      }
    }
    return 0.0;
  }

  /// Declared bound on sup |G|.
  double sup_bound() const {
    return kind_ == Kind::coordinate ? std::numeric_limits<double>::infinity() : 1.0;
  }

  /// Declared bound on sup |nabla^j G| (operator norm of the j-th
  /// derivative tensor), 0 <= j <= 5.
  double derivative_bound(int j) const {
    if (j < 0 || j > 5) throw InvalidArgument("derivative bounds are declared for 0 <= j <= 5");
    if (j == 0) return sup_bound();
    switch (kind_) {
      case Kind::coordinate:
        return j == 1 ? 1.0 : 0.0;
      case Kind::sine:
        return std::pow(std::abs(center_[0]), j);
      case Kind::gaussian_bump: {
        if (coords_.empty()) return 0.0;
        // Cramer: |He_j(t)| exp(-t^2/4) <= 1.0865 sqrt(j!).
        const double min_width = *std::min_element(width_.begin(), width_.end());
        const double dims = static_cast<double>(coords_.size());
        return 1.0865 * std::sqrt(std::tgamma(j + 1.0)) * std::pow(std::sqrt(dims) / min_width, j);
      }
      case Kind::bounded_polynomial_window:
        return window_derivative_sup(j) / std::pow(width_[0], j);
    }
    return 0.0;
  }

  nlohmann::json to_json() const {
    switch (kind_) {
      case Kind::coordinate:
        return {{"kind", "coordinate"}, {"coordinate", coords_[0]}};
      case Kind::gaussian_bump:
        return {{"kind", "gaussian_bump"}, {"coordinates", coords_}, {"center", center_},
                {"width", width_}};
      case Kind::sine:
        return {{"kind", "sine"}, {"coordinate", coords_[0]}, {"frequency", center_[0]}};
      case Kind::bounded_polynomial_window:
        return {{"kind", "bounded_polynomial_window"}, {"coordinate", coords_[0]},
                {"center", center_[0]}, {"half_width", width_[0]}};
    }
    return {};
  }

  static SmoothFunctional from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "coordinate") return coordinate(j.at("coordinate").get<std::size_t>());
    if (kind == "gaussian_bump")
      return gaussian_bump(j.at("coordinates").get<std::vector<std::size_t>>(),
                           j.at("center").get<std::vector<double>>(),
                           j.at("width").get<std::vector<double>>());
    if (kind == "sine")
      return sine(j.at("coordinate").get<std::size_t>(), j.at("frequency").get<double>());
    if (kind == "bounded_polynomial_window")
      return bounded_polynomial_window(j.at("coordinate").get<std::size_t>(),
                                       j.at("center").get<double>(),
                                       j.at("half_width").get<double>());
    throw InvalidArgument("unknown functional kind '" + kind + "'");
  }

 private:
  explicit SmoothFunctional(Kind kind) : kind_(kind) {}

  // sup over [-1, 1] of |d^j/dt^j (1 - t^2)^6|, from exact polynomial
  // coefficients on a fine grid.
  static double window_derivative_sup(int j) {
    std::vector<double> coef(13, 0.0);  // (1 - t^2)^6 = sum_k C(6,k) (-1)^k t^{2k}
    double binom = 1.0;
    for (int k = 0; k <= 6; ++k) {
      coef[static_cast<std::size_t>(2 * k)] = (k % 2 ? -binom : binom);
      binom = binom * (6 - k) / (k + 1);
    }
    for (int d = 0; d < j; ++d) {
      for (std::size_t k = 0; k + 1 < coef.size(); ++k) coef[k] = coef[k + 1] * static_cast<double>(k + 1);
      coef.back() = 0.0;
    }
    double best = 0.0;
    for (int s = 0; s <= 20000; ++s) {
      const double t = -1.0 + s * 1e-4;
      double v = 0.0;
      for (auto c = coef.rbegin(); c != coef.rend(); ++c) v = v * t + *c;
      best = std::max(best, std::abs(v));
    }
    return best;
  }

  Kind kind_;
  std::vector<std::size_t> coords_;
  std::vector<double> center_;
  std::vector<double> width_;
};

/// Which coordinates of Phi to observe and how eigenvectors are normalized.
struct ObservableConfig {
  std::vector<PhiSelector> selectors;
  Normalization::Mode normalization = Normalization::Mode::random_phase;

  std::string id() const {
    std::string s = "phi";
    for (const auto& sel : selectors)
      s += "(" + std::to_string(sel.i) + "," + std::to_string(sel.p) + "," + std::to_string(sel.q) + ")";
    return s + ":" + to_string(normalization);
  }
};

struct FunctionalEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
  std::size_t excluded = 0;  // non-simple spectrum at a selected index
  std::size_t errors = 0;    // decomposition failures
  std::vector<double> values;

  std::size_t used() const { return trials - excluded - errors; }
  bool exclusion_within_budget() const {
    return static_cast<double>(excluded + errors) <= 0.01 * static_cast<double>(trials);
  }
};

/// Normalization of the decomposition in one trial. The random phases get
/// their own stream so they are independent of the matrix.
inline Normalization trial_normalization(Normalization::Mode mode, std::uint64_t trial_seed) {
  return {mode, derive_seed(trial_seed, 0x5eedULL)};
}

namespace detail {

enum class TrialStatus { ok, excluded, error };

struct TrialValue {
  TrialStatus status = TrialStatus::ok;
  double value = 0.0;
};

inline double summarize_into(FunctionalEstimate& est, std::span<const TrialValue> results) {
  for (const auto& r : results) {
    if (r.status == TrialStatus::excluded) ++est.excluded;
    else if (r.status == TrialStatus::error) ++est.errors;
    else est.values.push_back(r.value);
  }
  if (est.values.empty()) throw NumericError("every trial was excluded", std::nullopt);
  const auto m = mean_and_se(est.values);
  est.mean = m.mean;
  est.standard_error = m.standard_error;
  return est.mean;
}

}  // namespace detail

/// Monte Carlo mean of G(Phi(A_n)) over `trials` independent matrices.
/// Trials whose selected eigenvalues are not simple are excluded and
/// counted; so are eigensolver failures.
inline FunctionalEstimate functional_estimate(const WignerSpec& spec,
                                              const ObservableConfig& observable,
                                              const SmoothFunctional& g, std::size_t trials,
                                              std::uint64_t master_seed, unsigned threads = 1) {
  if (trials < 30) throw InvalidArgument("functional_estimate needs at least 30 trials");
  if (observable.selectors.empty() || observable.selectors.size() > kMaxJointCoordinates)
    throw InvalidArgument("observable must select between 1 and " +
                          std::to_string(kMaxJointCoordinates) + " coordinates");
  for (const auto& s : observable.selectors)
    if (s.i < 1 || s.i > spec.n() || s.p < 1 || s.p > spec.n() || s.q < 1 || s.q > spec.n())
      throw IndexError("observable index outside [1, n]");

  const auto results = run_indexed(trials, threads, [&](std::size_t t) {
    const std::uint64_t seed = derive_seed(master_seed, t);
    const MatrixSample m = sample(spec, seed);
    try {
      const auto d = decompose_rescaled(m, trial_normalization(observable.normalization, seed));
      for (const auto& s : observable.selectors)
        if (!is_simple(d, s.i)) return detail::TrialValue{detail::TrialStatus::excluded, 0.0};
      const auto x = phi_observable(d, observable.selectors, spec.n()).flatten();
      return detail::TrialValue{detail::TrialStatus::ok, g(x)};
    } catch (const NumericError&) {
      return detail::TrialValue{detail::TrialStatus::error, 0.0};
    }
  });

  FunctionalEstimate est;
  est.trials = trials;
  detail::summarize_into(est, results);
  return est;
}

struct FourMomentReport {
  TestReport report;  // statistic |mean_a - mean_b|, threshold 3 sqrt(se_a^2 + se_b^2)
  FunctionalEstimate a;
  FunctionalEstimate b;
  bool hypothesis_violated = false;  // ran under override without 4/2 matching
};

/// Compares E G(Phi) between two ensembles. Refuses unless the
/// off-diagonal laws match to order 4 and the diagonal laws to order 2,
/// except under `allow_unmatched`, in which case the report is flagged.
inline FourMomentReport four_moment_compare(const WignerSpec& spec_a, const WignerSpec& spec_b,
                                            const ObservableConfig& observable,
                                            const SmoothFunctional& g, std::size_t trials,
                                            std::uint64_t seed, bool allow_unmatched = false,
                                            unsigned threads = 1) {
  if (spec_a.n() != spec_b.n()) throw InvalidArgument("compared ensembles differ in dimension");
  const bool matched = matches_to_order(spec_a.off_diag(), spec_b.off_diag(), 4) &&
                       matches_to_order(spec_a.diag(), spec_b.diag(), 2);
  if (!matched && !allow_unmatched)
    throw HypothesisViolation("ensembles '" + spec_a.name() + "' and '" + spec_b.name() +
                              "' do not match to order 4 off / 2 on the diagonal");

  FourMomentReport out;
  out.hypothesis_violated = !matched;
  out.a = functional_estimate(spec_a, observable, g, trials, derive_seed(seed, 0xA), threads);
  out.b = functional_estimate(spec_b, observable, g, trials, derive_seed(seed, 0xB), threads);
  const double se = std::hypot(out.a.standard_error, out.b.standard_error);
  out.report = TestReport::make("four_moment:" + spec_a.name() + "_vs_" + spec_b.name(),
                                std::abs(out.a.mean - out.b.mean), 3.0 * se, se);
  out.report.trials = trials;
  out.report.excluded = out.a.excluded + out.a.errors + out.b.excluded + out.b.errors;
  out.report.seed = seed;
  return out;
}

// ---------------------------------------------------------------------------
// Projection central limit theorem

struct CltThresholds {
  double ks = 0.06;
  double mean = 0.1;
  double variance = 0.15;
};

struct CltReport {
  TestReport ks;           // KS distance to N(0,1)
  TestReport mean;         // |mean|
  TestReport variance;     // |variance - 1|
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  EmpiricalSample samples;
  bool pass = false;
};

namespace detail {

inline void check_unit(const Eigen::VectorXd& a, std::size_t n) {
  if (static_cast<std::size_t>(a.size()) != n)
    throw InvalidArgument("projection vector has the wrong dimension");
  if (std::abs(a.norm() - 1.0) > 1e-10) throw InvalidArgument("projection vector is not a unit vector");
}

/// Case (a) of the projection CLT under the ad hoc normalization:
/// |a . e_1| <= n^{-1/4}.
inline void check_case_a(const Eigen::VectorXd& a, Normalization::Mode mode, std::size_t n,
                         bool override_case_a) {
  if (mode != Normalization::Mode::first_nonzero_positive || override_case_a) return;
  const double limit = std::pow(static_cast<double>(n), -0.25);
  if (std::abs(a(0)) > limit)
    throw HypothesisViolation("ad hoc normalization requires |a . e_1| <= n^{-1/4} = " +
                              std::to_string(limit));
}

/// Per trial: sqrt(n) (a_j . u_i) for every vector of the family.
inline std::vector<std::optional<std::vector<double>>> collect_projections(
    const WignerSpec& spec, std::size_t i, std::span<const Eigen::VectorXd> family,
    Normalization::Mode mode, std::size_t trials, std::uint64_t seed, unsigned threads) {
  if (spec.symmetry() != Symmetry::real_symmetric)
    throw InvalidArgument("projection CLT experiments need a real symmetric ensemble");
  if (i < 1 || i > spec.n()) throw IndexError("eigenvector index outside [1, n]");
  const double root_n = std::sqrt(static_cast<double>(spec.n()));
  return run_indexed(trials, threads, [&](std::size_t t) -> std::optional<std::vector<double>> {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const MatrixSample m = sample(spec, trial_seed);
    try {
      const auto d = decompose_rescaled(m, trial_normalization(mode, trial_seed));
      if (!is_simple(d, i)) return std::nullopt;
      const Eigen::VectorXd u = d.eigenvector(i).real();
      std::vector<double> out;
      for (const auto& a : family) out.push_back(root_n * a.dot(u));
      return out;
    } catch (const NumericError&) {
      return std::nullopt;
    }
  });
}

}  // namespace detail

/// Distribution of sqrt(n) (a . u_i(M_n)) against N(0,1).
inline CltReport clt_projection_experiment(const WignerSpec& spec, std::size_t i,
                                           const Eigen::VectorXd& a, Normalization::Mode mode,
                                           std::size_t trials, std::uint64_t seed,
                                           CltThresholds thresholds = {},
                                           bool override_case_a = false, unsigned threads = 1) {
  if (trials < 2) throw InvalidArgument("CLT experiment needs at least two trials");
  detail::check_unit(a, spec.n());
  detail::check_case_a(a, mode, spec.n(), override_case_a);

  const std::vector<Eigen::VectorXd> family{a};
  const auto rows = detail::collect_projections(spec, i, family, mode, trials, seed, threads);

  CltReport out;
  out.samples.provenance = {spec.name(), "clt(i=" + std::to_string(i) + "):" + to_string(mode), seed};
  std::size_t excluded = 0;
  for (const auto& r : rows) {
    if (r) out.samples.values.push_back((*r)[0]);
    else ++excluded;
  }
  if (out.samples.values.size() < 2) throw NumericError("too few usable trials", std::nullopt);

  const auto& v = out.samples.values;
  const auto m = mean_and_se(v);
  out.sample_mean = m.mean;
  out.sample_variance = sample_variance(v);
  out.ks = TestReport::make("clt_ks", ks_statistic(std::span<const double>(v), normal_cdf), thresholds.ks);
  out.mean = TestReport::make("clt_mean", std::abs(m.mean), thresholds.mean, m.standard_error);
  out.variance = TestReport::make("clt_variance", std::abs(out.sample_variance - 1.0), thresholds.variance);
  for (TestReport* r : {&out.ks, &out.mean, &out.variance}) {
    r->trials = trials;
    r->excluded = excluded;
    r->seed = seed;
  }
  out.pass = out.ks.pass && out.mean.pass && out.variance.pass;
  return out;
}

struct FamilyReport {
  std::vector<TestReport> ks;            // one per vector, KS vs N(0,1)
  std::vector<TestReport> moments;       // |E x_j|, |E x_j^2 - 1|, |E x_j x_k| each vs 4 SE
  std::vector<TestReport> correlations;  // |corr(x_j, x_k)| vs 4 / sqrt(N)
  std::vector<std::vector<double>> samples;  // samples[j] = values of coordinate j
  bool pass = false;
};

/// Joint law of sqrt(n) (a_j . u_i), j = 1..l, for an orthonormal family
/// (l <= 4), against l iid N(0,1).
inline FamilyReport orthonormal_family_clt(const WignerSpec& spec, std::size_t i,
                                           std::span<const Eigen::VectorXd> family,
                                           Normalization::Mode mode, std::size_t trials,
                                           std::uint64_t seed, double ks_threshold = 0.06,
                                           bool override_case_a = false, unsigned threads = 1) {
  if (family.empty() || family.size() > 4) throw InvalidArgument("family size must be 1..4");
  if (trials < 2) throw InvalidArgument("CLT experiment needs at least two trials");
  for (std::size_t j = 0; j < family.size(); ++j) {
    detail::check_unit(family[j], spec.n());
    detail::check_case_a(family[j], mode, spec.n(), override_case_a);
    for (std::size_t k = j + 1; k < family.size(); ++k)
      if (std::abs(family[j].dot(family[k])) > 1e-10)
        throw InvalidArgument("projection family is not orthonormal");
  }

  const auto rows = detail::collect_projections(spec, i, family, mode, trials, seed, threads);
  const std::size_t l = family.size();
  FamilyReport out;
  out.samples.assign(l, {});
  std::size_t excluded = 0;
  for (const auto& r : rows) {
    if (!r) {
      ++excluded;
      continue;
    }
    for (std::size_t j = 0; j < l; ++j) out.samples[j].push_back((*r)[j]);
  }
  const std::size_t used = out.samples[0].size();
  if (used < 2) throw NumericError("too few usable trials", std::nullopt);

  auto stamp = [&](TestReport r) {
    r.trials = trials;
    r.excluded = excluded;
    r.seed = seed;
    return r;
  };
  auto within_4se = [&](std::string name, std::span<const double> values, double target) {
    const auto m = mean_and_se(values);
    return stamp(TestReport::make(std::move(name), std::abs(m.mean - target), 4.0 * m.standard_error,
                                  m.standard_error));
  };

  for (std::size_t j = 0; j < l; ++j) {
    const auto& x = out.samples[j];
    const std::string tag = std::to_string(j + 1);
    out.ks.push_back(stamp(TestReport::make("ks_" + tag, ks_statistic(std::span<const double>(x), normal_cdf),
                                            ks_threshold)));
    out.moments.push_back(within_4se("mean_" + tag, x, 0.0));
    std::vector<double> sq(x.size());
    std::transform(x.begin(), x.end(), sq.begin(), [](double v) { return v * v; });
    out.moments.push_back(within_4se("second_moment_" + tag, sq, 1.0));
  }
  for (std::size_t j = 0; j < l; ++j)
    for (std::size_t k = j + 1; k < l; ++k) {
      const auto& x = out.samples[j];
      const auto& y = out.samples[k];
      const std::string tag = std::to_string(j + 1) + std::to_string(k + 1);
      std::vector<double> xy(x.size());
      for (std::size_t t = 0; t < x.size(); ++t) xy[t] = x[t] * y[t];
      out.moments.push_back(within_4se("cross_moment_" + tag, xy, 0.0));

      const double mx = mean_and_se(x).mean;
      const double my = mean_and_se(y).mean;
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        sxy += (x[t] - mx) * (y[t] - my);
        sxx += (x[t] - mx) * (x[t] - mx);
        syy += (y[t] - my) * (y[t] - my);
      }
      const double corr = sxy / std::sqrt(sxx * syy);
      const double se = 1.0 / std::sqrt(static_cast<double>(used));
      out.correlations.push_back(stamp(TestReport::make("corr_" + tag, std::abs(corr), 4.0 * se, se)));
    }

  out.pass = true;
  for (const auto* group : {&out.ks, &out.moments, &out.correlations})
    for (const auto& r : *group) out.pass = out.pass && r.pass;
  return out;
}

}  // namespace wigner_lab
