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

// Scalar entry laws of Wigner matrices: real/complex Gaussians and finite
// discrete laws, with exact (analytic) mixed moments.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "wigner_lab/errors.hpp"
#include "wigner_lab/random.hpp"

namespace wigner_lab {

using Complex = std::complex<double>;

/// Highest total order a + b accepted by moment().
inline constexpr int kMaxMomentOrder = 12;

/// Default tolerance of matching checks; moments are analytic so only
/// roundoff separates equal values.
inline constexpr double kMatchTolerance = 1e-10;

struct GaussianReal {
  double mean = 0.0;
  double variance = 1.0;
};

/// Real and imaginary parts iid N(0, variance / 2), so E|xi|^2 = variance.
struct GaussianComplex {
  double variance = 1.0;
};

struct Atom {
  Complex value;
  double prob = 0.0;
};

struct Discrete {
  std::vector<Atom> atoms;
};

class AtomDistribution {
 public:
  using Kind = std::variant<GaussianReal, GaussianComplex, Discrete>;

  static AtomDistribution gaussian_real(double mean, double variance) {
    if (!(variance >= 0.0)) throw InvalidArgument("gaussian variance must be >= 0");
    return AtomDistribution(GaussianReal{mean, variance});
  }

  static AtomDistribution gaussian_complex(double variance) {
    if (!(variance >= 0.0)) throw InvalidArgument("gaussian variance must be >= 0");
    return AtomDistribution(GaussianComplex{variance});
  }

  /// Validates: probabilities positive and summing to 1 within 1e-12,
  /// values pairwise distinct.
  static AtomDistribution discrete(std::vector<Atom> atoms) {
    if (atoms.empty()) throw InvalidArgument("discrete law needs at least one atom");
    double total = 0.0;
    for (const auto& atom : atoms) {
      if (!(atom.prob > 0.0)) throw InvalidArgument("atom probabilities must be > 0");
      if (!std::isfinite(atom.value.real()) || !std::isfinite(atom.value.imag()))
        throw InvalidArgument("atom values must be finite");
      total += atom.prob;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvalidArgument("atom probabilities sum to " + std::to_string(total) + ", not 1");
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j)
        if (atoms[i].value == atoms[j].value)
          throw InvalidArgument("atom values must be pairwise distinct");
    return AtomDistribution(Discrete{std::move(atoms)});
  }

  const Kind& kind() const { return kind_; }

  bool is_gaussian() const { return !std::holds_alternative<Discrete>(kind_); }

  bool is_real_valued() const {
    if (std::holds_alternative<GaussianReal>(kind_)) return true;
    if (const auto* g = std::get_if<GaussianComplex>(&kind_)) return g->variance == 0.0;
    const auto& atoms = std::get<Discrete>(kind_).atoms;
    return std::all_of(atoms.begin(), atoms.end(),
                       [](const Atom& a) { return a.value.imag() == 0.0; });
  }

  /// Atoms of a discrete law; empty for Gaussians.
  std::span<const Atom> atoms() const {
    if (const auto* d = std::get_if<Discrete>(&kind_)) return d->atoms;
    return {};
  }

 private:
  explicit AtomDistribution(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

namespace detail {

/// E Z^k for Z ~ N(0,1): (k-1)!! for even k, 0 for odd k.
inline double standard_normal_moment(int k) {
  if (k % 2 != 0) return 0.0;
  double result = 1.0;
  for (int j = k - 1; j > 1; j -= 2) result *= j;
  return result;
}

/// E (mean + sd Z)^a by binomial expansion.
inline double shifted_normal_moment(double mean, double sd, int a) {
  double sum = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= a; ++k) {
    sum += binom * std::pow(mean, a - k) * std::pow(sd, k) * standard_normal_moment(k);
    binom = binom * (a - k) / (k + 1);
  }
  return sum;
}

}  // namespace detail

/// E[Re(xi)^a Im(xi)^b], computed in closed form.
inline double moment(const AtomDistribution& dist, int a, int b) {
  if (a < 0 || b < 0) throw InvalidArgument("moment orders must be nonnegative");
  if (a + b > kMaxMomentOrder)
    throw UnsupportedOrder("moment order " + std::to_string(a + b) + " exceeds ceiling " +
                           std::to_string(kMaxMomentOrder));
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, GaussianReal>) {
          if (b > 0) return 0.0;
          return detail::shifted_normal_moment(k.mean, std::sqrt(k.variance), a);
        } else if constexpr (std::is_same_v<T, GaussianComplex>) {
          const double sd = std::sqrt(k.variance / 2.0);
          return detail::shifted_normal_moment(0.0, sd, a) *
                 detail::shifted_normal_moment(0.0, sd, b);
        } else {
          double sum = 0.0;
          for (const auto& atom : k.atoms)
            sum += atom.prob * std::pow(atom.value.real(), a) * std::pow(atom.value.imag(), b);
          return sum;
        }
      },
      dist.kind());
}

inline double mean_real(const AtomDistribution& d) { return moment(d, 1, 0); }
inline double mean_imag(const AtomDistribution& d) { return moment(d, 0, 1); }

/// E|xi - E xi|^2.
inline double variance(const AtomDistribution& d) {
  const double mr = mean_real(d);
  const double mi = mean_imag(d);
  return moment(d, 2, 0) + moment(d, 0, 2) - mr * mr - mi * mi;
}

struct MomentTable {
  int order = 0;
  std::map<std::pair<int, int>, double> entries;

  double at(int a, int b) const { return entries.at({a, b}); }
};

inline MomentTable moment_table(const AtomDistribution& dist, int order) {
  if (order < 1) throw InvalidArgument("moment table order must be >= 1");
  MomentTable table{order, {}};
  for (int total = 0; total <= order; ++total)
    for (int a = total; a >= 0; --a) table.entries[{a, total - a}] = moment(dist, a, total - a);
  return table;
}

/// True iff every mixed moment with a + b <= k agrees within tol.
inline bool matches_to_order(const AtomDistribution& d1, const AtomDistribution& d2, int k,
                             double tol = kMatchTolerance) {
  if (k > kMaxMomentOrder)
    throw UnsupportedOrder("matching order " + std::to_string(k) + " exceeds ceiling");
  for (int total = 0; total <= k; ++total)
    for (int a = 0; a <= total; ++a)
      if (std::abs(moment(d1, a, total - a) - moment(d2, a, total - a)) > tol) return false;
  return true;
}

/// {+-sqrt(m4) w.p. 1/(2 m4) each, 0 w.p. 1 - 1/m4}: mean 0, variance 1,
/// third moment 0, fourth moment m4. The zero atom is dropped when m4 = 1.
inline AtomDistribution symmetric_three_point(double m4) {
  if (!(m4 >= 1.0))
    throw Infeasible("fourth moment " + std::to_string(m4) +
                     " < 1 is impossible for a unit-variance law");
  const double a = std::sqrt(m4);
  const double p = 1.0 / (2.0 * m4);
  std::vector<Atom> atoms{{Complex(a, 0.0), p}, {Complex(-a, 0.0), p}};
  const double rest = 1.0 - 2.0 * p;
  if (rest > 0.0) atoms.push_back({Complex(0.0, 0.0), rest});
  return AtomDistribution::discrete(std::move(atoms));
}

/// Law of factor * xi.
inline AtomDistribution scaled(const AtomDistribution& dist, double factor) {
  return std::visit(
      [&](const auto& k) -> AtomDistribution {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, GaussianReal>) {
          return AtomDistribution::gaussian_real(factor * k.mean, factor * factor * k.variance);
        } else if constexpr (std::is_same_v<T, GaussianComplex>) {
          return AtomDistribution::gaussian_complex(factor * factor * k.variance);
        } else {
          if (factor == 0.0) return AtomDistribution::discrete({{Complex(0.0, 0.0), 1.0}});
          std::vector<Atom> atoms = k.atoms;
          for (auto& atom : atoms) atom.value *= factor;
          return AtomDistribution::discrete(std::move(atoms));
        }
      },
      dist.kind());
}

/// Law of X + iY with X ~ re, Y ~ im independent. Both inputs must be
/// real-valued discrete laws.
inline AtomDistribution independent_complex(const AtomDistribution& re,
                                            const AtomDistribution& im) {
  if (re.is_gaussian() || im.is_gaussian() || !re.is_real_valued() || !im.is_real_valued())
    throw InvalidArgument("independent_complex needs two real discrete laws");
  std::vector<Atom> atoms;
  for (const auto& x : re.atoms())
    for (const auto& y : im.atoms())
      atoms.push_back({Complex(x.value.real(), y.value.real()), x.prob * y.prob});
  return AtomDistribution::discrete(std::move(atoms));
}

/// E|xi|^c0. Closed form for centered Gaussians and discrete laws; a
/// composite Simpson rule for a Gaussian with nonzero mean.
inline double condition_c1_bound(const AtomDistribution& dist, double c0) {
  if (!(c0 > 0.0)) throw InvalidArgument("C1 exponent must be > 0");
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, GaussianReal>) {
          const double sd = std::sqrt(k.variance);
          if (sd == 0.0) return std::pow(std::abs(k.mean), c0);
          if (k.mean == 0.0)
            return std::pow(sd, c0) * std::pow(2.0, c0 / 2.0) *
                   std::tgamma((c0 + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
          constexpr int kIntervals = 20000;
          const double lo = -40.0;
          const double h = 80.0 / kIntervals;
          double sum = 0.0;
          for (int j = 0; j <= kIntervals; ++j) {
            const double z = lo + j * h;
            const double w = (j == 0 || j == kIntervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            sum += w * std::pow(std::abs(k.mean + sd * z), c0) * std::exp(-0.5 * z * z);
          }
          return sum * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
        } else if constexpr (std::is_same_v<T, GaussianComplex>) {
          // |xi|^2 = variance * Exp(1).
          return std::pow(k.variance, c0 / 2.0) * std::tgamma(1.0 + c0 / 2.0);
        } else {
          double sum = 0.0;
          for (const auto& atom : k.atoms) sum += atom.prob * std::pow(std::abs(atom.value), c0);
          return sum;
        }
      },
      dist.kind());
}

/// Draws from one AtomDistribution. Holds the Gaussian generator state so
/// consecutive draws use both values of each Box-Muller pair.
class AtomSampler {
 public:
  explicit AtomSampler(AtomDistribution dist) : dist_(std::move(dist)) {
    const auto& d = dist_;
    if (!d.is_gaussian()) {
      double acc = 0.0;
      for (const auto& atom : d.atoms()) cumulative_.push_back(acc += atom.prob);
      cumulative_.back() = 1.0;
    }
  }

  Complex operator()(Engine& rng) {
    return std::visit(
        [&](const auto& k) -> Complex {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, GaussianReal>) {
            return {k.mean + std::sqrt(k.variance) * normal_(rng), 0.0};
          } else if constexpr (std::is_same_v<T, GaussianComplex>) {
            const double sd = std::sqrt(k.variance / 2.0);
            const double re = sd * normal_(rng);
            const double im = sd * normal_(rng);
            return {re, im};
          } else {
            const double u = uniform01(rng);
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
            return k.atoms[std::min(idx, k.atoms.size() - 1)].value;
          }
        },
        dist_.kind());
  }

 private:
  AtomDistribution dist_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<double> cumulative_;
};

// JSON form of discrete laws: {"atoms": [{"re":..,"im":..,"prob":..}, ...]}.

inline nlohmann::json to_json(const AtomDistribution& dist) {
  if (dist.is_gaussian()) throw InvalidArgument("only discrete laws serialize to atom JSON");
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& atom : dist.atoms())
    atoms.push_back({{"re", atom.value.real()}, {"im", atom.value.imag()}, {"prob", atom.prob}});
  return {{"atoms", atoms}};
}

inline AtomDistribution atom_distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
    throw InvalidArgument("atom JSON must be an object with an \"atoms\" array");
  std::vector<Atom> atoms;
  for (const auto& entry : j["atoms"]) {
    if (!entry.is_object() || !entry.contains("re") || !entry.contains("prob"))
      throw InvalidArgument("each atom needs \"re\" and \"prob\" fields");
    const double re = entry.at("re").get<double>();
    const double im = entry.value("im", 0.0);
    atoms.push_back({Complex(re, im), entry.at("prob").get<double>()});
  }
  return AtomDistribution::discrete(std::move(atoms));
}

inline AtomDistribution load_atom_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open atom file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed atom file " + path + ": " + e.what());
  }
  try {
    return atom_distribution_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed atom file " + path + ": " + e.what());
  }
}

}  // namespace wigner_lab
