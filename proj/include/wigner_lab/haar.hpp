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

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "wigner_lab/atom_distribution.hpp"
#include "wigner_lab/errors.hpp"
#include "wigner_lab/random.hpp"
#include "wigner_lab/spectral.hpp"

namespace wigner_lab {

enum class HaarGroup { orthogonal, unitary };

inline HaarGroup parse_haar_group(const std::string& name) {
  if (name == "orthogonal" || name == "O") return HaarGroup::orthogonal;
  if (name == "unitary" || name == "U") return HaarGroup::unitary;
  throw InvalidArgument("unknown group '" + name + "'");
}

struct HaarMatrix {
  Eigen::MatrixXcd entries;  // imaginary parts exactly zero for O(n)
  HaarGroup group = HaarGroup::orthogonal;

  Eigen::Index n() const { return entries.rows(); }
};

namespace detail {

/// Q of a Householder QR with column k multiplied by r_kk / |r_kk|.
/// Without this correction the law of Q depends on the sign convention of
/// the factorization and is not Haar. Returns false on a singular draw.
template <typename Matrix>
bool phase_corrected_q(const Matrix& gaussian, Matrix& q) {
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < gaussian.cols(); ++k) {
    const double magnitude = std::abs(r(k, k));
    if (magnitude == 0.0) return false;
    q.col(k) *= r(k, k) / magnitude;
  }
  return true;
}

}  // namespace detail

/// Exact Haar sample on O(n) or U(n) by phase-corrected QR of an iid
/// Gaussian matrix (real N(0,1) or complex N(0,1)_C entries).
inline HaarMatrix haar_sample(HaarGroup group, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("Haar dimension must be >= 1");
  const auto dim = static_cast<Eigen::Index>(n);
  Engine rng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (;;) {
    if (group == HaarGroup::orthogonal) {
      Eigen::MatrixXd g(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = normal(rng);
      Eigen::MatrixXd q;
      if (detail::phase_corrected_q(g, q)) return {q.cast<Complex>(), group};
    } else {
      const double sd = std::sqrt(0.5);
      Eigen::MatrixXcd g(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
          const double re = normal(rng);
          const double im = normal(rng);
          g(i, j) = Complex(sd * re, sd * im);
        }
      Eigen::MatrixXcd q;
      if (detail::phase_corrected_q(g, q)) return {std::move(q), group};
    }
  }
}

/// sqrt(n) times the block of rows x cols (1-based, distinct, equal length).
inline Eigen::MatrixXcd minor(const HaarMatrix& h, std::span<const std::size_t> rows,
                              std::span<const std::size_t> cols) {
  if (rows.size() != cols.size()) throw IndexError("minor needs equally many rows and columns");
  if (rows.empty()) throw IndexError("minor needs at least one index");
  auto check = [&](std::span<const std::size_t> idx) {
    std::set<std::size_t> seen;
    for (auto i : idx) {
      if (i < 1 || i > static_cast<std::size_t>(h.n()))
        throw IndexError("minor index " + std::to_string(i) + " out of range");
      if (!seen.insert(i).second) throw IndexError("minor indices must be distinct");
    }
  };
  check(rows);
  check(cols);
  const auto k = static_cast<Eigen::Index>(rows.size());
  const double scale = std::sqrt(static_cast<double>(h.n()));
  Eigen::MatrixXcd out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      out(a, b) = scale * h.entries(static_cast<Eigen::Index>(rows[a] - 1),
                                    static_cast<Eigen::Index>(cols[b] - 1));
  return out;
}

/// Limiting law of sqrt(n) u_{i,p} for GOE / GUE eigenvectors.
struct CoefficientLaw {
  enum class Kind {
    real_normal,              // N(0,1)_R
    half_normal,              // |N(0,1)_R|
    complex_normal,           // N(0,1)_C
    complex_normal_modulus,   // |N(0,1)_C|
  };

  Kind kind = Kind::real_normal;

  Complex sample(Engine& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    switch (kind) {
      case Kind::real_normal: return {normal(rng), 0.0};
      case Kind::half_normal: return {std::abs(normal(rng)), 0.0};
      case Kind::complex_normal:
      case Kind::complex_normal_modulus: {
        const double re = normal(rng) * std::sqrt(0.5);
        const double im = normal(rng) * std::sqrt(0.5);
        const Complex z(re, im);
        return kind == Kind::complex_normal ? z : Complex(std::abs(z), 0.0);
      }
    }
    return {};
  }

  bool real_valued() const { return kind != Kind::complex_normal; }

  /// CDF of the (real-valued) law; complex_normal has none.
  double cdf(double x) const {
    switch (kind) {
      case Kind::real_normal: return 0.5 * std::erfc(-x / std::numbers::sqrt2);
      case Kind::half_normal: return x <= 0.0 ? 0.0 : std::erf(x / std::numbers::sqrt2);
      case Kind::complex_normal_modulus: return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x * x);
      case Kind::complex_normal: break;
    }
    throw InvalidArgument("complex normal law has no real CDF");
  }

  double mean() const {
    switch (kind) {
      case Kind::real_normal:
      case Kind::complex_normal: return 0.0;
      case Kind::half_normal: return std::sqrt(2.0 / std::numbers::pi);
      case Kind::complex_normal_modulus: return std::sqrt(std::numbers::pi) / 2.0;
    }
    return 0.0;
  }
};

/// Reference law for sqrt(n) u_{i,p} of GOE (symmetry real_symmetric) or
/// GUE (hermitian) eigenvectors. Under the ad hoc normalization the
/// coefficient that is made positive is (with high probability) p = 1, and
/// its limit is the modulus law; every other case has no absolute value.
inline CoefficientLaw goe_gue_reference(Symmetry symmetry, std::size_t n, std::size_t i,
                                        std::size_t p, Normalization::Mode normalization) {
  if (normalization == Normalization::Mode::raw)
    throw InvalidArgument("reference laws are defined for adhoc or random normalization");
  if (n < 1 || i < 1 || i > n || p < 1 || p > n) throw IndexError("reference law index out of range");
  const bool modulus = normalization == Normalization::Mode::first_nonzero_positive && p == 1;
  if (symmetry == Symmetry::real_symmetric)
    return {modulus ? CoefficientLaw::Kind::half_normal : CoefficientLaw::Kind::real_normal};
  return {modulus ? CoefficientLaw::Kind::complex_normal_modulus
                  : CoefficientLaw::Kind::complex_normal};
}

}  // namespace wigner_lab
