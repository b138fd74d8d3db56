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
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "wigner_lab/atom_distribution.hpp"
#include "wigner_lab/errors.hpp"
#include "wigner_lab/random.hpp"

namespace wigner_lab {

enum class Symmetry { real_symmetric, hermitian };

inline const char* to_string(Symmetry s) {
  return s == Symmetry::real_symmetric ? "real_symmetric" : "hermitian";
}

/// Real storage for real symmetric ensembles, complex storage otherwise.
using HermitianMatrix = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

inline Eigen::Index dimension(const HermitianMatrix& m) {
  return std::visit([](const auto& x) { return x.rows(); }, m);
}

/// A Wigner ensemble: dimension, symmetry class and the two entry laws.
/// Construction enforces mean 0 / variance 1 off the diagonal and a real
/// centered diagonal law.
class WignerSpec {
 public:
  WignerSpec(std::string name, std::size_t n, Symmetry symmetry, AtomDistribution off_diag,
             AtomDistribution diag)
      : name_(std::move(name)),
        n_(n),
        symmetry_(symmetry),
        off_diag_(std::move(off_diag)),
        diag_(std::move(diag)) {
    if (n_ < 1) throw InvalidArgument("ensemble dimension must be >= 1");
    if (std::abs(mean_real(off_diag_)) > kMatchTolerance ||
        std::abs(mean_imag(off_diag_)) > kMatchTolerance)
      throw InvalidArgument("off-diagonal law must have mean 0");
    if (std::abs(variance(off_diag_) - 1.0) > kMatchTolerance)
      throw InvalidArgument("off-diagonal law must have variance 1");
    if (!diag_.is_real_valued()) throw InvalidArgument("diagonal law must be real-valued");
    if (std::abs(mean_real(diag_)) > kMatchTolerance)
      throw InvalidArgument("diagonal law must have mean 0");
    if (!(variance(diag_) > 0.0)) throw InvalidArgument("diagonal variance must be > 0");
    if (symmetry_ == Symmetry::real_symmetric && !off_diag_.is_real_valued())
      throw InvalidArgument("real symmetric ensembles need a real off-diagonal law");
  }

  const std::string& name() const { return name_; }
  std::size_t n() const { return n_; }
  Symmetry symmetry() const { return symmetry_; }
  const AtomDistribution& off_diag() const { return off_diag_; }
  const AtomDistribution& diag() const { return diag_; }

  /// Same laws at another dimension.
  WignerSpec with_n(std::size_t n) const {
    return WignerSpec(name_, n, symmetry_, off_diag_, diag_);
  }

 private:
  std::string name_;
  std::size_t n_;
  Symmetry symmetry_;
  AtomDistribution off_diag_;
  AtomDistribution diag_;
};

/// GOE: N(0,1)_R off the diagonal, N(0,2)_R on it.
inline WignerSpec goe_spec(std::size_t n) {
  return WignerSpec("goe", n, Symmetry::real_symmetric,
                    AtomDistribution::gaussian_real(0.0, 1.0),
                    AtomDistribution::gaussian_real(0.0, 2.0));
}

/// GUE: N(0,1)_C off the diagonal, N(0,1)_R on it.
inline WignerSpec gue_spec(std::size_t n) {
  return WignerSpec("gue", n, Symmetry::hermitian, AtomDistribution::gaussian_complex(1.0),
                    AtomDistribution::gaussian_real(0.0, 1.0));
}

/// Discrete ensemble matching GOE to order 4 off the diagonal and to
/// order 2 on it: three-point law off the diagonal, sqrt(2) times the
/// same law on it.
inline WignerSpec matched_goe_spec(std::size_t n) {
  const auto three_point = symmetric_three_point(3.0);
  return WignerSpec("matched_goe", n, Symmetry::real_symmetric, three_point,
                    scaled(three_point, std::sqrt(2.0)));
}

/// Hermitian discrete ensemble matching GUE to order 4 off the diagonal:
/// independent real and imaginary parts, each a three-point law of
/// variance 1/2.
inline WignerSpec matched_gue_spec(std::size_t n) {
  const auto half = scaled(symmetric_three_point(3.0), std::sqrt(0.5));
  return WignerSpec("matched_gue", n, Symmetry::hermitian, independent_complex(half, half),
                    symmetric_three_point(3.0));
}

/// Symmetric Bernoulli off the diagonal. Matches GOE only to order 3.
inline WignerSpec rademacher_spec(std::size_t n) {
  return WignerSpec("rademacher", n, Symmetry::real_symmetric, symmetric_three_point(1.0),
                    AtomDistribution::gaussian_real(0.0, 2.0));
}

/// Looks up one of the built-in ensembles: goe, gue, matched_goe,
/// matched_gue, rademacher.
inline WignerSpec spec_by_name(const std::string& name, std::size_t n) {
  if (name == "goe") return goe_spec(n);
  if (name == "gue") return gue_spec(n);
  if (name == "matched_goe") return matched_goe_spec(n);
  if (name == "matched_gue") return matched_gue_spec(n);
  if (name == "rademacher") return rademacher_spec(n);
  throw InvalidArgument("unknown ensemble '" + name + "'");
}

struct MatrixSample {
  HermitianMatrix matrix;
  WignerSpec spec;
  std::uint64_t seed = 0;

  std::size_t n() const { return spec.n(); }
};

/// Draws one matrix. Entries are consumed from a single stream in
/// row-major upper-triangle order (diagonal included); the lower triangle
/// is copied from the upper one.
inline MatrixSample sample(const WignerSpec& spec, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(spec.n());
  Engine rng = make_engine(seed);
  AtomSampler off(spec.off_diag());
  AtomSampler diag(spec.diag());

  auto fill = [&](auto& m) {
    using Scalar = typename std::decay_t<decltype(m)>::Scalar;
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = Scalar(diag(rng).real());
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Complex v = off(rng);
        if constexpr (std::is_same_v<Scalar, double>) {
          m(i, j) = v.real();
          m(j, i) = v.real();
        } else {
          m(i, j) = v;
          m(j, i) = std::conj(v);
        }
      }
    }
  };

  if (spec.symmetry() == Symmetry::real_symmetric) {
    Eigen::MatrixXd m(n, n);
    fill(m);
    return {std::move(m), spec, seed};
  }
  Eigen::MatrixXcd m(n, n);
  fill(m);
  return {std::move(m), spec, seed};
}

/// A_n = sqrt(n) M_n, the scaling under which bulk eigenvalue spacing is
/// of order one.
inline HermitianMatrix rescale(const MatrixSample& m) {
  const double factor = std::sqrt(static_cast<double>(m.n()));
  return std::visit([&](const auto& x) -> HermitianMatrix { return (factor * x).eval(); },
                    m.matrix);
}

}  // namespace wigner_lab
