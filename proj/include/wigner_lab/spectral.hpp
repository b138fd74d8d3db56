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

// Eigendecomposition of Hermitian matrices and the eigenvector statistics
// built on it.
//
// Indices follow the mathematical convention: eigenvalues are
// lambda_1 <= ... <= lambda_n and coefficients u_{i,p} run over
// 1 <= i, p <= n.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wigner_lab/ensembles.hpp"
#include "wigner_lab/errors.hpp"
#include "wigner_lab/random.hpp"

namespace wigner_lab {

/// How the phase (sign) freedom of each eigenvector is fixed.
struct Normalization {
  enum class Mode {
    first_nonzero_positive,  // first coefficient above threshold made positive real
    random_phase,            // independent uniform phase / sign per eigenvector
    raw,                     // whatever the solver returned
  };

  Mode mode = Mode::raw;
  std::uint64_t seed = 0;

  static Normalization adhoc() { return {Mode::first_nonzero_positive, 0}; }
  static Normalization random(std::uint64_t seed) { return {Mode::random_phase, seed}; }
  static Normalization raw() { return {Mode::raw, 0}; }
};

inline const char* to_string(Normalization::Mode mode) {
  switch (mode) {
    case Normalization::Mode::first_nonzero_positive: return "adhoc";
    case Normalization::Mode::random_phase: return "random";
    case Normalization::Mode::raw: return "raw";
  }
  return "raw";
}

/// Parses the CLI spellings adhoc | random | raw.
inline Normalization::Mode parse_normalization(const std::string& name) {
  if (name == "adhoc") return Normalization::Mode::first_nonzero_positive;
  if (name == "random") return Normalization::Mode::random_phase;
  if (name == "raw") return Normalization::Mode::raw;
  throw InvalidArgument("unknown normalization '" + name + "'");
}

/// Threshold for "nonzero" in the ad hoc normalization: 1e-13 * n.
inline double adhoc_threshold(Eigen::Index n) { return 1e-13 * static_cast<double>(n); }

/// Eigenvalue simplicity tolerance used by Q and by trial exclusion.
inline constexpr double kSimplicityTolerance = 1e-12;

/// Unit-modulus factor that normalizes u under `mode`. Real vectors get a
/// sign, complex vectors a phase. Consumes one draw from rng in
/// random_phase mode only.
template <typename Derived>
typename Derived::Scalar normalizing_phase(const Eigen::MatrixBase<Derived>& u,
                                           Normalization::Mode mode, Engine& rng) {
  using Scalar = typename Derived::Scalar;
  constexpr bool is_complex = Eigen::NumTraits<Scalar>::IsComplex;
  const double norm = u.norm();
  if (norm == 0.0) throw InvalidArgument("cannot normalize the zero vector");
  if (std::abs(norm - 1.0) > 1e-12)
    throw InvalidArgument("eigenvector is not a unit vector (norm " + std::to_string(norm) + ")");

  switch (mode) {
    case Normalization::Mode::raw:
      return Scalar(1.0);
    case Normalization::Mode::random_phase:
      if constexpr (is_complex) {
        return std::polar(1.0, 2.0 * std::numbers::pi * uniform01(rng));
      } else {
        return (rng() >> 63) ? Scalar(-1.0) : Scalar(1.0);
      }
    case Normalization::Mode::first_nonzero_positive: {
      const double threshold = adhoc_threshold(u.size());
      for (Eigen::Index p = 0; p < u.size(); ++p) {
        const double magnitude = std::abs(u(p));
        if (magnitude > threshold) {
          if constexpr (is_complex) {
            return std::conj(u(p)) / magnitude;
          } else {
            return u(p) > 0 ? Scalar(1.0) : Scalar(-1.0);
          }
        }
      }
      throw InvalidArgument("no coefficient above the ad hoc threshold");
    }
  }
  return Scalar(1.0);
}

/// u times its normalizing phase. In ad hoc mode the selected coefficient
/// is stored as an exact positive real, which makes the operation
/// idempotent.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> normalize_eigenvector(
    const Eigen::MatrixBase<Derived>& u, Normalization::Mode mode, Engine& rng) {
  using Scalar = typename Derived::Scalar;
  const Scalar phase = normalizing_phase(u, mode, rng);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = u * phase;
  if (mode == Normalization::Mode::first_nonzero_positive) {
    const double threshold = adhoc_threshold(u.size());
    for (Eigen::Index p = 0; p < u.size(); ++p) {
      if (std::abs(u(p)) > threshold) {
        out(p) = Scalar(std::abs(u(p)));
        break;
      }
    }
  }
  return out;
}

/// Ascending eigenvalues plus the orthonormal eigenvector basis of one
/// Hermitian matrix.
///
/// The solver's basis and the per-eigenvector normalizing phases are
/// stored separately, so every phase-invariant quantity (projection
/// coefficients, delocalization) is computed from the same numbers
/// whatever normalization was requested.
class SpectralDecomposition {
 public:
  SpectralDecomposition(Eigen::VectorXd eigenvalues, Eigen::MatrixXcd basis,
                        Eigen::VectorXcd phases, Normalization normalization, bool real_valued)
      : eigenvalues_(std::move(eigenvalues)),
        basis_(std::move(basis)),
        phases_(std::move(phases)),
        normalization_(normalization),
        real_valued_(real_valued) {}

  std::size_t n() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Normalization& normalization() const { return normalization_; }
  bool real_valued() const { return real_valued_; }

  /// Unnormalized solver output; column i-1 spans the eigenspace of lambda_i.
  const Eigen::MatrixXcd& basis() const { return basis_; }
  const Eigen::VectorXcd& phases() const { return phases_; }

  double eigenvalue(std::size_t i) const {
    check_index(i, "eigenvalue");
    return eigenvalues_(static_cast<Eigen::Index>(i - 1));
  }

  /// u_i with the normalization applied.
  Eigen::VectorXcd eigenvector(std::size_t i) const {
    check_index(i, "eigenvector");
    const auto c = static_cast<Eigen::Index>(i - 1);
    Eigen::VectorXcd u = basis_.col(c) * phases_(c);
    if (normalization_.mode == Normalization::Mode::first_nonzero_positive) {
      const double threshold = adhoc_threshold(basis_.rows());
      for (Eigen::Index p = 0; p < u.size(); ++p)
        if (std::abs(basis_(p, c)) > threshold) {
          u(p) = std::abs(basis_(p, c));
          break;
        }
    }
    return u;
  }

  /// Matrix whose column i-1 is the normalized u_i.
  Eigen::MatrixXcd eigenvectors() const {
    Eigen::MatrixXcd u(basis_.rows(), basis_.cols());
    for (std::size_t i = 1; i <= n(); ++i) u.col(static_cast<Eigen::Index>(i - 1)) = eigenvector(i);
    return u;
  }

  /// u_{i,p} under the normalization.
  Complex coefficient(std::size_t i, std::size_t p) const {
    check_index(i, "eigenvector");
    check_index(p, "coefficient");
    const auto c = static_cast<Eigen::Index>(i - 1);
    const auto r = static_cast<Eigen::Index>(p - 1);
    if (normalization_.mode == Normalization::Mode::first_nonzero_positive) {
      const double threshold = adhoc_threshold(basis_.rows());
      for (Eigen::Index k = 0; k <= r; ++k)
        if (std::abs(basis_(k, c)) > threshold) {
          if (k == r) return std::abs(basis_(r, c));
          break;
        }
    }
    return basis_(r, c) * phases_(c);
  }

  void check_index(std::size_t i, const char* what) const {
    if (i < 1 || i > n())
      throw IndexError(std::string(what) + " index " + std::to_string(i) + " outside [1, " +
                       std::to_string(n()) + "]");
  }

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXcd phases_;
  Normalization normalization_;
  bool real_valued_;
};

/// max |M - M*| entrywise.
template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Full eigendecomposition. Rejects non-Hermitian input
/// (max |M - M*| > 1e-12 ||M||_F).
template <typename Derived>
SpectralDecomposition decompose(const Eigen::MatrixBase<Derived>& m, Normalization normalization,
                                std::optional<std::uint64_t> seed = std::nullopt) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.rows() != m.cols()) throw NonHermitian("matrix is not square");
  if (m.rows() == 0) throw InvalidArgument("empty matrix");
  if (hermitian_defect(m) > 1e-12 * m.norm()) throw NonHermitian("matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.derived());
  if (solver.info() != Eigen::Success)
    throw NumericError("Hermitian eigensolver did not converge", seed);

  const Matrix& vectors = solver.eigenvectors();
  Engine rng = make_engine(normalization.seed);
  Eigen::VectorXcd phases(m.cols());
  for (Eigen::Index i = 0; i < m.cols(); ++i)
    phases(i) = Complex(normalizing_phase(vectors.col(i), normalization.mode, rng));

  return SpectralDecomposition(solver.eigenvalues(), vectors.template cast<Complex>(),
                               std::move(phases), normalization,
                               !Eigen::NumTraits<Scalar>::IsComplex);
}

inline SpectralDecomposition decompose(const HermitianMatrix& m, Normalization normalization,
                                       std::optional<std::uint64_t> seed = std::nullopt) {
  return std::visit([&](const auto& x) { return decompose(x, normalization, seed); }, m);
}

/// Decomposition of A_n = sqrt(n) M_n for a sampled matrix.
inline SpectralDecomposition decompose_rescaled(const MatrixSample& m,
                                                Normalization normalization) {
  return decompose(rescale(m), normalization, m.seed);
}

/// P_{i,p,q} = u_{i,p} conj(u_{i,q}). Independent of the normalization.
inline Complex projection_coeff(const SpectralDecomposition& d, std::size_t i, std::size_t p,
                                std::size_t q) {
  d.check_index(i, "eigenvector");
  d.check_index(p, "coefficient");
  d.check_index(q, "coefficient");
  const auto c = static_cast<Eigen::Index>(i - 1);
  return d.basis()(static_cast<Eigen::Index>(p - 1), c) *
         std::conj(d.basis()(static_cast<Eigen::Index>(q - 1), c));
}

/// lambda_{i+1} - lambda_i for 1 <= i < n.
inline double gap(const SpectralDecomposition& d, std::size_t i) {
  if (i < 1 || i >= d.n())
    throw IndexError("gap index " + std::to_string(i) + " outside [1, " + std::to_string(d.n() - 1) +
                     "]");
  return d.eigenvalue(i + 1) - d.eigenvalue(i);
}

/// Minimum of gap(d, i) over i_lo <= i <= i_hi.
inline double min_gap(const SpectralDecomposition& d, std::size_t i_lo, std::size_t i_hi) {
  if (i_lo > i_hi) throw IndexError("empty gap window");
  double result = std::numeric_limits<double>::infinity();
  for (std::size_t i = i_lo; i <= i_hi; ++i) result = std::min(result, gap(d, i));
  return result;
}

/// Distance from lambda_i to its nearest neighbour; +inf when n = 1.
inline double nearest_gap(const SpectralDecomposition& d, std::size_t i) {
  d.check_index(i, "eigenvalue");
  double result = std::numeric_limits<double>::infinity();
  if (i > 1) result = std::min(result, d.eigenvalue(i) - d.eigenvalue(i - 1));
  if (i < d.n()) result = std::min(result, d.eigenvalue(i + 1) - d.eigenvalue(i));
  return result;
}

inline bool is_simple(const SpectralDecomposition& d, std::size_t i,
                      double tol = kSimplicityTolerance) {
  return nearest_gap(d, i) > tol;
}

/// Q_i = sum_{j != i} |lambda_j - lambda_i|^{-2}.
inline double q_statistic(const SpectralDecomposition& d, std::size_t i) {
  if (!is_simple(d, i))
    throw DegenerateSpectrum("eigenvalue " + std::to_string(i) + " is not simple");
  const double li = d.eigenvalue(i);
  double sum = 0.0;
  for (std::size_t j = 1; j <= d.n(); ++j) {
    if (j == i) continue;
    const double diff = d.eigenvalue(j) - li;
    sum += 1.0 / (diff * diff);
  }
  return sum;
}

/// sup_{i,p} |u_{i,p}|.
inline double delocalization_sup(const SpectralDecomposition& d) {
  return d.basis().cwiseAbs().maxCoeff();
}

/// One coordinate of Phi: the eigenvalue index i and the projection
/// entry (p, q) of u_i u_i^*.
struct PhiSelector {
  std::size_t i = 1;
  std::size_t p = 1;
  std::size_t q = 1;
};

/// (lambda_{i_a}(A_n))_a together with (n P_{i_a,p_a,q_a}(A_n))_a.
struct ObservableTuple {
  std::vector<double> eigenvalue_part;
  std::vector<Complex> projection_part;

  std::size_t k() const { return eigenvalue_part.size(); }

  /// Real coordinates in the order lambda_1..lambda_k, then
  /// Re P_1, Im P_1, ..., Re P_k, Im P_k.
  std::vector<double> flatten() const {
    std::vector<double> x(eigenvalue_part);
    for (const auto& p : projection_part) {
      x.push_back(p.real());
      x.push_back(p.imag());
    }
    return x;
  }
};

/// Phi for a decomposition of A_n. `n` is the dimension multiplying P.
inline ObservableTuple phi_observable(const SpectralDecomposition& d,
                                      std::span<const PhiSelector> selectors, std::size_t n) {
  if (selectors.empty()) throw InvalidArgument("observable needs at least one coordinate");
  ObservableTuple phi;
  const double scale = static_cast<double>(n);
  for (const auto& s : selectors) {
    phi.eigenvalue_part.push_back(d.eigenvalue(s.i));
    Complex value = scale * projection_coeff(d, s.i, s.p, s.q);
    if (s.p == s.q) value = Complex(value.real(), 0.0);
    phi.projection_part.push_back(value);
  }
  return phi;
}

}  // namespace wigner_lab
