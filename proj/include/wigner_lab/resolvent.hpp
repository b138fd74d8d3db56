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

// Green's function G(z) = (M/sqrt(n) - z)^{-1}, computed two ways:
//
//   direct:   LU solve of (M/sqrt(n) - z) x = e_q, read x_p;
//   spectral: sum_i n P_{i,p,q}(A_n) / (lambda_i(A_n) - n z), A_n = sqrt(n) M.
//
// The two routes share nothing but the input matrix. Also here: the
// semicircle Stieltjes transform, level-repulsion margins, and the split of
// G(z) - G(z0) into eigenvalues inside / outside an index window.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "wigner_lab/ensembles.hpp"
#include "wigner_lab/errors.hpp"
#include "wigner_lab/spectral.hpp"

namespace wigner_lab {

/// Resolvents refuse to evaluate within this distance of the spectrum of
/// M/sqrt(n).
inline constexpr double kSingularMargin = 1e-12;

enum class BoundaryMode { reject, limit_from_above };

/// Stieltjes transform of the semicircle law,
/// m(z) = (-z + sqrt(z - 2) sqrt(z + 2)) / 2 with principal roots. This is
/// the branch with m -> 0 at infinity; it solves m^2 + z m + 1 = 0 and has
/// Im m > 0 for Im z > 0. On the cut [-2, 2] a value is returned only in
/// limit_from_above mode.
inline Complex m_sc(Complex z, BoundaryMode boundary = BoundaryMode::reject) {
  if (z.imag() == 0.0) {
    if (std::abs(z.real()) <= 2.0 && boundary == BoundaryMode::reject)
      throw InvalidArgument("m_sc on the cut [-2, 2] needs limit_from_above mode");
    z = Complex(z.real(), +0.0);
  }
  return (-z + std::sqrt(z - 2.0) * std::sqrt(z + 2.0)) / 2.0;
}

/// Semicircle distribution function on [-2, 2].
inline double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
         std::asin(x / 2.0) / std::numbers::pi;
}

/// Index (1-based) whose classical semicircle location is closest to the
/// energy E of M/sqrt(n).
inline std::size_t classical_index(double energy, std::size_t n) {
  const double position = static_cast<double>(n) * semicircle_cdf(energy) + 0.5;
  const auto idx = static_cast<long long>(std::floor(position));
  return static_cast<std::size_t>(std::clamp<long long>(idx, 1, static_cast<long long>(n)));
}

/// Closed index interval [lo, hi]; empty when lo > hi.
struct IndexWindow {
  std::size_t lo = 1;
  std::size_t hi = 0;

  bool empty() const { return lo > hi; }
  bool contains(std::size_t i) const { return lo <= i && i <= hi; }
};

/// Indices within `half_width` of `center`, clipped to [1, n].
inline IndexWindow window_around(std::size_t center, double half_width, std::size_t n) {
  const double c = static_cast<double>(center);
  const auto lo = static_cast<long long>(std::ceil(c - half_width));
  const auto hi = static_cast<long long>(std::floor(c + half_width));
  return {static_cast<std::size_t>(std::max<long long>(lo, 1)),
          static_cast<std::size_t>(std::min<long long>(hi, static_cast<long long>(n)))};
}

/// Factorization of M/sqrt(n) - z for repeated direct-route queries.
class DirectResolvent {
 public:
  DirectResolvent(const MatrixSample& m, Complex z) : n_(m.n()), z_(z) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
    const Eigen::MatrixXcd h = std::visit(
        [&](const auto& x) -> Eigen::MatrixXcd { return (scale * x).template cast<Complex>(); },
        m.matrix);
    if (std::abs(z.imag()) <= kSingularMargin) {
      // Near the real axis the margin must be measured; off it, |Im z|
      // already bounds the distance to the (real) spectrum.
      const double margin = distance_to_spectrum(h, z);
      if (margin <= kSingularMargin)
        throw Singularity("z lies on the spectrum of M/sqrt(n)", margin);
    }
    const auto dim = static_cast<Eigen::Index>(n_);
    lu_.compute(h - z * Eigen::MatrixXcd::Identity(dim, dim));
  }

  /// G(z)_{pq}, 1-based.
  Complex coeff(std::size_t p, std::size_t q) const {
    const auto dim = static_cast<Eigen::Index>(n_);
    if (p < 1 || p > n_ || q < 1 || q > n_) throw IndexError("resolvent index out of range");
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e(static_cast<Eigen::Index>(q - 1)) = 1.0;
    const Eigen::VectorXcd x = lu_.solve(e);
    return x(static_cast<Eigen::Index>(p - 1));
  }

  Eigen::MatrixXcd inverse() const { return lu_.inverse(); }

  Complex z() const { return z_; }

 private:
  static double distance_to_spectrum(const Eigen::MatrixXcd& h, Complex z) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    double margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
      margin = std::min(margin, std::abs(Complex(solver.eigenvalues()(i)) - z));
    return margin;
  }

  std::size_t n_;
  Complex z_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// (M/sqrt(n) - z)^{-1}_{pq} by a linear solve against e_q.
inline Complex resolvent_coeff_direct(const MatrixSample& m, Complex z, std::size_t p,
                                      std::size_t q) {
  return DirectResolvent(m, z).coeff(p, q);
}

/// inf_i |lambda_i(A_n) - n z| for a decomposition of A_n.
inline double level_repulsion_margin(const SpectralDecomposition& d, Complex z, std::size_t n) {
  const Complex nz = static_cast<double>(n) * z;
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d.eigenvalues().size(); ++i)
    margin = std::min(margin, std::abs(Complex(d.eigenvalues()(i)) - nz));
  return margin;
}

/// sum_i n P_{i,p,q}(A_n) / (lambda_i(A_n) - n z) for a decomposition of A_n.
inline Complex resolvent_coeff_spectral(const SpectralDecomposition& d, Complex z, std::size_t p,
                                        std::size_t q, std::size_t n) {
  const double scale = static_cast<double>(n);
  const Complex nz = scale * z;
  Complex sum = 0.0;
  for (std::size_t i = 1; i <= d.n(); ++i) {
    const Complex denom = d.eigenvalue(i) - nz;
    if (denom == Complex(0.0))
      throw Singularity("n z coincides with eigenvalue " + std::to_string(i), 0.0);
    sum += scale * projection_coeff(d, i, p, q) / denom;
  }
  return sum;
}

struct RigiditySplit {
  Complex near_sum;  // eigenvalues with index in the window
  Complex far_sum;   // all others
};

/// Splits G(z)_{pq} - G(z0)_{pq} = sum_i F(lambda_i(A_n)) n P_{i,p,q}(A_n),
/// F(x) = 1/(x - n z) - 1/(x - n z0), by whether i lies in `window`.
inline RigiditySplit rigidity_split(const SpectralDecomposition& d, IndexWindow window, Complex z,
                                    Complex z0, std::size_t p, std::size_t q, std::size_t n) {
  if (!window.empty() && (window.lo < 1 || window.hi > d.n()))
    throw IndexError("rigidity window outside [1, n]");
  const double scale = static_cast<double>(n);
  const Complex nz = scale * z;
  const Complex nz0 = scale * z0;
  RigiditySplit split{0.0, 0.0};
  for (std::size_t i = 1; i <= d.n(); ++i) {
    const double x = d.eigenvalue(i);
    if (Complex(x) == nz || Complex(x) == nz0)
      throw Singularity("F has a pole at eigenvalue " + std::to_string(i), 0.0);
    const Complex f = 1.0 / (x - nz) - 1.0 / (x - nz0);
    const Complex term = f * scale * projection_coeff(d, i, p, q);
    (window.contains(i) ? split.near_sum : split.far_sum) += term;
  }
  return split;
}

/// max_{p,q} |G(z)_{pq} - m_sc(z) delta_{pq}|, G by the direct route.
inline double local_law_deviation(const MatrixSample& m, Complex z) {
  if (!(z.imag() > 0.0)) throw InvalidArgument("local law deviation needs Im z > 0");
  const Eigen::MatrixXcd g = DirectResolvent(m, z).inverse();
  const Complex msc = m_sc(z);
  double worst = 0.0;
  for (Eigen::Index q = 0; q < g.cols(); ++q)
    for (Eigen::Index p = 0; p < g.rows(); ++p)
      worst = std::max(worst, std::abs(g(p, q) - (p == q ? msc : Complex(0.0))));
  return worst;
}

/// (M/sqrt(n))^{-1}_{pq}.
inline Complex inverse_coeff(const MatrixSample& m, std::size_t p, std::size_t q) {
  return resolvent_coeff_direct(m, Complex(0.0, 0.0), p, q);
}

}  // namespace wigner_lab
