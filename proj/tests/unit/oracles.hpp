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

// Reference computations used as test oracles. They deliberately avoid
// the library's own code paths.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// Composite Simpson rule with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int k = 1; k < panels; ++k) sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

/// Phi(x) by quadrature of the density from -12.
inline double normal_cdf(double x) { return x <= -12.0 ? 0.0 : simpson(normal_pdf, -12.0, x, 4000); }

/// Inverse of a nondecreasing function on [lo, hi] by bisection.
inline double invert(const std::function<double(double)>& f, double target, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Semicircle density on [-2, 2].
inline double semicircle_pdf(double x) {
  return std::abs(x) >= 2.0 ? 0.0 : std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

/// Semicircle distribution function by quadrature.
inline double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return simpson(semicircle_pdf, -2.0, x, 4000);
}

/// Stieltjes transform int rho(x) / (x - z) dx by quadrature (Im z > 0).
/// The substitution x = 2 sin(t) removes the square-root endpoints.
inline std::complex<double> semicircle_stieltjes(std::complex<double> z) {
  auto part = [&](bool imag) {
    return simpson(
        [&](double t) {
          const double x = 2.0 * std::sin(t);
          const double rho_dx = 2.0 * std::cos(t) * std::cos(t) * 2.0 / (2.0 * std::numbers::pi);
          const std::complex<double> v = rho_dx / (x - z);
          return imag ? v.imag() : v.real();
        },
        -std::numbers::pi / 2.0, std::numbers::pi / 2.0, 200000);
  };
  return {part(false), part(true)};
}

}  // namespace oracle
