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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace wigner_lab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad index, bad norm, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IndexError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Requested moment order exceeds the supported ceiling.
class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

/// No distribution with the requested moments exists.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class NonHermitian : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The eigensolver failed; carries the seed of the offending matrix if known.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::optional<std::uint64_t> seed)
      : Error(seed ? what + " (matrix seed " + std::to_string(*seed) + ")"
                   : what),
        seed_(seed) {}

  std::optional<std::uint64_t> seed() const { return seed_; }

 private:
  std::optional<std::uint64_t> seed_;
};

/// A statistic required a simple eigenvalue and got a repeated one.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// A resolvent was evaluated on (or too close to) the spectrum.
class Singularity : public Error {
 public:
  Singularity(const std::string& what, double margin)
      : Error(what + " (margin " + std::to_string(margin) + ")"),
        margin_(margin) {}

  double margin() const { return margin_; }

 private:
  double margin_;
};

/// A theorem hypothesis (moment matching, a.e_1 = o(1), ...) does not hold
/// and no override was given.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace wigner_lab
