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

// Plot-ready output: CSV tables, ECDF tables, JSON documents, and the
// dense matrix formats of the `sample` subcommand.
//
// Binary matrix layout (all fields little-endian, 8 bytes each):
//   uint64 n, uint64 symmetry tag (0 real_symmetric, 1 hermitian),
//   then n*n entries in row-major order: one float64 per entry for
//   real_symmetric, (re, im) float64 pairs for hermitian.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "wigner_lab/ensembles.hpp"
#include "wigner_lab/errors.hpp"

namespace wigner_lab {

/// Thrown when an output file cannot be written or an input file read.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A table cell: a measurement or an exact 64-bit identifier (seed).
using Cell = std::variant<double, std::uint64_t>;

/// Header plus rows of cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Shortest decimal form that reads back to the same double.
inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      if (const auto* v = std::get_if<double>(&row[c])) os << format_number(*v);
      else os << std::get<std::uint64_t>(row[c]);
    }
    os << '\n';
  }
}

inline nlohmann::json table_to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& cell : row) std::visit([&](auto v) { r.push_back(v); }, cell);
    rows.push_back(std::move(r));
  }
  return {{"columns", table.columns}, {"rows", std::move(rows)}};
}

/// (value, ecdf, reference_cdf) at each order statistic; ecdf = i / n.
template <typename Cdf>
Table ecdf_table(std::vector<double> values, Cdf&& reference_cdf) {
  std::sort(values.begin(), values.end());
  Table t{{"value", "ecdf", "reference_cdf"}, {}};
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    t.rows.push_back({values[i], static_cast<double>(i + 1) / n, Cell(reference_cdf(values[i]))});
  return t;
}

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw InvalidArgument("unknown format '" + s + "' (expected csv or json)");
}

inline std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

/// Writes a table as CSV (with header row) or as {"columns", "rows"} JSON.
inline void emit_plotdata(const Table& table, OutputFormat format, const std::string& path) {
  if (table.rows.empty()) throw InvalidArgument("no data to emit");
  auto out = open_output(path);
  if (format == OutputFormat::csv) write_csv(out, table);
  else out << table_to_json(table).dump(2) << '\n';
  if (!out) throw IoError("write to " + path + " failed");
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to " + path + " failed");
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed JSON in " + path + ": " + e.what());
  }
}

/// Dense CSV: n rows of n values; hermitian matrices use 2n columns
/// re_1,im_1,...,re_n,im_n per row.
inline void write_matrix_csv(std::ostream& os, const HermitianMatrix& m) {
  std::visit(
      [&](const auto& x) {
        using Scalar = typename std::decay_t<decltype(x)>::Scalar;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
          for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j) os << ',';
            if constexpr (std::is_same_v<Scalar, double>) {
              os << format_number(x(i, j));
            } else {
              os << format_number(x(i, j).real()) << ',' << format_number(x(i, j).imag());
            }
          }
          os << '\n';
        }
      },
      m);
}

namespace detail {

inline void put_le(std::ostream& os, std::uint64_t bits) {
  unsigned char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(bits >> (8 * k));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t get_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw IoError("truncated binary matrix");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
  return bits;
}

inline void put_double(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }
inline double get_double(std::istream& is) { return std::bit_cast<double>(get_le(is)); }

}  // namespace detail

inline void write_matrix_binary(std::ostream& os, const HermitianMatrix& m) {
  const auto n = static_cast<std::uint64_t>(dimension(m));
  detail::put_le(os, n);
  detail::put_le(os, std::holds_alternative<Eigen::MatrixXd>(m) ? 0 : 1);
  std::visit(
      [&](const auto& x) {
        using Scalar = typename std::decay_t<decltype(x)>::Scalar;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
          for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if constexpr (std::is_same_v<Scalar, double>) {
              detail::put_double(os, x(i, j));
            } else {
              detail::put_double(os, x(i, j).real());
              detail::put_double(os, x(i, j).imag());
            }
          }
      },
      m);
}

inline HermitianMatrix read_matrix_binary(std::istream& is) {
  const auto n = static_cast<Eigen::Index>(detail::get_le(is));
  const auto tag = detail::get_le(is);
  if (tag == 0) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = detail::get_double(is);
    return m;
  }
  if (tag != 1) throw IoError("unknown symmetry tag in binary matrix");
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = detail::get_double(is);
      const double im = detail::get_double(is);
      m(i, j) = Complex(re, im);
    }
  return m;
}

/// FNV-1a, used to fingerprint configurations.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace wigner_lab
