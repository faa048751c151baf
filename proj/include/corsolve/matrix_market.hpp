#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "corsolve/core.hpp"
#include "corsolve/types.hpp"

namespace corsolve {
namespace mm {

enum class Field { Real, Integer, Complex, Pattern };
enum class Symmetry { General, Symmetric, SkewSymmetric, Hermitian };

struct Banner {
  Field field = Field::Real;
  Symmetry symmetry = Symmetry::General;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline Banner parse_banner(const std::string& line, const std::string& path) {
  std::istringstream ss(line);
  std::string tag, object, format, field, symmetry;
  ss >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket")
    throw InputError(path + ": missing %%MatrixMarket banner");
  if (lower(object) != "matrix")
    throw InputError(path + ": unsupported object '" + object + "'");
  if (lower(format) != "coordinate")
    throw InputError(path + ": only coordinate format is supported");
  Banner b;
  const std::string f = lower(field);
  if (f == "real") b.field = Field::Real;
  else if (f == "integer") b.field = Field::Integer;
  else if (f == "complex") b.field = Field::Complex;
  else if (f == "pattern")
    throw InputError(path + ": pattern matrices carry no values and are not supported");
  else throw InputError(path + ": unknown field '" + field + "'");
  const std::string s = lower(symmetry);
  if (s == "general") b.symmetry = Symmetry::General;
  else if (s == "symmetric") b.symmetry = Symmetry::Symmetric;
  else if (s == "skew-symmetric") b.symmetry = Symmetry::SkewSymmetric;
  else if (s == "hermitian") b.symmetry = Symmetry::Hermitian;
  else throw InputError(path + ": unknown symmetry '" + symmetry + "'");
  return b;
}

template <typename Scalar>
Scalar read_value(std::istringstream& ss, Field field, const std::string& path) {
  if (field == Field::Complex) {
    double re = 0, im = 0;
    if (!(ss >> re >> im)) throw InputError(path + ": malformed complex entry");
    if constexpr (is_complex_v<Scalar>) {
      return Scalar(re, im);
    } else {
      throw InputError(path + ": complex matrix cannot be loaded into a real solver");
    }
  }
  double v = 0;
  if (!(ss >> v)) throw InputError(path + ": malformed entry value");
  return Scalar(v);
}

}  // namespace detail

inline Banner read_banner(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  return detail::parse_banner(line, path);
}

/// Reads a Matrix Market coordinate file into canonical CSR. Indices are
/// converted to 0-based, symmetric/skew/hermitian storage is expanded to
/// the full general form, and duplicates are summed.
template <typename Scalar>
CsrMatrix<Scalar> read_matrix_market(const std::string& path) {
  using Eigen::numext::conj;
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  const Banner banner = detail::parse_banner(line, path);

  // Skip comments and blank lines up to the size line.
  Index n_rows = 0, n_cols = 0;
  long long nnz = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> n_rows >> n_cols >> nnz))
      throw InputError(path + ": malformed size line");
    break;
  }
  if (n_rows <= 0 || n_cols <= 0 || nnz < 0)
    throw InputError(path + ": malformed size line");

  std::vector<Triplet<Scalar>> trip;
  trip.reserve(static_cast<std::size_t>(2 * nnz));
  long long seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    Index i = 0, j = 0;
    if (!(ss >> i >> j)) throw InputError(path + ": malformed entry line");
    const Scalar v = detail::read_value<Scalar>(ss, banner.field, path);
    if (i < 1 || i > n_rows || j < 1 || j > n_cols)
      throw InputError(path + ": entry index out of bounds");
    --i;
    --j;
    trip.emplace_back(i, j, v);
    if (i != j) {
      switch (banner.symmetry) {
        case Symmetry::General: break;
        case Symmetry::Symmetric: trip.emplace_back(j, i, v); break;
        case Symmetry::SkewSymmetric: trip.emplace_back(j, i, -v); break;
        case Symmetry::Hermitian: trip.emplace_back(j, i, conj(v)); break;
      }
    }
    ++seen;
  }
  if (seen != nnz)
    throw InputError(path + ": expected " + std::to_string(nnz) + " entries, found " +
                     std::to_string(seen));
  return make_csr<Scalar>(n_rows, n_cols, trip);
}

namespace detail {

inline void print_value(std::FILE* f, double v) { std::fprintf(f, " %.17g", v); }
inline void print_value(std::FILE* f, std::complex<double> v) {
  std::fprintf(f, " %.17g %.17g", v.real(), v.imag());
}

}  // namespace detail

/// Writes general coordinate form with full double precision, so a
/// write/read round trip is elementwise exact.
template <typename Scalar>
void write_matrix_market(const std::string& path, const CsrMatrix<Scalar>& A) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InputError(path + ": cannot open file for writing");
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate %s general\n",
               is_complex_v<Scalar> ? "complex" : "real");
  std::fprintf(f, "%lld %lld %lld\n", static_cast<long long>(A.rows()),
               static_cast<long long>(A.cols()), static_cast<long long>(A.nonZeros()));
  const Index* offsets = A.outerIndexPtr();
  const Index* cols = A.innerIndexPtr();
  const Scalar* vals = A.valuePtr();
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index p = offsets[i]; p < offsets[i + 1]; ++p) {
      std::fprintf(f, "%lld %lld", static_cast<long long>(i + 1),
                   static_cast<long long>(cols[p] + 1));
      detail::print_value(f, vals[p]);
      std::fputc('\n', f);
    }
  }
  std::fclose(f);
}

/// Plain-text vector: one entry per line, complex entries as "re im".
template <typename Scalar>
Vector<Scalar> read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::vector<Scalar> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    std::istringstream ss(line);
    if constexpr (is_complex_v<Scalar>) {
      double re = 0, im = 0;
      if (!(ss >> re)) throw InputError(path + ": malformed vector entry");
      if (!(ss >> im)) im = 0;
      vals.push_back(Scalar(re, im));
    } else {
      double v = 0;
      if (!(ss >> v)) throw InputError(path + ": malformed vector entry");
      vals.push_back(Scalar(v));
    }
  }
  Vector<Scalar> out(static_cast<Index>(vals.size()));
  for (Index i = 0; i < out.size(); ++i) out[i] = vals[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace mm
}  // namespace corsolve
