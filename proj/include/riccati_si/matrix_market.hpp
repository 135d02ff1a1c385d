#pragma once

// Minimal MatrixMarket reader/writer: real coordinate (general, symmetric,
// skew-symmetric) for sparse operators and real array for dense blocks.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace riccati_si::mm {

struct Header {
  std::string format;    // coordinate | array
  std::string field;     // real | integer | pattern
  std::string symmetry;  // general | symmetric | skew-symmetric
};

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  return in;
}

inline Header read_header(std::istream& in, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::parse, path.string() + ": empty file");
  std::istringstream ss(line);
  std::string banner, object;
  Header h;
  ss >> banner >> object >> h.format >> h.field >> h.symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw Error(ErrorKind::parse, path.string() + ": missing %%MatrixMarket matrix banner");
  h.format = lower(h.format);
  h.field = lower(h.field);
  h.symmetry = lower(h.symmetry);
  if (h.format != "coordinate" && h.format != "array")
    throw Error(ErrorKind::parse, path.string() + ": unsupported format '" + h.format + "'");
  if (h.field != "real" && h.field != "integer" && h.field != "double" &&
      !(h.field == "pattern" && h.format == "coordinate"))
    throw Error(ErrorKind::parse, path.string() + ": unsupported field '" + h.field + "'");
  if (h.symmetry != "general" && h.symmetry != "symmetric" && h.symmetry != "skew-symmetric")
    throw Error(ErrorKind::parse, path.string() + ": unsupported symmetry '" + h.symmetry + "'");
  return h;
}

// Next non-comment, non-blank line.
inline bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '%') continue;
    return true;
  }
  return false;
}

inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    out << content;
    if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline SparseMatrix read_sparse(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  const Header h = detail::read_header(in, path);
  std::string line;
  if (!detail::next_data_line(in, line))
    throw Error(ErrorKind::parse, path.string() + ": missing size line");
  std::istringstream size_line(line);

  if (h.format == "array") {
    long rows = 0, cols = 0;
    if (!(size_line >> rows >> cols) || rows < 0 || cols < 0)
      throw Error(ErrorKind::parse, path.string() + ": malformed size line");
    std::vector<Eigen::Triplet<double>> trips;
    for (long j = 0; j < cols; ++j) {
      const long start = h.symmetry == "general" ? 0 : j;
      for (long i = start; i < rows; ++i) {
        if (!detail::next_data_line(in, line))
          throw Error(ErrorKind::parse, path.string() + ": truncated array data");
        std::istringstream ls(line);
        double v = 0.0;
        if (!(ls >> v))
          throw Error(ErrorKind::parse, path.string() + ": malformed value '" + line + "'");
        if (v == 0.0) continue;
        trips.emplace_back(i, j, v);
        if (h.symmetry == "symmetric" && i != j) trips.emplace_back(j, i, v);
        if (h.symmetry == "skew-symmetric" && i != j) trips.emplace_back(j, i, -v);
      }
    }
    SparseMatrix m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }

  long rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
    throw Error(ErrorKind::parse, path.string() + ": malformed size line");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(h.symmetry == "general" ? nnz : 2 * nnz));
  for (long e = 0; e < nnz; ++e) {
    if (!detail::next_data_line(in, line))
      throw Error(ErrorKind::parse, path.string() + ": expected " + std::to_string(nnz) +
                                        " entries, found " + std::to_string(e));
    std::istringstream ls(line);
    long i = 0, j = 0;
    double v = 1.0;
    if (!(ls >> i >> j) || (h.field != "pattern" && !(ls >> v)))
      throw Error(ErrorKind::parse, path.string() + ": malformed entry '" + line + "'");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw Error(ErrorKind::parse, path.string() + ": entry index out of range '" + line + "'");
    trips.emplace_back(i - 1, j - 1, v);
    if (i != j && h.symmetry == "symmetric") trips.emplace_back(j - 1, i - 1, v);
    if (i != j && h.symmetry == "skew-symmetric") trips.emplace_back(j - 1, i - 1, -v);
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

inline MatrixXd read_dense(const std::filesystem::path& path) {
  return MatrixXd(read_sparse(path));
}

inline std::string to_coordinate_string(const SparseMatrix& m) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out << std::setprecision(17);
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  return out.str();
}

inline std::string to_array_string(const MatrixXd& m) {
  std::ostringstream out;
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out << m(i, j) << '\n';
  return out.str();
}

inline void write_sparse(const std::filesystem::path& path, const SparseMatrix& m) {
  detail::write_atomically(path, to_coordinate_string(m));
}

inline void write_dense(const std::filesystem::path& path, const MatrixXd& m) {
  detail::write_atomically(path, to_array_string(m));
}

}  // namespace riccati_si::mm
