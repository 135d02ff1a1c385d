#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace riccati_si {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;

enum class ErrorKind {
  invalid_argument,
  io,
  parse,
  dimension_mismatch,
  breakdown,
  numerical,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::breakdown: return "breakdown";
    case ErrorKind::numerical: return "numerical error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a shifted operator is singular or the recurrence loses
/// structure beyond repair. Carries the shift in use at the time.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, Complex shift)
      : Error(ErrorKind::breakdown, what), shift_(shift) {}

  Complex shift() const noexcept { return shift_; }

 private:
  Complex shift_;
};

inline std::string format_complex(Complex z) {
  std::string s = std::to_string(z.real());
  s += (z.imag() < 0 ? " - " : " + ");
  s += std::to_string(std::abs(z.imag())) + "i";
  return s;
}

inline constexpr std::size_t kDefaultDenseThreshold = 400;

/// Largest n handled by the dense oracle. RICCATI_SI_DENSE_THRESHOLD overrides.
inline std::size_t dense_threshold() {
  if (const char* env = std::getenv("RICCATI_SI_DENSE_THRESHOLD")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultDenseThreshold;
}

inline MatrixXc hermitian_part(const MatrixXc& m) {
  return (m + m.adjoint()) / 2.0;
}

/// ‖M − M*‖_F / ‖M‖_F, zero for the zero matrix.
inline double hermitian_drift(const MatrixXc& m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

inline MatrixXc kron_identity(const MatrixXc& m, Index p) {
  if (p == 1) return m;
  MatrixXc out = MatrixXc::Zero(m.rows() * p, m.cols() * p);
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != Complex(0.0))
        out.block(i * p, j * p, p, p).diagonal().setConstant(m(i, j));
  return out;
}

inline double spectral_norm(const MatrixXc& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 16) {
    Eigen::JacobiSVD<MatrixXc> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<MatrixXc> svd(m);
  return svd.singularValues()(0);
}

}  // namespace riccati_si

namespace riccati_si {

/// Hermitian matrix held as factor · core · factor*.
struct FactoredHermitian {
  MatrixXc factor;
  MatrixXc core;

  MatrixXc dense() const { return factor * core * factor.adjoint(); }
};

/// Orthonormal basis of Range(m); columns whose pivot falls below
/// rel_tol·‖m‖ are dropped.
inline MatrixXc orthonormal_basis(const MatrixXc& m, double rel_tol = 1e-13) {
  Eigen::ColPivHouseholderQR<MatrixXc> qr(m);
  qr.setThreshold(rel_tol);
  const Index r = qr.rank();
  return qr.householderQ() * MatrixXc::Identity(m.rows(), r);
}

}  // namespace riccati_si
