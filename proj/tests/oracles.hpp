#pragma once

// Reference computations used only by the tests. None of them calls into the
// solver code paths they are compared against.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;

/// Positive root of 2aX − fX² + g = 0 (the scalar CARE with A = a < 0).
inline double scalar_care_root(double a, double f, double g) {
  if (f == 0.0) return -g / (2.0 * a);
  return (a + std::sqrt(a * a + f * g)) / f;
}

/// First iterate from X0 = 0 of the scalar subspace iteration:
/// X_1 = 2 Re(α) g / (|α − a|² + f g).
inline double scalar_first_iterate(double a, double f, double g, Complex alpha) {
  return 2.0 * alpha.real() * g / (std::norm(alpha - a) + f * g);
}

/// Two half-step ADI for A*X + XA + G = 0 with parameter p = −α:
///   (A* − α) X_h = −G − X (A + α),   X_new (A − ᾱ) = −G − (A* + ᾱ) X_h.
inline std::vector<MatrixXc> adi_half_steps(const MatrixXc& a, const MatrixXc& g, const std::vector<Complex>& shifts,
                                            int k) {
  const auto n = a.rows();
  const MatrixXc id = MatrixXc::Identity(n, n);
  MatrixXc x = MatrixXc::Zero(n, n);
  std::vector<MatrixXc> out;
  for (int i = 0; i < k; ++i) {
    const Complex alpha = shifts[static_cast<std::size_t>(i) % shifts.size()];
    const MatrixXc half = (a.adjoint() - alpha * id).fullPivLu().solve(-g - x * (a + alpha * id));
    const MatrixXc rhs = -g - (a.adjoint() + std::conj(alpha) * id) * half;
    x = (a - std::conj(alpha) * id).transpose().fullPivLu().solve(rhs.transpose()).transpose();
    out.push_back(x);
  }
  return out;
}

/// Solves M*X + XM + Q = 0 through the n²×n² Kronecker system.
inline MatrixXc kron_lyapunov(const MatrixXc& m, const MatrixXc& q) {
  const auto n = m.rows();
  const MatrixXc id = MatrixXc::Identity(n, n);
  MatrixXc big = MatrixXc::Zero(n * n, n * n);
  // vec(M*X) = (I ⊗ M*) vec X,  vec(XM) = (Mᵀ ⊗ I) vec X.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      big.block(j * n, i * n, n, n) += m.transpose()(j, i) * id;
      if (i == j) big.block(j * n, j * n, n, n) += m.adjoint();
    }
  const Eigen::VectorXcd rhs = -Eigen::Map<const Eigen::VectorXcd>(q.data(), n * n);
  const Eigen::VectorXcd v = big.fullPivLu().solve(rhs);
  return Eigen::Map<const MatrixXc>(v.data(), n, n);
}

/// Newton–Kleinman for A*X + XA − XFX + G = 0 from X = 0 (A stable).
inline MatrixXc newton_kleinman(const MatrixXc& a, const MatrixXc& f, const MatrixXc& g, int iterations = 60) {
  MatrixXc x = MatrixXc::Zero(a.rows(), a.cols());
  for (int it = 0; it < iterations; ++it) {
    const MatrixXc closed = a - f * x;
    const MatrixXc next = kron_lyapunov(closed, g + x * f * x);
    const double change = (next - x).norm();
    x = next;
    if (change <= 1e-15 * std::max(1.0, x.norm())) break;
  }
  return x;
}

/// σ_min of the Kronecker form of X ↦ T11 X − X T22.
inline double kron_sep(const MatrixXc& t11, const MatrixXc& t22) {
  const auto m = t11.rows(), n = t22.rows();
  MatrixXc big = MatrixXc::Zero(m * n, m * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      big.block(j * m, i * m, m, m) -= t22(i, j) * MatrixXc::Identity(m, m);
      if (i == j) big.block(j * m, j * m, m, m) += t11;
    }
  Eigen::JacobiSVD<MatrixXc> svd(big);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// max_λ ∏_j |λ − ᾱ_j| / |λ + α_j| by direct loops.
inline double brute_force_objective(const std::vector<Complex>& shifts, const std::vector<Complex>& spectrum) {
  double best = 0.0;
  for (Complex lambda : spectrum) {
    double prod = 1.0;
    for (Complex alpha : shifts) prod *= std::abs(lambda - std::conj(alpha)) / std::abs(lambda + alpha);
    best = std::max(best, prod);
  }
  return best;
}

/// Best single real shift on a fine log grid over [lo, hi].
inline double scan_single_real_shift(const std::vector<Complex>& spectrum, double lo, double hi, int points) {
  double best_value = std::numeric_limits<double>::infinity(), best_shift = lo;
  for (int i = 0; i < points; ++i) {
    const double s = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    const double v = brute_force_objective({Complex(s, 0.0)}, spectrum);
    if (v < best_value) {
      best_value = v;
      best_shift = s;
    }
  }
  return best_shift;
}

/// Eigenvalues of (V*V)^{-1} V* (A − BB*X) V assembled explicitly.
inline Eigen::VectorXcd explicit_projection_eigenvalues(const MatrixXc& v, const MatrixXc& a, const MatrixXc& bbt,
                                                       const MatrixXc& x) {
  const MatrixXc gram = v.adjoint() * v;
  const MatrixXc projected = gram.fullPivLu().solve(v.adjoint() * (a - bbt * x) * v);
  return Eigen::ComplexEigenSolver<MatrixXc>(projected).eigenvalues();
}

/// Dense CARE residual A*X + XA − XFX + G.
inline MatrixXc care_residual(const MatrixXc& a, const MatrixXc& f, const MatrixXc& g, const MatrixXc& x) {
  return a.adjoint() * x + x * a - x * f * x + g;
}

}  // namespace oracles
