#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "core.hpp"
#include "problem.hpp"
#include "shifts.hpp"

namespace riccati_si {

/// Dense complex CARE  A*X + XA − XFX + G = 0.
struct DenseCare {
  MatrixXc A;
  MatrixXc F;
  MatrixXc G;

  Index n() const { return A.rows(); }
};

/// Dense form of a problem. With E present, uses AE^{-1}, BB* and
/// E^{-*}C*CE^{-1}, which has the same solution X.
inline DenseCare to_dense(const CareProblem& problem) {
  const Index n = problem.n();
  if (static_cast<std::size_t>(n) > dense_threshold())
    throw Error(ErrorKind::invalid_argument,
                "n = " + std::to_string(n) + " exceeds the dense threshold " +
                    std::to_string(dense_threshold()));
  MatrixXd a = MatrixXd(problem.A);
  MatrixXd c = problem.C;
  if (problem.E) {
    Eigen::PartialPivLU<MatrixXd> lu(MatrixXd(*problem.E).transpose());
    a = lu.solve(a.transpose()).transpose();
    c = lu.solve(c.transpose()).transpose();
  }
  DenseCare out;
  out.A = a.cast<Complex>();
  out.F = (problem.B * problem.B.transpose()).cast<Complex>();
  out.G = (c.transpose() * c).cast<Complex>();
  return out;
}

/// ℋ = [A, −F; −G, −A*]
inline MatrixXc hamiltonian(const DenseCare& care) {
  const Index n = care.n();
  MatrixXc h(2 * n, 2 * n);
  h << care.A, -care.F, -care.G, -care.A.adjoint();
  return h;
}

inline MatrixXc care_residual(const DenseCare& care, const MatrixXc& x) {
  const MatrixXc xa = x * care.A;
  return xa.adjoint() + xa - x * care.F * x + care.G;
}

// ---------------------------------------------------------------------------
// Ordered complex Schur form

struct OrderedSchur {
  MatrixXc Q;
  MatrixXc T;
  Index stable_count = 0;
};

/// Swaps the diagonal entries k, k+1 of the upper triangular T, updating Q.
inline void swap_schur_entries(MatrixXc& t, MatrixXc& q, Index k) {
  const Complex t11 = t(k, k), t22 = t(k + 1, k + 1), t12 = t(k, k + 1);
  const Complex x1 = t12, x2 = t22 - t11;
  const double norm = std::hypot(std::abs(x1), std::abs(x2));
  if (norm == 0.0) return;
  Eigen::Matrix2cd g;
  g << x1 / norm, -std::conj(x2) / norm, x2 / norm, std::conj(x1) / norm;
  const Index n = t.rows();
  t.block(k, k, 2, n - k) = g.adjoint() * t.block(k, k, 2, n - k);
  t.block(0, k, k + 2, 2) = t.block(0, k, k + 2, 2) * g;
  t(k + 1, k) = 0.0;
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  q.middleCols(k, 2) = q.middleCols(k, 2) * g;
}

/// Complex Schur form of `h` with the eigenvalues of negative real part
/// leading. Throws when an eigenvalue lies within tol·max(1, ‖h‖_F) of the
/// imaginary axis.
inline OrderedSchur ordered_schur(const MatrixXc& h, double tol = 1e-10) {
  Eigen::ComplexSchur<MatrixXc> schur(h);
  if (schur.info() != Eigen::Success) throw Error(ErrorKind::numerical, "Schur decomposition failed");
  OrderedSchur out{schur.matrixU(), schur.matrixT(), 0};
  const double scale = tol * std::max(1.0, h.norm());
  const Index n = h.rows();
  for (Index i = 0; i < n; ++i)
    if (std::abs(out.T(i, i).real()) <= scale)
      throw Error(ErrorKind::numerical, "eigenvalue " + format_complex(out.T(i, i)) +
                                            " lies on the imaginary axis");
  for (Index i = 0; i < n; ++i) {
    if (out.T(i, i).real() >= 0.0) continue;
    for (Index j = i; j > out.stable_count; --j) swap_schur_entries(out.T, out.Q, j - 1);
    ++out.stable_count;
  }
  return out;
}

struct DenseCareSolution {
  MatrixXc X;
  double rel_residual = 0.0;
  /// max Re eig(A − FX)
  double closed_loop_abscissa = 0.0;
};

/// Stabilizing solution X_+ = Q21 Q11^{-1} from the stable invariant
/// subspace of ℋ.
inline DenseCareSolution dense_care_solve(const DenseCare& care) {
  const Index n = care.n();
  const OrderedSchur schur = ordered_schur(hamiltonian(care));
  if (schur.stable_count != n)
    throw Error(ErrorKind::numerical, "Hamiltonian has " + std::to_string(schur.stable_count) +
                                          " stable eigenvalues, expected " + std::to_string(n));
  const MatrixXc q11 = schur.Q.topLeftCorner(n, n);
  const MatrixXc q21 = schur.Q.bottomLeftCorner(n, n);
  Eigen::PartialPivLU<MatrixXc> lu(q11.adjoint());
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorKind::numerical, "Q11 is singular");
  DenseCareSolution out;
  out.X = hermitian_part(lu.solve(q21.adjoint()).adjoint());
  const double g = care.G.norm();
  out.rel_residual = care_residual(care, out.X).norm() / (g > 0.0 ? g : 1.0);
  Eigen::ComplexEigenSolver<MatrixXc> es(care.A - care.F * out.X, false);
  out.closed_loop_abscissa = es.eigenvalues().real().maxCoeff();
  if (!(out.closed_loop_abscissa < 0.0))
    throw Error(ErrorKind::numerical, "computed solution is not stabilizing");
  return out;
}

inline DenseCareSolution dense_care_solve(const CareProblem& problem) {
  return dense_care_solve(to_dense(problem));
}

// ---------------------------------------------------------------------------
// Cayley transform and the dense subspace iteration

/// S(α) = (ℋ+αI)^{-1}(ℋ−ᾱI)
inline MatrixXc cayley(const MatrixXc& h, Complex alpha) {
  const Index m = h.rows();
  Eigen::PartialPivLU<MatrixXc> lu(h + alpha * MatrixXc::Identity(m, m));
  if (!(lu.rcond() > 1e-14))
    throw Error(ErrorKind::numerical, "H + alpha I is singular at alpha = " + format_complex(alpha));
  return lu.solve(h - std::conj(alpha) * MatrixXc::Identity(m, m));
}

/// S(α) = I − 2a(ℋ+αI)^{-1}
inline MatrixXc cayley_resolvent_form(const MatrixXc& h, Complex alpha) {
  const Index m = h.rows();
  Eigen::PartialPivLU<MatrixXc> lu(h + alpha * MatrixXc::Identity(m, m));
  if (!(lu.rcond() > 1e-14))
    throw Error(ErrorKind::numerical, "H + alpha I is singular at alpha = " + format_complex(alpha));
  return MatrixXc::Identity(m, m) - 2.0 * alpha.real() * lu.inverse();
}

/// Schur complements of ℋ + αI.
struct SchurComplements {
  MatrixXc S1;  // (−A*+αI) − G(A+αI)^{-1}F
  MatrixXc S2;  // (A+αI) − F(−A*+αI)^{-1}G
  MatrixXc plus_inv;   // (A+αI)^{-1}
  MatrixXc minus_inv;  // (−A*+αI)^{-1}
};

inline SchurComplements schur_complements(const DenseCare& care, Complex alpha) {
  const Index n = care.n();
  const MatrixXc eye = MatrixXc::Identity(n, n);
  SchurComplements s;
  s.plus_inv = (care.A + alpha * eye).partialPivLu().inverse();
  s.minus_inv = (-care.A.adjoint() + alpha * eye).partialPivLu().inverse();
  s.S1 = (-care.A.adjoint() + alpha * eye) - care.G * s.plus_inv * care.F;
  s.S2 = (care.A + alpha * eye) - care.F * s.minus_inv * care.G;
  return s;
}

struct DenseIterate {
  MatrixXc X;
  MatrixXc M;
  MatrixXc N;
  MatrixXc S1;
  MatrixXc S2;
};

/// [M; N] = S(α)[I; X] and X_new = N M^{-1}, written into `it`.
inline void cayley_block_update(const MatrixXc& h, Complex alpha, const MatrixXc& x, Index k, DenseIterate& it) {
  const Index n = x.rows();
  const MatrixXc s = cayley(h, alpha);
  it.M = s.topLeftCorner(n, n) + s.topRightCorner(n, n) * x;
  it.N = s.bottomLeftCorner(n, n) + s.bottomRightCorner(n, n) * x;
  Eigen::PartialPivLU<MatrixXc> lu(it.M.adjoint());
  if (!(lu.rcond() > 1e-14))
    throw Error(ErrorKind::numerical, "M_k is singular at k = " + std::to_string(k));
  it.X = lu.solve(it.N.adjoint()).adjoint();
}

/// One step [M; N] = S(α)[I; X], X_new = N M^{-1}.
inline DenseIterate dense_block_step(const DenseCare& care, const MatrixXc& h, Complex alpha,
                                     const MatrixXc& x, Index k = 0) {
  DenseIterate it;
  cayley_block_update(h, alpha, x, k, it);
  const SchurComplements sc = schur_complements(care, alpha);
  it.S1 = sc.S1;
  it.S2 = sc.S2;
  return it;
}

/// One step of the Schur-complement fixed-point form
///   X_new = [−2a S1^{-1}G(A+α)^{-1} + (I − 2a S1^{-1})X]
///           [I − 2a S2^{-1} − 2a S2^{-1}F(−A*+α)^{-1}X]^{-1}.
inline MatrixXc dense_fixed_point_step(const DenseCare& care, Complex alpha, const MatrixXc& x) {
  const Index n = care.n();
  const double a2 = 2.0 * alpha.real();
  const MatrixXc eye = MatrixXc::Identity(n, n);
  const SchurComplements sc = schur_complements(care, alpha);
  const auto s1 = sc.S1.partialPivLu();
  const auto s2 = sc.S2.partialPivLu();
  const MatrixXc num = -a2 * s1.solve(care.G * sc.plus_inv) + x - a2 * s1.solve(x);
  const MatrixXc den = eye - a2 * s2.inverse() - a2 * s2.solve(care.F * sc.minus_inv * x);
  return den.adjoint().partialPivLu().solve(num.adjoint()).adjoint();
}

struct DenseTrajectory {
  std::vector<DenseIterate> block_form;
  std::vector<MatrixXc> fixed_point;
  /// max_k ‖X_k(block) − X_k(fixed point)‖_F / ‖X_k(block)‖_F
  double max_disagreement = 0.0;
};

/// k steps of both dense forms from X0 with the given shifts (cycled).
inline DenseTrajectory dense_subspace_iteration(const DenseCare& care, std::span<const Complex> shifts,
                                                const MatrixXc& x0, Index k) {
  if (shifts.empty()) throw Error(ErrorKind::invalid_argument, "no shifts given");
  const MatrixXc h = hamiltonian(care);
  DenseTrajectory out;
  MatrixXc xb = x0, xf = x0;
  for (Index i = 0; i < k; ++i) {
    const Complex alpha = shifts[static_cast<std::size_t>(i) % shifts.size()];
    out.block_form.push_back(dense_block_step(care, h, alpha, xb, i + 1));
    xb = out.block_form.back().X;
    xf = dense_fixed_point_step(care, alpha, xf);
    out.fixed_point.push_back(xf);
    const double scale = xb.norm();
    const double diff = (xb - xf).norm();
    out.max_disagreement = std::max(out.max_disagreement, scale > 0.0 ? diff / scale : diff);
  }
  return out;
}

inline DenseTrajectory dense_subspace_iteration(const CareProblem& problem, std::span<const Complex> shifts,
                                                Index k) {
  const DenseCare care = to_dense(problem);
  return dense_subspace_iteration(care, shifts, MatrixXc::Zero(care.n(), care.n()), k);
}

/// Dense ADI for A*X + XA + G = 0 with shifts α (cycled):
///   X ← (A*−α)^{-1}(A*+ᾱ) X (A+α)(A−ᾱ)^{-1} + 2a (A*−α)^{-1} G (A−ᾱ)^{-1}.
inline std::vector<MatrixXc> dense_adi_lyapunov(const MatrixXc& a, const MatrixXc& g,
                                                std::span<const Complex> shifts, const MatrixXc& x0,
                                                Index k) {
  const Index n = a.rows();
  const MatrixXc eye = MatrixXc::Identity(n, n);
  std::vector<MatrixXc> out;
  MatrixXc x = x0;
  for (Index i = 0; i < k; ++i) {
    const Complex alpha = shifts[static_cast<std::size_t>(i) % shifts.size()];
    const auto left = (a.adjoint() - alpha * eye).partialPivLu();
    const auto right = (a - std::conj(alpha) * eye).adjoint().partialPivLu();
    const MatrixXc inner = left.solve((a.adjoint() + std::conj(alpha) * eye) * x * (a + alpha * eye) +
                                      2.0 * alpha.real() * g);
    x = right.solve(inner.adjoint()).adjoint();
    out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Identity checks on the dense blocks

struct SchurIdentityDefects {
  double first = 0.0;          // S2^{-1}F(−A*+α)^{-1} vs (A+α)^{-1}F S1^{-1}
  double second = 0.0;         // S1^{-1}G(A+α)^{-1} vs (−A*+α)^{-1}G S2^{-1}
  double block_inverse = 0.0;  // block formula vs direct (ℋ+αI)^{-1}
};

inline SchurIdentityDefects schur_identity_defects(const DenseCare& care, Complex alpha) {
  const Index n = care.n();
  const SchurComplements sc = schur_complements(care, alpha);
  const MatrixXc s1i = sc.S1.partialPivLu().inverse();
  const MatrixXc s2i = sc.S2.partialPivLu().inverse();
  auto rel = [](const MatrixXc& x, const MatrixXc& y) {
    const double s = std::max(x.norm(), y.norm());
    return s > 0.0 ? (x - y).norm() / s : 0.0;
  };
  SchurIdentityDefects d;
  const MatrixXc upper = s2i * care.F * sc.minus_inv;
  const MatrixXc lower = s1i * care.G * sc.plus_inv;
  d.first = rel(upper, sc.plus_inv * care.F * s1i);
  d.second = rel(lower, sc.minus_inv * care.G * s2i);
  MatrixXc blocks(2 * n, 2 * n);
  blocks << s2i, upper, lower, s1i;
  const MatrixXc direct =
      (hamiltonian(care) + alpha * MatrixXc::Identity(2 * n, 2 * n)).partialPivLu().inverse();
  d.block_inverse = rel(blocks, direct);
  return d;
}

/// Defects of ℳ1*𝒩1 = 𝒩1*ℳ1, ℳ2*𝒩2 = 𝒩2*ℳ2, ℳ2*𝒩1 − 𝒩2*ℳ1 = −I for the
/// blocks of S(α) written through the Schur complements.
inline std::array<double, 3> symplectic_defects(const DenseCare& care, Complex alpha) {
  const Index n = care.n();
  const double a2 = 2.0 * alpha.real();
  const MatrixXc eye = MatrixXc::Identity(n, n);
  const SchurComplements sc = schur_complements(care, alpha);
  const MatrixXc s1i = sc.S1.partialPivLu().inverse();
  const MatrixXc s2i = sc.S2.partialPivLu().inverse();
  const MatrixXc n1 = -a2 * sc.minus_inv * care.G * s2i;
  const MatrixXc n2 = eye - a2 * s1i;
  const MatrixXc m1 = eye - a2 * s2i;
  const MatrixXc m2 = -a2 * sc.plus_inv * care.F * s1i;
  return {(m1.adjoint() * n1 - n1.adjoint() * m1).norm(),
          (m2.adjoint() * n2 - n2.adjoint() * m2).norm(),
          (m2.adjoint() * n1 - n2.adjoint() * m1 + eye).norm()};
}

// ---------------------------------------------------------------------------
// Convergence-bound apparatus

/// Solves T11 X − X T22 = R for upper triangular T11 (m×m), T22 (n×n).
inline MatrixXc solve_triangular_sylvester(const MatrixXc& t11, const MatrixXc& t22, const MatrixXc& r) {
  const Index m = t11.rows(), n = t22.rows();
  MatrixXc x(m, n);
  for (Index j = 0; j < n; ++j) {
    VectorXc rhs = r.col(j);
    if (j > 0) rhs += x.leftCols(j) * t22.col(j).head(j);
    MatrixXc shifted = t11;
    shifted.diagonal().array() -= t22(j, j);
    x.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return x;
}

/// sep(T11, T22) = σ_min(I⊗T11 − T22ᵀ⊗I). Exact through the Kronecker
/// matrix while m·n ≤ exact_limit², otherwise by inverse iteration.
inline double sep(const MatrixXc& t11, const MatrixXc& t22, Index exact_limit = 20) {
  const Index m = t11.rows(), n = t22.rows();
  if (m == 0 || n == 0) return std::numeric_limits<double>::infinity();
  if (m * n <= exact_limit * exact_limit) {
    MatrixXc kron = MatrixXc::Zero(m * n, m * n);
    for (Index j = 0; j < n; ++j) {
      kron.block(j * m, j * m, m, m) += t11;
      for (Index i = 0; i < n; ++i) kron.block(i * m, j * m, m, m).diagonal().array() -= t22(j, i);
    }
    Eigen::JacobiSVD<MatrixXc> svd(kron);
    return svd.singularValues()(m * n - 1);
  }
  // Power iteration on (L*L)^{-1}; L^{-*} goes through the transposed problem.
  MatrixXc x = MatrixXc::Ones(m, n) / std::sqrt(static_cast<double>(m * n));
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    const MatrixXc y = solve_triangular_sylvester(t11, t22, x);
    const MatrixXc z = -solve_triangular_sylvester(t22, t11, -y.adjoint()).adjoint();
    const double next = z.norm();
    x = z / next;
    if (it > 5 && std::abs(next - lambda) <= 1e-12 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return 1.0 / std::sqrt(lambda);
}

/// ‖P1 − P2‖_2 for the orthogonal projectors onto Range(u1), Range(u2).
inline double subspace_distance(const MatrixXc& u1, const MatrixXc& u2) {
  const MatrixXc q1 = orthonormal_basis(u1), q2 = orthonormal_basis(u2);
  return spectral_norm(q1 * q1.adjoint() - q2 * q2.adjoint());
}

inline MatrixXc stacked_identity(const MatrixXc& x) {
  const Index n = x.rows();
  MatrixXc out(2 * n, n);
  out << MatrixXc::Identity(n, n), x;
  return out;
}

struct HamiltonianAnalysis {
  MatrixXc H;
  MatrixXc Q;
  MatrixXc T;
  MatrixXc T11, T12, T22;
  MatrixXc K;
  double sep = 0.0;
  std::vector<Complex> shifts;
  std::vector<MatrixXc> T11_shift;  // (T11+αI)^{-1}(T11−ᾱI)
  std::vector<MatrixXc> T22_shift;  // (T22+αI)^{-1}(T22−ᾱI)
  MatrixXc R0;
  double d = 0.0;
  /// Same distance through ‖P1 − P2‖_2.
  double d_projector = 0.0;
  double gamma = 0.0;
  MatrixXc X_plus;

  Index n() const { return T11.rows(); }
  VectorXc stable_eigenvalues() const { return T11.diagonal(); }
  VectorXc unstable_eigenvalues() const { return T22.diagonal(); }
};

inline HamiltonianAnalysis analyze_hamiltonian(const DenseCare& care, std::span<const Complex> shifts,
                                               const MatrixXc& x0, Index sep_exact_limit = 20) {
  const Index n = care.n();
  HamiltonianAnalysis an;
  an.H = hamiltonian(care);
  OrderedSchur schur = ordered_schur(an.H);
  if (schur.stable_count != n)
    throw Error(ErrorKind::numerical, "Hamiltonian does not split into n stable eigenvalues");
  an.Q = std::move(schur.Q);
  an.T = std::move(schur.T);
  an.T11 = an.T.topLeftCorner(n, n).triangularView<Eigen::Upper>();
  an.T12 = an.T.topRightCorner(n, n);
  an.T22 = an.T.bottomRightCorner(n, n).triangularView<Eigen::Upper>();
  an.K = solve_triangular_sylvester(an.T11, an.T22, -an.T12);
  an.sep = sep(an.T11, an.T22, sep_exact_limit);

  const MatrixXc eye = MatrixXc::Identity(n, n);
  for (Complex alpha : shifts) {
    an.shifts.push_back(alpha);
    an.T11_shift.push_back((an.T11 + alpha * eye).triangularView<Eigen::Upper>().solve(
        an.T11 - std::conj(alpha) * eye));
    an.T22_shift.push_back((an.T22 + alpha * eye).triangularView<Eigen::Upper>().solve(
        an.T22 - std::conj(alpha) * eye));
  }

  const MatrixXc q1 = an.Q.leftCols(n), q2 = an.Q.rightCols(n);
  an.X_plus = q1.bottomRows(n) * q1.topRows(n).partialPivLu().inverse();

  Eigen::HouseholderQR<MatrixXc> qr(stacked_identity(x0));
  const MatrixXc u0 = qr.householderQ() * MatrixXc::Identity(2 * n, n);
  an.R0 = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const MatrixXc z = orthonormal_basis(q1 - q2 * an.K.adjoint());
  Eigen::JacobiSVD<MatrixXc> svd(z.adjoint() * u0);
  const double smin = svd.singularValues()(n - 1);
  an.d = std::sqrt(std::max(0.0, 1.0 - smin * smin));
  an.d_projector = spectral_norm(z * z.adjoint() - u0 * u0.adjoint());
  if (!(an.d < 1.0 - 1e-14))
    throw Error(ErrorKind::numerical, "distance d = " + std::to_string(an.d) + " is not below 1");
  const MatrixXc r0_inv = an.R0.triangularView<Eigen::Upper>().solve(eye);
  an.gamma = spectral_norm(r0_inv) / std::sqrt(1.0 - an.d * an.d) * (1.0 + an.T12.norm() / an.sep);
  return an;
}

inline HamiltonianAnalysis analyze_hamiltonian(const CareProblem& problem, std::span<const Complex> shifts) {
  const DenseCare care = to_dense(problem);
  return analyze_hamiltonian(care, shifts, MatrixXc::Zero(care.n(), care.n()));
}

struct BoundCheck {
  double distance = 0.0;
  double bound = 0.0;
};

/// γ‖∏T22(i)‖‖∏T11(i)^{-1}‖ over the first k shifts (cycled).
inline double convergence_bound_value(const HamiltonianAnalysis& an, Index k) {
  const Index n = an.n();
  MatrixXc p22 = MatrixXc::Identity(n, n), p11 = MatrixXc::Identity(n, n);
  for (Index i = 0; i < k; ++i) {
    const std::size_t s = static_cast<std::size_t>(i) % an.shifts.size();
    p22 = an.T22_shift[s] * p22;
    p11 = p11 * an.T11_shift[s].triangularView<Eigen::Upper>().solve(MatrixXc::Identity(n, n));
  }
  return an.gamma * spectral_norm(p22) * spectral_norm(p11);
}

inline BoundCheck convergence_bound(const HamiltonianAnalysis& an, const MatrixXc& x_k, Index k) {
  return {subspace_distance(stacked_identity(an.X_plus), stacked_identity(x_k)),
          convergence_bound_value(an, k)};
}

/// Relative defects of ρ(∏T22(i)) and ρ(∏T11(i)^{-1}) against the
/// rational objective over λ_+(ℋ); returns the larger one.
inline double spectral_radius_identity_check(const HamiltonianAnalysis& an) {
  const Index n = an.n();
  MatrixXc p22 = MatrixXc::Identity(n, n), p11 = MatrixXc::Identity(n, n);
  for (std::size_t s = 0; s < an.shifts.size(); ++s) {
    p22 = an.T22_shift[s] * p22;
    p11 = p11 * an.T11_shift[s].triangularView<Eigen::Upper>().solve(MatrixXc::Identity(n, n));
  }
  // Both products are upper triangular; their eigenvalues sit on the diagonal.
  const double rho22 = p22.diagonal().cwiseAbs().maxCoeff();
  const double rho11 = p11.diagonal().cwiseAbs().maxCoeff();
  const VectorXc plus = an.unstable_eigenvalues();
  const std::vector<Complex> spectrum(plus.data(), plus.data() + plus.size());
  const double objective = rational_objective(std::span<const Complex>(an.shifts), spectrum);
  const double scale = std::max(objective, 1e-300);
  return std::max(std::abs(rho22 - objective), std::abs(rho11 - objective)) / scale;
}

/// max over λ ∈ λ_+(ℋ) of the distance from −conj(λ) to λ_−(ℋ), relative
/// to ‖ℋ‖_F.
inline double hamiltonian_symmetry_defect(const HamiltonianAnalysis& an) {
  const VectorXc plus = an.unstable_eigenvalues(), minus = an.stable_eigenvalues();
  double worst = 0.0;
  for (Index i = 0; i < plus.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < minus.size(); ++j) best = std::min(best, std::abs(-std::conj(plus(i)) - minus(j)));
    worst = std::max(worst, best);
  }
  return worst / std::max(1.0, an.H.norm());
}

}  // namespace riccati_si
