#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "core.hpp"
#include "history.hpp"
#include "incremental_qr.hpp"
#include "matrix_market.hpp"
#include "problem.hpp"
#include "residual.hpp"
#include "shifted_solver.hpp"
#include "shifts.hpp"

namespace riccati_si {

/// X = V S V*, with S = T^{-1} (subspace iteration) or S = Y (Galerkin).
struct LowRankSolution {
  enum class Core { inverse, direct };

  MatrixXc V;
  MatrixXc T;
  Core core_kind = Core::inverse;
  /// Optional compressed storage V = basis · coeffs, basis orthonormal.
  std::optional<MatrixXc> basis;
  std::optional<MatrixXc> coeffs;
  ShiftSequence shifts;

  Index n() const { return V.rows(); }
  Index cols() const { return V.cols(); }

  /// S with X = V S V*.
  MatrixXc core() const {
    if (core_kind == Core::direct || T.size() == 0) return T;
    Eigen::PartialPivLU<MatrixXc> lu(T);
    return lu.inverse();
  }

  FactoredHermitian factored() const { return {V, core()}; }

  MatrixXc dense() const {
    if (V.cols() == 0) return MatrixXc::Zero(V.rows(), V.rows());
    return V * core() * V.adjoint();
  }

  /// X through the compressed pair.
  MatrixXc dense_compressed() const {
    if (!basis) return dense();
    const MatrixXc r = *coeffs;
    return *basis * (r * core() * r.adjoint()) * basis->adjoint();
  }
};

/// ‖Im X‖_F / ‖X‖_F
inline double imaginary_fraction(const MatrixXc& x) {
  const double scale = x.norm();
  return scale > 0.0 ? x.imag().norm() / scale : 0.0;
}

/// V = 𝒱ℛ with 𝒱 orthonormal, keeping singular values above
/// truncation_tol·σ_1.
inline LowRankSolution truncate_basis(LowRankSolution solution, double truncation_tol) {
  if (!(truncation_tol > 0.0 && truncation_tol < 1.0))
    throw Error(ErrorKind::invalid_argument, "truncation_tol must lie in (0, 1)");
  const MatrixXc& v = solution.V;
  if (v.cols() == 0) {
    solution.basis = MatrixXc(v.rows(), 0);
    solution.coeffs = MatrixXc(0, 0);
    return solution;
  }
  Eigen::HouseholderQR<MatrixXc> qr(v);
  const Index m = std::min(v.rows(), v.cols());
  const MatrixXc q = qr.householderQ() * MatrixXc::Identity(v.rows(), m);
  const MatrixXc r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<MatrixXc> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Index rank = 0;
  while (rank < s.size() && s(rank) > truncation_tol * s(0)) ++rank;
  solution.basis = q * svd.matrixU().leftCols(rank);
  solution.coeffs = s.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).adjoint();
  return solution;
}

/// Writes V (real and imaginary parts) and T as MatrixMarket arrays.
inline void export_factors(const LowRankSolution& solution, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  mm::write_dense(dir / "V_real.mtx", solution.V.real());
  mm::write_dense(dir / "V_imag.mtx", solution.V.imag());
  mm::write_dense(dir / "T_real.mtx", solution.T.real());
  mm::write_dense(dir / "T_imag.mtx", solution.T.imag());
}

// ---------------------------------------------------------------------------
// Reference recursion with arbitrary starting factors

struct LrsiFactors {
  MatrixXc U;
  MatrixXc T;
};

/// U_k = [(−A*+αE*)^{-1}(−A*−ᾱE*)U, −2a(−A*+αE*)^{-1}C*],
/// T_k = blkdiag(T, 2aI) + 2a W*BB*W,  W = (−A*+αE*)^{-1}[E*U, C*].
inline LrsiFactors lrsi_reference_step(const LrsiFactors& prev, const CareProblem& problem,
                                       ShiftedSolver& solver, Complex alpha) {
  const double a = alpha.real();
  if (!(a > 0.0)) throw Error(ErrorKind::invalid_argument, "shift must have positive real part");
  const Index m = prev.U.cols(), p = problem.p();
  const MatrixXc ct = problem.C.transpose().cast<Complex>();
  MatrixXc rhs(problem.n(), m + p);
  rhs << solver.apply_adjoint_e(prev.U), ct;
  const MatrixXc w = solver.solve(alpha, rhs);

  LrsiFactors next;
  next.U.resize(problem.n(), m + p);
  if (m > 0)
    next.U.leftCols(m) =
        solver.solve(alpha, -solver.apply_adjoint_a(prev.U) - std::conj(alpha) * solver.apply_adjoint_e(prev.U));
  next.U.rightCols(p) = -2.0 * a * w.rightCols(p);

  const MatrixXc bw = problem.B.transpose().cast<Complex>() * w;
  next.T = MatrixXc::Zero(m + p, m + p);
  next.T.topLeftCorner(m, m) = prev.T;
  next.T.bottomRightCorner(p, p).diagonal().setConstant(2.0 * a);
  next.T += 2.0 * a * bw.adjoint() * bw;
  return next;
}

// ---------------------------------------------------------------------------
// Incremental subspace iteration

struct IlrsiOptions {
  double tol = 1e-8;
  Index max_iter = 100;
  /// When > 0, the result carries a compressed basis at this tolerance.
  double truncation_tol = 0.0;
  Index residual_every = 1;
  bool timing = false;
  /// Relative Hermitian drift of T tolerated before declaring breakdown.
  double hermitian_tol = 1e-10;
};

class IlrsiState;
inline IlrsiState ilrsi_init(const CareProblem& problem, Complex alpha, double rank_tol = 1e-12);
inline void ilrsi_step(IlrsiState& state, Complex alpha, double hermitian_tol = 1e-10);

/// Loop state. Holds a pointer to the problem, which must outlive it.
class IlrsiState {
 public:
  IlrsiState(const CareProblem& problem, double rank_tol = 1e-12)
      : problem_(&problem),
        solver_(std::make_unique<ShiftedSolver>(problem)),
        tracker_(std::make_unique<ResidualTracker>(problem)),
        rank_qr_(problem.n(), rank_tol) {
    solution_.V.resize(problem.n(), 0);
    solution_.T.resize(0, 0);
  }

  const CareProblem& problem() const { return *problem_; }
  const LowRankSolution& solution() const { return solution_; }
  LowRankSolution& solution() { return solution_; }
  ShiftedSolver& solver() { return *solver_; }
  const ResidualTracker& tracker() const { return *tracker_; }
  Index iteration() const { return k_; }
  const MatrixXc& last_block() const { return v_; }
  Complex last_shift() const { return alpha_prev_; }
  Index numerical_rank() const { return rank_qr_.rank(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// ‖R_k‖_F through the tracked QR factor.
  double residual_norm() const {
    if (k_ == 0) return problem_->constant_term_norm();
    const MatrixXc btv = problem_->B.transpose().cast<Complex>() * solution_.V;
    return tracker_->norm(solution_.core(), btv);
  }

  double relative_residual() const {
    const double scale = problem_->constant_term_norm();
    return residual_norm() / (scale > 0.0 ? scale : 1.0);
  }

 private:
  friend IlrsiState ilrsi_init(const CareProblem&, Complex, double);
  friend void ilrsi_step(IlrsiState&, Complex, double);

  void push_block(const MatrixXc& v) {
    const Index m = solution_.V.cols(), p = v.cols();
    solution_.V.conservativeResize(Eigen::NoChange, m + p);
    solution_.V.rightCols(p) = v;
    tracker_->append(*solver_, v);
    rank_qr_.append(v);
  }

  const CareProblem* problem_;
  std::unique_ptr<ShiftedSolver> solver_;
  std::unique_ptr<ResidualTracker> tracker_;
  IncrementalQR rank_qr_;
  LowRankSolution solution_;
  MatrixXc v_;
  Complex alpha_prev_{0.0, 0.0};
  Index k_ = 0;
  std::vector<std::string> warnings_;
};

namespace detail {

inline void check_shift(Complex alpha) {
  if (!(alpha.real() > 0.0) || !std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw Error(ErrorKind::invalid_argument,
                "shift " + format_complex(alpha) + " must have positive real part");
}

}  // namespace detail

/// v_1 = −2a_1(−A*+α_1E*)^{-1}C*, T_1 = 2a_1 I + v_1*BB*v_1/(2a_1).
inline IlrsiState ilrsi_init(const CareProblem& problem, Complex alpha, double rank_tol) {
  detail::check_shift(alpha);
  IlrsiState state(problem, rank_tol);
  const double a = alpha.real();
  const MatrixXc v = -2.0 * a * state.solver_->solve(alpha, problem.C.transpose().cast<Complex>());
  const MatrixXc bv = problem.B.transpose().cast<Complex>() * v;
  const Index p = problem.p();
  state.solution_.T = 2.0 * a * MatrixXc::Identity(p, p) + bv.adjoint() * bv / (2.0 * a);
  state.solution_.T = hermitian_part(state.solution_.T);
  state.push_block(v);
  state.v_ = v;
  state.alpha_prev_ = alpha;
  state.k_ = 1;
  state.solution_.shifts.shifts.push_back(alpha);
  return state;
}

/// The k×k change of basis Q_k = Q̂ · U · L (before the Kronecker
/// extension by I_p): Q̂ the cyclic permutation, U the upper triangular
/// matrix of ones, L lower bidiagonal.
inline MatrixXc ilrsi_basis_change(std::span<const Complex> shifts) {
  const Index k = static_cast<Index>(shifts.size());
  const Complex ak = shifts.back();
  const double two_a = 2.0 * ak.real();
  MatrixXc perm = MatrixXc::Zero(k, k);
  perm.topRightCorner(k - 1, k - 1).setIdentity();
  perm(k - 1, 0) = 1.0;
  MatrixXc ones = MatrixXc::Zero(k, k);
  ones.triangularView<Eigen::Upper>().setConstant(1.0);
  MatrixXc low = MatrixXc::Zero(k, k);
  for (Index s = 0; s < k; ++s) {
    low(s, s) = (std::conj(shifts[static_cast<std::size_t>(s)]) + ak) / two_a;
    if (s + 1 < k) low(s + 1, s) = (shifts[static_cast<std::size_t>(s)] - ak) / two_a;
  }
  return perm * ones * low;
}

/// One step of the incremental iteration with shift α_k.
inline void ilrsi_step(IlrsiState& state, Complex alpha, double hermitian_tol) {
  detail::check_shift(alpha);
  if (state.k_ == 0) {
    state = ilrsi_init(*state.problem_, alpha);
    return;
  }
  const CareProblem& problem = *state.problem_;
  const Index p = problem.p();
  const Complex prev = state.alpha_prev_;
  const double a = alpha.real();

  const MatrixXc w = state.solver_->solve(alpha, state.solver_->apply_adjoint_e(state.v_));
  const MatrixXc v = (a / prev.real()) * (state.v_ - (alpha + std::conj(prev)) * w);

  std::vector<Complex> used = state.solution_.shifts.shifts;
  used.push_back(alpha);
  const Index k = static_cast<Index>(used.size());

  // Q_k^{-1} through its factors: L^{-1} U^{-1} Q̂ᵀ.
  const MatrixXc qk = ilrsi_basis_change(used);
  MatrixXc perm_t = MatrixXc::Zero(k, k);
  perm_t.bottomLeftCorner(k - 1, k - 1).setIdentity();
  perm_t(0, k - 1) = 1.0;
  MatrixXc ones_inv = MatrixXc::Identity(k, k);
  for (Index i = 0; i + 1 < k; ++i) ones_inv(i, i + 1) = -1.0;
  MatrixXc low = MatrixXc::Zero(k, k);
  for (Index s = 0; s < k; ++s) {
    low(s, s) = (std::conj(used[static_cast<std::size_t>(s)]) + alpha) / (2.0 * a);
    if (s + 1 < k) low(s + 1, s) = (used[static_cast<std::size_t>(s)] - alpha) / (2.0 * a);
  }
  const MatrixXc qk_inv = low.triangularView<Eigen::Lower>().solve(ones_inv * perm_t);

  // P_k = Q_k^{-1} + blkdiag(I, 0) = Q_k^{-1}(I + Q_k D), so P_k^{-1} = (I + Q_k D)^{-1} Q_k.
  MatrixXc d = MatrixXc::Identity(k, k);
  d(k - 1, k - 1) = 0.0;
  const MatrixXc p_inv_small = (MatrixXc::Identity(k, k) + qk * d).partialPivLu().solve(qk);

  const MatrixXc qinv = kron_identity(qk_inv, p);
  const MatrixXc pinv = kron_identity(p_inv_small, p);

  state.push_block(v);
  const MatrixXc y = (problem.B.transpose().cast<Complex>() * state.solution_.V) * qinv;
  const Index m = k * p;
  MatrixXc tt = MatrixXc::Zero(m, m);
  tt.topLeftCorner(m - p, m - p) = state.solution_.T;
  tt.bottomRightCorner(p, p).diagonal().setConstant(2.0 * a);
  tt += y.adjoint() * y / (2.0 * a);
  MatrixXc t = pinv.adjoint() * tt * pinv;

  const double drift = hermitian_drift(t);
  if (drift > hermitian_tol)
    throw BreakdownError("T lost Hermitian symmetry (relative drift " + std::to_string(drift) + ")", alpha);
  state.solution_.T = hermitian_part(t);
  state.v_ = v;
  state.alpha_prev_ = alpha;
  state.solution_.shifts.shifts.push_back(alpha);
  ++state.k_;
}

struct IlrsiResult {
  LowRankSolution solution;
  ConvergenceHistory history;
};

/// Runs the incremental iteration, cycling through `shifts`, until the
/// relative residual drops to options.tol or options.max_iter steps.
inline IlrsiResult ilrsi_solve(const CareProblem& problem, const ShiftSequence& shifts,
                               const IlrsiOptions& options = {}) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
  if (options.max_iter < 0) throw Error(ErrorKind::invalid_argument, "max_iter must be >= 0");
  if (options.residual_every < 1) throw Error(ErrorKind::invalid_argument, "residual_every must be >= 1");
  validate(shifts, false);

  IlrsiResult result;
  result.solution.V.resize(problem.n(), 0);
  result.solution.shifts.origin = shifts.origin;
  const Stopwatch clock(options.timing);
  if (options.max_iter == 0) {
    result.history.finish(SolveStatus::max_iter);
    return result;
  }

  const double rank_tol = options.truncation_tol > 0.0 ? options.truncation_tol : 1e-12;
  std::optional<IlrsiState> state;
  SolveStatus status = SolveStatus::max_iter;
  std::string message;
  try {
    for (Index k = 0; k < options.max_iter; ++k) {
      const Complex alpha = shifts.cycled(static_cast<std::size_t>(k));
      if (!state)
        state.emplace(ilrsi_init(problem, alpha, rank_tol));
      else
        ilrsi_step(*state, alpha, options.hermitian_tol);
      const bool last = k + 1 == options.max_iter;
      if ((k + 1) % options.residual_every != 0 && !last) continue;
      const double rel = state->relative_residual();
      if (!std::isfinite(rel))
        throw BreakdownError("residual is not finite; T is numerically singular, consider truncation", alpha);
      result.history.append({k + 1, state->solution().V.cols(), state->numerical_rank(), rel, clock.seconds()});
      if (rel <= options.tol) {
        status = SolveStatus::converged;
        break;
      }
    }
  } catch (const BreakdownError& e) {
    status = SolveStatus::breakdown;
    message = e.what();
  }
  if (state) {
    result.solution = state->solution();
    result.solution.shifts.origin = shifts.origin;
  }
  if (options.truncation_tol > 0.0) result.solution = truncate_basis(std::move(result.solution), options.truncation_tol);
  result.history.finish(status, message);
  return result;
}

}  // namespace riccati_si
