#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "dense_oracle.hpp"
#include "history.hpp"
#include "ilrsi.hpp"
#include "problem.hpp"
#include "residual.hpp"
#include "shifted_solver.hpp"
#include "shifts.hpp"

namespace riccati_si {

// ---------------------------------------------------------------------------
// Galerkin rational Krylov solver

enum class PoleStrategyKind { precomputed, adaptive_plain, adaptive_stabilized };

struct PoleStrategy {
  PoleStrategyKind kind = PoleStrategyKind::precomputed;
  ShiftSequence shifts;
  /// Region for adaptive poles; estimated from the problem when absent.
  std::optional<PoleRegion> region;
};

struct RksmOptions {
  double tol = 1e-8;
  Index max_iter = 100;
  bool timing = false;
  /// New basis columns whose orthogonal remainder is below this fraction
  /// of their norm are dropped.
  double deflation_tol = 1e-12;
};

struct RksmResult {
  /// X = U Y U*: V holds U, T holds Y (core_kind direct).
  LowRankSolution solution;
  ConvergenceHistory history;
  /// Poles actually used, in order.
  ShiftSequence poles;
  /// One flag per adaptive pole: true when the fallback rule was used.
  std::vector<bool> fallback;
  std::vector<std::string> warnings;
};

/// Galerkin projection onto the rational Krylov space with the given
/// poles; the reduced CARE is solved densely after every expansion.
inline RksmResult rksm_solve(const CareProblem& problem, const PoleStrategy& strategy,
                             const RksmOptions& options = {}) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
  if (options.max_iter < 0) throw Error(ErrorKind::invalid_argument, "max_iter must be >= 0");
  if (strategy.kind == PoleStrategyKind::precomputed) validate(strategy.shifts, false);

  const Index n = problem.n();
  ShiftedSolver ops(problem);
  ResidualTracker tracker(problem);
  const Stopwatch clock(options.timing);
  const MatrixXc b = problem.B.cast<Complex>();
  const MatrixXc ct = problem.C.transpose().cast<Complex>();
  const MatrixXc ct_tilde = ops.solve_adjoint_e(ct);  // E^{-*}C*
  const double scale = problem.constant_term_norm() > 0.0 ? problem.constant_term_norm() : 1.0;

  RksmResult result;
  result.poles.origin = strategy.kind == PoleStrategyKind::precomputed ? strategy.shifts.origin
                        : strategy.kind == PoleStrategyKind::adaptive_plain
                            ? ShiftOrigin::adaptive_ritz
                            : ShiftOrigin::adaptive_stabilized;
  result.solution.core_kind = LowRankSolution::Core::direct;
  result.solution.V.resize(n, 0);
  result.solution.T.resize(0, 0);
  if (options.max_iter == 0) {
    result.history.finish(SolveStatus::max_iter);
    return result;
  }

  std::optional<PoleRegion> region = strategy.region;
  if (strategy.kind != PoleStrategyKind::precomputed && !region) region = estimate_pole_region(problem);
  std::vector<Complex> queued;
  if (region) queued = {Complex(region->s_min, 0.0), Complex(region->s_max, 0.0)};

  MatrixXc u(n, 0);      // orthonormal basis
  MatrixXc at_u(n, 0);   // Ã*U
  MatrixXc last(n, 0);   // last accepted block
  MatrixXc y;
  SolveStatus status = SolveStatus::max_iter;
  std::string message;

  try {
    for (Index k = 0; k < options.max_iter; ++k) {
      Complex alpha;
      if (strategy.kind == PoleStrategyKind::precomputed) {
        alpha = strategy.shifts.cycled(static_cast<std::size_t>(k));
      } else if (!queued.empty()) {
        alpha = queued.front();
        queued.erase(queued.begin());
      } else {
        const FactoredHermitian current{u, y};
        const AdaptivePole next =
            adaptive_pole(u, problem, ops, &current, result.poles.shifts,
                          strategy.kind == PoleStrategyKind::adaptive_plain ? AdaptiveMode::plain
                                                                            : AdaptiveMode::stabilized,
                          *region);
        alpha = next.pole;
        result.fallback.push_back(next.fallback);
        if (alpha.imag() != 0.0) queued.push_back(std::conj(alpha));
      }
      result.poles.shifts.push_back(alpha);

      MatrixXc w = k == 0 ? ops.solve(alpha, ct) : ops.solve(alpha, ops.apply_adjoint_e(last));
      // Block Gram–Schmidt, twice, then per-column deflation.
      const Eigen::VectorXd original_norms = w.colwise().norm().transpose();
      for (int pass = 0; pass < 2; ++pass)
        if (u.cols() > 0) w -= u * (u.adjoint() * w);
      MatrixXc accepted(n, 0);
      for (Index j = 0; j < w.cols(); ++j) {
        VectorXc c = w.col(j);
        const double before = original_norms(j);
        for (int pass = 0; pass < 2; ++pass)
          if (accepted.cols() > 0) c -= accepted * (accepted.adjoint() * c);
        const double after = c.norm();
        if (!(after > options.deflation_tol * std::max(before, 1e-300)) || after == 0.0) {
          result.warnings.push_back("pole " + format_complex(alpha) + ": dropped a dependent basis column");
          continue;
        }
        accepted.conservativeResize(Eigen::NoChange, accepted.cols() + 1);
        accepted.col(accepted.cols() - 1) = c / after;
      }
      if (accepted.cols() > 0) {
        const Index m = u.cols(), add = accepted.cols();
        u.conservativeResize(Eigen::NoChange, m + add);
        u.rightCols(add) = accepted;
        at_u.conservativeResize(Eigen::NoChange, m + add);
        at_u.rightCols(add) = ops.solve_adjoint_e(ops.apply_adjoint_a(accepted));
        tracker.append(ops, accepted);
        last = accepted;
      }
      if (u.cols() == 0) throw BreakdownError("rational Krylov space is empty", alpha);

      DenseCare reduced;
      const MatrixXc proj = u.adjoint() * at_u;  // U*Ã*U
      reduced.A = proj.adjoint();
      const MatrixXc bu = b.adjoint() * u;
      reduced.F = bu.adjoint() * bu;
      const MatrixXc cu = ct_tilde.adjoint() * u;
      reduced.G = cu.adjoint() * cu;
      try {
        y = dense_care_solve(reduced).X;
      } catch (const Error& e) {
        throw BreakdownError(std::string("reduced CARE has no stabilizing solution: ") + e.what(), alpha);
      }

      const double rel = tracker.norm(y, bu) / scale;
      result.history.append({k + 1, u.cols(), u.cols(), rel, clock.seconds()});
      if (rel <= options.tol) {
        status = SolveStatus::converged;
        break;
      }
    }
  } catch (const BreakdownError& e) {
    status = SolveStatus::breakdown;
    message = e.what();
  }
  result.solution.V = u;
  result.solution.T = y.size() == u.cols() * u.cols() ? y : MatrixXc::Zero(u.cols(), u.cols());
  result.solution.shifts = result.poles;
  result.history.finish(status, message);
  return result;
}

// ---------------------------------------------------------------------------
// Distinct-shift basis diagnostics

struct DistinctShiftBasisData {
  std::vector<Complex> shifts;
  Index p = 1;
  /// Columns (−A*+α_iE*)^{-1}C*, block by block.
  MatrixXc V;
  /// Representation matrix from the one-step recursion.
  MatrixXc T;
  /// diag(α_1, …, α_k) ⊗ I_p
  MatrixXc Lambda;
  /// ones(k) ⊗ I_p
  MatrixXc ones;
  /// (V*V)^{-1}V*C̃*
  MatrixXc g;
  /// (V*V)^{-1}V*Ã*V
  MatrixXc K;
  /// V*FV
  MatrixXc VFV;
  /// V*C̃*
  MatrixXc VtC;
  /// V*V
  MatrixXc gram;

  Index k() const { return static_cast<Index>(shifts.size()); }
};

/// Q_k of the distinct-shift basis change (before ⊗ I_p): lower triangular,
/// (1/(−2a_k))·[diag(α_k − α_s), 0; 1 … 1].
inline MatrixXc distinct_basis_change(std::span<const Complex> shifts) {
  const Index k = static_cast<Index>(shifts.size());
  const Complex ak = shifts.back();
  MatrixXc q = MatrixXc::Zero(k, k);
  for (Index s = 0; s + 1 < k; ++s) q(s, s) = ak - shifts[static_cast<std::size_t>(s)];
  q.row(k - 1).setConstant(1.0);
  return q / (-2.0 * ak.real());
}

/// Closed form of P_k^{-1}.
inline MatrixXc distinct_basis_pinv(std::span<const Complex> shifts) {
  const Index k = static_cast<Index>(shifts.size());
  const Complex ak = shifts.back();
  MatrixXc pinv = MatrixXc::Zero(k, k);
  for (Index s = 0; s + 1 < k; ++s) {
    const Complex as = shifts[static_cast<std::size_t>(s)];
    pinv(s, s) = (as - ak) / (as + std::conj(ak));
    pinv(k - 1, s) = -1.0 / (as + std::conj(ak));
  }
  pinv(k - 1, k - 1) = -1.0 / (2.0 * ak.real());
  return pinv;
}

inline DistinctShiftBasisData build_distinct_basis(const CareProblem& problem, std::span<const Complex> shifts) {
  if (shifts.empty()) throw Error(ErrorKind::invalid_argument, "no shifts given");
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (!(shifts[i].real() > 0.0))
      throw Error(ErrorKind::invalid_argument, "shift " + format_complex(shifts[i]) + " must have positive real part");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(shifts[i] - shifts[j]) <= 1e-12 * std::abs(shifts[i]))
        throw Error(ErrorKind::invalid_argument,
                    "repeated shift " + format_complex(shifts[i]) + ": the distinct-shift basis needs distinct shifts");
  }
  const Index p = problem.p(), k = static_cast<Index>(shifts.size()), m = k * p;
  ShiftedSolver ops(problem);
  const MatrixXc ct = problem.C.transpose().cast<Complex>();
  const MatrixXc bt = problem.B.transpose().cast<Complex>();

  DistinctShiftBasisData data;
  data.shifts.assign(shifts.begin(), shifts.end());
  data.p = p;
  data.V.resize(problem.n(), m);
  for (Index i = 0; i < k; ++i) data.V.middleCols(i * p, p) = ops.solve(shifts[static_cast<std::size_t>(i)], ct);
  const MatrixXc bv = bt * data.V;
  data.VFV = bv.adjoint() * bv;

  const MatrixXc eye = MatrixXc::Identity(p, p);
  const double a1 = shifts[0].real();
  data.T = (eye + data.VFV.topLeftCorner(p, p)) / (2.0 * a1);
  for (Index j = 2; j <= k; ++j) {
    const auto head = shifts.first(static_cast<std::size_t>(j));
    const double a = head.back().real();
    const MatrixXc q = distinct_basis_change(head);
    const MatrixXc qinv = kron_identity(q.triangularView<Eigen::Lower>().solve(MatrixXc::Identity(j, j)), p);
    const MatrixXc pinv = kron_identity(distinct_basis_pinv(head), p);
    const Index mj = j * p;
    MatrixXc inner = MatrixXc::Zero(mj, mj);
    inner.topLeftCorner(mj - p, mj - p) = data.T;
    inner.bottomRightCorner(p, p) = 2.0 * a * eye;
    inner += qinv.adjoint() * data.VFV.topLeftCorner(mj, mj) * qinv / (2.0 * a);
    data.T = hermitian_part(pinv.adjoint() * inner * pinv);
  }

  data.Lambda = MatrixXc::Zero(m, m);
  data.ones = MatrixXc::Zero(m, p);
  for (Index i = 0; i < k; ++i) {
    data.Lambda.block(i * p, i * p, p, p).diagonal().setConstant(shifts[static_cast<std::size_t>(i)]);
    data.ones.middleRows(i * p, p) = eye;
  }
  data.gram = data.V.adjoint() * data.V;
  data.VtC = data.V.adjoint() * ops.solve_adjoint_e(ct);
  const auto gram_lu = data.gram.partialPivLu();
  data.g = gram_lu.solve(data.VtC);
  data.K = gram_lu.solve(data.V.adjoint() * ops.solve_adjoint_e(ops.apply_adjoint_a(data.V)));
  return data;
}

/// ‖Λ*T + TΛ − V*FV − 𝟙𝟙*‖_F
inline double check_sylvester_identity(const DistinctShiftBasisData& data) {
  return (data.Lambda.adjoint() * data.T + data.T * data.Lambda - data.VFV - data.ones * data.ones.adjoint())
      .norm();
}

/// Closed form T(i,j) = (I + F̃_ij)/(ᾱ_i + α_j), block by block.
inline MatrixXc entrywise_T(const DistinctShiftBasisData& data) {
  const Index p = data.p, k = data.k();
  MatrixXc t = data.VFV;
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      auto block = t.block(i * p, j * p, p, p);
      block.diagonal().array() += 1.0;
      block /= std::conj(data.shifts[static_cast<std::size_t>(i)]) + data.shifts[static_cast<std::size_t>(j)];
    }
  return t;
}

/// max_ij |T_ij − T̂_ij| / |T̂_ij| against the closed form T̂.
inline double check_entrywise_T(const DistinctShiftBasisData& data) {
  const MatrixXc closed = entrywise_T(data);
  double worst = 0.0;
  for (Index j = 0; j < closed.cols(); ++j)
    for (Index i = 0; i < closed.rows(); ++i) {
      const double ref = std::abs(closed(i, j));
      const double diff = std::abs(data.T(i, j) - closed(i, j));
      worst = std::max(worst, ref > 0.0 ? diff / ref : diff);
    }
  return worst;
}

struct GalerkinDefect {
  /// ‖g − T^{-1}𝟙‖_F
  double defect = 0.0;
  /// ‖V*RV‖_F, R the residual of X = VT^{-1}V*
  double vrv = 0.0;
  /// ‖Λ*T + TK − V*FV‖_F
  double ritz_identity = 0.0;
};

inline GalerkinDefect galerkin_defect(const DistinctShiftBasisData& data) {
  const auto t_lu = data.T.partialPivLu();
  const MatrixXc t_inv_ones = t_lu.solve(data.ones);
  GalerkinDefect out;
  out.defect = (data.g - t_inv_ones).norm();
  // V*RV = w w*, w = V*C̃* − (V*V)T^{-1}𝟙.
  const MatrixXc w = data.VtC - data.gram * t_inv_ones;
  out.vrv = (w * w.adjoint()).norm();
  out.ritz_identity = (data.Lambda.adjoint() * data.T + data.T * data.K - data.VFV).norm();
  return out;
}

struct ResidualRankDiagnostic {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  /// ‖R − (factored form)‖_F / ‖R‖_F
  double factored_defect = 0.0;
};

/// Leading singular values of the dense residual of X = VT^{-1}V*, and the
/// check of the factored form [C*, V][I; −T^{-1}𝟙][I; −T^{-1}𝟙]*[C*, V]*.
inline ResidualRankDiagnostic residual_rank_diagnostic(const CareProblem& problem,
                                                       const DistinctShiftBasisData& data) {
  if (problem.E) throw Error(ErrorKind::invalid_argument, "residual rank diagnostic needs E = I");
  if (static_cast<std::size_t>(problem.n()) > dense_threshold())
    throw Error(ErrorKind::invalid_argument, "n exceeds the dense threshold");
  const auto t_lu = data.T.partialPivLu();
  const MatrixXc x = data.V * t_lu.solve(data.V.adjoint());
  const MatrixXc r = dense_residual(problem, x);
  Eigen::JacobiSVD<MatrixXc> svd(r);
  ResidualRankDiagnostic out;
  out.sigma1 = svd.singularValues()(0);
  out.sigma2 = svd.singularValues().size() > 1 ? svd.singularValues()(1) : 0.0;
  const MatrixXc z = problem.C.transpose().cast<Complex>() - data.V * t_lu.solve(data.ones);
  const double scale = r.norm();
  out.factored_defect = (r - z * z.adjoint()).norm() / (scale > 0.0 ? scale : 1.0);
  return out;
}

/// −conj of the Ritz values of Ã* − XF on Range(V), X = VT^{-1}V*.
inline std::vector<Complex> mirrored_ritz_values(const CareProblem& problem, const DistinctShiftBasisData& data) {
  const MatrixXc b = problem.B.cast<Complex>();
  const MatrixXc bv = b.adjoint() * data.V;
  // (V*V)^{-1}V*XFV = T^{-1}V*FV since (V*V)^{-1}V*V = I.
  const MatrixXc projected = data.K - data.T.partialPivLu().solve(bv.adjoint() * bv);
  Eigen::ComplexEigenSolver<MatrixXc> es(projected, false);
  std::vector<Complex> out;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(-std::conj(es.eigenvalues()(i)));
  return out;
}

struct MirroredRitzSearch {
  std::vector<Complex> poles;
  bool converged = false;
  Index iterations = 0;
  /// ‖poles − mirrored Ritz values‖ / ‖poles‖ at exit
  double mismatch = 0.0;
};

namespace detail {

inline std::vector<Complex> sorted_lex(std::vector<Complex> z) {
  std::sort(z.begin(), z.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return z;
}

inline double pole_mismatch(const CareProblem& problem, const std::vector<Complex>& poles,
                            std::vector<Complex>* mirrored = nullptr) {
  const auto data = build_distinct_basis(problem, poles);
  const auto m = sorted_lex(mirrored_ritz_values(problem, data));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    num += std::norm(m[i] - poles[i]);
    den += std::norm(poles[i]);
  }
  if (mirrored) *mirrored = m;
  return std::sqrt(num / den);
}

}  // namespace detail

/// Poles equal to the mirrored Ritz values of Ã* − X(poles)F on the space
/// they generate: fixed-point sweeps, then Newton steps on the real and
/// imaginary parts with a finite-difference Jacobian.
inline MirroredRitzSearch find_mirrored_ritz_poles(const CareProblem& problem, std::vector<Complex> start,
                                                   double tol = 1e-12, Index max_iter = 500) {
  MirroredRitzSearch out;
  std::vector<Complex> poles = detail::sorted_lex(std::move(start));
  std::vector<Complex> mirrored;
  for (; out.iterations < max_iter; ++out.iterations) {
    out.mismatch = detail::pole_mismatch(problem, poles, &mirrored);
    if (out.mismatch <= tol) {
      out.converged = true;
      out.poles = poles;
      return out;
    }
    const bool admissible = std::all_of(mirrored.begin(), mirrored.end(), [](Complex z) { return z.real() > 0.0; });
    if (!admissible) break;
    poles = mirrored;
  }

  // Newton on r(x) = mirrored(x) − x, x = [Re α; Im α].
  const Index k = static_cast<Index>(poles.size());
  auto residual = [&](const std::vector<Complex>& z) {
    std::vector<Complex> m;
    detail::pole_mismatch(problem, z, &m);
    VectorXd r(2 * k);
    for (Index i = 0; i < k; ++i) {
      r(i) = m[static_cast<std::size_t>(i)].real() - z[static_cast<std::size_t>(i)].real();
      r(k + i) = m[static_cast<std::size_t>(i)].imag() - z[static_cast<std::size_t>(i)].imag();
    }
    return r;
  };
  for (Index it = 0; it < 50; ++it, ++out.iterations) {
    const VectorXd r = residual(poles);
    MatrixXd jac(2 * k, 2 * k);
    for (Index j = 0; j < 2 * k; ++j) {
      std::vector<Complex> z = poles;
      const double h = 1e-7 * std::max(1.0, std::abs(z[static_cast<std::size_t>(j % k)]));
      z[static_cast<std::size_t>(j % k)] += j < k ? Complex(h, 0.0) : Complex(0.0, h);
      jac.col(j) = (residual(detail::sorted_lex(z)) - r) / h;
    }
    const VectorXd step = jac.colPivHouseholderQr().solve(-r);
    for (Index i = 0; i < k; ++i) poles[static_cast<std::size_t>(i)] += Complex(step(i), step(k + i));
    poles = detail::sorted_lex(poles);
    if (std::any_of(poles.begin(), poles.end(), [](Complex z) { return !(z.real() > 0.0); })) break;
    out.mismatch = detail::pole_mismatch(problem, poles);
    if (out.mismatch <= tol) {
      out.converged = true;
      break;
    }
  }
  out.poles = poles;
  return out;
}

}  // namespace riccati_si
