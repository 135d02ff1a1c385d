#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <json.hpp>

#include "core.hpp"
#include "problem.hpp"
#include "shifted_solver.hpp"

namespace riccati_si {

enum class ShiftOrigin { penzl_A, penzl_H, adaptive_ritz, adaptive_stabilized, user };

inline const char* to_string(ShiftOrigin o) {
  switch (o) {
    case ShiftOrigin::penzl_A: return "penzl_A";
    case ShiftOrigin::penzl_H: return "penzl_H";
    case ShiftOrigin::adaptive_ritz: return "adaptive_ritz";
    case ShiftOrigin::adaptive_stabilized: return "adaptive_stabilized";
    case ShiftOrigin::user: return "user";
  }
  return "user";
}

/// Ordered shifts α_k with Re(α_k) > 0. Non-real shifts are expected to
/// appear together with their conjugates.
struct ShiftSequence {
  std::vector<Complex> shifts;
  ShiftOrigin origin = ShiftOrigin::user;
  std::vector<std::string> warnings;

  std::size_t size() const { return shifts.size(); }
  bool empty() const { return shifts.empty(); }
  Complex operator[](std::size_t k) const { return shifts[k]; }
  /// a_k = Re(α_k)
  double a(std::size_t k) const { return shifts[k].real(); }
  /// Shift used at (0-based) iteration k when the list is cycled.
  Complex cycled(std::size_t k) const { return shifts[k % shifts.size()]; }
};

inline bool has_positive_real_parts(const ShiftSequence& s) {
  return std::all_of(s.shifts.begin(), s.shifts.end(), [](Complex z) { return z.real() > 0.0; });
}

inline bool is_conjugation_closed(const ShiftSequence& s, double rel_tol = 1e-12) {
  for (Complex z : s.shifts) {
    if (std::abs(z.imag()) <= rel_tol * std::abs(z)) continue;
    const bool found = std::any_of(s.shifts.begin(), s.shifts.end(), [&](Complex w) {
      return std::abs(w - std::conj(z)) <= rel_tol * std::abs(z);
    });
    if (!found) return false;
  }
  return true;
}

/// Throws unless both shift invariants hold.
inline void validate(const ShiftSequence& s, bool require_conjugate_closure = true) {
  if (s.empty()) throw Error(ErrorKind::invalid_argument, "shift sequence is empty");
  for (std::size_t k = 0; k < s.size(); ++k)
    if (!(s.a(k) > 0.0) || !std::isfinite(s.a(k)) || !std::isfinite(s[k].imag()))
      throw Error(ErrorKind::invalid_argument,
                  "shift " + std::to_string(k) + " = " + format_complex(s[k]) +
                      " must have positive real part");
  if (require_conjugate_closure && !is_conjugation_closed(s))
    throw Error(ErrorKind::invalid_argument, "shift sequence is not closed under conjugation");
}

inline nlohmann::json to_json(const ShiftSequence& s) {
  nlohmann::json out = nlohmann::json::array();
  for (Complex z : s.shifts) out.push_back({z.real(), z.imag()});
  return out;
}

inline ShiftSequence shifts_from_json(const nlohmann::json& j, ShiftOrigin origin = ShiftOrigin::user) {
  if (!j.is_array()) throw Error(ErrorKind::parse, "shift list must be a JSON array of [re, im]");
  ShiftSequence s;
  s.origin = origin;
  for (const auto& e : j) {
    if (e.is_number()) {
      s.shifts.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      s.shifts.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      throw Error(ErrorKind::parse, "shift entries must be [re, im] pairs");
    }
  }
  return s;
}

/// ∏_i |λ − ᾱ_i| / |λ + α_i| at a single point.
inline double rational_factor_product(std::span<const Complex> shifts, Complex lambda) {
  double value = 1.0;
  for (Complex alpha : shifts) {
    const double den = std::abs(lambda + alpha);
    if (den <= 1e-14 * std::max(1.0, std::abs(alpha)))
      throw Error(ErrorKind::invalid_argument,
                  "pole hit: lambda = " + format_complex(lambda) +
                      " equals -alpha for alpha = " + format_complex(alpha));
    value *= std::abs(lambda - std::conj(alpha)) / den;
  }
  return value;
}

/// max over λ in `spectrum` of ∏_i |λ − ᾱ_i| / |λ + α_i|.
inline double rational_objective(std::span<const Complex> shifts, std::span<const Complex> spectrum) {
  if (shifts.empty()) throw Error(ErrorKind::invalid_argument, "no shifts given");
  if (spectrum.empty()) throw Error(ErrorKind::invalid_argument, "empty spectrum");
  double worst = 0.0;
  for (Complex lambda : spectrum) worst = std::max(worst, rational_factor_product(shifts, lambda));
  return worst;
}

inline double rational_objective(const ShiftSequence& shifts, std::span<const Complex> spectrum) {
  return rational_objective(std::span<const Complex>(shifts.shifts), spectrum);
}

// ---------------------------------------------------------------------------
// Krylov Ritz values

using LinearOperator = std::function<VectorXd(const VectorXd&)>;

/// Ritz values from `steps` Arnoldi steps (modified Gram–Schmidt with one
/// reorthogonalisation). Stops early on breakdown.
inline std::vector<Complex> arnoldi_ritz_values(const LinearOperator& op, VectorXd start, Index steps) {
  std::vector<Complex> ritz;
  if (steps <= 0) return ritz;
  const Index n = start.size();
  steps = std::min(steps, n);
  MatrixXd basis(n, steps + 1);
  MatrixXd hess = MatrixXd::Zero(steps + 1, steps);
  basis.col(0) = start / start.norm();
  Index done = 0;
  for (Index j = 0; j < steps; ++j) {
    VectorXd w = op(basis.col(j));
    const double wnorm = w.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (Index i = 0; i <= j; ++i) {
        const double h = basis.col(i).dot(w);
        hess(i, j) += h;
        w -= h * basis.col(i);
      }
    hess(j + 1, j) = w.norm();
    done = j + 1;
    if (!(hess(j + 1, j) > 1e-12 * std::max(1.0, wnorm))) break;
    basis.col(j + 1) = w / hess(j + 1, j);
  }
  Eigen::EigenSolver<MatrixXd> es(hess.topLeftCorner(done, done), false);
  for (Index i = 0; i < done; ++i) ritz.push_back(es.eigenvalues()(i));
  return ritz;
}

/// Real operators of the (E-transformed) problem: Ã = AE^{-1}, its inverse,
/// and the Hamiltonian ℋ = [Ã, −BB*; −C̃*C̃, −Ã*] with its inverse via
/// Sherman–Morrison–Woodbury around blkdiag(Ã, −Ã*).
class RealProblemOperators {
 public:
  explicit RealProblemOperators(const CareProblem& problem) : problem_(problem) {
    a_lu_.compute(problem.A);
    if (a_lu_.info() != Eigen::Success) throw Error(ErrorKind::numerical, "A is singular");
    at_ = problem.A.transpose();
    at_lu_.compute(at_);
    if (at_lu_.info() != Eigen::Success) throw Error(ErrorKind::numerical, "A is singular");
    if (problem.E) {
      e_lu_.compute(*problem.E);
      et_ = problem.E->transpose();
      et_lu_.compute(et_);
      if (e_lu_.info() != Eigen::Success || et_lu_.info() != Eigen::Success)
        throw Error(ErrorKind::numerical, "E is singular");
    }
  }

  Index n() const { return problem_.n(); }

  VectorXd a(const VectorXd& x) { return problem_.A * e_inv(x); }
  VectorXd a_inv(const VectorXd& x) { return e(a_lu_.solve(x)); }
  VectorXd at(const VectorXd& x) { return et_inv(at_ * x); }
  VectorXd at_inv(const VectorXd& x) { return at_lu_.solve(et(x)); }

  VectorXd hamiltonian(const VectorXd& x) {
    const Index n = this->n();
    const VectorXd x1 = x.head(n), x2 = x.tail(n);
    VectorXd y(2 * n);
    y.head(n) = a(x1) - problem_.B * (problem_.B.transpose() * x2);
    const VectorXd cx = problem_.C * e_inv(x1);
    y.tail(n) = -et_inv(problem_.C.transpose() * cx) - at(x2);
    return y;
  }

  VectorXd hamiltonian_inv(const VectorXd& rhs) {
    if (!smw_ready_) prepare_smw();
    const VectorXd y0 = h0_inv(rhs);
    const VectorXd coeff = smw_lu_.solve(right_t(y0));
    return y0 - h0_inv_l_ * coeff;
  }

 private:
  VectorXd e(const VectorXd& x) const { return problem_.E ? VectorXd(*problem_.E * x) : x; }
  VectorXd et(const VectorXd& x) const { return problem_.E ? VectorXd(et_ * x) : x; }
  VectorXd e_inv(const VectorXd& x) { return problem_.E ? VectorXd(e_lu_.solve(x)) : x; }
  VectorXd et_inv(const VectorXd& x) { return problem_.E ? VectorXd(et_lu_.solve(x)) : x; }

  // blkdiag(Ã, −Ã*)^{-1}
  VectorXd h0_inv(const VectorXd& x) {
    const Index n = this->n();
    VectorXd y(2 * n);
    y.head(n) = a_inv(x.head(n));
    y.tail(n) = -at_inv(x.tail(n));
    return y;
  }

  // R^T x with ℋ = H0 + L R^T, L = [−B 0; 0 −C̃*], R^T = [0 B*; C̃ 0].
  VectorXd right_t(const VectorXd& x) {
    const Index n = this->n(), q = problem_.q(), p = problem_.p();
    VectorXd y(q + p);
    y.head(q) = problem_.B.transpose() * x.tail(n);
    y.tail(p) = problem_.C * e_inv(x.head(n));
    return y;
  }

  void prepare_smw() {
    const Index n = this->n(), q = problem_.q(), p = problem_.p();
    MatrixXd l = MatrixXd::Zero(2 * n, q + p);
    l.topLeftCorner(n, q) = -problem_.B;
    for (Index j = 0; j < p; ++j) l.col(q + j).tail(n) = -et_inv(problem_.C.row(j).transpose());
    h0_inv_l_.resize(2 * n, q + p);
    for (Index j = 0; j < q + p; ++j) h0_inv_l_.col(j) = h0_inv(l.col(j));
    MatrixXd cap = MatrixXd::Identity(q + p, q + p);
    for (Index j = 0; j < q + p; ++j) cap.col(j) += right_t(h0_inv_l_.col(j));
    smw_lu_.compute(cap);
    smw_ready_ = true;
  }

  const CareProblem& problem_;
  Eigen::SparseLU<SparseMatrix> a_lu_, at_lu_, e_lu_, et_lu_;
  SparseMatrix at_, et_;
  bool smw_ready_ = false;
  MatrixXd h0_inv_l_;
  Eigen::PartialPivLU<MatrixXd> smw_lu_;
};

// ---------------------------------------------------------------------------
// Penzl-type precomputed shifts

enum class PenzlMode { on_A, on_H };

struct PenzlOptions {
  Index m = 10;
  Index m1 = 20;
  Index m2 = 10;
  PenzlMode mode = PenzlMode::on_A;
  /// When > 0, log-spaced real candidates spanning the candidate set's
  /// real parts are added to the shifts the greedy search may pick.
  Index candidate_grid = 0;
};

namespace detail {

inline std::vector<Complex> dedupe(std::vector<Complex> values, double rel_tol = 1e-10) {
  std::vector<Complex> out;
  for (Complex z : values) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](Complex w) {
      return std::abs(w - z) <= rel_tol * std::max(std::abs(w), std::abs(z));
    });
    if (!dup) out.push_back(z);
  }
  return out;
}

inline Complex snap_real(Complex z) {
  return std::abs(z.imag()) <= 1e-10 * std::abs(z) ? Complex(z.real(), 0.0) : z;
}

}  // namespace detail

/// Greedy min–max selection over a candidate set (Penzl's heuristic):
/// the first shift minimises the objective over `spectrum` on its own; each
/// further shift is the spectrum point where the current product is
/// largest. Complex picks bring their conjugate along.
inline ShiftSequence select_shifts_greedy(std::span<const Complex> spectrum,
                                          std::span<const Complex> extra_candidates, Index m) {
  ShiftSequence out;
  if (spectrum.empty() || m <= 0) return out;

  std::vector<Complex> candidates(spectrum.begin(), spectrum.end());
  candidates.insert(candidates.end(), extra_candidates.begin(), extra_candidates.end());

  auto add = [&](Complex z) {
    z = detail::snap_real(z);
    out.shifts.push_back(z);
    if (z.imag() != 0.0) out.shifts.push_back(std::conj(z));
  };

  // Seed: best single shift (a conjugate pair counts as one choice).
  Complex best = candidates.front();
  double best_value = std::numeric_limits<double>::infinity();
  for (Complex c : candidates) {
    c = detail::snap_real(c);
    std::vector<Complex> trial{c};
    if (c.imag() != 0.0) {
      if (m < 2) continue;
      trial.push_back(std::conj(c));
    }
    const double v = rational_objective(std::span<const Complex>(trial), spectrum);
    if (v < best_value) {
      best_value = v;
      best = c;
    }
  }
  if (!std::isfinite(best_value)) return out;
  add(best);

  while (static_cast<Index>(out.size()) < m) {
    const Index room = m - static_cast<Index>(out.size());
    double worst = 0.0;
    std::optional<Complex> pick;
    for (Complex lambda : spectrum) {
      lambda = detail::snap_real(lambda);
      if (lambda.imag() != 0.0 && room < 2) continue;
      const double v = rational_factor_product(out.shifts, lambda);
      if (v > worst) {
        worst = v;
        pick = lambda;
      }
    }
    if (!pick || worst <= 0.0) break;
    add(*pick);
  }
  return out;
}

/// Shifts from Ritz values of Ã (mode on_A, mirrored into the right half
/// plane) or of ℋ (mode on_H, right-half-plane Ritz values), computed from
/// Krylov spaces of size m1 with the operator and m2 with its inverse.
inline ShiftSequence penzl_shifts(const CareProblem& problem, const PenzlOptions& opt = {}) {
  if (opt.m < 1) throw Error(ErrorKind::invalid_argument, "penzl: m must be >= 1");
  if (opt.m1 < 0 || opt.m2 < 0 || opt.m > opt.m1 + opt.m2)
    throw Error(ErrorKind::invalid_argument, "penzl: require m <= m1 + m2");

  RealProblemOperators ops(problem);
  std::vector<Complex> ritz;
  if (opt.mode == PenzlMode::on_A) {
    const VectorXd start = VectorXd::Ones(problem.n());
    auto fwd = arnoldi_ritz_values([&](const VectorXd& x) { return ops.a(x); }, start, opt.m1);
    auto inv = arnoldi_ritz_values([&](const VectorXd& x) { return ops.a_inv(x); }, start, opt.m2);
    for (Complex t : fwd) ritz.push_back(t);
    for (Complex t : inv)
      if (std::abs(t) > 0.0) ritz.push_back(1.0 / t);
  } else {
    const VectorXd start = VectorXd::Ones(2 * problem.n());
    auto fwd = arnoldi_ritz_values([&](const VectorXd& x) { return ops.hamiltonian(x); }, start, opt.m1);
    auto inv = arnoldi_ritz_values([&](const VectorXd& x) { return ops.hamiltonian_inv(x); }, start,
                                   opt.m2);
    for (Complex t : fwd) ritz.push_back(t);
    for (Complex t : inv)
      if (std::abs(t) > 0.0) ritz.push_back(1.0 / t);
  }

  // Candidate set in the right half plane.
  std::vector<Complex> spectrum;
  for (Complex t : ritz) {
    if (opt.mode == PenzlMode::on_A) {
      if (t.real() < 0.0) spectrum.push_back(-std::conj(t));
    } else if (t.real() > 0.0) {
      spectrum.push_back(t);
    }
  }
  // Close under conjugation so the selection is too.
  const std::size_t base = spectrum.size();
  for (std::size_t i = 0; i < base; ++i)
    if (spectrum[i].imag() != 0.0) spectrum.push_back(std::conj(spectrum[i]));
  spectrum = detail::dedupe(std::move(spectrum));
  if (spectrum.empty())
    throw Error(ErrorKind::numerical, "penzl: no Ritz value with admissible sign");

  std::vector<Complex> grid;
  if (opt.candidate_grid > 1) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Complex z : spectrum) {
      lo = std::min(lo, z.real());
      hi = std::max(hi, std::abs(z));
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    for (Index i = 0; i < opt.candidate_grid; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(opt.candidate_grid - 1);
      grid.emplace_back(std::exp(llo + t * (lhi - llo)), 0.0);
    }
  }

  ShiftSequence out = select_shifts_greedy(spectrum, grid, opt.m);
  out.origin = opt.mode == PenzlMode::on_A ? ShiftOrigin::penzl_A : ShiftOrigin::penzl_H;
  if (static_cast<Index>(out.size()) < opt.m)
    out.warnings.push_back("penzl: only " + std::to_string(out.size()) + " of " +
                           std::to_string(opt.m) + " shifts available");
  return out;
}

// ---------------------------------------------------------------------------
// Adaptive poles from Ritz values on the current space

enum class AdaptiveMode { plain, stabilized };

/// Real interval [s_min, s_max] from an a-priori spectral estimate of the
/// mirrored spectrum; always part of the candidate region.
struct PoleRegion {
  double s_min = 1.0;
  double s_max = 1.0;
};

struct AdaptivePole {
  Complex pole;
  bool fallback = false;
  /// Ritz values of the projected operator (left half plane when stable).
  std::vector<Complex> ritz;
};

/// Ritz values of Ã − BB*X̂ on Range(basis) (of Ã when X̂ is absent).
/// The basis need not be orthonormal.
inline std::vector<Complex> projected_ritz_values(const MatrixXc& basis, ShiftedSolver& ops,
                                                  const CareProblem& problem,
                                                  const FactoredHermitian* current) {
  const MatrixXc q = orthonormal_basis(basis);
  const MatrixXc atq = ops.solve_adjoint_e(ops.apply_adjoint_a(q));
  MatrixXc projected = (q.adjoint() * atq).adjoint();
  if (current && current->factor.cols() > 0) {
    const MatrixXc b = problem.B.cast<Complex>();
    projected -= (q.adjoint() * b) *
                 ((b.adjoint() * current->factor) * current->core * (current->factor.adjoint() * q));
  }
  Eigen::ComplexEigenSolver<MatrixXc> es(projected, false);
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

namespace detail {

inline double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

// Andrew's monotone chain; returns hull vertices counter-clockwise.
inline std::vector<Complex> convex_hull(std::vector<Complex> pts) {
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  if (pts.size() < 3) return pts;
  std::vector<Complex> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace detail

/// Candidate points on the boundary of the region spanned by the mirrored
/// Ritz values and [s_min, s_max].
inline std::vector<Complex> pole_candidates(std::span<const Complex> mirrored, PoleRegion region) {
  std::vector<Complex> pts(mirrored.begin(), mirrored.end());
  pts.emplace_back(region.s_min, 0.0);
  pts.emplace_back(region.s_max, 0.0);
  double max_abs = 0.0, max_imag = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Complex z : pts) {
    max_abs = std::max(max_abs, std::abs(z));
    max_imag = std::max(max_imag, std::abs(z.imag()));
    lo = std::min(lo, z.real());
    hi = std::max(hi, z.real());
  }
  std::vector<Complex> out;
  constexpr Index kRealSamples = 400;
  if (max_imag <= 1e-8 * max_abs) {
    const double llo = std::log(lo), lhi = std::log(hi);
    for (Index i = 0; i < kRealSamples; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(kRealSamples - 1);
      out.emplace_back(std::exp(llo + t * (lhi - llo)), 0.0);
    }
    for (Complex z : mirrored) out.emplace_back(z.real(), 0.0);
    return out;
  }
  const std::size_t base = pts.size();
  for (std::size_t i = 0; i < base; ++i) pts.push_back(std::conj(pts[i]));
  const auto hull = detail::convex_hull(pts);
  constexpr int kEdgeSamples = 25;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex a = hull[i], b = hull[(i + 1) % hull.size()];
    for (int s = 0; s < kEdgeSamples; ++s) out.push_back(a + (b - a) * (static_cast<double>(s) / kEdgeSamples));
  }
  return out;
}

/// Next pole for a rational Krylov space: maximiser over the candidate
/// region of ∏_j |z − α_j| / ∏_i |z − θ_i|, with α_j the poles used so far
/// and θ_i the (stable) Ritz values of Ã (plain) or Ã − BB*X̂
/// (stabilized) on the current space.
inline AdaptivePole adaptive_pole(const MatrixXc& basis, const CareProblem& problem, ShiftedSolver& ops,
                                  const FactoredHermitian* current, std::span<const Complex> existing_poles,
                                  AdaptiveMode mode, PoleRegion region) {
  AdaptivePole result;
  const FactoredHermitian* used = mode == AdaptiveMode::stabilized ? current : nullptr;
  result.ritz = projected_ritz_values(basis, ops, problem, used);

  std::vector<Complex> stable, mirrored;
  for (Complex t : result.ritz)
    if (t.real() < 0.0) {
      stable.push_back(t);
      mirrored.push_back(-std::conj(t));
    }
  if (mirrored.empty()) {
    result.fallback = true;
    result.pole = existing_poles.empty() ? Complex(region.s_max, 0.0) : existing_poles.back();
    return result;
  }

  double best = -std::numeric_limits<double>::infinity();
  for (Complex z : pole_candidates(mirrored, region)) {
    double log_value = 0.0;
    for (Complex alpha : existing_poles) log_value += std::log(std::abs(z - alpha) + 1e-300);
    for (Complex t : stable) log_value -= std::log(std::abs(z - t));
    if (log_value > best) {
      best = log_value;
      result.pole = z;
    }
  }
  result.pole = detail::snap_real(result.pole);
  if (!(result.pole.real() > 0.0)) {
    result.fallback = true;
    result.pole = existing_poles.empty() ? Complex(region.s_max, 0.0) : existing_poles.back();
  }
  return result;
}

/// [s_min, s_max] from a few Arnoldi steps with Ã and Ã^{-1}.
inline PoleRegion estimate_pole_region(const CareProblem& problem, Index steps = 10) {
  RealProblemOperators ops(problem);
  const VectorXd start = VectorXd::Ones(problem.n());
  std::vector<Complex> ritz = arnoldi_ritz_values([&](const VectorXd& x) { return ops.a(x); }, start, steps);
  for (Complex t : arnoldi_ritz_values([&](const VectorXd& x) { return ops.a_inv(x); }, start, steps))
    if (std::abs(t) > 0.0) ritz.push_back(1.0 / t);
  PoleRegion region{std::numeric_limits<double>::infinity(), 0.0};
  for (Complex t : ritz)
    if (t.real() < 0.0) {
      region.s_min = std::min(region.s_min, -t.real());
      region.s_max = std::max(region.s_max, std::abs(t));
    }
  if (!(region.s_max > 0.0)) throw Error(ErrorKind::numerical, "no stable Ritz values to seed poles");
  return region;
}

}  // namespace riccati_si
