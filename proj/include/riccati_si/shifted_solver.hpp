#pragma once

#include <map>
#include <memory>
#include <optional>
#include <utility>

#include <Eigen/SparseLU>

#include "core.hpp"
#include "problem.hpp"

namespace riccati_si {

/// Solves with −A* + αE* for a sequence of shifts. One sparse LU per
/// distinct shift value, kept for the lifetime of the solver.
class ShiftedSolver {
 public:
  explicit ShiftedSolver(const CareProblem& problem)
      : at_(problem.A.transpose().cast<Complex>()) {
    at_.makeCompressed();
    if (problem.E) {
      et_ = SparseMatrixC(problem.E->transpose().cast<Complex>());
      et_->makeCompressed();
    }
  }

  ShiftedSolver(const ShiftedSolver&) = delete;
  ShiftedSolver& operator=(const ShiftedSolver&) = delete;

  Index n() const { return at_.rows(); }
  bool generalized() const { return et_.has_value(); }

  /// (−A* + αE*)^{-1} rhs
  MatrixXc solve(Complex alpha, const MatrixXc& rhs) {
    MatrixXc x = factor(alpha).solve(rhs);
    if (!x.allFinite())
      throw BreakdownError("shifted solve produced non-finite values at alpha = " +
                               format_complex(alpha),
                           alpha);
    return x;
  }

  MatrixXc apply_adjoint_a(const MatrixXc& x) const { return at_ * x; }

  MatrixXc apply_adjoint_e(const MatrixXc& x) const { return et_ ? MatrixXc(*et_ * x) : x; }

  /// E^{-*} x, identity when E is absent.
  MatrixXc solve_adjoint_e(const MatrixXc& x) {
    if (!et_) return x;
    if (!e_lu_) {
      e_lu_ = std::make_unique<Eigen::SparseLU<SparseMatrixC>>();
      e_lu_->compute(*et_);
      if (e_lu_->info() != Eigen::Success)
        throw Error(ErrorKind::numerical, "E is numerically singular");
    }
    return e_lu_->solve(x);
  }

  std::size_t factorization_count() const { return cache_.size(); }

 private:
  using Lu = Eigen::SparseLU<SparseMatrixC>;

  Lu& factor(Complex alpha) {
    const auto key = std::make_pair(alpha.real(), alpha.imag());
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;

    SparseMatrixC shifted = -at_;
    if (et_) {
      shifted += alpha * *et_;
    } else {
      SparseMatrixC eye(n(), n());
      eye.setIdentity();
      shifted += alpha * eye;
    }
    shifted.makeCompressed();
    auto lu = std::make_unique<Lu>();
    lu->analyzePattern(shifted);
    lu->factorize(shifted);
    if (lu->info() != Eigen::Success)
      throw BreakdownError("-A* + alpha E* is singular at alpha = " + format_complex(alpha), alpha);
    return *cache_.emplace(key, std::move(lu)).first->second;
  }

  SparseMatrixC at_;
  std::optional<SparseMatrixC> et_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrixC>> e_lu_;
  std::map<std::pair<double, double>, std::unique_ptr<Lu>> cache_;
};

}  // namespace riccati_si
