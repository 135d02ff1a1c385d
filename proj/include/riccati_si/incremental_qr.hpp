#pragma once

#include <vector>

#include "core.hpp"

namespace riccati_si {

/// Thin QR factorisation W = QR that grows by appending columns.
///
/// Each new column is orthogonalised twice against the current Q
/// (classical Gram–Schmidt with one reorthogonalisation). A column whose
/// remainder falls below drop_tol·‖column‖ adds no direction to Q; its R
/// column then carries only the projection coefficients, so R is
/// rank × cols and W = QR still holds.
class IncrementalQR {
 public:
  explicit IncrementalQR(Index rows, double drop_tol = 1e-14)
      : rows_(rows), drop_tol_(drop_tol), q_(rows, 0), r_(0, 0) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index rank() const { return rank_; }

  auto q() const { return q_.leftCols(rank_); }
  auto r() const { return r_.topLeftCorner(rank_, cols_); }

  /// Number of columns of the most recent append() that were dropped.
  Index last_dropped() const { return last_dropped_; }

  void append(const MatrixXc& columns) {
    last_dropped_ = 0;
    reserve(cols_ + columns.cols());
    for (Index j = 0; j < columns.cols(); ++j) append_column(columns.col(j));
  }

 private:
  void reserve(Index needed) {
    if (needed <= q_.cols()) return;
    Index cap = std::max<Index>(needed, 2 * q_.cols());
    q_.conservativeResize(rows_, cap);
    MatrixXc r = MatrixXc::Zero(cap, cap);
    r.topLeftCorner(r_.rows(), r_.cols()) = r_;
    r_ = std::move(r);
  }

  void append_column(const VectorXc& column) {
    VectorXc v = column;
    const double original = v.norm();
    VectorXc coeffs = VectorXc::Zero(rank_);
    if (rank_ > 0) {
      for (int pass = 0; pass < 2; ++pass) {
        const VectorXc h = q_.leftCols(rank_).adjoint() * v;
        v.noalias() -= q_.leftCols(rank_) * h;
        coeffs += h;
      }
    }
    const double remainder = v.norm();
    r_.col(cols_).head(rank_) = coeffs;
    if (original > 0.0 && remainder > drop_tol_ * original) {
      q_.col(rank_) = v / remainder;
      r_(rank_, cols_) = remainder;
      ++rank_;
    } else {
      ++last_dropped_;
    }
    ++cols_;
  }

  Index rows_;
  double drop_tol_;
  Index cols_ = 0;
  Index rank_ = 0;
  Index last_dropped_ = 0;
  MatrixXc q_;
  MatrixXc r_;
};

}  // namespace riccati_si
