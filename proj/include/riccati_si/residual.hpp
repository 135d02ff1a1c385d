#pragma once

#include <vector>

#include "core.hpp"
#include "incremental_qr.hpp"
#include "problem.hpp"
#include "shifted_solver.hpp"

namespace riccati_si {

/// Frobenius norm of the Riccati residual
///   A*XE + E*XA − E*XBB*XE + C*C,   X = V S V*,
/// without forming any n×n matrix. Keeps an incremental QR of
/// [C*, A*V, E*V] (columns appended block by block as V grows) and
/// evaluates ‖R_W M R_W*‖_F with the 3×3 block middle matrix
///   [ I  0      0            ]
///   [ 0  0      S            ]
///   [ 0  S  −S V*BB*V S      ].
class ResidualTracker {
 public:
  explicit ResidualTracker(const CareProblem& problem)
      : p_(problem.p()), qr_(problem.n()) {
    qr_.append(problem.C.transpose().cast<Complex>());
  }

  /// Registers new basis columns V_new; a_block = A*V_new, e_block = E*V_new.
  void append(const MatrixXc& a_block, const MatrixXc& e_block) {
    const Index width = a_block.cols();
    const Index start = qr_.cols();
    qr_.append(a_block);
    qr_.append(e_block);
    blocks_.push_back({start, start + width, width});
    basis_cols_ += width;
  }

  void append(const ShiftedSolver& ops, const MatrixXc& v_new) {
    append(ops.apply_adjoint_a(v_new), ops.apply_adjoint_e(v_new));
  }

  Index basis_cols() const { return basis_cols_; }
  const IncrementalQR& qr() const { return qr_; }

  /// `core` is S (m×m Hermitian), `bt_v` is B*V (q×m).
  double norm(const MatrixXc& core, const MatrixXc& bt_v) const {
    const Index m = basis_cols_;
    if (core.rows() != m || core.cols() != m || bt_v.cols() != m)
      throw Error(ErrorKind::dimension_mismatch, "residual core does not match basis size");
    const auto r = qr_.r();
    const Index rank = r.rows();

    MatrixXc rc = r.leftCols(p_);
    MatrixXc ra(rank, m), re(rank, m);
    Index offset = 0;
    for (const auto& b : blocks_) {
      ra.middleCols(offset, b.width) = r.middleCols(b.a_start, b.width);
      re.middleCols(offset, b.width) = r.middleCols(b.e_start, b.width);
      offset += b.width;
    }
    const MatrixXc z = re * core;
    const MatrixXc zb = z * bt_v.adjoint();
    MatrixXc middle = rc * rc.adjoint();
    middle.noalias() += ra * z.adjoint();
    middle.noalias() += z * ra.adjoint();
    middle.noalias() -= zb * zb.adjoint();
    return middle.norm();
  }

 private:
  struct Block {
    Index a_start;
    Index e_start;
    Index width;
  };

  Index p_;
  IncrementalQR qr_;
  std::vector<Block> blocks_;
  Index basis_cols_ = 0;
};

/// Dense residual A*XE + E*XA − E*XBB*XE + C*C, for small n only.
inline MatrixXc dense_residual(const CareProblem& problem, const MatrixXc& x) {
  const MatrixXc a = MatrixXd(problem.A).cast<Complex>();
  const MatrixXc e = problem.E ? MatrixXc(MatrixXd(*problem.E).cast<Complex>())
                               : MatrixXc::Identity(problem.n(), problem.n());
  const MatrixXc b = problem.B.cast<Complex>();
  const MatrixXc c = problem.C.cast<Complex>();
  const MatrixXc xe = x * e;
  const MatrixXc bxe = b.adjoint() * xe;
  return a.adjoint() * xe + xe.adjoint() * a - bxe.adjoint() * bxe + c.adjoint() * c;
}

}  // namespace riccati_si
