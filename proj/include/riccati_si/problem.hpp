#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"
#include "matrix_market.hpp"

namespace riccati_si {

/// A*XE + E*XA − E*XBB*XE + C*C = 0, with E = I when absent.
///
/// A and E are n×n sparse, B is n×q, C is p×n. Instances are treated as
/// immutable values once built.
struct CareProblem {
  SparseMatrix A;
  MatrixXd B;
  MatrixXd C;
  std::optional<SparseMatrix> E;

  Index n() const { return A.rows(); }
  Index p() const { return C.rows(); }
  Index q() const { return B.cols(); }
  bool generalized() const { return E.has_value(); }

  /// ‖C*C‖_F, the normalisation for relative residuals.
  double constant_term_norm() const { return (C * C.transpose()).norm(); }
};

inline bool operator==(const CareProblem& a, const CareProblem& b) {
  if (a.n() != b.n() || a.p() != b.p() || a.q() != b.q()) return false;
  if (a.E.has_value() != b.E.has_value()) return false;
  auto same_sparse = [](const SparseMatrix& x, const SparseMatrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x - y).norm() == 0.0;
  };
  if (!same_sparse(a.A, b.A)) return false;
  if (a.E && !same_sparse(*a.E, *b.E)) return false;
  return a.B == b.B && a.C == b.C;
}

struct ValidationReport {
  std::vector<std::string> warnings;
  /// Set only when the dense eigenvalue check ran.
  std::optional<bool> stable;
  std::optional<double> spectral_abscissa;
};

inline constexpr Index kStabilityCheckThreshold = 500;

/// Checks the shape contract (throws on violation) and, for small n, the
/// stability of A (or of the pencil (A, E)).
inline ValidationReport validate(const CareProblem& problem,
                                 Index stability_threshold = kStabilityCheckThreshold) {
  const Index n = problem.A.rows();
  if (n == 0) throw Error(ErrorKind::invalid_argument, "A is empty");
  if (problem.A.cols() != n)
    throw Error(ErrorKind::dimension_mismatch,
                "A is " + std::to_string(n) + "x" + std::to_string(problem.A.cols()) +
                    ", expected square");
  if (problem.B.rows() != n)
    throw Error(ErrorKind::dimension_mismatch,
                "A,B: B has " + std::to_string(problem.B.rows()) + " rows, A has " +
                    std::to_string(n));
  if (problem.C.cols() != n)
    throw Error(ErrorKind::dimension_mismatch,
                "A,C: C has " + std::to_string(problem.C.cols()) + " columns, A has " +
                    std::to_string(n));
  if (problem.B.cols() == 0 || problem.C.rows() == 0)
    throw Error(ErrorKind::invalid_argument, "B and C need at least one column/row");
  if (problem.E && (problem.E->rows() != n || problem.E->cols() != n))
    throw Error(ErrorKind::dimension_mismatch,
                "A,E: E is " + std::to_string(problem.E->rows()) + "x" +
                    std::to_string(problem.E->cols()) + ", A is " + std::to_string(n) + "x" +
                    std::to_string(n));

  ValidationReport report;
  if (4 * (problem.p() + problem.q()) > n)
    report.warnings.push_back("p+q = " + std::to_string(problem.p() + problem.q()) +
                              " exceeds n/4; low-rank iterations lose their advantage");

  if (n <= stability_threshold) {
    MatrixXd dense_a = MatrixXd(problem.A);
    if (problem.E) {
      const MatrixXd dense_e = MatrixXd(*problem.E);
      Eigen::PartialPivLU<MatrixXd> lu(dense_e.transpose());
      dense_a = lu.solve(dense_a.transpose()).transpose();  // A E^{-1}
    }
    Eigen::EigenSolver<MatrixXd> es(dense_a, false);
    const double abscissa = es.eigenvalues().real().maxCoeff();
    report.spectral_abscissa = abscissa;
    report.stable = abscissa < 0.0;
    if (!*report.stable)
      report.warnings.push_back("A is not stable (spectral abscissa " + std::to_string(abscissa) +
                                ")");
  }
  return report;
}

/// Scaled 5-point Laplacian on an m×m interior grid of the unit square,
/// Dirichlet boundary, h = 1/(m+1). B = ones, C = e_1^T.
inline CareProblem make_laplacian_problem(Index interior_points_per_side) {
  const Index m = interior_points_per_side;
  if (m < 1) throw Error(ErrorKind::invalid_argument, "interior_points_per_side must be >= 1");
  const Index n = m * m;
  const double h = 1.0 / static_cast<double>(m + 1);
  const double s = 1.0 / (h * h);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(5 * n));
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      const Index k = j * m + i;
      trips.emplace_back(k, k, -4.0 * s);
      if (i > 0) trips.emplace_back(k, k - 1, s);
      if (i + 1 < m) trips.emplace_back(k, k + 1, s);
      if (j > 0) trips.emplace_back(k, k - m, s);
      if (j + 1 < m) trips.emplace_back(k, k + m, s);
    }
  }
  CareProblem problem;
  problem.A.resize(n, n);
  problem.A.setFromTriplets(trips.begin(), trips.end());
  problem.B = MatrixXd::Ones(n, 1);
  problem.C = MatrixXd::Zero(1, n);
  problem.C(0, 0) = 1.0;
  return problem;
}

struct ToeplitzOptions {
  /// Use B/‖B‖ instead of the all-ones vector.
  bool normalize_b = false;
  /// Keep the displayed band matrix (positive diagonal, unstable) instead of
  /// its negation.
  bool raw_sign = false;
};

/// Banded Toeplitz test matrix: 2.5 on the diagonal, 1 on superdiagonals
/// 1–3, −1 on subdiagonal 1. Stored negated unless raw_sign is set, so that
/// A is stable. C = [1, −2, 1, −2, …], B = ones.
inline CareProblem make_toeplitz_problem(Index n, ToeplitzOptions options = {}) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  const double sign = options.raw_sign ? 1.0 : -1.0;
  std::vector<Eigen::Triplet<double>> trips;
  for (Index i = 0; i < n; ++i) {
    trips.emplace_back(i, i, sign * 2.5);
    for (Index d = 1; d <= 3; ++d)
      if (i + d < n) trips.emplace_back(i, i + d, sign * 1.0);
    if (i >= 1) trips.emplace_back(i, i - 1, sign * -1.0);
  }
  CareProblem problem;
  problem.A.resize(n, n);
  problem.A.setFromTriplets(trips.begin(), trips.end());
  problem.B = MatrixXd::Ones(n, 1);
  if (options.normalize_b) problem.B /= std::sqrt(static_cast<double>(n));
  problem.C.resize(1, n);
  for (Index j = 0; j < n; ++j) problem.C(0, j) = (j % 2 == 0) ? 1.0 : -2.0;
  return problem;
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

}  // namespace detail

/// A = D + N, D diagonal in [−10, −0.1], N strictly lower triangular with
/// ‖N‖_F < 0.05, so A is stable and passive (symmetric part negative
/// definite). B and C have entries in [−1, 1).
inline CareProblem random_stable_problem(Index n, Index p, Index q, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  if (p < 1 || p > n || q < 1 || q > n)
    throw Error(ErrorKind::invalid_argument, "require 1 <= p, q <= n");
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Triplet<double>> trips;
  for (Index i = 0; i < n; ++i) trips.emplace_back(i, i, detail::uniform(rng, -10.0, -0.1));
  const double scale = 0.05 / static_cast<double>(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) trips.emplace_back(i, j, scale * detail::uniform(rng, -1.0, 1.0));

  CareProblem problem;
  problem.A.resize(n, n);
  problem.A.setFromTriplets(trips.begin(), trips.end());
  problem.B.resize(n, q);
  for (Index j = 0; j < q; ++j)
    for (Index i = 0; i < n; ++i) problem.B(i, j) = detail::uniform(rng, -1.0, 1.0);
  problem.C.resize(p, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < p; ++i) problem.C(i, j) = detail::uniform(rng, -1.0, 1.0);
  return problem;
}

/// Adds E = I + perturbation with ‖perturbation‖_F ≤ `size`, diagonal
/// dominance keeps E nonsingular for size < 1.
inline CareProblem with_random_mass_matrix(CareProblem problem, double size, std::uint64_t seed) {
  const Index n = problem.n();
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Triplet<double>> trips;
  const double entry = size / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    trips.emplace_back(i, i, 1.0);
    if (i + 1 < n) trips.emplace_back(i, i + 1, entry * detail::uniform(rng, -1.0, 1.0));
    if (i >= 1) trips.emplace_back(i, i - 1, entry * detail::uniform(rng, -1.0, 1.0));
  }
  SparseMatrix e(n, n);
  e.setFromTriplets(trips.begin(), trips.end());
  problem.E = std::move(e);
  return problem;
}

struct ProblemPaths {
  std::filesystem::path A, B, C;
  std::optional<std::filesystem::path> E;
};

inline ProblemPaths default_problem_paths(const std::filesystem::path& directory, bool with_e) {
  ProblemPaths paths{directory / "A.mtx", directory / "B.mtx", directory / "C.mtx", std::nullopt};
  if (with_e) paths.E = directory / "E.mtx";
  return paths;
}

inline void save_problem(const CareProblem& problem, const ProblemPaths& paths) {
  mm::write_sparse(paths.A, problem.A);
  mm::write_dense(paths.B, problem.B);
  mm::write_dense(paths.C, problem.C);
  if (problem.E) {
    if (!paths.E) throw Error(ErrorKind::invalid_argument, "problem has E but no path was given");
    mm::write_sparse(*paths.E, *problem.E);
  }
}

inline CareProblem load_problem(const ProblemPaths& paths) {
  CareProblem problem;
  problem.A = mm::read_sparse(paths.A);
  problem.B = mm::read_dense(paths.B);
  problem.C = mm::read_dense(paths.C);
  if (paths.E) {
    SparseMatrix e = mm::read_sparse(*paths.E);
    if (e.rows() == e.cols() && e.rows() == problem.A.rows()) {
      VectorXd row_mass = VectorXd::Zero(e.rows());
      VectorXd col_mass = VectorXd::Zero(e.cols());
      for (Index k = 0; k < e.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(e, k); it; ++it) {
          row_mass(it.row()) += std::abs(it.value());
          col_mass(it.col()) += std::abs(it.value());
        }
      for (Index i = 0; i < e.rows(); ++i)
        if (row_mass(i) == 0.0 || col_mass(i) == 0.0)
          throw Error(ErrorKind::invalid_argument,
                      "E is structurally singular: empty row/column " + std::to_string(i + 1));
    }
    problem.E = std::move(e);
  }
  validate(problem, 0);
  return problem;
}

}  // namespace riccati_si
