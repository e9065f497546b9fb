#pragma once

#include <vector>

#include "contain/matrix.hpp"

namespace contain {

/// Eigen-decomposition of a symmetric matrix. `values` ascending; column k of
/// `vectors` pairs with values[k] and has its largest-magnitude entry positive.
struct SymEigResult {
  Vector values;
  Matrix vectors;

  [[nodiscard]] double min() const { return values.front(); }
  [[nodiscard]] double max() const { return values.back(); }
};

/// Cyclic Jacobi eigensolver. Throws NotSymmetric if any |s(i,j) - s(j,i)|
/// exceeds the symmetry tolerance.
[[nodiscard]] SymEigResult sym_eigs(const Matrix& s);

[[nodiscard]] double lambda_max(const Matrix& s);
[[nodiscard]] double lambda_min(const Matrix& s);

/// Gaussian elimination with partial pivoting; rhs may hold several columns.
/// Throws Singular if a pivot falls below pivot_floor * ||a||_F.
[[nodiscard]] Matrix solve_linear(const Matrix& a, const Matrix& rhs);
[[nodiscard]] Matrix inverse(const Matrix& a);

/// Solves f X + X f^T + q = 0 through the Kronecker-vectorized system
/// (I ⊗ f + f ⊗ I) vec(X) = -vec(q). Throws Singular when f and -f share an
/// eigenvalue.
[[nodiscard]] Matrix lyap_solve(const Matrix& f, const Matrix& q);

/// Lyapunov test: f^T W + W f = -I solvable with W positive definite.
[[nodiscard]] bool is_hurwitz(const Matrix& f);

/// Numerical rank by fully pivoted elimination, tolerance rank_rel_tol * max|m|.
[[nodiscard]] std::size_t matrix_rank(const Matrix& m);

/// [b, a b, ..., a^{n-1} b]
[[nodiscard]] Matrix controllability_matrix(const Matrix& a, const Matrix& b);
[[nodiscard]] bool is_controllable(const Matrix& a, const Matrix& b);

struct CareSolution {
  Matrix x;
  /// Frobenius residual after each Newton–Kleinman iterate.
  std::vector<double> residuals;
};

/// ||a^T x + x a - x b b^T x + q||_F
[[nodiscard]] double care_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& x);

/// Stabilizing solution of a^T X + X a - X b b^T X + q = 0. Bass
/// initialization followed by Newton–Kleinman. Throws NotControllable or
/// NoConvergence.
[[nodiscard]] CareSolution care_solve_detailed(const Matrix& a, const Matrix& b, const Matrix& q);
[[nodiscard]] Matrix care_solve(const Matrix& a, const Matrix& b, const Matrix& q);

}  // namespace contain
