#include "contain/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "contain/error.hpp"
#include "contain/numeric_settings.hpp"

namespace contain {
namespace {

void require_finite(const Matrix& m, const char* op) {
  if (!m.all_finite()) throw Error(ErrorCode::NonFinite, std::string(op) + ": non-finite input");
}

void require_square(const Matrix& m, const char* op) {
  if (!m.is_square() || m.empty()) throw Error(ErrorCode::DimensionMismatch, std::string(op) + ": matrix not square");
}

void require_symmetric(const Matrix& m, const char* op) {
  require_square(m, op);
  const double asym = asymmetry(m);
  if (asym > numeric_settings().symmetry_tol) {
    throw Error(ErrorCode::NotSymmetric, std::string(op) + ": asymmetry " + std::to_string(asym));
  }
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

SymEigResult sym_eigs(const Matrix& s) {
  require_finite(s, "sym_eigs");
  require_symmetric(s, "sym_eigs");
  const auto& cfg = numeric_settings();
  const std::size_t n = s.rows();

  Matrix a = symmetrize(s);
  Matrix v = Matrix::identity(n);
  const double scale = frobenius_norm(a);
  const double stop = 0.01 * cfg.eig_rel_tol * scale;

  int sweep = 0;
  while (off_diagonal_norm(a) > stop) {
    if (++sweep > cfg.jacobi_max_sweeps) throw Error(ErrorCode::NoConvergence, "sym_eigs: sweep limit");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing a(p,q): tan(2θ) = 2 a_pq / (a_qq - a_pp).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymEigResult out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(lead, src))) lead = r;
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = sign * v(r, src);
  }
  return out;
}

double lambda_max(const Matrix& s) { return sym_eigs(s).max(); }
double lambda_min(const Matrix& s) { return sym_eigs(s).min(); }

Matrix solve_linear(const Matrix& a, const Matrix& rhs) {
  require_square(a, "solve_linear");
  require_finite(a, "solve_linear");
  require_finite(rhs, "solve_linear");
  if (rhs.rows() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "solve_linear: rhs rows");

  const std::size_t n = a.rows();
  const std::size_t m = rhs.cols();
  const double floor = numeric_settings().pivot_floor * frobenius_norm(a);
  Matrix lu = a;
  Matrix x = rhs;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(lu(r, k)) > std::abs(lu(piv, k))) piv = r;
    if (!(std::abs(lu(piv, k)) >= floor) || lu(piv, k) == 0.0) {
      throw Error(ErrorCode::Singular, "solve_linear: pivot below floor at column " + std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(k, c), lu(piv, c));
      for (std::size_t c = 0; c < m; ++c) std::swap(x(k, c), x(piv, c));
    }
    const double inv = 1.0 / lu(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = lu(r, k) * inv;
      if (f == 0.0) continue;
      lu(r, k) = 0.0;
      for (std::size_t c = k + 1; c < n; ++c) lu(r, c) -= f * lu(k, c);
      for (std::size_t c = 0; c < m; ++c) x(r, c) -= f * x(k, c);
    }
  }

  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t c = 0; c < m; ++c) {
      double acc = x(k, c);
      for (std::size_t j = k + 1; j < n; ++j) acc -= lu(k, j) * x(j, c);
      x(k, c) = acc / lu(k, k);
    }
  }
  return x;
}

Matrix inverse(const Matrix& a) { return solve_linear(a, Matrix::identity(a.rows())); }

Matrix lyap_solve(const Matrix& f, const Matrix& q) {
  require_square(f, "lyap_solve");
  require_finite(f, "lyap_solve");
  require_finite(q, "lyap_solve");
  if (q.rows() != f.rows() || !q.is_square()) throw Error(ErrorCode::DimensionMismatch, "lyap_solve: q shape");
  require_symmetric(q, "lyap_solve");

  const std::size_t n = f.rows();
  const Matrix eye = Matrix::identity(n);
  const Matrix op = kron(eye, f) + kron(f, eye);

  // Column-major vec: entry (i, j) lives at j*n + i.
  Matrix rhs(n * n, 1);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) rhs(j * n + i, 0) = -q(i, j);

  Matrix vec_x;
  try {
    vec_x = solve_linear(op, rhs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Singular) throw;
    throw Error(ErrorCode::Singular, "lyap_solve: f and -f share an eigenvalue");
  }

  Matrix x(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) x(i, j) = vec_x(j * n + i, 0);
  return symmetrize(x);
}

bool is_hurwitz(const Matrix& f) {
  require_square(f, "is_hurwitz");
  require_finite(f, "is_hurwitz");
  try {
    const Matrix w = lyap_solve(f.transpose(), Matrix::identity(f.rows()));
    return lambda_min(w) > numeric_settings().hurwitz_min_eig;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Singular || e.code() == ErrorCode::NoConvergence) return false;
    throw;
  }
}

std::size_t matrix_rank(const Matrix& m) {
  require_finite(m, "matrix_rank");
  const double scale = max_abs(m);
  if (scale == 0.0) return 0;
  const double tol = numeric_settings().rank_rel_tol * scale;

  Matrix w = m;
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  std::size_t rank = 0;
  for (; rank < std::min(rows, cols); ++rank) {
    std::size_t pr = rank;
    std::size_t pc = rank;
    for (std::size_t r = rank; r < rows; ++r)
      for (std::size_t c = rank; c < cols; ++c)
        if (std::abs(w(r, c)) > std::abs(w(pr, pc))) {
          pr = r;
          pc = c;
        }
    if (std::abs(w(pr, pc)) <= tol) break;
    for (std::size_t c = 0; c < cols; ++c) std::swap(w(rank, c), w(pr, c));
    for (std::size_t r = 0; r < rows; ++r) std::swap(w(r, rank), w(r, pc));
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const double f = w(r, rank) / w(rank, rank);
      for (std::size_t c = rank; c < cols; ++c) w(r, c) -= f * w(rank, c);
    }
  }
  return rank;
}

Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
  require_square(a, "controllability_matrix");
  if (b.rows() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "controllability_matrix: b rows");
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  Matrix ctrb(n, n * m);
  Matrix block = b;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < m; ++c) ctrb(r, k * m + c) = block(r, c);
    block = a * block;
  }
  return ctrb;
}

bool is_controllable(const Matrix& a, const Matrix& b) {
  return b.cols() > 0 && matrix_rank(controllability_matrix(a, b)) == a.rows();
}

double care_residual(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& x) {
  const Matrix xb = x * b;
  return frobenius_norm(a.transpose() * x + x * a - xb * xb.transpose() + q);
}

CareSolution care_solve_detailed(const Matrix& a, const Matrix& b, const Matrix& q) {
  require_square(a, "care_solve");
  require_finite(a, "care_solve");
  require_finite(b, "care_solve");
  require_finite(q, "care_solve");
  const std::size_t n = a.rows();
  if (b.rows() != n || q.rows() != n || !q.is_square()) throw Error(ErrorCode::DimensionMismatch, "care_solve");
  require_symmetric(q, "care_solve");
  if (lambda_min(q) <= 0.0) throw Error(ErrorCode::InvalidArgument, "care_solve: q not positive definite");
  if (!is_controllable(a, b)) throw Error(ErrorCode::NotControllable, "care_solve: (a, b) not controllable");

  const auto& cfg = numeric_settings();
  const Matrix eye = Matrix::identity(n);
  const Matrix bbt = b * b.transpose();

  // Bass: shift a so that -(a + beta I) is Hurwitz, then K0 = b^T Z^{-1}.
  const double beta = 1.0 + frobenius_norm(a);
  const Matrix z = lyap_solve(a + beta * eye, -2.0 * bbt);
  Matrix k = solve_linear(z, b).transpose();

  const double tol = cfg.solve_rel_tol * (1.0 + frobenius_norm(q));
  CareSolution out;
  for (int it = 0; it < cfg.care_max_iter; ++it) {
    const Matrix closed = a - b * k;
    out.x = lyap_solve(closed.transpose(), q + k.transpose() * k);
    out.residuals.push_back(care_residual(a, b, q, out.x));
    if (out.residuals.back() <= tol) {
      // One more step is cheap and, with quadratic convergence, lands near round-off.
      const Matrix kp = b.transpose() * out.x;
      const Matrix xp = lyap_solve((a - b * kp).transpose(), q + kp.transpose() * kp);
      const double rp = care_residual(a, b, q, xp);
      if (rp < out.residuals.back() && is_hurwitz(a - bbt * xp)) {
        out.x = xp;
        out.residuals.push_back(rp);
      }
      return out;
    }
    k = b.transpose() * out.x;
  }
  throw Error(ErrorCode::NoConvergence,
              "care_solve: residual " + std::to_string(out.residuals.back()) + " after " +
                  std::to_string(cfg.care_max_iter) + " Newton-Kleinman iterations");
}

Matrix care_solve(const Matrix& a, const Matrix& b, const Matrix& q) { return care_solve_detailed(a, b, q).x; }

}  // namespace contain
