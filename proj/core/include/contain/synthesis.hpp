#pragma once

#include <optional>
#include <span>
#include <utility>

#include "contain/graph.hpp"
#include "contain/matrix.hpp"

namespace contain {

/// Agent model  x' = A x + B u,  y = C x.
struct LinearSystem {
  Matrix a;
  Matrix b;
  Matrix c;

  [[nodiscard]] std::size_t n() const noexcept { return a.rows(); }
  [[nodiscard]] std::size_t p() const noexcept { return b.cols(); }
  [[nodiscard]] std::size_t q() const noexcept { return c.rows(); }
};

struct GainSet {
  Matrix p;                      // n x n, P > 0 with A P + P A^T - 2 B B^T < 0
  Matrix k;                      // p x n, -B^T P^{-1}
  Matrix gamma;                  // n x n, K^T K
  double c1 = 0.0;
  double c2 = 0.0;
  double alpha = 0.0;
  std::optional<Matrix> l_obs;   // n x q, A + L C Hurwitz
};

struct DesignOptions {
  double c1_multiplier = 1.0;  // >= 1; scales the lower bound 1/λ_min(L1)
  double c2_multiplier = 1.0;  // >= 1; scales the lower bound max γ
  Matrix are_weight;           // empty means identity
};

/// λ_max(A P + P A^T - 2 B B^T); negative when the LMI holds.
[[nodiscard]] double lmi_max_eigenvalue(const Matrix& a, const Matrix& b, const Matrix& p);

/// P = X^{-1} with X the stabilizing solution of A^T X + X A - X B B^T X + Q = 0.
[[nodiscard]] Matrix solve_P(const Matrix& a, const Matrix& b, const Matrix& are_weight = {});

/// K = -B^T P^{-1}
[[nodiscard]] Matrix compute_K(const Matrix& p, const Matrix& b);

/// Γ = K^T K
[[nodiscard]] Matrix compute_Gamma(const Matrix& k);

/// (c1, c2) = (1/λ_min(L1), max γ). Throws EmptyGammas.
[[nodiscard]] std::pair<double, double> coupling_gains(const LaplacianPartition& part, std::span<const double> gammas);

/// α = -λ_max(A P + P A^T - 2 B B^T) / λ_max(P). Throws NonPositiveAlpha.
[[nodiscard]] double compute_alpha(const Matrix& a, const Matrix& b, const Matrix& p);

/// L = -X_o C^T, X_o the stabilizing ARE solution for (A^T, C^T). Throws NotObservable.
[[nodiscard]] Matrix solve_observer_L(const Matrix& a, const Matrix& c);

/// Radius² of the static-controller residual set:
/// 2 λ_max(P) M κ γ_max / (α λ_min(L1)).
[[nodiscard]] double bound_D1(double alpha, const Matrix& p, std::size_t m, double kappa, double gamma_max,
                              double lambda_min_l1);

struct D2Bound {
  double radius_sq = 0.0;
  double varrho = 0.0;
  double beta = 0.0;
};

/// Radius² of the adaptive-controller residual set:
/// λ_max(P) / (λ_min(L1) (α - ϱ)) · (Σ β² φ_i + M κ / 2), ϱ = max φ_i τ_i.
/// Throws VarrhoTooLarge when ϱ >= α.
[[nodiscard]] D2Bound bound_D2(double alpha, const Matrix& p, std::size_t m, double kappa, double beta,
                               std::span<const double> phis, std::span<const double> taus, double lambda_min_l1);

/// max{γ_max, 1/λ_min(L1)}
[[nodiscard]] double minimal_beta(double gamma_max, double lambda_min_l1);

/// Full design: P, K, Γ, c1, c2, α and (optionally) the observer gain.
[[nodiscard]] GainSet synthesize(const LinearSystem& sys, const LaplacianPartition& part,
                                 std::span<const double> gammas, const DesignOptions& options,
                                 bool with_observer);

struct BoundReport {
  double d1_radius_sq = 0.0;
  std::optional<double> d2_radius_sq;
  double beta = 0.0;
  std::optional<double> varrho;
  double envelope_offset = 0.0;  // M κ γ_max / α
  double alpha = 0.0;
  double kappa = 0.0;
  double gamma_max = 0.0;
};

struct AdaptiveParameters {
  std::span<const double> phis;
  std::span<const double> taus;
};

/// Collects D1, and D2 when `adaptive` is given and ϱ < α (varrho is recorded
/// either way).
[[nodiscard]] BoundReport make_bound_report(const GainSet& gains, const LaplacianPartition& part, double kappa,
                                            std::span<const double> gammas,
                                            std::optional<AdaptiveParameters> adaptive = std::nullopt);

}  // namespace contain
