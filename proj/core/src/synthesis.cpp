#include "contain/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "contain/error.hpp"
#include "contain/linalg.hpp"

namespace contain {
namespace {

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

double lmi_max_eigenvalue(const Matrix& a, const Matrix& b, const Matrix& p) {
  return lambda_max(symmetrize(a * p + p * a.transpose() - 2.0 * (b * b.transpose())));
}

Matrix solve_P(const Matrix& a, const Matrix& b, const Matrix& are_weight) {
  const Matrix q = are_weight.empty() ? Matrix::identity(a.rows()) : are_weight;
  const Matrix x = care_solve(a, b, q);
  return symmetrize(inverse(x));
}

Matrix compute_K(const Matrix& p, const Matrix& b) { return -solve_linear(p, b).transpose(); }

Matrix compute_Gamma(const Matrix& k) { return k.transpose() * k; }

std::pair<double, double> coupling_gains(const LaplacianPartition& part, std::span<const double> gammas) {
  if (gammas.empty()) throw Error(ErrorCode::EmptyGammas, "coupling_gains: no leader bounds supplied");
  for (double g : gammas)
    if (!(g > 0.0)) throw Error(ErrorCode::InvalidArgument, "coupling_gains: leader bound must be positive");
  return {1.0 / part.lambda_min_l1, max_of(gammas)};
}

double compute_alpha(const Matrix& a, const Matrix& b, const Matrix& p) {
  const double alpha = -lmi_max_eigenvalue(a, b, p) / lambda_max(p);
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::NonPositiveAlpha, "compute_alpha: alpha = " + std::to_string(alpha));
  }
  return alpha;
}

Matrix solve_observer_L(const Matrix& a, const Matrix& c) {
  try {
    const Matrix x = care_solve(a.transpose(), c.transpose(), Matrix::identity(a.rows()));
    return -(x * c.transpose());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotControllable) throw;
    throw Error(ErrorCode::NotObservable, "solve_observer_L: (A, C) not observable");
  }
}

double bound_D1(double alpha, const Matrix& p, std::size_t m, double kappa, double gamma_max,
                double lambda_min_l1) {
  if (!(alpha > 0.0) || !(lambda_min_l1 > 0.0) || !(kappa >= 0.0) || !(gamma_max > 0.0) || m == 0) {
    throw Error(ErrorCode::InvalidArgument, "bound_D1: arguments must be positive (kappa >= 0)");
  }
  return 2.0 * lambda_max(p) * static_cast<double>(m) * kappa * gamma_max / (alpha * lambda_min_l1);
}

double minimal_beta(double gamma_max, double lambda_min_l1) { return std::max(gamma_max, 1.0 / lambda_min_l1); }

D2Bound bound_D2(double alpha, const Matrix& p, std::size_t m, double kappa, double beta,
                 std::span<const double> phis, std::span<const double> taus, double lambda_min_l1) {
  if (phis.size() != m || taus.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "bound_D2: need one phi and one tau per follower");
  }
  if (!(lambda_min_l1 > 0.0) || !(beta > 0.0) || !(kappa >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bound_D2: lambda_min(L1) and beta must be positive");
  }
  D2Bound out;
  out.beta = beta;
  out.varrho = 0.0;
  for (std::size_t i = 0; i < m; ++i) out.varrho = std::max(out.varrho, phis[i] * taus[i]);
  if (!(out.varrho < alpha)) {
    throw Error(ErrorCode::VarrhoTooLarge,
                "varrho = " + std::to_string(out.varrho) + " >= alpha = " + std::to_string(alpha));
  }
  double leak = 0.0;
  for (double phi : phis) leak += beta * beta * phi;
  out.radius_sq =
      lambda_max(p) / (lambda_min_l1 * (alpha - out.varrho)) * (leak + 0.5 * static_cast<double>(m) * kappa);
  return out;
}

GainSet synthesize(const LinearSystem& sys, const LaplacianPartition& part, std::span<const double> gammas,
                   const DesignOptions& options, bool with_observer) {
  if (options.c1_multiplier < 1.0 || options.c2_multiplier < 1.0) {
    throw Error(ErrorCode::InvalidArgument, "gain multipliers must be >= 1");
  }
  GainSet g;
  g.p = solve_P(sys.a, sys.b, options.are_weight);
  g.k = compute_K(g.p, sys.b);
  g.gamma = compute_Gamma(g.k);
  const auto [c1, c2] = coupling_gains(part, gammas);
  g.c1 = options.c1_multiplier * c1;
  g.c2 = options.c2_multiplier * c2;
  g.alpha = compute_alpha(sys.a, sys.b, g.p);
  if (with_observer) g.l_obs = solve_observer_L(sys.a, sys.c);
  return g;
}

BoundReport make_bound_report(const GainSet& gains, const LaplacianPartition& part, double kappa,
                              std::span<const double> gammas, std::optional<AdaptiveParameters> adaptive) {
  if (gammas.empty()) throw Error(ErrorCode::EmptyGammas, "make_bound_report: no leader bounds supplied");
  const std::size_t m = part.n_followers();
  BoundReport r;
  r.alpha = gains.alpha;
  r.kappa = kappa;
  r.gamma_max = max_of(gammas);
  r.d1_radius_sq = bound_D1(gains.alpha, gains.p, m, kappa, r.gamma_max, part.lambda_min_l1);
  r.beta = minimal_beta(r.gamma_max, part.lambda_min_l1);
  r.envelope_offset = static_cast<double>(m) * kappa * r.gamma_max / gains.alpha;
  if (adaptive) {
    double varrho = 0.0;
    for (std::size_t i = 0; i < adaptive->phis.size() && i < adaptive->taus.size(); ++i)
      varrho = std::max(varrho, adaptive->phis[i] * adaptive->taus[i]);
    r.varrho = varrho;
    if (varrho < gains.alpha) {
      r.d2_radius_sq = bound_D2(gains.alpha, gains.p, m, kappa, r.beta, adaptive->phis, adaptive->taus,
                                part.lambda_min_l1)
                           .radius_sq;
    }
  }
  return r;
}

}  // namespace contain
