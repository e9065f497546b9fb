#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "contain/graph.hpp"
#include "contain/matrix.hpp"
#include "contain/synthesis.hpp"

namespace contain {

/// amplitude * sin(omega * t + phase) added to one input channel.
struct Sinusoid {
  std::size_t channel = 0;  // zero-based
  double amplitude = 0.0;
  double omega = 0.0;       // rad/s
  double phase = 0.0;       // rad
};

/// Exogenous leader input  u_j = K_j x_j + Σ sinusoids, declared bound ||u_j|| <= gamma.
struct LeaderInputSpec {
  Matrix feedback_gain;  // p x n
  std::vector<Sinusoid> sinusoids;
  double gamma = 1.0;
};

struct LeaderInput {
  Vector u;
  bool exceeds_bound = false;
};

[[nodiscard]] LeaderInput leader_input(const LeaderInputSpec& spec, std::span<const double> x, double t);

enum class ControllerKind { DiscontinuousStatic, ContinuousStatic, Adaptive, ObserverBased };

[[nodiscard]] std::string_view to_string(ControllerKind kind) noexcept;
[[nodiscard]] std::optional<ControllerKind> parse_controller_kind(std::string_view text) noexcept;

struct ControllerConfig {
  ControllerKind kind = ControllerKind::ContinuousStatic;
  std::optional<double> kappa;  // boundary-layer width; unused by the discontinuous law
  Vector taus;                  // adaptive only, one per follower
  Vector phis;                  // adaptive only, one per follower
  Vector d0;                    // adaptive only, initial coupling gains
  GainSet gains;
};

/// Instantaneous network state. Agent blocks are in canonical order
/// (followers first); each block holds n entries.
struct NetworkState {
  double t = 0.0;
  std::size_t n = 0;
  Vector x;  // N * n
  Vector d;  // M adaptive gains, empty unless adaptive
  Vector v;  // N * n observer states, empty unless observer-based

  [[nodiscard]] std::span<const double> agent(std::size_t i) const { return {x.data() + i * n, n}; }
  [[nodiscard]] std::span<const double> estimate(std::size_t i) const { return {v.data() + i * n, n}; }
};

/// w / ||w||, or 0 at the origin.
[[nodiscard]] Vector ghat(std::span<const double> w);
/// Boundary-layer saturation: w / ||w|| outside radius kappa, w / kappa inside.
[[nodiscard]] Vector gsat(std::span<const double> w, double kappa);
/// Gain-scaled saturation: w / ||w|| when d ||w|| > kappa, else d w / kappa.
[[nodiscard]] Vector rsat(std::span<const double> w, double d, double kappa);

/// Σ_j a_ij (x_i - x_j) for follower i (canonical index).
[[nodiscard]] Vector relative_state(std::size_t i, const NetworkState& s, const Topology& t);
/// Σ_j a_ij (v_i - v_j), the same sum over observer estimates.
[[nodiscard]] Vector relative_estimate(std::size_t i, const NetworkState& s, const Topology& t);

/// Follower input for the configured control law. Throws MissingState when
/// adaptive gains or observer states are absent for the kind.
[[nodiscard]] Vector u_follower(std::size_t i, const NetworkState& s, const ControllerConfig& cfg,
                                const Topology& t);

/// d_i' = τ_i (-φ_i d_i + σ_i^T Γ σ_i + ||K σ_i||)
[[nodiscard]] double adaptive_gain_rate(std::size_t i, const NetworkState& s, const ControllerConfig& cfg,
                                        const Topology& t);

/// v_j' = A v_j + B u_j + L (C v_j - C x_j)
[[nodiscard]] Vector observer_rate(std::size_t j, const NetworkState& s, std::span<const double> u,
                                   const LinearSystem& sys, const Matrix& l_obs);

}  // namespace contain
