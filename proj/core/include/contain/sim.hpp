#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contain/control.hpp"
#include "contain/graph.hpp"
#include "contain/synthesis.hpp"

namespace contain {

struct Scenario {
  LinearSystem system;
  Topology topology;
  ControllerConfig controller;          // gains are filled in by synthesis
  DesignOptions design;
  std::vector<LeaderInputSpec> leaders;  // canonical leader order
  Vector x0;                             // N * n, canonical agent order
  Vector v0;                             // N * n, observer mode; empty means zeros
  double t_end = 20.0;
  double h = 1e-3;
  double tail_fraction = 0.2;

  /// Samples on the grid 0, h, ..., strictly below t_end: round(t_end / h).
  [[nodiscard]] std::size_t sample_count() const;
  [[nodiscard]] Vector gammas() const;
};

/// Dimensional and parameter checks for the selected controller kind.
/// Throws InvalidArgument or DimensionMismatch naming the offending field.
void validate_scenario(const Scenario& scn);

/// Stacked ODE layout: [followers | leaders | adaptive gains | observer states].
struct StateLayout {
  std::size_t n = 0;
  std::size_t n_agents = 0;
  std::size_t n_followers = 0;
  bool adaptive = false;
  bool observer = false;

  [[nodiscard]] std::size_t gains_offset() const noexcept { return n_agents * n; }
  [[nodiscard]] std::size_t observer_offset() const noexcept {
    return gains_offset() + (adaptive ? n_followers : 0);
  }
  [[nodiscard]] std::size_t size() const noexcept { return observer_offset() + (observer ? n_agents * n : 0); }

  [[nodiscard]] Vector pack(const NetworkState& s) const;
  [[nodiscard]] NetworkState unpack(std::span<const double> y, double t) const;
};

/// ξ = x_f - (W ⊗ I_n) x_l
[[nodiscard]] Vector containment_error(const NetworkState& s, const LaplacianPartition& part, std::size_t n);

/// V1 = ½ ξ^T (L1 ⊗ P^{-1}) ξ
[[nodiscard]] double lyapunov_v1(std::span<const double> xi, const LaplacianPartition& part, const Matrix& p);

struct NetworkInputs {
  std::vector<Vector> followers;  // M vectors of length p
  std::vector<Vector> leaders;    // N - M vectors of length p
  std::size_t leader_bound_violations = 0;
};

/// Closed-loop vector field over the stacked state.
class ClosedLoop {
 public:
  ClosedLoop(const Scenario& scn, const GainSet& gains, const LaplacianPartition& part);

  [[nodiscard]] const StateLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const ControllerConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] NetworkInputs inputs(const NetworkState& s) const;
  [[nodiscard]] Vector rate(double t, std::span<const double> y) const;
  Vector operator()(double t, const Vector& y) const { return rate(t, y); }
  [[nodiscard]] Vector initial_state() const;

 private:
  Scenario scn_;
  ControllerConfig cfg_;
  StateLayout layout_;
};

[[nodiscard]] ClosedLoop assemble_rhs(const Scenario& scn, const GainSet& gains, const LaplacianPartition& part);

struct Trajectory {
  double h = 0.0;
  double t_end = 0.0;
  std::vector<double> times;
  std::vector<NetworkState> states;
  std::vector<Vector> follower_inputs;  // per sample, M * p stacked
  std::vector<Vector> leader_inputs;    // per sample, (N - M) * p stacked
  std::vector<Vector> xi;
  Vector xi_norm;
  Vector v1;
  std::size_t leader_bound_violations = 0;
  /// Set when a non-finite state aborted the run; samples up to that point are kept.
  std::optional<std::string> failure;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
};

/// Fixed-step RK4 over the scenario horizon.
[[nodiscard]] Trajectory integrate(const Scenario& scn, const GainSet& gains, const LaplacianPartition& part);

struct Metrics {
  double tail_sup_xi_sq = 0.0;
  std::optional<bool> d1_certified;            // continuous static controller
  std::optional<bool> d2_certified;            // adaptive controller
  std::optional<std::size_t> envelope_violations;  // continuous static controller
  double chattering_index = 0.0;
  std::optional<double> d_sup;                 // adaptive controller
  std::optional<double> estimation_error_slope;  // observer controller, log-linear fit
  double xi_norm_initial = 0.0;
  double xi_norm_final = 0.0;
  std::size_t leader_bound_violations = 0;

  /// Every applicable certificate holds.
  [[nodiscard]] bool certified() const noexcept;
};

[[nodiscard]] Metrics compute_metrics(const Trajectory& traj, const BoundReport& bounds, const GainSet& gains,
                                      const LaplacianPartition& part, const ControllerConfig& cfg,
                                      double tail_fraction = 0.2);

/// Least-squares slope of log(values) against times over samples with values > 0.
[[nodiscard]] double log_linear_slope(std::span<const double> times, std::span<const double> values);

}  // namespace contain
