#include "contain/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "contain/error.hpp"
#include "contain/linalg.hpp"
#include "contain/rk4.hpp"

namespace contain {
namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

// ½ ξ^T (L1 ⊗ P^{-1}) ξ with P^{-1} precomputed.
double v1_with_inverse(std::span<const double> xi, const Matrix& l1, const Matrix& p_inv) {
  const std::size_t m = l1.rows();
  const std::size_t n = p_inv.rows();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::span<const double> xi_i = xi.subspan(i * n, n);
    for (std::size_t j = 0; j < m; ++j) {
      const double lij = l1(i, j);
      if (lij == 0.0) continue;
      acc += lij * dot(xi_i, apply(p_inv, xi.subspan(j * n, n)));
    }
  }
  return 0.5 * acc;
}

}  // namespace

std::size_t Scenario::sample_count() const {
  return static_cast<std::size_t>(std::llround(t_end / h));
}

Vector Scenario::gammas() const {
  Vector g;
  g.reserve(leaders.size());
  for (const auto& l : leaders) g.push_back(l.gamma);
  return g;
}

void validate_scenario(const Scenario& scn) {
  const auto& sys = scn.system;
  const std::size_t n = sys.n();
  require(n > 0 && sys.a.is_square(), ErrorCode::DimensionMismatch, "system: A must be square and non-empty");
  require(sys.b.rows() == n && sys.b.cols() > 0, ErrorCode::DimensionMismatch, "system: B must have n rows");
  require(sys.a.all_finite() && sys.b.all_finite() && sys.c.all_finite(), ErrorCode::NonFinite,
          "system: non-finite matrix entry");

  const auto& topo = scn.topology;
  const std::size_t agents = topo.n_agents();
  const std::size_t m = topo.n_followers();
  require(scn.leaders.size() == topo.n_leaders(), ErrorCode::DimensionMismatch,
          "leaders: expected " + std::to_string(topo.n_leaders()) + " leader specs, got " +
              std::to_string(scn.leaders.size()));
  for (std::size_t j = 0; j < scn.leaders.size(); ++j) {
    const auto& spec = scn.leaders[j];
    const std::string who = "leader " + topo.labels()[m + j];
    require(spec.feedback_gain.rows() == sys.p() && spec.feedback_gain.cols() == n, ErrorCode::DimensionMismatch,
            who + ": feedback gain must be p x n");
    require(spec.gamma > 0.0, ErrorCode::InvalidArgument, who + ": gamma must be positive");
    for (const auto& s : spec.sinusoids)
      require(s.channel < sys.p(), ErrorCode::DimensionMismatch, who + ": sinusoid channel out of range");
  }

  require(scn.x0.size() == agents * n, ErrorCode::DimensionMismatch, "sim: x0 must hold N x n entries");
  require(scn.v0.empty() || scn.v0.size() == agents * n, ErrorCode::DimensionMismatch,
          "sim: v0 must hold N x n entries");
  require(all_finite(scn.x0) && all_finite(scn.v0), ErrorCode::NonFinite, "sim: non-finite initial state");
  require(scn.h > 0.0 && std::isfinite(scn.h), ErrorCode::InvalidArgument, "sim: h must be positive");
  require(scn.t_end >= scn.h && std::isfinite(scn.t_end), ErrorCode::InvalidArgument, "sim: t_end must be >= h");
  require(scn.tail_fraction > 0.0 && scn.tail_fraction <= 1.0, ErrorCode::InvalidArgument,
          "sim: tail_fraction must lie in (0, 1]");

  const auto& cfg = scn.controller;
  if (cfg.kind != ControllerKind::DiscontinuousStatic) {
    require(cfg.kappa.has_value() && *cfg.kappa > 0.0, ErrorCode::InvalidArgument,
            std::string("controller: ") + std::string(to_string(cfg.kind)) + " requires kappa > 0");
  }
  if (cfg.kind == ControllerKind::Adaptive) {
    require(cfg.taus.size() == m && cfg.phis.size() == m && cfg.d0.size() == m, ErrorCode::DimensionMismatch,
            "controller: tau, phi and d0 need one value per follower");
    for (std::size_t i = 0; i < m; ++i) {
      require(cfg.taus[i] > 0.0, ErrorCode::InvalidArgument, "controller: tau must be positive");
      require(cfg.phis[i] >= 0.0, ErrorCode::InvalidArgument, "controller: phi must be nonnegative");
      require(cfg.d0[i] >= 0.0, ErrorCode::InvalidArgument, "controller: d0 must be nonnegative");
    }
  }
  if (cfg.kind == ControllerKind::ObserverBased) {
    require(sys.c.rows() > 0 && sys.c.cols() == n, ErrorCode::DimensionMismatch,
            "system: observer_based controller requires C with n columns");
  }
}

Vector StateLayout::pack(const NetworkState& s) const {
  Vector y(size(), 0.0);
  std::copy(s.x.begin(), s.x.end(), y.begin());
  if (adaptive) std::copy(s.d.begin(), s.d.end(), y.begin() + static_cast<std::ptrdiff_t>(gains_offset()));
  if (observer) std::copy(s.v.begin(), s.v.end(), y.begin() + static_cast<std::ptrdiff_t>(observer_offset()));
  return y;
}

NetworkState StateLayout::unpack(std::span<const double> y, double t) const {
  NetworkState s;
  s.t = t;
  s.n = n;
  s.x.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_agents * n));
  if (adaptive) {
    const auto first = y.begin() + static_cast<std::ptrdiff_t>(gains_offset());
    s.d.assign(first, first + static_cast<std::ptrdiff_t>(n_followers));
  }
  if (observer) {
    const auto first = y.begin() + static_cast<std::ptrdiff_t>(observer_offset());
    s.v.assign(first, first + static_cast<std::ptrdiff_t>(n_agents * n));
  }
  return s;
}

Vector containment_error(const NetworkState& s, const LaplacianPartition& part, std::size_t n) {
  const std::size_t m = part.n_followers();
  const std::size_t leaders = part.n_leaders();
  const Matrix& w = part.weights;
  Vector xi(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(m * n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < leaders; ++k) {
      const double wik = w(i, k);
      if (wik == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) xi[i * n + c] -= wik * s.x[(m + k) * n + c];
    }
  return xi;
}

double lyapunov_v1(std::span<const double> xi, const LaplacianPartition& part, const Matrix& p) {
  return v1_with_inverse(xi, part.l1, inverse(p));
}

ClosedLoop::ClosedLoop(const Scenario& scn, const GainSet& gains, const LaplacianPartition& part)
    : scn_(scn), cfg_(scn.controller) {
  cfg_.gains = gains;
  const auto& topo = scn.topology;
  layout_.n = scn.system.n();
  layout_.n_agents = topo.n_agents();
  layout_.n_followers = topo.n_followers();
  layout_.adaptive = cfg_.kind == ControllerKind::Adaptive;
  layout_.observer = cfg_.kind == ControllerKind::ObserverBased;
  if (part.n_followers() != topo.n_followers() || part.n_leaders() != topo.n_leaders()) {
    throw Error(ErrorCode::DimensionMismatch, "partition does not match topology");
  }
  if (layout_.observer && !gains.l_obs) {
    throw Error(ErrorCode::MissingState, "observer_based controller requires an observer gain");
  }
}

NetworkInputs ClosedLoop::inputs(const NetworkState& s) const {
  const auto& topo = scn_.topology;
  const std::size_t m = topo.n_followers();
  NetworkInputs out;
  out.followers.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.followers.push_back(u_follower(i, s, cfg_, topo));
  out.leaders.reserve(topo.n_leaders());
  for (std::size_t j = 0; j < topo.n_leaders(); ++j) {
    auto li = leader_input(scn_.leaders[j], s.agent(m + j), s.t);
    if (li.exceeds_bound) ++out.leader_bound_violations;
    out.leaders.push_back(std::move(li.u));
  }
  return out;
}

Vector ClosedLoop::rate(double t, std::span<const double> y) const {
  const NetworkState s = layout_.unpack(y, t);
  const NetworkInputs in = inputs(s);
  const auto& sys = scn_.system;
  const std::size_t n = layout_.n;
  const std::size_t m = layout_.n_followers;

  Vector dy(layout_.size(), 0.0);
  for (std::size_t i = 0; i < layout_.n_agents; ++i) {
    const auto& u = i < m ? in.followers[i] : in.leaders[i - m];
    std::span<double> dxi(dy.data() + i * n, n);
    apply_add(sys.a, s.agent(i), dxi);
    apply_add(sys.b, u, dxi);
  }
  if (layout_.adaptive) {
    for (std::size_t i = 0; i < m; ++i) dy[layout_.gains_offset() + i] = adaptive_gain_rate(i, s, cfg_, scn_.topology);
  }
  if (layout_.observer) {
    for (std::size_t j = 0; j < layout_.n_agents; ++j) {
      const auto& u = j < m ? in.followers[j] : in.leaders[j - m];
      const Vector vr = observer_rate(j, s, u, sys, *cfg_.gains.l_obs);
      std::copy(vr.begin(), vr.end(), dy.begin() + static_cast<std::ptrdiff_t>(layout_.observer_offset() + j * n));
    }
  }
  return dy;
}

Vector ClosedLoop::initial_state() const {
  NetworkState s;
  s.n = layout_.n;
  s.x = scn_.x0;
  if (layout_.adaptive) s.d = cfg_.d0;
  if (layout_.observer) s.v = scn_.v0.empty() ? Vector(scn_.x0.size(), 0.0) : scn_.v0;
  return layout_.pack(s);
}

ClosedLoop assemble_rhs(const Scenario& scn, const GainSet& gains, const LaplacianPartition& part) {
  validate_scenario(scn);
  return ClosedLoop(scn, gains, part);
}

Trajectory integrate(const Scenario& scn, const GainSet& gains, const LaplacianPartition& part) {
  const ClosedLoop loop = assemble_rhs(scn, gains, part);
  const auto& layout = loop.layout();
  const std::size_t samples = scn.sample_count();
  const std::size_t n = layout.n;
  const Matrix p_inv = inverse(gains.p);

  Trajectory traj;
  traj.h = scn.h;
  traj.t_end = scn.t_end;
  traj.times.reserve(samples);
  traj.states.reserve(samples);

  auto stack = [](const std::vector<Vector>& parts) {
    Vector out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
  };

  Vector y = loop.initial_state();
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * scn.h;
    if (!all_finite(y)) {
      traj.failure = "non-finite state at t = " + std::to_string(t);
      break;
    }
    NetworkState s = layout.unpack(y, t);
    const NetworkInputs in = loop.inputs(s);
    Vector xi = containment_error(s, part, n);
    const double xi_norm = norm2(xi);
    const double v1 = v1_with_inverse(xi, part.l1, p_inv);
    Vector u_f = stack(in.followers);
    Vector u_l = stack(in.leaders);
    if (!all_finite(u_f) || !all_finite(u_l) || !std::isfinite(xi_norm) || !std::isfinite(v1)) {
      traj.failure = "non-finite input, containment error or V1 at t = " + std::to_string(t);
      break;
    }

    traj.times.push_back(t);
    traj.xi_norm.push_back(xi_norm);
    traj.v1.push_back(v1);
    traj.follower_inputs.push_back(std::move(u_f));
    traj.leader_inputs.push_back(std::move(u_l));
    traj.leader_bound_violations += in.leader_bound_violations;
    traj.xi.push_back(std::move(xi));
    traj.states.push_back(std::move(s));

    if (k + 1 < samples) y = rk4_step(loop, t, y, scn.h);
  }
  return traj;
}

bool Metrics::certified() const noexcept {
  if (d1_certified && !*d1_certified) return false;
  if (d2_certified && !*d2_certified) return false;
  if (envelope_violations && *envelope_violations != 0) return false;
  return true;
}

double log_linear_slope(std::span<const double> times, std::span<const double> values) {
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  double count = 0.0;
  for (std::size_t k = 0; k < times.size() && k < values.size(); ++k) {
    if (!(values[k] > 0.0)) continue;
    const double l = std::log(values[k]);
    st += times[k];
    sl += l;
    stt += times[k] * times[k];
    stl += times[k] * l;
    count += 1.0;
  }
  const double denom = count * stt - st * st;
  if (count < 2.0 || denom == 0.0) return 0.0;
  return (count * stl - st * sl) / denom;
}

Metrics compute_metrics(const Trajectory& traj, const BoundReport& bounds, const GainSet& gains,
                        [[maybe_unused]] const LaplacianPartition& part, const ControllerConfig& cfg,
                        double tail_fraction) {
  Metrics m;
  m.leader_bound_violations = traj.leader_bound_violations;
  const std::size_t samples = traj.size();
  if (samples == 0) return m;

  m.xi_norm_initial = traj.xi_norm.front();
  m.xi_norm_final = traj.xi_norm.back();

  // The final sample always belongs to the tail, so short runs are never vacuously certified.
  const double tail_start = std::min((1.0 - tail_fraction) * traj.t_end, traj.times.back());
  for (std::size_t k = 0; k < samples; ++k) {
    if (traj.times[k] + 1e-12 * traj.t_end < tail_start) continue;
    m.tail_sup_xi_sq = std::max(m.tail_sup_xi_sq, traj.xi_norm[k] * traj.xi_norm[k]);
  }

  if (samples > 1) {
    double total = 0.0;
    for (std::size_t k = 1; k < samples; ++k) {
      const auto& a = traj.follower_inputs[k];
      const auto& b = traj.follower_inputs[k - 1];
      double tv = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) tv += std::abs(a[c] - b[c]);
      total += tv / traj.h;
    }
    m.chattering_index = total / static_cast<double>(samples - 1);
  }

  switch (cfg.kind) {
    case ControllerKind::ContinuousStatic: {
      m.d1_certified = m.tail_sup_xi_sq <= bounds.d1_radius_sq;
      // V1(t) <= (V1(0) - b/α) e^{-αt} + b/α, b = M κ γ_max; one step of slack in t.
      const double alpha = gains.alpha;
      const double offset = bounds.envelope_offset;
      const double v0 = traj.v1.front();
      auto envelope = [&](double t) { return (v0 - offset) * std::exp(-alpha * t) + offset; };
      std::size_t violations = 0;
      for (std::size_t k = 0; k < samples; ++k) {
        const double t = traj.times[k];
        const double limit = std::max(envelope(t), envelope(std::max(0.0, t - traj.h))) + 1e-9;
        if (traj.v1[k] > limit) ++violations;
      }
      m.envelope_violations = violations;
      break;
    }
    case ControllerKind::Adaptive: {
      double d_sup = 0.0;
      for (const auto& s : traj.states)
        for (double d : s.d) d_sup = std::max(d_sup, d);
      m.d_sup = d_sup;
      m.d2_certified = bounds.d2_radius_sq.has_value() && m.tail_sup_xi_sq <= *bounds.d2_radius_sq;
      break;
    }
    case ControllerKind::ObserverBased: {
      const std::size_t half = std::max<std::size_t>(2, samples / 2);
      Vector t, e;
      for (std::size_t k = 0; k < std::min(half, samples); ++k) {
        const auto& s = traj.states[k];
        double acc = 0.0;
        for (std::size_t c = 0; c < s.x.size(); ++c) acc += (s.v[c] - s.x[c]) * (s.v[c] - s.x[c]);
        t.push_back(traj.times[k]);
        e.push_back(std::sqrt(acc));
      }
      m.estimation_error_slope = log_linear_slope(t, e);
      break;
    }
    case ControllerKind::DiscontinuousStatic:
      break;
  }
  return m;
}

}  // namespace contain
