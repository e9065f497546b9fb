#include "contain/control.hpp"

#include <cmath>

#include "contain/error.hpp"

namespace contain {
namespace {

Vector scaled(std::span<const double> w, double s) {
  Vector out(w.begin(), w.end());
  for (auto& v : out) v *= s;
  return out;
}

void axpy(double a, std::span<const double> x, Vector& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

Vector neighbor_sum(std::size_t i, std::span<const double> stacked, std::size_t n, const Topology& t) {
  Vector sigma(n, 0.0);
  const double* xi = stacked.data() + i * n;
  for (std::size_t j : t.neighbors(i)) {
    const double* xj = stacked.data() + j * n;
    for (std::size_t k = 0; k < n; ++k) sigma[k] += xi[k] - xj[k];
  }
  return sigma;
}

double kappa_of(const ControllerConfig& cfg) {
  if (!cfg.kappa || !(*cfg.kappa > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, std::string(to_string(cfg.kind)) + " requires kappa > 0");
  }
  return *cfg.kappa;
}

}  // namespace

std::string_view to_string(ControllerKind kind) noexcept {
  switch (kind) {
    case ControllerKind::DiscontinuousStatic: return "discontinuous_static";
    case ControllerKind::ContinuousStatic: return "continuous_static";
    case ControllerKind::Adaptive: return "adaptive";
    case ControllerKind::ObserverBased: return "observer_based";
  }
  return "unknown";
}

std::optional<ControllerKind> parse_controller_kind(std::string_view text) noexcept {
  for (auto kind : {ControllerKind::DiscontinuousStatic, ControllerKind::ContinuousStatic, ControllerKind::Adaptive,
                    ControllerKind::ObserverBased}) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

LeaderInput leader_input(const LeaderInputSpec& spec, std::span<const double> x, double t) {
  LeaderInput out;
  out.u = apply(spec.feedback_gain, x);
  for (const auto& s : spec.sinusoids) out.u.at(s.channel) += s.amplitude * std::sin(s.omega * t + s.phase);
  out.exceeds_bound = norm2(out.u) > spec.gamma;
  return out;
}

Vector ghat(std::span<const double> w) {
  const double nw = norm2(w);
  if (nw == 0.0) return Vector(w.size(), 0.0);
  return scaled(w, 1.0 / nw);
}

Vector gsat(std::span<const double> w, double kappa) {
  const double nw = norm2(w);
  return nw > kappa ? scaled(w, 1.0 / nw) : scaled(w, 1.0 / kappa);
}

Vector rsat(std::span<const double> w, double d, double kappa) {
  const double nw = norm2(w);
  return d * nw > kappa ? scaled(w, 1.0 / nw) : scaled(w, d / kappa);
}

Vector relative_state(std::size_t i, const NetworkState& s, const Topology& t) {
  return neighbor_sum(i, s.x, s.n, t);
}

Vector relative_estimate(std::size_t i, const NetworkState& s, const Topology& t) {
  if (s.v.size() != s.x.size()) throw Error(ErrorCode::MissingState, "observer states absent");
  return neighbor_sum(i, s.v, s.n, t);
}

Vector u_follower(std::size_t i, const NetworkState& s, const ControllerConfig& cfg, const Topology& t) {
  const auto& g = cfg.gains;
  switch (cfg.kind) {
    case ControllerKind::DiscontinuousStatic: {
      const Vector ks = apply(g.k, relative_state(i, s, t));
      Vector u = scaled(ks, g.c1);
      axpy(g.c2, ghat(ks), u);
      return u;
    }
    case ControllerKind::ContinuousStatic: {
      const Vector ks = apply(g.k, relative_state(i, s, t));
      Vector u = scaled(ks, g.c1);
      axpy(g.c2, gsat(ks, kappa_of(cfg)), u);
      return u;
    }
    case ControllerKind::Adaptive: {
      if (i >= s.d.size()) throw Error(ErrorCode::MissingState, "adaptive gains absent");
      const double d = s.d[i];
      const Vector ks = apply(g.k, relative_state(i, s, t));
      Vector u = scaled(ks, d);
      axpy(d, rsat(ks, d, kappa_of(cfg)), u);
      return u;
    }
    case ControllerKind::ObserverBased: {
      // Observer feedback gain F is taken equal to K.
      const Vector fs = apply(g.k, relative_estimate(i, s, t));
      Vector u = scaled(fs, g.c1);
      axpy(g.c2, gsat(fs, kappa_of(cfg)), u);
      return u;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown controller kind");
}

double adaptive_gain_rate(std::size_t i, const NetworkState& s, const ControllerConfig& cfg, const Topology& t) {
  if (i >= s.d.size()) throw Error(ErrorCode::MissingState, "adaptive gains absent");
  if (i >= cfg.taus.size() || i >= cfg.phis.size()) {
    throw Error(ErrorCode::InvalidArgument, "adaptive_gain_rate: tau/phi missing for follower");
  }
  const Vector sigma = relative_state(i, s, t);
  const double quad = dot(sigma, apply(cfg.gains.gamma, sigma));
  const double ks = norm2(apply(cfg.gains.k, sigma));
  return cfg.taus[i] * (-cfg.phis[i] * s.d[i] + quad + ks);
}

Vector observer_rate(std::size_t j, const NetworkState& s, std::span<const double> u, const LinearSystem& sys,
                     const Matrix& l_obs) {
  if (s.v.size() != s.x.size()) throw Error(ErrorCode::MissingState, "observer states absent");
  const auto vj = s.estimate(j);
  const auto xj = s.agent(j);
  Vector innovation = apply(sys.c, vj);
  const Vector y = apply(sys.c, xj);
  for (std::size_t k = 0; k < innovation.size(); ++k) innovation[k] -= y[k];

  Vector rate = apply(sys.a, vj);
  apply_add(sys.b, u, rate);
  apply_add(l_obs, innovation, rate);
  return rate;
}

}  // namespace contain
