#include "contain/commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "contain/linalg.hpp"

namespace contain {
namespace {

namespace fs = std::filesystem;

Scenario load_with_overrides(const fs::path& path, const CommandOptions& opts) {
  Scenario scn = load_scenario(path);
  apply_overrides(scn, opts.overrides);
  return scn;
}

std::string describe_graph_check(const GraphCheckReport& r) {
  std::ostringstream os;
  for (const auto& [i, j] : r.asymmetric_edges) {
    os << "  asymmetric follower edge " << j << " -> " << i << ": a_" << i << "," << j << " = 1 but a_" << j << ","
       << i << " = 0\n";
  }
  for (const auto& f : r.unreachable_followers) os << "  follower " << f << " has no directed path from any leader\n";
  return os.str();
}

void print_matrix(std::ostream& os, const std::string& name, const Matrix& m) {
  os << name << " = " << format_matrix(m) << '\n';
}

fs::path output_dir(const fs::path& scenario, const CommandOptions& opts, bool default_next_to_scenario) {
  if (opts.out_dir) return *opts.out_dir;
  return default_next_to_scenario ? scenario.parent_path() : fs::path(".");
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "cannot create output directory '" + dir.string() + "'");
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  f << content;
}

ExitCode report_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return exit_code_for(e.code());
}

template <typename Body>
ExitCode guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::InternalError;
  }
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

ExitCode exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::BadAdjacency:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidArgument:
    case ErrorCode::EmptyGammas:
    case ErrorCode::NonFinite:
      return ExitCode::ParseError;
    case ErrorCode::NoLeader:
    case ErrorCode::NoFollower:
    case ErrorCode::AssumptionViolated:
      return ExitCode::AssumptionFailure;
    case ErrorCode::NotControllable:
    case ErrorCode::NotObservable:
      return ExitCode::NotControllable;
    case ErrorCode::VarrhoTooLarge:
      return ExitCode::VarrhoTooLarge;
    case ErrorCode::NonFiniteState:
      return ExitCode::NonFiniteState;
    case ErrorCode::NotSymmetric:
    case ErrorCode::Singular:
    case ErrorCode::NoConvergence:
    case ErrorCode::NonPositiveAlpha:
    case ErrorCode::MissingState:
      return ExitCode::InternalError;
  }
  return ExitCode::InternalError;
}

Design prepare_design(const Scenario& scn) {
  validate_scenario(scn);
  const auto report = check_graph(scn.topology);
  if (!report.passed()) throw Error(ErrorCode::AssumptionViolated, "graph check failed\n" + describe_graph_check(report));
  Design d;
  d.scenario = scn;
  d.partition = partition_laplacian(scn.topology);
  const Vector gammas = scn.gammas();
  d.gains = synthesize(scn.system, d.partition, gammas, scn.design,
                       scn.controller.kind == ControllerKind::ObserverBased);
  d.scenario.controller.gains = d.gains;
  d.lmi_max_eig = lmi_max_eigenvalue(scn.system.a, scn.system.b, d.gains.p);
  return d;
}

BoundReport bounds_for(const Design& d) {
  const auto& cfg = d.scenario.controller;
  const double kappa = cfg.kind == ControllerKind::DiscontinuousStatic ? 0.0 : cfg.kappa.value_or(0.0);
  const Vector gammas = d.scenario.gammas();
  std::optional<AdaptiveParameters> adaptive;
  if (cfg.kind == ControllerKind::Adaptive) adaptive = AdaptiveParameters{cfg.phis, cfg.taus};
  return make_bound_report(d.gains, d.partition, kappa, gammas, adaptive);
}

std::vector<std::string> trajectory_columns(const Scenario& scn) {
  const auto& topo = scn.topology;
  const std::size_t n = scn.system.n();
  const std::size_t p = scn.system.p();
  const std::size_t agents = topo.n_agents();
  std::vector<std::string> cols{"t"};
  for (std::size_t u = 0; u < agents; ++u)
    for (std::size_t c = 0; c < n; ++c) cols.push_back("x" + topo.labels()[topo.to_canonical(u)] + "_" + std::to_string(c + 1));
  for (std::size_t u = 0; u < agents; ++u) {
    const std::size_t i = topo.to_canonical(u);
    if (topo.role(i) != Role::Follower) continue;
    for (std::size_t c = 0; c < p; ++c) cols.push_back("u" + topo.labels()[i] + "_" + std::to_string(c + 1));
  }
  cols.emplace_back("xi_norm");
  cols.emplace_back("v1");
  if (scn.controller.kind == ControllerKind::Adaptive) {
    for (std::size_t u = 0; u < agents; ++u) {
      const std::size_t i = topo.to_canonical(u);
      if (topo.role(i) == Role::Follower) cols.push_back("d_" + topo.labels()[i]);
    }
  }
  if (scn.controller.kind == ControllerKind::ObserverBased) {
    for (std::size_t u = 0; u < agents; ++u)
      for (std::size_t c = 0; c < n; ++c)
        cols.push_back("v" + topo.labels()[topo.to_canonical(u)] + "_" + std::to_string(c + 1));
  }
  return cols;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const Scenario& scn) {
  const auto& topo = scn.topology;
  const std::size_t p = scn.system.p();
  const std::size_t agents = topo.n_agents();
  const bool adaptive = scn.controller.kind == ControllerKind::Adaptive;
  const bool observer = scn.controller.kind == ControllerKind::ObserverBased;

  const auto cols = trajectory_columns(scn);
  std::string line;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c > 0) line += ',';
    line += cols[c];
  }
  os << line << '\n';

  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& s = traj.states[k];
    line = format_double(traj.times[k]);
    auto put = [&line](double v) {
      line += ',';
      line += format_double(v);
    };
    for (std::size_t u = 0; u < agents; ++u)
      for (double v : s.agent(topo.to_canonical(u))) put(v);
    for (std::size_t u = 0; u < agents; ++u) {
      const std::size_t i = topo.to_canonical(u);
      if (topo.role(i) != Role::Follower) continue;
      for (std::size_t c = 0; c < p; ++c) put(traj.follower_inputs[k][i * p + c]);
    }
    put(traj.xi_norm[k]);
    put(traj.v1[k]);
    if (adaptive) {
      for (std::size_t u = 0; u < agents; ++u) {
        const std::size_t i = topo.to_canonical(u);
        if (topo.role(i) == Role::Follower) put(s.d[i]);
      }
    }
    if (observer) {
      for (std::size_t u = 0; u < agents; ++u)
        for (double v : s.estimate(topo.to_canonical(u))) put(v);
    }
    os << line << '\n';
  }
}

std::string format_metrics(const Metrics& m, const BoundReport& b, const Trajectory& traj, const Scenario& scn) {
  std::ostringstream os;
  os << "controller = " << to_string(scn.controller.kind) << '\n';
  os << "samples = " << traj.size() << '\n';
  os << "h = " << format_double(scn.h) << '\n';
  os << "t_end = " << format_double(scn.t_end) << '\n';
  os << "tail_fraction = " << format_double(scn.tail_fraction) << '\n';
  os << "alpha = " << format_double(b.alpha) << '\n';
  os << "kappa = " << format_double(b.kappa) << '\n';
  os << "tail_sup_xi_sq = " << format_double(m.tail_sup_xi_sq) << '\n';
  os << "xi_norm_initial = " << format_double(m.xi_norm_initial) << '\n';
  os << "xi_norm_final = " << format_double(m.xi_norm_final) << '\n';
  os << "chattering_index = " << format_double(m.chattering_index) << '\n';
  os << "leader_bound_violations = " << m.leader_bound_violations << '\n';
  if (m.d1_certified) {
    os << "d1_radius_sq = " << format_double(b.d1_radius_sq) << '\n';
    os << "d1_certified = " << yes_no(*m.d1_certified) << '\n';
  }
  if (m.envelope_violations) os << "envelope_violations = " << *m.envelope_violations << '\n';
  if (m.d_sup) {
    os << "d_sup = " << format_double(*m.d_sup) << '\n';
    if (b.varrho) os << "varrho = " << format_double(*b.varrho) << '\n';
    os << "beta = " << format_double(b.beta) << '\n';
    if (b.d2_radius_sq) os << "d2_radius_sq = " << format_double(*b.d2_radius_sq) << '\n';
    os << "d2_certified = " << yes_no(m.d2_certified.value_or(false)) << '\n';
  }
  if (m.estimation_error_slope) os << "estimation_error_slope = " << format_double(*m.estimation_error_slope) << '\n';
  if (traj.failure) os << "failure = " << *traj.failure << '\n';
  os << "certified = " << yes_no(!traj.failure && m.certified()) << '\n';
  return os.str();
}

std::string plot_script(const Scenario& scn, const std::string& csv_name) {
  const auto& topo = scn.topology;
  const std::size_t n = scn.system.n();
  const bool adaptive = scn.controller.kind == ControllerKind::Adaptive;
  const std::size_t panels = n + 1 + (adaptive ? 1 : 0);

  std::ostringstream os;
  os << "# gnuplot script for " << csv_name << "\n";
  os << "set datafile separator ','\n";
  os << "set terminal pngcairo size 900," << 300 * panels << "\n";
  os << "set output 'trajectory.png'\n";
  os << "set key outside right\n";
  os << "set xlabel 't [s]'\n";
  os << "set multiplot layout " << panels << ",1\n";

  auto series = [&](const std::vector<std::string>& names, const std::vector<std::string>& titles) {
    os << "plot ";
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (k > 0) os << ", \\\n     ";
      os << "'" << csv_name << "' using (column(\"t\")):(column(\"" << names[k] << "\")) with lines title '"
         << titles[k] << "'";
    }
    os << "\n";
  };

  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::string> names, titles;
    for (std::size_t u = 0; u < topo.n_agents(); ++u) {
      const std::size_t i = topo.to_canonical(u);
      names.push_back("x" + topo.labels()[i] + "_" + std::to_string(c + 1));
      titles.push_back((topo.role(i) == Role::Leader ? "leader " : "") + topo.labels()[i]);
    }
    os << "set ylabel 'x_" << c + 1 << "'\n";
    series(names, titles);
  }
  os << "set ylabel '||xi||'\n";
  series({"xi_norm"}, {"||xi||"});
  if (adaptive) {
    std::vector<std::string> names, titles;
    for (std::size_t u = 0; u < topo.n_agents(); ++u) {
      const std::size_t i = topo.to_canonical(u);
      if (topo.role(i) != Role::Follower) continue;
      names.push_back("d_" + topo.labels()[i]);
      titles.push_back("d_" + topo.labels()[i]);
    }
    os << "set ylabel 'd_i'\n";
    series(names, titles);
  }
  os << "unset multiplot\n";
  return os.str();
}

ExitCode cmd_validate(const fs::path& path, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario scn = load_with_overrides(path, opts);
    validate_scenario(scn);
    const auto& topo = scn.topology;
    const std::size_t m = topo.n_followers();

    out << "agents = " << topo.n_agents() << '\n';
    out << "followers (M) = " << m << ':';
    for (std::size_t i = 0; i < m; ++i) out << ' ' << topo.labels()[i];
    out << "\nleaders = " << topo.n_leaders() << ':';
    for (std::size_t i = m; i < topo.n_agents(); ++i) out << ' ' << topo.labels()[i];
    out << '\n';

    const auto report = check_graph(topo);
    out << "follower subgraph undirected: " << yes_no(report.follower_subgraph_undirected) << '\n';
    out << "every follower reachable from a leader: " << yes_no(report.unreachable_followers.empty()) << '\n';
    for (std::size_t j = 0; j < scn.leaders.size(); ++j) {
      out << "leader " << topo.labels()[m + j] << " input bound gamma = " << format_double(scn.leaders[j].gamma)
          << '\n';
    }
    if (!report.passed()) {
      out << "graph check: FAIL\n" << describe_graph_check(report);
      err << "error: graph assumption violated\n" << describe_graph_check(report);
      return ExitCode::AssumptionFailure;
    }
    out << "graph check: PASS\n";

    const auto part = partition_laplacian(topo);
    out << "lambda_min(L1) = " << format_double(part.lambda_min_l1) << '\n';
    print_matrix(out, "W", clamp_for_report(part.weights));
    out << "W row sums =";
    for (std::size_t i = 0; i < part.weights.rows(); ++i) {
      double sum = 0.0;
      for (double v : part.weights.row(i)) sum += v;
      out << ' ' << format_double(sum);
    }
    out << '\n';
    return ExitCode::Ok;
  });
}

ExitCode cmd_synth(const fs::path& path, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Design d = prepare_design(load_with_overrides(path, opts));
    const auto& g = d.gains;
    print_matrix(out, "P", g.p);
    print_matrix(out, "K", g.k);
    print_matrix(out, "Gamma", g.gamma);
    out << "c1 = " << format_double(g.c1) << '\n';
    out << "c2 = " << format_double(g.c2) << '\n';
    out << "alpha = " << format_double(g.alpha) << '\n';
    if (g.l_obs) {
      print_matrix(out, "L_obs", *g.l_obs);
      out << "A + L_obs C Hurwitz: " << yes_no(is_hurwitz(d.scenario.system.a + *g.l_obs * d.scenario.system.c))
          << '\n';
    }
    out << "lambda_max(A P + P A^T - 2 B B^T) = " << format_double(d.lmi_max_eig) << '\n';
    out << "max |Gamma - K^T K| = " << format_double(max_abs(g.gamma - g.k.transpose() * g.k)) << '\n';

    const fs::path dir = output_dir(path, opts, true);
    ensure_dir(dir);
    const fs::path sidecar = dir / (path.stem().string() + ".gains");
    write_file(sidecar, format_gain_file(g, d.lmi_max_eig));
    out << "gains written to " << sidecar.string() << '\n';
    return ExitCode::Ok;
  });
}

ExitCode cmd_bound(const fs::path& path, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Scenario scn = load_with_overrides(path, opts);
    // κ = 0 is meaningful here (the discontinuous limit); validate as if the layer were present.
    const bool zero_kappa = scn.controller.kappa && *scn.controller.kappa == 0.0;
    if (zero_kappa) scn.controller.kappa = 1.0;
    Design d = prepare_design(scn);
    if (zero_kappa) d.scenario.controller.kappa = 0.0;

    const BoundReport b = bounds_for(d);
    out << "controller = " << to_string(d.scenario.controller.kind) << '\n';
    out << "alpha = " << format_double(b.alpha) << '\n';
    out << "kappa = " << format_double(b.kappa) << '\n';
    out << "gamma_max = " << format_double(b.gamma_max) << '\n';
    out << "lambda_max(P) = " << format_double(lambda_max(d.gains.p)) << '\n';
    out << "lambda_min(L1) = " << format_double(d.partition.lambda_min_l1) << '\n';
    out << "D1 radius^2 = " << format_double(b.d1_radius_sq) << '\n';
    out << "envelope offset = " << format_double(b.envelope_offset) << '\n';
    if (d.scenario.controller.kind == ControllerKind::Adaptive) {
      out << "beta = " << format_double(b.beta) << '\n';
      out << "varrho = " << format_double(*b.varrho) << '\n';
      if (!b.d2_radius_sq) {
        err << "error: VarrhoTooLarge: varrho = " << format_double(*b.varrho)
            << " >= alpha = " << format_double(b.alpha) << "; D2 is not certified\n";
        return ExitCode::VarrhoTooLarge;
      }
      out << "D2 radius^2 = " << format_double(*b.d2_radius_sq) << '\n';
    }
    return ExitCode::Ok;
  });
}

ExitCode cmd_simulate(const fs::path& path, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Design d = prepare_design(load_with_overrides(path, opts));
    const BoundReport b = bounds_for(d);
    const Trajectory traj = integrate(d.scenario, d.gains, d.partition);
    const Metrics m =
        compute_metrics(traj, b, d.gains, d.partition, d.scenario.controller, d.scenario.tail_fraction);

    const fs::path dir = output_dir(path, opts, false);
    ensure_dir(dir);
    {
      std::ofstream csv(dir / "trajectory.csv", std::ios::binary | std::ios::trunc);
      if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write trajectory.csv in '" + dir.string() + "'");
      write_trajectory_csv(csv, traj, d.scenario);
    }
    const std::string metrics = format_metrics(m, b, traj, d.scenario);
    write_file(dir / "metrics.txt", metrics);
    write_file(dir / "plot.gp", plot_script(d.scenario));
    out << metrics;

    if (traj.failure) {
      err << "error: NonFiniteState: " << *traj.failure << " (partial trajectory written)\n";
      return ExitCode::NonFiniteState;
    }
    return m.certified() ? ExitCode::Ok : ExitCode::NotCertified;
  });
}

}  // namespace contain
