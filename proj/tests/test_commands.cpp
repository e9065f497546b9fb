#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "contain/commands.hpp"
#include "test_support.hpp"

namespace contain {
namespace {

namespace fs = std::filesystem;

using Command = ExitCode (*)(const fs::path&, const CommandOptions&, std::ostream&, std::ostream&);

struct RunResult {
  ExitCode code;
  std::string out;
  std::string err;
};

RunResult run(Command cmd, const fs::path& path, const CommandOptions& opts = {}) {
  std::ostringstream out, err;
  const ExitCode code = cmd(path, opts, out, err);
  return {code, out.str(), err.str()};
}

std::string edit(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    ADD_FAILURE() << "missing column " << name;
    return 0;
  }
};

Csv read_csv(const fs::path& path) {
  Csv csv;
  std::istringstream in(read_text(path));
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (std::getline(in, line)) csv.header = split(line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(std::strtod(cell.c_str(), nullptr));
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

std::map<std::string, std::string> read_metrics(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

class Commands : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  fs::path scenario(const std::string& text, const std::string& name = "case.scn") {
    return testing::write_text(dir_ / name, text);
  }
  fs::path default_with(const std::string& from = "", const std::string& to = "") {
    std::string text = default_scenario_text();
    if (!from.empty()) text = edit(text, from, to);
    return scenario(text);
  }
  CommandOptions short_run(ControllerKind kind, double t_end, const std::string& out = "out") {
    CommandOptions o;
    o.overrides.controller = kind;
    o.overrides.t_end = t_end;
    o.out_dir = dir_ / out;
    return o;
  }

  fs::path dir_;
};

TEST(ExitCodes, PerErrorClass) {
  EXPECT_EQ(exit_code_for(ErrorCode::Parse), ExitCode::ParseError);
  EXPECT_EQ(exit_code_for(ErrorCode::BadAdjacency), ExitCode::ParseError);
  EXPECT_EQ(exit_code_for(ErrorCode::DimensionMismatch), ExitCode::ParseError);
  EXPECT_EQ(exit_code_for(ErrorCode::InvalidArgument), ExitCode::ParseError);
  EXPECT_EQ(exit_code_for(ErrorCode::NoLeader), ExitCode::AssumptionFailure);
  EXPECT_EQ(exit_code_for(ErrorCode::NoFollower), ExitCode::AssumptionFailure);
  EXPECT_EQ(exit_code_for(ErrorCode::AssumptionViolated), ExitCode::AssumptionFailure);
  EXPECT_EQ(exit_code_for(ErrorCode::NotControllable), ExitCode::NotControllable);
  EXPECT_EQ(exit_code_for(ErrorCode::VarrhoTooLarge), ExitCode::VarrhoTooLarge);
  EXPECT_EQ(exit_code_for(ErrorCode::NonFiniteState), ExitCode::NonFiniteState);
  EXPECT_EQ(exit_code_for(ErrorCode::NoConvergence), ExitCode::InternalError);
  EXPECT_EQ(static_cast<int>(ExitCode::NotCertified), 5);
}

TEST_F(Commands, ValidateDefault) {
  const auto r = run(cmd_validate, default_with());
  EXPECT_EQ(r.code, ExitCode::Ok) << r.err;
  EXPECT_NE(r.out.find("followers (M) = 6: 1 2 3 4 5 6"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("graph check: PASS"), std::string::npos);
  EXPECT_NE(r.out.find("lambda_min(L1) = 0.58578643762"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("leader 7 input bound gamma = 6"), std::string::npos);
  EXPECT_NE(r.out.find("leader 8 input bound gamma = 4"), std::string::npos);
}

TEST_F(Commands, ValidateDirectedFollowerPair) {
  // follower 2 stops listening to follower 1, which still listens to 2
  const auto r = run(cmd_validate, default_with("[1, 0, 1, 0, 0, 0, 1, 0]", "[0, 0, 1, 0, 0, 0, 1, 0]"));
  EXPECT_EQ(r.code, ExitCode::AssumptionFailure);
  EXPECT_NE(r.out.find("graph check: FAIL"), std::string::npos);
  EXPECT_TRUE(std::regex_search(r.err, std::regex("asymmetric follower edge (2 -> 1|1 -> 2)"))) << r.err;
}

TEST_F(Commands, ValidateMalformedRow) {
  const auto r = run(cmd_validate, default_with("[0, 0, 1, 0, 1, 0, 0, 1],", "[0, 0, 1, 0, 1, 0, 0],"));
  EXPECT_EQ(r.code, ExitCode::ParseError);
  EXPECT_TRUE(std::regex_search(r.err, std::regex("line [0-9]+: \\[graph\\] adjacency: malformed matrix row 4")))
      << r.err;
}

TEST_F(Commands, MissingFileIsParseError) {
  EXPECT_EQ(run(cmd_validate, dir_ / "absent.scn").code, ExitCode::ParseError);
}

TEST_F(Commands, SynthDefaultWritesSidecar) {
  const auto path = default_with();
  const auto r = run(cmd_synth, path);
  ASSERT_EQ(r.code, ExitCode::Ok) << r.err;
  const auto sidecar = dir_ / "case.gains";
  ASSERT_TRUE(fs::exists(sidecar));
  const GainSet g = parse_gain_file(read_text(sidecar));
  EXPECT_LT(g.k(0, 0), 0.0);
  EXPECT_LT(g.k(0, 1), 0.0);
  EXPECT_EQ(g.c2, 6.0);
  EXPECT_GT(g.alpha, 0.0);
  EXPECT_MATRIX_NEAR(g.gamma, g.k.transpose() * g.k, 1e-12);
  const auto kv = read_metrics(r.out);
  EXPECT_LT(std::strtod(kv.at("lambda_max(A P + P A^T - 2 B B^T)").c_str(), nullptr), -1e-6);

  CommandOptions o;
  o.out_dir = dir_ / "gains_here";
  ASSERT_EQ(run(cmd_synth, path, o).code, ExitCode::Ok);
  EXPECT_TRUE(fs::exists(dir_ / "gains_here" / "case.gains"));
}

const std::string kScalarPair = R"([system]
A = 0
B = 1
C = 1
[graph]
adjacency = [[0, 1], [0, 0]]
[controller]
kind = continuous_static
kappa = 0.1
[leaders]
2.gain = 0
2.gamma = 1
[sim]
x0 = [[1], [3]]
t_end = 1
h = 0.01
)";

TEST_F(Commands, SynthScalarIntegrator) {
  CommandOptions o;
  o.overrides.controller = ControllerKind::ObserverBased;
  const auto r = run(cmd_synth, scenario(kScalarPair), o);
  ASSERT_EQ(r.code, ExitCode::Ok) << r.err;
  const GainSet g = parse_gain_file(read_text(dir_ / "case.gains"));
  // A = 0, B = 1, Q = 1: X = 1, so P = 1, K = -1, α = 2
  EXPECT_NEAR(g.p(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(g.k(0, 0), -1.0, 1e-9);
  EXPECT_NEAR(g.alpha, 2.0, 1e-8);
  ASSERT_TRUE(g.l_obs);
  EXPECT_NEAR((*g.l_obs)(0, 0), -1.0, 1e-9);
  EXPECT_NE(r.out.find("A + L_obs C Hurwitz: true"), std::string::npos);
}

TEST_F(Commands, SynthUncontrollable) {
  const auto path = default_with("A = [[0, 1], [-1, 1]]\nB = [[0], [1]]", "A = [[1, 0], [0, 1]]\nB = [[0], [0]]");
  EXPECT_EQ(run(cmd_synth, path).code, ExitCode::NotControllable);
}

TEST_F(Commands, BoundDefault) {
  const auto path = default_with();
  const auto r = run(cmd_bound, path);
  ASSERT_EQ(r.code, ExitCode::Ok) << r.err;
  const auto kv = read_metrics(r.out);
  EXPECT_EQ(kv.at("varrho"), "0.025");
  ASSERT_TRUE(kv.count("D2 radius^2"));
  EXPECT_LT(0.025, std::strtod(kv.at("alpha").c_str(), nullptr));

  CommandOptions zero;
  zero.overrides.kappa = 0.0;
  const auto r0 = run(cmd_bound, path, zero);
  ASSERT_EQ(r0.code, ExitCode::Ok) << r0.err;
  EXPECT_EQ(read_metrics(r0.out).at("D1 radius^2"), "0");
}

TEST_F(Commands, BoundVarrhoTooLarge) {
  const auto r = run(cmd_bound, default_with("tau = 5", "tau = 1000"));
  EXPECT_EQ(r.code, ExitCode::VarrhoTooLarge);
  EXPECT_NE(r.err.find("varrho = 5 >= alpha = "), std::string::npos) << r.err;
}

TEST_F(Commands, SimulateStaticWritesArtifacts) {
  const auto path = default_with();
  const auto r = run(cmd_simulate, path, short_run(ControllerKind::ContinuousStatic, 1.0));
  ASSERT_TRUE(r.code == ExitCode::Ok || r.code == ExitCode::NotCertified) << r.err;
  const fs::path out = dir_ / "out";
  ASSERT_TRUE(fs::exists(out / "trajectory.csv"));
  ASSERT_TRUE(fs::exists(out / "metrics.txt"));
  ASSERT_TRUE(fs::exists(out / "plot.gp"));

  const std::string raw = read_text(out / "trajectory.csv");
  EXPECT_EQ(raw.find('\r'), std::string::npos);
  const Csv csv = read_csv(out / "trajectory.csv");
  EXPECT_EQ(csv.rows.size(), 1000u);
  for (const auto& name : csv.header) EXPECT_NE(name.rfind("d_", 0), 0u) << "unexpected " << name;
  EXPECT_EQ(csv.header.front(), "t");
  EXPECT_EQ(csv.header[1], "x1_1");
  EXPECT_EQ(csv.header[17], "u1_1");

  const auto kv = read_metrics(read_text(out / "metrics.txt"));
  EXPECT_TRUE(kv.count("d1_certified"));
  EXPECT_TRUE(kv.count("envelope_violations"));
  EXPECT_FALSE(kv.count("d_sup"));
  EXPECT_EQ(kv.at("samples"), "1000");
}

TEST_F(Commands, CsvRoundTripsInMemoryValues) {
  Scenario scn = parse_scenario(default_scenario_text());
  scn.t_end = 0.5;
  const Design d = prepare_design(scn);
  const Trajectory traj = integrate(d.scenario, d.gains, d.partition);
  const auto path = dir_ / "traj.csv";
  {
    std::ofstream f(path, std::ios::binary);
    write_trajectory_csv(f, traj, d.scenario);
  }
  const Csv csv = read_csv(path);
  ASSERT_EQ(csv.rows.size(), traj.size());
  const std::size_t xi_col = csv.column("xi_norm");
  const std::size_t d3_col = csv.column("d_3");
  const std::size_t x8_col = csv.column("x8_2");
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_NEAR(csv.rows[k][xi_col], traj.xi_norm[k], 1e-12);
    // shortest round-trip formatting is exact
    EXPECT_EQ(csv.rows[k][xi_col], traj.xi_norm[k]);
    EXPECT_EQ(csv.rows[k][d3_col], traj.states[k].d[2]);
    EXPECT_EQ(csv.rows[k][x8_col], traj.states[k].x[7 * 2 + 1]);
    EXPECT_EQ(csv.rows[k][0], traj.times[k]);
  }
}

TEST_F(Commands, SimulateAdaptiveHasGainColumns) {
  const auto r = run(cmd_simulate, default_with(), short_run(ControllerKind::Adaptive, 0.5));
  ASSERT_TRUE(r.code == ExitCode::Ok || r.code == ExitCode::NotCertified) << r.err;
  const Csv csv = read_csv(dir_ / "out" / "trajectory.csv");
  for (int i = 1; i <= 6; ++i) {
    const std::size_t c = csv.column("d_" + std::to_string(i));
    for (const auto& row : csv.rows) ASSERT_TRUE(std::isfinite(row[c]));
  }
  EXPECT_EQ(csv.header.back(), "d_6");
  const auto kv = read_metrics(r.out);
  EXPECT_TRUE(kv.count("d2_certified"));
  EXPECT_TRUE(kv.count("d_sup"));
}

TEST_F(Commands, SimulateObserverHasEstimateColumns) {
  const auto r = run(cmd_simulate, default_with(), short_run(ControllerKind::ObserverBased, 0.2));
  ASSERT_TRUE(r.code == ExitCode::Ok || r.code == ExitCode::NotCertified) << r.err;
  const Csv csv = read_csv(dir_ / "out" / "trajectory.csv");
  EXPECT_EQ(csv.header.back(), "v8_2");
  EXPECT_TRUE(read_metrics(r.out).count("estimation_error_slope"));
}

TEST_F(Commands, SingleStepHorizonGivesSingleRow) {
  const auto r = run(cmd_simulate, default_with(), short_run(ControllerKind::ContinuousStatic, 0.001));
  ASSERT_TRUE(r.code == ExitCode::Ok || r.code == ExitCode::NotCertified) << r.err;
  const Csv csv = read_csv(dir_ / "out" / "trajectory.csv");
  EXPECT_EQ(csv.rows.size(), 1u);
  EXPECT_EQ(read_metrics(r.out).at("samples"), "1");
}

TEST_F(Commands, SimulateOutsideBoundIsNotCertified) {
  // follower 1 starts 70 units from the hull; one sample cannot be inside D1
  const auto path = default_with("x0 = [[0.5, -0.5]", "x0 = [[50, -50]");
  const auto r = run(cmd_simulate, path, short_run(ControllerKind::ContinuousStatic, 0.001));
  EXPECT_EQ(r.code, ExitCode::NotCertified) << r.err;
  const auto kv = read_metrics(r.out);
  EXPECT_EQ(kv.at("d1_certified"), "false");
  EXPECT_EQ(kv.at("certified"), "false");
}

TEST_F(Commands, PlotScriptUsesExistingColumns) {
  for (auto kind : {ControllerKind::ContinuousStatic, ControllerKind::Adaptive, ControllerKind::ObserverBased}) {
    Scenario scn = parse_scenario(default_scenario_text());
    scn.controller.kind = kind;
    const auto cols = trajectory_columns(scn);
    const std::set<std::string> header(cols.begin(), cols.end());
    const std::string script = plot_script(scn);
    const std::regex ref("column\\(\"([^\"]+)\"\\)");
    std::size_t refs = 0;
    for (std::sregex_iterator it(script.begin(), script.end(), ref), end; it != end; ++it) {
      EXPECT_TRUE(header.count((*it)[1].str())) << (*it)[1].str();
      ++refs;
    }
    EXPECT_GT(refs, 0u);
    EXPECT_NE(script.find("set datafile separator ','"), std::string::npos);
  }
}

TEST_F(Commands, SimulateDivergenceExitsNonFinite) {
  std::string text = edit(kScalarPair, "2.gain = 0", "2.gain = 10000");
  text = edit(text, "h = 0.01", "h = 0.1");
  text = edit(text, "t_end = 1", "t_end = 100");
  CommandOptions o;
  o.out_dir = dir_ / "out";
  const auto r = run(cmd_simulate, scenario(text), o);
  EXPECT_EQ(r.code, ExitCode::NonFiniteState) << r.err;
  EXPECT_NE(r.err.find("NonFiniteState"), std::string::npos);
  const Csv csv = read_csv(dir_ / "out" / "trajectory.csv");
  EXPECT_GT(csv.rows.size(), 0u);
  EXPECT_LT(csv.rows.size(), 1000u);
}

TEST_F(Commands, SimulateIsByteIdentical) {
  const auto path = default_with();
  ASSERT_NE(run(cmd_simulate, path, short_run(ControllerKind::ContinuousStatic, 0.5, "a")).code,
            ExitCode::InternalError);
  ASSERT_NE(run(cmd_simulate, path, short_run(ControllerKind::ContinuousStatic, 0.5, "b")).code,
            ExitCode::InternalError);
  EXPECT_EQ(read_text(dir_ / "a" / "trajectory.csv"), read_text(dir_ / "b" / "trajectory.csv"));
  EXPECT_EQ(read_text(dir_ / "a" / "metrics.txt"), read_text(dir_ / "b" / "metrics.txt"));
}

TEST_F(Commands, BadOverrideIsParseError) {
  CommandOptions o;
  o.overrides.h = -1.0;
  EXPECT_EQ(run(cmd_simulate, default_with(), o).code, ExitCode::ParseError);
}

}  // namespace
}  // namespace contain
