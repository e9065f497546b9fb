#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "contain/control.hpp"
#include "contain/graph.hpp"
#include "generators.hpp"
#include "test_support.hpp"

namespace contain {
namespace {

const Topology kPair = build_topology(Matrix{{0, 1}, {0, 0}});
const Topology kPath = build_topology(Matrix{{0, 1, 1}, {1, 0, 1}, {0, 0, 0}});

NetworkState scalar_state(Vector x) {
  NetworkState s;
  s.n = 1;
  s.x = std::move(x);
  return s;
}

ControllerConfig scalar_config(ControllerKind kind) {
  ControllerConfig cfg;
  cfg.kind = kind;
  cfg.kappa = 0.1;
  cfg.gains.k = Matrix{{-1}};
  cfg.gains.gamma = Matrix{{1}};
  cfg.gains.c1 = 1.0;
  cfg.gains.c2 = 1.0;
  cfg.taus = {5.0};
  cfg.phis = {0.005};
  return cfg;
}

void expect_vector_near(const Vector& actual, const Vector& expected, double tol) {
  ASSERT_EQ(actual.size(), expected.size());
  for (std::size_t k = 0; k < actual.size(); ++k) EXPECT_NEAR(actual[k], expected[k], tol) << "component " << k;
}

TEST(Ghat, Examples) {
  expect_vector_near(ghat(Vector{0.0, 0.0}), {0.0, 0.0}, 0.0);
  expect_vector_near(ghat(Vector{3.0, 4.0}), {0.6, 0.8}, 1e-15);
  expect_vector_near(ghat(Vector{-5.0}), {-1.0}, 0.0);
}

TEST(Gsat, Branches) {
  expect_vector_near(gsat(Vector{0.03, 0.04}, 0.1), {0.3, 0.4}, 1e-15);
  expect_vector_near(gsat(Vector{3.0, 4.0}, 0.1), {0.6, 0.8}, 1e-15);
  // on the boundary both branches give w / κ = w / ||w||
  expect_vector_near(gsat(Vector{0.06, 0.08}, 0.1), {0.6, 0.8}, 1e-15);
  expect_vector_near(gsat(Vector{0.06, 0.08}, 0.1), ghat(Vector{0.06, 0.08}), 1e-15);
}

TEST(Rsat, Branches) {
  expect_vector_near(rsat(Vector{0.03, 0.04}, 2.0, 0.1), {0.6, 0.8}, 1e-15);
  expect_vector_near(rsat(Vector{3.0, 4.0}, 2.0, 0.1), {0.6, 0.8}, 1e-15);
  expect_vector_near(rsat(Vector{3.0, 4.0}, 0.0, 0.1), {0.0, 0.0}, 0.0);
}

TEST(ShapingFunctions, NormBounds) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(-6.0, 2.0);
  std::uniform_real_distribution<double> gain(0.0, 20.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 4;
    Matrix w = testing::random_gaussian(rng, n, 1);
    w *= std::pow(10.0, scale(rng));
    const std::span<const double> ws = w.data();
    const double kappa = std::pow(10.0, scale(rng) / 3.0);
    const double d = gain(rng);

    const double g = norm2(ghat(ws));
    EXPECT_TRUE(g == 0.0 || std::abs(g - 1.0) < 1e-15) << g;
    EXPECT_LE(norm2(gsat(ws, kappa)), 1.0 + 1e-15);
    EXPECT_LE(norm2(rsat(ws, d, kappa)), 1.0 + 1e-15);
    if (norm2(ws) > kappa) EXPECT_EQ(gsat(ws, kappa), ghat(ws));
  }
}

TEST(Gsat, LipschitzOneOverKappa) {
  std::mt19937_64 rng(12);
  for (double kappa : {0.01, 0.1, 1.0}) {
    for (int trial = 0; trial < 1000; ++trial) {
      Matrix a = testing::random_gaussian(rng, 3, 1);
      Matrix b = testing::random_gaussian(rng, 3, 1);
      a *= 2.0 * kappa;
      b *= 2.0 * kappa;
      const Vector ga = gsat(a.data(), kappa);
      const Vector gb = gsat(b.data(), kappa);
      Vector diff(3);
      for (std::size_t k = 0; k < 3; ++k) diff[k] = ga[k] - gb[k];
      EXPECT_LE(norm2(diff), norm2((a - b).data()) / kappa * (1.0 + 1e-12));
    }
  }
}

TEST(RelativeState, Examples) {
  expect_vector_near(relative_state(0, scalar_state({1.0, 3.0}), kPair), {-2.0}, 0.0);
  expect_vector_near(relative_state(0, scalar_state({1.0, 0.0, 2.0}), kPath), {0.0}, 0.0);
  expect_vector_near(relative_state(1, scalar_state({5.0, 5.0, 5.0}), kPath), {0.0}, 0.0);
}

TEST(UFollower, ZeroDisagreementGivesZeroInput) {
  for (auto kind : {ControllerKind::DiscontinuousStatic, ControllerKind::ContinuousStatic}) {
    expect_vector_near(u_follower(0, scalar_state({2.0, 2.0}), scalar_config(kind), kPair), {0.0}, 0.0);
  }
}

TEST(UFollower, ScalarPair) {
  // σ = -2, Kσ = 2, u = c1 Kσ + c2 sign(Kσ) = 3
  const auto s = scalar_state({1.0, 3.0});
  expect_vector_near(u_follower(0, s, scalar_config(ControllerKind::DiscontinuousStatic), kPair), {3.0}, 0.0);
  expect_vector_near(u_follower(0, s, scalar_config(ControllerKind::ContinuousStatic), kPair), {3.0}, 0.0);
}

TEST(UFollower, ContinuousEqualsDiscontinuousOutsideLayer) {
  std::mt19937_64 rng(13);
  ControllerConfig disc = scalar_config(ControllerKind::DiscontinuousStatic);
  ControllerConfig cont = scalar_config(ControllerKind::ContinuousStatic);
  for (auto* cfg : {&disc, &cont}) {
    cfg->gains.k = Matrix{{-0.7, -2.1}};
    cfg->gains.c1 = 1.7;
    cfg->gains.c2 = 6.0;
  }
  for (int trial = 0; trial < 500; ++trial) {
    NetworkState s;
    s.n = 2;
    const Matrix x = testing::random_gaussian(rng, 6, 1);
    s.x.assign(x.data().begin(), x.data().end());
    const Vector sigma = relative_state(0, s, kPath);
    const Vector ks = contain::apply(cont.gains.k, sigma);
    if (norm2(ks) <= *cont.kappa) continue;
    EXPECT_EQ(u_follower(0, s, cont, kPath), u_follower(0, s, disc, kPath));
  }
}

TEST(UFollower, AdaptiveUsesOwnGain) {
  auto s = scalar_state({1.0, 3.0});
  const auto cfg = scalar_config(ControllerKind::Adaptive);
  EXPECT_ERROR_CODE((void)u_follower(0, s, cfg, kPair), ErrorCode::MissingState);
  s.d = {2.0};
  // d Kσ + d · rsat(Kσ, d, κ) = 2·2 + 2·1
  expect_vector_near(u_follower(0, s, cfg, kPair), {6.0}, 1e-15);
  s.d = {0.0};
  expect_vector_near(u_follower(0, s, cfg, kPair), {0.0}, 0.0);
}

TEST(UFollower, ObserverUsesEstimates) {
  auto s = scalar_state({1.0, 3.0});
  const auto cfg = scalar_config(ControllerKind::ObserverBased);
  EXPECT_ERROR_CODE((void)u_follower(0, s, cfg, kPair), ErrorCode::MissingState);
  s.v = {0.0, 0.0};
  expect_vector_near(u_follower(0, s, cfg, kPair), {0.0}, 0.0);
  s.v = {1.0, 3.0};
  expect_vector_near(u_follower(0, s, cfg, kPair), {3.0}, 0.0);
}

TEST(UFollower, ContinuousNeedsKappa) {
  auto cfg = scalar_config(ControllerKind::ContinuousStatic);
  cfg.kappa.reset();
  EXPECT_ERROR_CODE((void)u_follower(0, scalar_state({1.0, 3.0}), cfg, kPair), ErrorCode::InvalidArgument);
}

TEST(AdaptiveGainRate, Examples) {
  auto cfg = scalar_config(ControllerKind::Adaptive);
  auto s = scalar_state({2.0, 2.0});
  s.d = {1.0};
  EXPECT_DOUBLE_EQ(adaptive_gain_rate(0, s, cfg, kPair), -5.0 * 0.005);

  // d = 0, Kσ = 2: 5 (0 + 4 + 2) = 30
  s = scalar_state({1.0, 3.0});
  s.d = {0.0};
  EXPECT_DOUBLE_EQ(adaptive_gain_rate(0, s, cfg, kPair), 30.0);

  cfg.phis = {0.0};
  s = scalar_state({2.0, 2.0});
  s.d = {7.0};
  EXPECT_EQ(adaptive_gain_rate(0, s, cfg, kPair), 0.0);
}

TEST(ObserverRate, Examples) {
  const LinearSystem scalar{Matrix{{0}}, Matrix{{1}}, Matrix{{1}}};
  auto s = scalar_state({1.0, 0.0});
  s.v = {2.0, 0.0};
  expect_vector_near(observer_rate(0, s, Vector{0.0}, scalar, Matrix{{-1}}), {-1.0}, 0.0);

  // zero estimation error: v' equals x' = A x + B u
  const LinearSystem agent{Matrix{{0, 1}, {-1, 1}}, Matrix{{0}, {1}}, Matrix::identity(2)};
  NetworkState s2;
  s2.n = 2;
  s2.x = {0.3, -1.2};
  s2.v = s2.x;
  const Vector u{0.7};
  Vector xdot = contain::apply(agent.a, s2.agent(0));
  apply_add(agent.b, u, xdot);
  expect_vector_near(observer_rate(0, s2, u, agent, Matrix{{-2, 0.5}, {0.1, -3}}), xdot, 1e-15);
}

TEST(LeaderInput, Examples) {
  LeaderInputSpec zero{Matrix(1, 2), {}, 1.0};
  expect_vector_near(leader_input(zero, Vector{4.0, 5.0}, 1.0).u, {0.0}, 0.0);

  const LeaderInputSpec l7{Matrix{{0, -2}}, {{0, 4.0, 2.0, 0.0}}, 6.0};
  const auto u7 = leader_input(l7, Vector{1.0, 0.5}, std::numbers::pi / 4);
  expect_vector_near(u7.u, {3.0}, 1e-15);
  EXPECT_FALSE(u7.exceeds_bound);

  const LeaderInputSpec l8{Matrix{{-1, -3}}, {{0, 2.0, 1.0, std::numbers::pi / 2}}, 1.5};
  const auto u8 = leader_input(l8, Vector{0.0, 0.0}, 0.0);
  expect_vector_near(u8.u, {2.0}, 1e-15);
  EXPECT_TRUE(u8.exceeds_bound);
}

TEST(ControllerKind, NamesRoundTrip) {
  for (auto kind : {ControllerKind::DiscontinuousStatic, ControllerKind::ContinuousStatic, ControllerKind::Adaptive,
                    ControllerKind::ObserverBased}) {
    EXPECT_EQ(parse_controller_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_controller_kind("sliding"));
}

}  // namespace
}  // namespace contain
