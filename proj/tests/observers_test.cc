#include "pfcc/observers.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pfcc/errors.hpp"
#include "pfcc/matops.hpp"
#include "test_util.hpp"

namespace pfcc {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd Swap() {
  MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  return a;
}

ObserverConfig Leaderish(double beta = 100.0) {
  ObserverConfig c;
  c.xi = 4;
  c.coupling = 8;
  c.consensus = 0.7;
  c.F = MatrixXd(2, 2);
  c.F << 0.1, 0.5, 0.5, 0.1;
  c.L0_scale = beta;
  return c;
}

double MinEig(const MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (m + m.transpose())).eigenvalues()(0);
}

GTEST_TEST(RlsUpdateTest, HandValues) {
  const MatrixXd L = 3.0 * MatrixXd::Identity(2, 2);
  EXPECT_TRUE(rls_update_L(L, observer_regressor(VectorXd::Zero(2))).isApprox(L, 1e-15));

  VectorXd one(1);
  one << 1;
  EXPECT_NEAR(rls_update_L(MatrixXd::Identity(1, 1), observer_regressor(one))(0, 0), 0.5, 1e-15);
}

GTEST_TEST(RlsUpdateTest, RejectsNonPositiveDefinite) {
  MatrixXd L(2, 2);
  L << 1, 0, 0, -1;
  EXPECT_THROW(rls_update_L(L, observer_regressor(VectorXd::Ones(2))), AssumptionError);
  MatrixXd asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(rls_update_L(asym, observer_regressor(VectorXd::Ones(2))), AssumptionError);
  EXPECT_THROW(rls_update_L(MatrixXd::Identity(2, 2), MatrixXd::Ones(3, 3)), DimensionError);
}

GTEST_TEST(RlsUpdateTest, RegressorShape) {
  VectorXd x(2);
  x << 2, 3;
  const MatrixXd z = observer_regressor(x);
  ASSERT_EQ(z.rows(), 4);
  ASSERT_EQ(z.cols(), 2);
  // zᵀ·vec of a row-stacked matrix is that matrix times x
  MatrixXd a(2, 2);
  a << 1, 2, 3, 4;
  VectorXd rows(4);
  rows << 1, 2, 3, 4;
  EXPECT_TRUE((z.transpose() * rows).isApprox(a * x, 1e-15));
}

// The Woodbury downdate equals the explicit information-form inverse.
GTEST_TEST(RlsUpdateTest, MatchesDirectInverse) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 4;
    const MatrixXd r = test::random_matrix(rng, n, n);
    const MatrixXd L = r * r.transpose() + 0.1 * MatrixXd::Identity(n, n);
    const MatrixXd xb = trial % 2 ? observer_regressor(test::random_vector(rng, n))
                                  : test::random_matrix(rng, n + 1, n);
    const MatrixXd direct = (L.inverse() + xb.transpose() * xb).inverse();
    EXPECT_LE((rls_update_L(L, xb) - direct).norm(), 1e-10 * std::max(1.0, direct.norm())) << trial;
  }
}

// Along random regressor sequences: L stays positive definite, L⁻¹ grows in
// the Loewner order, L₊⁻¹ ≻ x̄ᵀx̄, and x̄ᵀx̄(L₊⁻¹+ξI)⁻¹ is bounded by
// σ²/(ξ+σ²).
GTEST_TEST(RlsUpdateTest, TrajectoryInequalitiesProperty) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> scale(0.01, 3.0);
  int cases = 0;
  for (double beta : {1.0, 100.0}) {
    for (int traj = 0; traj < 40; ++traj) {
      const int n = 1 + traj % 4;
      const double xi = 1.0 + traj % 5;
      MatrixXd L = beta * MatrixXd::Identity(n, n);
      for (int k = 0; k < 30; ++k, ++cases) {
        const MatrixXd xb = observer_regressor(test::random_vector(rng, n, scale(rng)));
        const MatrixXd next = rls_update_L(L, xb);
        const MatrixXd info = next.inverse();
        const MatrixXd gram = xb.transpose() * xb;
        ASSERT_GT(MinEig(next), 0.0);
        ASSERT_GT(MinEig(info - gram), 0.0) << "beta " << beta << " traj " << traj << " k " << k;
        ASSERT_GT(MinEig(info - L.inverse()), -1e-9 * info.norm());
        const double s2 = std::pow(Eigen::JacobiSVD<MatrixXd>(xb).singularValues()(0), 2);
        const MatrixXd prod = gram * (info + xi * MatrixXd::Identity(n, n)).inverse();
        const double lmax = prod.eigenvalues().real().maxCoeff();
        ASSERT_LT(lmax, s2 / (xi + s2)) << "beta " << beta << " traj " << traj << " k " << k;
        L = next;
      }
    }
  }
  EXPECT_GE(cases, 1000);
}

GTEST_TEST(RlsObserverTest, ConfigValidation) {
  ObserverConfig c = Leaderish();
  EXPECT_NO_THROW(c.validate(2));
  EXPECT_THROW(c.validate(3), DimensionError);
  c.xi = 0.5;
  EXPECT_THROW(c.validate(2), AssumptionError);
  c = Leaderish();
  c.coupling = 0;
  EXPECT_THROW(RlsObserver(c, VectorXd::Zero(2)), AssumptionError);
  EXPECT_THROW(RlsObserver(Leaderish(), VectorXd::Zero(2), MatrixXd::Zero(3, 3)), DimensionError);
}

GTEST_TEST(RlsObserverTest, ConvergedObserverStaysPut) {
  VectorXd x(2);
  x << 0.3, -0.4;
  RlsObserver obs(Leaderish(), x, Swap());
  const MatrixXd L0 = obs.L();
  observer_step(obs, VectorXd::Zero(2), [](const VectorXd& v) { return VectorXd::Zero(v.size()); });
  EXPECT_TRUE(obs.x_hat().isApprox(Swap() * x, 1e-15));
  EXPECT_EQ(obs.A_hat(), Swap());
  EXPECT_TRUE(obs.L().isApprox(rls_update_L(L0, observer_regressor(x)), 1e-15));
}

// One observer pinned to an autonomous target, no neighbours, started in the
// unit ball.
GTEST_TEST(RlsObserverTest, SinglePinnedObserverConverges) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd target(2);
    target << 1.0, 0.5;
    VectorXd start(2);
    start << u(rng), u(rng);
    RlsObserver obs(Leaderish(0.06), start);
    std::vector<double> err;
    for (int k = 0; k < 500; ++k) {
      err.push_back((obs.x_hat() - target).norm());
      const VectorXd target_next = Swap() * target;
      observer_step(obs, obs.x_hat() - target, [&](const VectorXd& v) { return VectorXd(v - target_next); });
      target = target_next;
    }
    // the RLS gain shrinks as data accumulates, so the decay is slow but steady
    EXPECT_LT(err.back(), err.front());
    // tail trend: each 50-tick window's max is below the previous one's
    double prev = 1e300;
    for (int w = 300; w < 500; w += 50) {
      double m = 0;
      for (int k = w; k < w + 50; ++k) m = std::max(m, err[k]);
      EXPECT_LT(m, prev);
      prev = m;
    }
  }
}

GTEST_TEST(DisagreementTest, TrackingHandValues) {
  const DirectedTopology t = test::chain_relay();
  EstimateBoard b;
  VectorXd a(1), c(1), d(1), xo(1);
  a << 1;
  c << 3;
  d << 6;
  xo << 0.5;
  b.leader_tracking = {a, c, d};
  b.follower_tracking = {a, c, d};
  EXPECT_DOUBLE_EQ(leader_tracking_disagreement(t, 0, b, xo)(0), 0.5);
  EXPECT_DOUBLE_EQ(leader_tracking_disagreement(t, 1, b, xo)(0), 2.0);
  EXPECT_DOUBLE_EQ(follower_tracking_disagreement(t, 0, b)(0), -5.0);
  EXPECT_DOUBLE_EQ(follower_tracking_disagreement(t, 2, b)(0), 0.0);
}

// A follower whose only neighbour does not know the target gets nothing from
// it; without a direct pin its disagreement is identically zero.
GTEST_TEST(DisagreementTest, FormationGating) {
  DirectedTopology t(2, 2);
  t.tracking_to_leader(0) = 1;
  t.tracking_to_leader(1) = 1;
  t.leader_to_follower(0, 0) = 1;
  t.follower_adjacency(1, 0) = 1;
  t.leader_to_follower(1, 1) = 1;
  KnowledgeState k = propagation_fixed_point(init_knowledge(t, {1, 1}), t).knowledge;
  ASSERT_TRUE(k.followers[1].reaches(0));
  VectorXd h(1), e0(1), e1(1);
  h << 10;
  e0 << 4;
  e1 << 7;
  EstimateBoard b;
  b.leader_formation.resize(2);
  b.follower_formation = {{{0, e0}}, {{0, e1}, {1, e1}}};
  // F2 hears F1, which knows L1: relay contribution 7 − 4
  EXPECT_DOUBLE_EQ(follower_formation_disagreement(t, k, 1, 0, b, h)(0), 3.0);
  // F1 is pinned to L1: 4 − 10
  EXPECT_DOUBLE_EQ(follower_formation_disagreement(t, k, 0, 0, b, h)(0), -6.0);

  // now pretend F1 has not learned about L1 yet
  KnowledgeState gated = k;
  gated.followers[0].influential.clear();
  gated.followers[0].propensity.clear();
  EXPECT_EQ(follower_formation_disagreement(t, gated, 1, 0, b, h), VectorXd::Zero(1));
  EXPECT_THROW(follower_formation_disagreement(t, gated, 0, 0, b, h), AssumptionError);
  EXPECT_THROW(leader_formation_disagreement(t, k, 0, 1, b, h), AssumptionError);
}

GTEST_TEST(DisagreementTest, LeaderFormationRelay) {
  const DirectedTopology t = test::chain_relay();
  const KnowledgeState k = propagation_fixed_point(init_knowledge(t, {1, 1, 1}), t).knowledge;
  VectorXd h(1), e1(1), e2(1);
  h << 1;
  e1 << 2;
  e2 << 5;
  EstimateBoard b;
  b.leader_formation = {{}, {{0, e1}}, {{0, e2}, {1, e2}}};
  EXPECT_DOUBLE_EQ(leader_formation_disagreement(t, k, 1, 0, b, h)(0), 1.0);  // pinned
  EXPECT_DOUBLE_EQ(leader_formation_disagreement(t, k, 2, 0, b, h)(0), 3.0);  // relayed
}

GTEST_TEST(SchurConsensusTest, Cases) {
  const MatrixXd G = MatrixXd::Identity(1, 1);
  EXPECT_FALSE(check_schur_consensus(Swap(), 0.0, Leaderish().F, G));
  EXPECT_FALSE(check_schur_consensus(Swap(), 1.0, MatrixXd::Zero(2, 2), G));
  EXPECT_TRUE(check_schur_consensus(0.5 * Swap(), 1.0, MatrixXd::Zero(2, 2), G));

  const ScenarioConfig cfg = test::hexagon();
  const LaplacianBlocks lb = build_laplacian(cfg.topology);
  MatrixXd H = MatrixXd::Zero(6, 6);
  H.diagonal() = cfg.topology.tracking_to_leader;
  const ObserverConfig& lc = cfg.observers.leader_tracking;
  EXPECT_TRUE(check_schur_consensus(cfg.A0, lc.consensus, lc.F, lb.L3 + H));
}

GTEST_TEST(CouplingBoundTest, ScalarClosedForm) {
  const double l = 0.2, g = 1.5, s = 0.6, z = 2.0, xi = 4.0;
  const CouplingBound b = coupling_gain_bound(MatrixXd::Constant(1, 1, z), MatrixXd::Constant(1, 1, l),
                                              MatrixXd::Constant(1, 1, g), MatrixXd::Constant(1, 1, s), xi);
  const double gamma = z * z / (xi + z * z);
  EXPECT_NEAR(b.value, l * g * (1 - s * s) / (g * g * gamma), 1e-14);
  EXPECT_FALSE(b.unconstrained);
  EXPECT_FALSE(b.infeasible);

  const CouplingBound free = coupling_gain_bound(MatrixXd::Zero(1, 1), MatrixXd::Constant(1, 1, l),
                                                 MatrixXd::Constant(1, 1, g), MatrixXd::Constant(1, 1, s), xi);
  EXPECT_TRUE(free.unconstrained);
  EXPECT_TRUE(std::isinf(free.value));

  EXPECT_THROW(coupling_gain_bound(MatrixXd::Zero(1, 1), MatrixXd::Constant(1, 1, l),
                                   MatrixXd::Constant(1, 1, g), MatrixXd::Constant(1, 1, 1.2), xi),
               AssumptionError);
  const CouplingBound bad = coupling_gain_bound(MatrixXd::Zero(1, 1), MatrixXd::Constant(1, 1, -l),
                                                MatrixXd::Constant(1, 1, g), MatrixXd::Constant(1, 1, s), xi);
  EXPECT_TRUE(bad.infeasible);
}

}  // namespace
}  // namespace pfcc
