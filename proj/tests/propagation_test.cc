#include "pfcc/propagation.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "pfcc/errors.hpp"
#include "test_util.hpp"

namespace pfcc {
namespace {

using Set = std::set<int>;

std::vector<double> Uniform(int M, double v = 0.1) { return std::vector<double>(M, v); }

FixedPoint Settle(const DirectedTopology& t, const std::vector<double>& theta) {
  return propagation_fixed_point(init_knowledge(t, theta), t);
}

GTEST_TEST(PropagationTest, HexagonSets) {
  const ScenarioConfig cfg = test::hexagon();
  const FixedPoint fp = Settle(cfg.topology, Uniform(6));
  EXPECT_LE(fp.iterations, 9);
  EXPECT_GE(fp.iterations, 2);
  const auto& f = fp.knowledge.followers;
  EXPECT_EQ(f[0].influential, (Set{0, 1}));
  EXPECT_EQ(f[1].influential, (Set{0, 1, 2, 3}));
  EXPECT_EQ(f[2].influential, (Set{0, 2}));
  EXPECT_EQ(f[3].influential, (Set{0, 1, 2, 3, 4, 5}));
  const auto& l = fp.knowledge.leaders;
  EXPECT_EQ(l[0].influential, Set{});
  EXPECT_EQ(l[2].influential, Set{0});
  EXPECT_EQ(l[3].influential, Set{1});
  EXPECT_EQ(l[5].influential, (Set{0, 1, 3, 4}));
  for (const auto& a : f) {
    double total = 0;
    for (double x : a.alpha) total += x;
    EXPECT_NEAR(total, 1.0, 1e-15);
  }
  EXPECT_DOUBLE_EQ(f[3].alpha[0], 1.0 / 6);
  EXPECT_EQ(f[0].alpha[2], 0.0);
}

GTEST_TEST(PropagationTest, HexagonPropensitySwitch) {
  const ScenarioConfig cfg = test::hexagon();
  const FixedPoint fp = Settle(cfg.topology, Uniform(6));
  const PropensitySchedule::Entry* e = cfg.schedule.activating_at(4000);
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(cfg.schedule.activating_at(3999), nullptr);
  const KnowledgeState k = apply_propensity(fp.knowledge, e->theta);
  EXPECT_TRUE(same_sets(k, fp.knowledge));
  EXPECT_NEAR(k.followers[0].alpha[0], 5.0 / 6, 1e-15);
  EXPECT_NEAR(k.followers[0].alpha[1], 1.0 / 6, 1e-15);
  EXPECT_NEAR(k.followers[3].alpha[0], 0.5, 1e-15);
  EXPECT_NEAR(k.followers[3].alpha[5], 0.1, 1e-15);
}

GTEST_TEST(PropagationTest, FixedPointCountsConfirmingRound) {
  DirectedTopology t(1, 1);
  t.tracking_to_leader(0) = 1;
  t.leader_to_follower(0, 0) = 1;
  // already settled at init: one round to confirm
  EXPECT_EQ(Settle(t, {1.0}).iterations, 1);
  // chain_relay needs two rounds for L2 → L3 → followers plus one to confirm
  const FixedPoint fp = Settle(test::chain_relay(), Uniform(3));
  EXPECT_EQ(fp.iterations, 3);
  for (const auto& f : fp.knowledge.followers) EXPECT_EQ(f.influential, (Set{0, 1, 2}));
}

GTEST_TEST(ItflTest, HandTopologies) {
  {
    const DirectedTopology t = test::chain_relay();
    const auto itfl = itfl_sets(Settle(t, Uniform(3)).knowledge, t);
    EXPECT_EQ(itfl[0], (Set{1, 2}));
    EXPECT_EQ(itfl[1], Set{2});
    EXPECT_EQ(itfl[2], Set{});
  }
  {
    const DirectedTopology t = test::direct_leaders();
    const auto itfl = itfl_sets(Settle(t, Uniform(3)).knowledge, t);
    for (const auto& s : itfl) EXPECT_TRUE(s.empty());
  }
  {
    const DirectedTopology t = test::mixed_relay();
    const auto itfl = itfl_sets(Settle(t, Uniform(4)).knowledge, t);
    EXPECT_EQ(itfl[0], (Set{1, 2, 3}));
    EXPECT_EQ(itfl[1], (Set{2, 3}));
    EXPECT_EQ(itfl[2], Set{});
    EXPECT_EQ(itfl[3], Set{});
  }
}

GTEST_TEST(ItflTest, Hexagon) {
  const ScenarioConfig cfg = test::hexagon();
  const auto itfl = itfl_sets(Settle(cfg.topology, Uniform(6)).knowledge, cfg.topology);
  EXPECT_EQ(itfl[0], (Set{2, 4, 5}));
  EXPECT_EQ(itfl[1], (Set{3, 5}));
  EXPECT_EQ(itfl[3], Set{5});
  EXPECT_EQ(itfl[4], Set{5});
  EXPECT_EQ(itfl[2], Set{});
  EXPECT_EQ(itfl[5], Set{});
}

// Independent oracle: m relays q when q's information reaches m, and m
// reaches some follower that q cannot reach while avoiding other leaders.
std::vector<Set> BruteItfl(const DirectedTopology& t) {
  const int N = t.n_followers, M = t.n_leaders, V = t.node_count();
  const Eigen::MatrixXd a = t.full_adjacency();
  auto closure_without = [&](int keep_leader) {
    std::vector<std::vector<bool>> c(V, std::vector<bool>(V, false));
    auto allowed = [&](int v) { return !t.is_leader_node(v) || keep_leader < 0 || v == keep_leader; };
    for (int u = 0; u < V; ++u) {
      c[u][u] = true;
      for (int v = 0; v < V; ++v)
        if (a(v, u) > 0 && allowed(u) && allowed(v)) c[u][v] = true;
    }
    for (int k = 0; k < V; ++k)
      for (int u = 0; u < V; ++u)
        for (int v = 0; v < V; ++v)
          if (c[u][k] && c[k][v]) c[u][v] = true;
    return c;
  };
  const auto full = closure_without(-1);
  std::vector<Set> out(M);
  for (int q = 0; q < M; ++q) {
    const int vq = t.leader_node(q);
    const auto own = closure_without(vq);
    for (int m = 0; m < M; ++m) {
      const int vm = t.leader_node(m);
      if (m == q || !full[vq][vm]) continue;
      for (int i = 0; i < N; ++i) {
        const int vi = t.follower_node(i);
        if (!own[vq][vi] && full[vm][vi]) {
          out[q].insert(m);
          break;
        }
      }
    }
  }
  return out;
}

GTEST_TEST(ItflTest, MatchesBruteForce) {
  std::mt19937_64 rng(41);
  int nonempty = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int N = 1 + trial % 5, M = 1 + (trial / 5) % 5;
    const DirectedTopology t = test::random_topology(rng, N, M, 0.35);
    const FixedPoint fp = Settle(t, Uniform(M));
    const auto got = itfl_sets(fp.knowledge, t);
    EXPECT_EQ(got, BruteItfl(t)) << "trial " << trial;
    for (const auto& s : got) nonempty += !s.empty();
  }
  EXPECT_GT(nonempty, 20);  // the oracle is actually exercised
}

// Propagated sets equal graph reachability on random graphs.
GTEST_TEST(PropagationTest, SetsMatchReachability) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    const int N = 1 + trial % 6, M = 1 + (trial / 6) % 5;
    const DirectedTopology t = test::random_topology(rng, N, M, 0.3);
    const FixedPoint fp = Settle(t, Uniform(M));
    EXPECT_LE(fp.iterations, std::max(1, N + M - 1));
    const auto c = t.reachability();
    for (int i = 0; i < N; ++i) {
      Set expect;
      for (int q = 0; q < M; ++q)
        if (c[t.leader_node(q)][t.follower_node(i)]) expect.insert(q);
      EXPECT_EQ(fp.knowledge.followers[i].influential, expect);
    }
    for (int q = 0; q < M; ++q) {
      Set expect;
      for (int m = 0; m < M; ++m)
        if (m != q && c[t.leader_node(m)][t.leader_node(q)]) expect.insert(m);
      EXPECT_EQ(fp.knowledge.leaders[q].influential, expect);
    }
  }
}

// Scaling every propensity by a common factor leaves α alone.  The scaled
// inputs are themselves rounded, so in general only to within an ulp; for
// the example's schedule the coefficients come out bit-for-bit equal.
GTEST_TEST(PropagationTest, AlphaScaleInvariance) {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> theta(0.01, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const DirectedTopology t = test::random_topology(rng, 4, 5, 0.4);
    std::vector<double> th(5);
    for (double& x : th) x = theta(rng);
    std::vector<double> scaled = th;
    for (double& x : scaled) x *= 7;
    const FixedPoint a = Settle(t, th), b = Settle(t, scaled);
    for (int i = 0; i < 4; ++i)
      for (int q = 0; q < 5; ++q) {
        const double x = a.knowledge.followers[i].alpha[q], y = b.knowledge.followers[i].alpha[q];
        EXPECT_LE(std::abs(x - y), 2 * std::numeric_limits<double>::epsilon() * x);
      }
  }

  const ScenarioConfig cfg = test::hexagon();
  for (const auto& e : cfg.schedule.entries) {
    std::vector<double> scaled = e.theta;
    for (double& x : scaled) x *= 7;
    const FixedPoint a = Settle(cfg.topology, e.theta), b = Settle(cfg.topology, scaled);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(a.knowledge.followers[i].alpha, b.knowledge.followers[i].alpha);
  }
}

GTEST_TEST(PropagationTest, ConflictingPropensityThrows) {
  const DirectedTopology t = test::chain_relay();
  KnowledgeState k = init_knowledge(t, Uniform(3));
  k = step_propagation(k, t);
  ASSERT_TRUE(k.leaders[2].reaches(1));
  k.leaders[2].propensity[0] = 0.1;
  k.leaders[2].influential.insert(0);
  k.leaders[1].propensity[0] = 0.2;  // disagrees with the copy L3 holds
  EXPECT_THROW(step_propagation(k, t), AssumptionError);
}

GTEST_TEST(PropagationTest, RejectsNonPositivePropensity) {
  const DirectedTopology t = test::chain_relay();
  EXPECT_THROW(init_knowledge(t, {0.1, 0.0, 0.1}), AssumptionError);
  EXPECT_THROW(init_knowledge(t, {0.1, 0.1}), AssumptionError);
  const KnowledgeState k = Settle(t, Uniform(3)).knowledge;
  EXPECT_THROW(apply_propensity(k, {0.1, -1, 0.1}), AssumptionError);

  PropensitySchedule s;
  EXPECT_THROW(s.validate(3), SchemaError);
  s.entries = {{0, {0.1, 0.1, 0.1}}, {10, {0.1, 0.0, 0.1}}};
  EXPECT_THROW(s.validate(3), AssumptionError);
  s.entries = {{0, {0.1, 0.1, 0.1}}, {0, {0.1, 0.1, 0.1}}};
  EXPECT_THROW(s.validate(3), SchemaError);
  s.entries = {{5, {0.1, 0.1, 0.1}}};
  EXPECT_THROW(s.validate(3), SchemaError);
  s.entries = {{0, {0.1, 0.1, 0.1}}, {10, {1, 2, 3}}};
  EXPECT_NO_THROW(s.validate(3));
}

GTEST_TEST(PropagationTest, LaplacianCoefficientsRowStochastic) {
  const ScenarioConfig cfg = test::hexagon();
  const Eigen::MatrixXd c = laplacian_coefficients(cfg.topology);
  ASSERT_EQ(c.rows(), 4);
  ASSERT_EQ(c.cols(), 6);
  EXPECT_LT((c.rowwise().sum() - Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(c.minCoeff(), -1e-15);
  EXPECT_NEAR(c(0, 0), 0.5, 1e-15);
  DirectedTopology bad = test::chain_relay();
  bad.leader_to_follower(0, 2) = 0;
  EXPECT_THROW(laplacian_coefficients(bad), AssumptionError);
}

}  // namespace
}  // namespace pfcc
