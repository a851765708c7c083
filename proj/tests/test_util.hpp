#pragma once

#include <random>
#include <string>

#include <Eigen/Dense>

#include "pfcc/scenario.hpp"
#include "pfcc/topology.hpp"

namespace pfcc {
namespace test {

inline std::string scenario_path(const std::string& name) {
  return std::string(PFCC_SCENARIO_DIR) + "/" + name;
}

inline ScenarioConfig hexagon() { return load_scenario(scenario_path("hexagon.json")); }

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  return random_matrix(rng, n, 1, scale);
}

inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  const Eigen::MatrixXd a = random_matrix(rng, n, n);
  return 0.5 * (a + a.transpose());
}

// The three small graphs below use global node ids (followers 1..N, leaders
// N+1..N+M) in their comments.
//
// 0 → 4 → 5 → 6, 6 talks to every follower; nobody else talks to followers.
inline DirectedTopology chain_relay() {
  DirectedTopology t(3, 3);
  t.tracking_to_leader(0) = 1;
  t.leader_adjacency(1, 0) = 1;
  t.leader_adjacency(2, 1) = 1;
  for (int i = 0; i < 3; ++i) t.leader_to_follower(i, 2) = 1;
  return t;
}

// Every leader pinned by the tracking leader and talking to its own follower;
// the followers form a ring.
inline DirectedTopology direct_leaders() {
  DirectedTopology t(3, 3);
  for (int q = 0; q < 3; ++q) {
    t.tracking_to_leader(q) = 1;
    t.leader_to_follower(q, q) = 1;
  }
  t.follower_adjacency(1, 0) = 1;
  t.follower_adjacency(2, 1) = 1;
  t.follower_adjacency(0, 2) = 1;
  return t;
}

// 0 → 4 → 5 → 6 → 7, 6 → F1 → F2 → F3, 7 → F3.
inline DirectedTopology mixed_relay() {
  DirectedTopology t(3, 4);
  t.tracking_to_leader(0) = 1;
  t.leader_adjacency(1, 0) = 1;
  t.leader_adjacency(2, 1) = 1;
  t.leader_adjacency(3, 2) = 1;
  t.leader_to_follower(0, 2) = 1;
  t.follower_adjacency(1, 0) = 1;
  t.follower_adjacency(2, 1) = 1;
  t.leader_to_follower(2, 3) = 1;
  return t;
}

// Random graph in the shape the model allows.  `density` is the edge
// probability per admissible ordered pair.
inline DirectedTopology random_topology(std::mt19937_64& rng, int N, int M, double density,
                                        bool weighted = false) {
  std::bernoulli_distribution edge(density);
  std::uniform_real_distribution<double> w(0.2, 3.0);
  auto weight = [&] { return weighted ? w(rng) : 1.0; };
  DirectedTopology t(N, M);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (i != j && edge(rng)) t.follower_adjacency(i, j) = weight();
  for (int q = 0; q < M; ++q)
    for (int m = 0; m < M; ++m)
      if (q != m && edge(rng)) t.leader_adjacency(q, m) = weight();
  for (int i = 0; i < N; ++i)
    for (int q = 0; q < M; ++q)
      if (edge(rng)) t.leader_to_follower(i, q) = weight();
  for (int q = 0; q < M; ++q)
    if (edge(rng)) t.tracking_to_leader(q) = weight();
  return t;
}

}  // namespace test
}  // namespace pfcc
