#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pfcc {

// Weighted digraph over one tracking leader, M formation leaders and N
// followers.  Every matrix is indexed [receiver, sender]; a positive entry
// means the receiver hears the sender.  Followers never talk to leaders and
// the tracking leader only talks to leaders, so those blocks simply do not
// exist.
//
// Global node numbering: 0 is the tracking leader, 1..N followers,
// N+1..N+M formation leaders.
struct DirectedTopology {
  int n_followers = 0;
  int n_leaders = 0;
  Eigen::MatrixXd follower_adjacency;  // N×N, a_ij
  Eigen::MatrixXd leader_adjacency;    // M×M, a_qm
  Eigen::MatrixXd leader_to_follower;  // N×M, g_i^q
  Eigen::VectorXd tracking_to_leader;  // M,   g_q^0

  DirectedTopology() = default;
  DirectedTopology(int n_followers, int n_leaders);

  int node_count() const { return 1 + n_followers + n_leaders; }
  int follower_node(int i) const { return 1 + i; }
  int leader_node(int q) const { return 1 + n_followers + q; }
  bool is_follower_node(int v) const { return v >= 1 && v <= n_followers; }
  bool is_leader_node(int v) const { return v > n_followers && v < node_count(); }

  // Shape, sign and self-loop checks; throws DimensionError / AssumptionError.
  void validate() const;

  // Full (N+M+1)² weight matrix, [receiver, sender].
  Eigen::MatrixXd full_adjacency() const;

  // closure[u][v] is true when a directed path u → … → v exists (u reaches
  // itself trivially).
  std::vector<std::vector<bool>> reachability() const;
};

struct LaplacianBlocks {
  Eigen::MatrixXd L0;  // M×1
  Eigen::MatrixXd L1;  // N×N
  Eigen::MatrixXd L2;  // N×M
  Eigen::MatrixXd L3;  // M×M
};

LaplacianBlocks build_laplacian(const DirectedTopology& topo);

struct ValidationReport {
  bool spanning_tree = false;
  std::vector<int> unreachable_nodes;           // global node ids
  std::vector<int> followers_without_leader;    // follower indices, 0-based
  bool pass() const { return spanning_tree && followers_without_leader.empty(); }
  std::string summary() const;
};

ValidationReport verify_assumption1(const DirectedTopology& topo);

}  // namespace pfcc
