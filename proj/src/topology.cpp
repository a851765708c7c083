#include "pfcc/topology.hpp"

#include <deque>
#include <sstream>

#include "pfcc/errors.hpp"

namespace pfcc {

namespace {

int checked_count(int v) {
  if (v < 0) throw DimensionError("negative agent count");
  return v;
}

}  // namespace

DirectedTopology::DirectedTopology(int n_followers_, int n_leaders_)
    : n_followers(checked_count(n_followers_)),
      n_leaders(checked_count(n_leaders_)),
      follower_adjacency(Eigen::MatrixXd::Zero(n_followers_, n_followers_)),
      leader_adjacency(Eigen::MatrixXd::Zero(n_leaders_, n_leaders_)),
      leader_to_follower(Eigen::MatrixXd::Zero(n_followers_, n_leaders_)),
      tracking_to_leader(Eigen::VectorXd::Zero(n_leaders_)) {}

void DirectedTopology::validate() const {
  const int N = n_followers, M = n_leaders;
  if (follower_adjacency.rows() != N || follower_adjacency.cols() != N ||
      leader_adjacency.rows() != M || leader_adjacency.cols() != M ||
      leader_to_follower.rows() != N || leader_to_follower.cols() != M ||
      tracking_to_leader.size() != M) {
    throw DimensionError("topology blocks do not match N=" + std::to_string(N) +
                         ", M=" + std::to_string(M));
  }
  auto nonneg = [](const Eigen::MatrixXd& m) { return m.size() == 0 || m.minCoeff() >= 0.0; };
  if (!nonneg(follower_adjacency) || !nonneg(leader_adjacency) ||
      !nonneg(leader_to_follower) || !nonneg(Eigen::MatrixXd(tracking_to_leader))) {
    throw AssumptionError("topology has a negative edge weight");
  }
  for (int i = 0; i < N; ++i)
    if (follower_adjacency(i, i) != 0.0) throw AssumptionError("self-loop on a follower");
  for (int q = 0; q < M; ++q)
    if (leader_adjacency(q, q) != 0.0) throw AssumptionError("self-loop on a leader");
}

Eigen::MatrixXd DirectedTopology::full_adjacency() const {
  const int N = n_followers, M = n_leaders;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(node_count(), node_count());
  a.block(1, 1, N, N) = follower_adjacency;
  a.block(1, 1 + N, N, M) = leader_to_follower;
  a.block(1 + N, 1 + N, M, M) = leader_adjacency;
  a.block(1 + N, 0, M, 1) = tracking_to_leader;
  return a;
}

std::vector<std::vector<bool>> DirectedTopology::reachability() const {
  const Eigen::MatrixXd a = full_adjacency();
  const int V = node_count();
  std::vector<std::vector<bool>> closure(V, std::vector<bool>(V, false));
  for (int s = 0; s < V; ++s) {
    std::deque<int> open{s};
    closure[s][s] = true;
    while (!open.empty()) {
      const int u = open.front();
      open.pop_front();
      for (int v = 0; v < V; ++v) {
        if (a(v, u) > 0.0 && !closure[s][v]) {
          closure[s][v] = true;
          open.push_back(v);
        }
      }
    }
  }
  return closure;
}

LaplacianBlocks build_laplacian(const DirectedTopology& topo) {
  const int N = topo.n_followers, M = topo.n_leaders;
  const Eigen::MatrixXd a = topo.full_adjacency();
  Eigen::MatrixXd lap = -a;
  lap.diagonal() += a.rowwise().sum();
  LaplacianBlocks out;
  out.L0 = lap.block(1 + N, 0, M, 1);
  out.L1 = lap.block(1, 1, N, N);
  out.L2 = lap.block(1, 1 + N, N, M);
  out.L3 = lap.block(1 + N, 1 + N, M, M);
  return out;
}

ValidationReport verify_assumption1(const DirectedTopology& topo) {
  ValidationReport report;
  const auto closure = topo.reachability();
  for (int v = 1; v < topo.node_count(); ++v)
    if (!closure[0][v]) report.unreachable_nodes.push_back(v);
  report.spanning_tree = report.unreachable_nodes.empty();
  for (int i = 0; i < topo.n_followers; ++i) {
    bool reached = false;
    for (int q = 0; q < topo.n_leaders && !reached; ++q)
      reached = closure[topo.leader_node(q)][topo.follower_node(i)];
    if (!reached) report.followers_without_leader.push_back(i);
  }
  return report;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (spanning_tree ? "spanning tree rooted at the tracking leader: yes"
                       : "spanning tree rooted at the tracking leader: no");
  if (!unreachable_nodes.empty()) {
    os << " (unreachable nodes:";
    for (int v : unreachable_nodes) os << ' ' << v;
    os << ')';
  }
  os << "\nfollowers with no formation leader upstream:";
  if (followers_without_leader.empty()) os << " none";
  for (int i : followers_without_leader) os << " F" << (i + 1);
  return os.str();
}

}  // namespace pfcc
