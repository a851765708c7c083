#include "pfcc/observers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pfcc/errors.hpp"
#include "pfcc/matops.hpp"

namespace pfcc {

void ObserverConfig::validate(int n) const {
  if (!(xi >= 1.0)) throw AssumptionError("observer xi must be at least 1");
  if (!(coupling > 0.0) || !(consensus > 0.0) || !(L0_scale > 0.0))
    throw AssumptionError("observer coupling, consensus gain and initial L scale must be positive");
  if (F.rows() != n || F.cols() != n) throw DimensionError("observer F must be n x n");
}

Eigen::MatrixXd observer_regressor(const Eigen::VectorXd& x_hat) {
  const Eigen::Index n = x_hat.size();
  return kron(Eigen::MatrixXd::Identity(n, n), x_hat);
}

Eigen::MatrixXd rls_update_L(const Eigen::MatrixXd& L, const Eigen::MatrixXd& x_bar) {
  if (L.rows() != L.cols() || x_bar.cols() != L.rows())
    throw DimensionError("rls_update_L: regressor and L disagree");
  if (!is_symmetric(L, 1e-10 * std::max(1.0, L.cwiseAbs().maxCoeff())) ||
      Eigen::LLT<Eigen::MatrixXd>(L).info() != Eigen::Success)
    throw AssumptionError("rls_update_L: L is not symmetric positive definite");
  const Eigen::MatrixXd XL = x_bar * L;
  Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(x_bar.rows(), x_bar.rows()) + XL * x_bar.transpose();
  Eigen::MatrixXd next = L - XL.transpose() * inner.ldlt().solve(XL);
  return 0.5 * (next + next.transpose());
}

RlsObserver::RlsObserver(const ObserverConfig& cfg, const Eigen::VectorXd& x0,
                         const Eigen::MatrixXd& A0_hat)
    : cfg_(cfg), x_hat_(x0) {
  const int n = static_cast<int>(x0.size());
  cfg_.validate(n);
  L_ = cfg.L0_scale * Eigen::MatrixXd::Identity(n, n);
  A_hat_ = A0_hat.size() ? A0_hat : Eigen::MatrixXd::Zero(n, n);
  if (A_hat_.rows() != n || A_hat_.cols() != n) throw DimensionError("initial model estimate must be n x n");
}

Eigen::VectorXd RlsObserver::predict(const Eigen::VectorXd& eta) const {
  if (eta.size() != x_hat_.size()) throw DimensionError("observer: disagreement has wrong length");
  return A_hat_ * x_hat_ - cfg_.consensus * (cfg_.F * eta);
}

void RlsObserver::commit(const Eigen::VectorXd& next_estimate, const Eigen::VectorXd& eta_next) {
  const Eigen::Index n = x_hat_.size();
  if (next_estimate.size() != n || eta_next.size() != n)
    throw DimensionError("observer: commit vectors have wrong length");
  L_ = rls_update_L(L_, observer_regressor(x_hat_));
  const Eigen::MatrixXd G =
      (L_.inverse() + cfg_.xi * Eigen::MatrixXd::Identity(n, n)).inverse();
  // x̄ (G η₊) row-stacks into the outer product (G η₊) x̂ᵀ.
  A_hat_ -= cfg_.coupling * (G * eta_next) * x_hat_.transpose();
  x_hat_ = next_estimate;
  if (!A_hat_.allFinite() || !x_hat_.allFinite())
    throw ConvergenceError("observer estimates diverged");
}

void observer_step(RlsObserver& obs, const Eigen::VectorXd& eta,
                   const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& eta_next) {
  const Eigen::VectorXd next = obs.predict(eta);
  obs.commit(next, eta_next(next));
}

Eigen::VectorXd leader_tracking_disagreement(const DirectedTopology& topo, int q,
                                             const EstimateBoard& board, const Eigen::VectorXd& xo) {
  const Eigen::VectorXd& mine = board.leader_tracking.at(q);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(mine.size());
  for (int j = 0; j < topo.n_leaders; ++j) {
    const double a = topo.leader_adjacency(q, j);
    if (a > 0.0) eta += a * (mine - board.leader_tracking.at(j));
  }
  const double g = topo.tracking_to_leader(q);
  if (g > 0.0) eta += g * (mine - xo);
  return eta;
}

Eigen::VectorXd follower_tracking_disagreement(const DirectedTopology& topo, int i,
                                               const EstimateBoard& board) {
  const Eigen::VectorXd& mine = board.follower_tracking.at(i);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(mine.size());
  for (int j = 0; j < topo.n_followers; ++j) {
    const double a = topo.follower_adjacency(i, j);
    if (a > 0.0) eta += a * (mine - board.follower_tracking.at(j));
  }
  for (int q = 0; q < topo.n_leaders; ++q) {
    const double g = topo.leader_to_follower(i, q);
    if (g > 0.0) eta += g * (mine - board.leader_tracking.at(q));
  }
  return eta;
}

namespace {

const Eigen::VectorXd& own_estimate(const std::map<int, Eigen::VectorXd>& mine, int target,
                                    const char* role, int m) {
  auto it = mine.find(target);
  if (it == mine.end())
    throw AssumptionError(std::string(role) + " " + std::to_string(m + 1) +
                          " has no observer for leader L" + std::to_string(target + 1) +
                          " (not influential)");
  return it->second;
}

}  // namespace

Eigen::VectorXd leader_formation_disagreement(const DirectedTopology& topo,
                                              const KnowledgeState& know, int m, int target,
                                              const EstimateBoard& board,
                                              const Eigen::VectorXd& h_target) {
  if (!know.leaders.at(m).reaches(target))
    throw AssumptionError("leader L" + std::to_string(m + 1) + " is not influenced by leader L" +
                          std::to_string(target + 1));
  const Eigen::VectorXd& mine = own_estimate(board.leader_formation.at(m), target, "leader", m);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(mine.size());
  for (int j = 0; j < topo.n_leaders; ++j) {
    if (j == target) continue;
    const double a = topo.leader_adjacency(m, j);
    if (a > 0.0 && know.leaders[j].reaches(target))
      eta += a * (mine - board.leader_formation.at(j).at(target));
  }
  const double pin = topo.leader_adjacency(m, target);
  if (pin > 0.0) eta += pin * (mine - h_target);
  return eta;
}

Eigen::VectorXd follower_formation_disagreement(const DirectedTopology& topo,
                                                const KnowledgeState& know, int m, int target,
                                                const EstimateBoard& board,
                                                const Eigen::VectorXd& h_target) {
  if (!know.followers.at(m).reaches(target))
    throw AssumptionError("follower F" + std::to_string(m + 1) + " is not influenced by leader L" +
                          std::to_string(target + 1));
  const Eigen::VectorXd& mine = own_estimate(board.follower_formation.at(m), target, "follower", m);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(mine.size());
  for (int j = 0; j < topo.n_leaders; ++j) {
    if (j == target) continue;
    const double g = topo.leader_to_follower(m, j);
    if (g > 0.0 && know.leaders[j].reaches(target))
      eta += g * (mine - board.leader_formation.at(j).at(target));
  }
  for (int j = 0; j < topo.n_followers; ++j) {
    const double a = topo.follower_adjacency(m, j);
    if (a > 0.0 && know.followers[j].reaches(target))
      eta += a * (mine - board.follower_formation.at(j).at(target));
  }
  const double pin = topo.leader_to_follower(m, target);
  if (pin > 0.0) eta += pin * (mine - h_target);
  return eta;
}

bool check_schur_consensus(const Eigen::MatrixXd& A_target, double mu, const Eigen::MatrixXd& F,
                           const Eigen::MatrixXd& graph_block) {
  const Eigen::Index v = graph_block.rows();
  const Eigen::MatrixXd S = kron(Eigen::MatrixXd::Identity(v, v), A_target) - mu * kron(graph_block, F);
  // Eigenvalues on the unit circle come back as 1 ± rounding; do not let
  // that pass for a contraction.
  return spectral_radius(S) < 1.0 - 64 * std::numeric_limits<double>::epsilon();
}

CouplingBound coupling_gain_bound(const Eigen::MatrixXd& zeta, const Eigen::MatrixXd& L_bar,
                                  const Eigen::MatrixXd& graph_block, const Eigen::MatrixXd& S,
                                  double xi) {
  if (spectral_radius(S) >= 1.0) throw AssumptionError("consensus matrix is not Schur");
  const Eigen::Index v = graph_block.rows();
  if (v == 0 || L_bar.rows() % v != 0 || L_bar.rows() != S.rows())
    throw DimensionError("coupling_gain_bound: block sizes disagree");
  const Eigen::Index n = L_bar.rows() / v;
  const Eigen::MatrixXd G = kron(graph_block, Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd W = 0.5 * L_bar * G + 0.5 * G.transpose() * L_bar;
  Eigen::MatrixXd D = W - S.transpose() * W * S;
  D = 0.5 * (D + D.transpose());
  const double lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D, Eigen::EigenvaluesOnly)
                         .eigenvalues()(0);
  CouplingBound out;
  if (lam <= 0.0) {
    out.infeasible = true;
    return out;
  }
  const double sz = zeta.size() ? Eigen::JacobiSVD<Eigen::MatrixXd>(zeta).singularValues()(0) : 0.0;
  const double gamma = sz * sz / (xi + sz * sz);
  if (gamma == 0.0) {
    out.unconstrained = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  const double sg = Eigen::JacobiSVD<Eigen::MatrixXd>(graph_block).singularValues()(0);
  out.value = lam / (sg * sg * gamma);
  return out;
}

}  // namespace pfcc
