#pragma once

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "pfcc/propagation.hpp"
#include "pfcc/topology.hpp"

namespace pfcc {

struct ObserverConfig {
  double xi = 4.0;          // ξ ≥ 1
  double coupling = 8.0;    // Λ > 0
  double consensus = 0.7;   // μ > 0
  Eigen::MatrixXd F;        // n×n
  double L0_scale = 100.0;  // L(0) = β·I

  void validate(int n) const;
};

// L₊ = L − L x̄ᵀ (I + x̄ L x̄ᵀ)⁻¹ x̄ L, i.e. (L⁻¹ + x̄ᵀx̄)⁻¹.  Throws
// AssumptionError if L is not symmetric positive definite.
Eigen::MatrixXd rls_update_L(const Eigen::MatrixXd& L, const Eigen::MatrixXd& x_bar);

// Iₙ ⊗ x̂, the regressor that turns Â x̂ into x̄ᵀ·vec_r(Â).
Eigen::MatrixXd observer_regressor(const Eigen::VectorXd& x_hat);

// Joint estimate of one target's state and transition matrix.  A tick is
// split in two because the model correction needs the disagreement *after*
// every neighbour has moved:
//   next = predict(η_k)           x̂₊ = Â x̂ − μ F η_k
//   ... neighbours publish their next estimates, η_{k+1} is formed ...
//   commit(next, η_{k+1})         L₊, then Â₊ = Â − Λ (L₊⁻¹+ξI)⁻¹ η_{k+1} x̂ᵀ
class RlsObserver {
 public:
  RlsObserver(const ObserverConfig& cfg, const Eigen::VectorXd& x0,
              const Eigen::MatrixXd& A0_hat = {});

  Eigen::VectorXd predict(const Eigen::VectorXd& eta) const;
  void commit(const Eigen::VectorXd& next_estimate, const Eigen::VectorXd& eta_next);

  const Eigen::MatrixXd& L() const { return L_; }
  const Eigen::MatrixXd& A_hat() const { return A_hat_; }
  const Eigen::VectorXd& x_hat() const { return x_hat_; }
  const ObserverConfig& config() const { return cfg_; }
  int n() const { return static_cast<int>(x_hat_.size()); }

 private:
  ObserverConfig cfg_;
  Eigen::MatrixXd L_;
  Eigen::MatrixXd A_hat_;
  Eigen::VectorXd x_hat_;
};

// Single-observer convenience: predict with η, evaluate η_{k+1} on the new
// estimate through `eta_next`, commit.
void observer_step(RlsObserver& obs, const Eigen::VectorXd& eta,
                   const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& eta_next);

// Everyone's published estimates at one instant.  Formation maps are keyed by
// target leader index and only hold targets the agent currently knows about.
struct EstimateBoard {
  std::vector<Eigen::VectorXd> follower_tracking;
  std::vector<Eigen::VectorXd> leader_tracking;
  std::vector<std::map<int, Eigen::VectorXd>> follower_formation;
  std::vector<std::map<int, Eigen::VectorXd>> leader_formation;
};

// Σ_j a_qj (x̂_q − x̂_j) + g_q⁰ (x̂_q − xᵒ)
Eigen::VectorXd leader_tracking_disagreement(const DirectedTopology& topo, int q,
                                             const EstimateBoard& board, const Eigen::VectorXd& xo);

// Σ_j a_ij (x̂_i − x̂_j) + Σ_q g_i^q (x̂_i − x̂_q)
Eigen::VectorXd follower_tracking_disagreement(const DirectedTopology& topo, int i,
                                               const EstimateBoard& board);

// Leader m estimating target q: leader neighbours only count if they already
// know q (ā_jq), plus pinning to h_q when q talks to m directly.
Eigen::VectorXd leader_formation_disagreement(const DirectedTopology& topo,
                                              const KnowledgeState& know, int m, int target,
                                              const EstimateBoard& board,
                                              const Eigen::VectorXd& h_target);

// Follower m estimating target q: gated leader and follower neighbours plus
// pinning.  Throws if q is not influential for m.
Eigen::VectorXd follower_formation_disagreement(const DirectedTopology& topo,
                                                const KnowledgeState& know, int m, int target,
                                                const EstimateBoard& board,
                                                const Eigen::VectorXd& h_target);

// ρ(I ⊗ A − μ G ⊗ F) < 1
bool check_schur_consensus(const Eigen::MatrixXd& A_target, double mu, const Eigen::MatrixXd& F,
                           const Eigen::MatrixXd& graph_block);

struct CouplingBound {
  double value = 0.0;
  bool unconstrained = false;  // Γ = 0, any Λ > 0 passes
  bool infeasible = false;     // W − SᵀWS not positive definite
};

// λ_min(W − SᵀWS) / (σ²_max(G) Γ) with W = ½ L̄ (G⊗I) + ½ (G⊗I)ᵀ L̄ and
// Γ = σ²_max(ζ) / (ξ + σ²_max(ζ)).  Throws AssumptionError if S is not Schur.
CouplingBound coupling_gain_bound(const Eigen::MatrixXd& zeta, const Eigen::MatrixXd& L_bar,
                                  const Eigen::MatrixXd& graph_block, const Eigen::MatrixXd& S,
                                  double xi);

}  // namespace pfcc
