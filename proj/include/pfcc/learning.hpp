#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pfcc {

enum class PePolicy {
  // Every regression column must be identifiable and cond(MᵀM) ≤ cond_limit.
  kStrict,
  // Minimum-norm solution; only the coefficients that shape the plant part of
  // the gain (plant×plant value terms, plant×input and input×input terms) must
  // be identifiable.  Used online, where the reference signals are periodic
  // and x⁰ ≡ 0, so some augmented directions are never visited.
  kPlantSubspace,
};

struct LearnerConfig {
  double noise_std = 0.1;
  double gain_delta_threshold = 1e-6;
  int window = 0;  // s; 0 → columns(Θ) + 10
  std::uint64_t rng_seed = 1;
  bool relearn_on_alpha_change = true;
  PePolicy pe_policy = PePolicy::kStrict;
  double cond_limit = 1e12;     // on MᵀM, strict policy
  double rank_tol = 1e-6;       // relative singular value cut, subspace policy
  int max_iterations = 200;
};

// Default window for an augmented system of order `dim` with `inputs` inputs.
int default_window(int dim, int inputs);

// Column index of the (i, j) product inside vecv for order `dim`, i ≤ j.
int vecv_index(int i, int j, int dim);

// Least squares with the configured excitation policy, factored once so that
// the value-iteration sweeps over a fixed window only pay a matrix-vector
// product.  `protected_cols` lists the coefficients that must be identifiable
// under kPlantSubspace.  Throws PersistentExcitationError.
class ExcitedSolver {
 public:
  ExcitedSolver(const Eigen::MatrixXd& M, const LearnerConfig& cfg,
                const std::vector<int>& protected_cols, const char* what);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  int rows() const { return rows_; }
  int rank() const { return rank_; }

 private:
  int rows_ = 0, rank_ = 0;
  Eigen::MatrixXd pinv_;  // cols × rows
};

// Rolling window of (ψ, τ, ω, ψ₊) rows.  Rows are kept oldest first.
class DataBuffer {
 public:
  DataBuffer() = default;
  DataBuffer(int dim, int inputs, int window);

  // Appends one transition; drops the oldest row when the window is full.
  // A sample of a different shape than the buffer's flushes the buffer and
  // re-shapes it (a follower's layout grows when it learns a new leader).
  // Returns false when that happened.
  bool record(const Eigen::VectorXd& X, const Eigen::VectorXd& u, const Eigen::VectorXd& X_next);
  void clear();

  int dim() const { return dim_; }
  int inputs() const { return inputs_; }
  int window() const { return window_; }
  int capacity() const { return window_ + 2; }
  int size() const { return static_cast<int>(X_.size()); }
  bool full() const { return size() == capacity(); }

  Eigen::MatrixXd Psi() const;
  Eigen::MatrixXd Psi_next() const;
  Eigen::MatrixXd T() const;
  Eigen::MatrixXd Omega() const;
  Eigen::MatrixXd Theta() const;  // [Ψ, 2T, Ω]
  // Θ with the recorded inputs replaced by K X (successor features under K).
  Eigen::MatrixXd Theta_under(const Eigen::MatrixXd& K) const;

  const std::deque<Eigen::VectorXd>& states() const { return X_; }
  const std::deque<Eigen::VectorXd>& input_samples() const { return U_; }
  const std::deque<Eigen::VectorXd>& next_states() const { return Xn_; }

  // Factorizations of this window, dropped whenever a row changes.
  std::shared_ptr<const ExcitedSolver> cached_solver(const std::string& key) const;
  void cache_solver(const std::string& key, std::shared_ptr<const ExcitedSolver> s) const;

 private:
  int dim_ = 0, inputs_ = 0, window_ = 0;
  std::deque<Eigen::VectorXd> X_, U_, Xn_;
  mutable std::map<std::string, std::shared_ptr<const ExcitedSolver>> solvers_;
};

// Free-function spelling of DataBuffer::record.
bool record_sample(DataBuffer& buf, const Eigen::VectorXd& X, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& X_next);

struct XiBlocks {
  Eigen::MatrixXd Xi1;  // ĀᵀPĀ
  Eigen::MatrixXd Xi2;  // B̄ᵀPĀ
  Eigen::MatrixXd Xi3;  // B̄ᵀPB̄
};

// One-shot ExcitedSolver.
Eigen::VectorXd excited_least_squares(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs,
                                      const LearnerConfig& cfg,
                                      const std::vector<int>& protected_cols, const char* what);

// Θ Ξ = Ψ₊ vecm(P).  Valid for any input sequence.
XiBlocks vi_update_Xi(const DataBuffer& buf, const Eigen::MatrixXd& P, int plant_order,
                      const LearnerConfig& cfg);

// Ψ vecm(P⁺) = Ψ vecm(CᵀQC) + Θ_K vec(Ξ(P)), where Θ_K uses u = K X in
// place of the recorded inputs, so the backup is taken under the target gain
// regardless of what the behaviour policy did.
Eigen::MatrixXd vi_update_P(const DataBuffer& buf, const Eigen::MatrixXd& CtQC,
                            const Eigen::MatrixXd& P, const Eigen::MatrixXd& K, int plant_order,
                            const LearnerConfig& cfg);

// K = −Ξ₃⁺ Ξ₂
// Xi3 estimates B̄ᵀPB̄ with B̄ = [B; 0], so its rank is at most the plant
// order; directions beyond that carry only regression noise and are dropped.
Eigen::MatrixXd vi_update_K(const Eigen::MatrixXd& Xi2, const Eigen::MatrixXd& Xi3,
                            int plant_order = -1);

enum class LearnerStatus { kCollecting, kIterating, kConverged };

struct LearnedController {
  Eigen::MatrixXd P_hat;
  XiBlocks Xi_hat;
  Eigen::MatrixXd K_hat;
  LearnerStatus status = LearnerStatus::kCollecting;
  int iterations = 0;
  double last_delta = 0.0;

  // Fresh learner for an augmented system of order `dim`: P̂⁰ = I, K̂⁰ = 0.
  static LearnedController start(int dim, int inputs);
};

// Zero-mean Gaussian input perturbation.  A pure function of (seed, stream,
// tick) so that runs are reproducible; zero once the learner has converged.
Eigen::VectorXd exploration_noise(const LearnerConfig& cfg, int width, long tick,
                                  std::uint64_t stream, LearnerStatus status);

// One j-sweep of the data-driven value iteration on a full buffer.
LearnedController learning_tick(const LearnedController& ctrl, const DataBuffer& buf,
                                const Eigen::MatrixXd& Q, const Eigen::MatrixXd& C,
                                int plant_order, const LearnerConfig& cfg);

}  // namespace pfcc
