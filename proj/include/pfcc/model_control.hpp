#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

namespace pfcc {

struct AgentDynamics {
  Eigen::MatrixXd A;  // n×n
  Eigen::MatrixXd B;  // n×m, m may exceed n
  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

struct FormationDynamics {
  Eigen::MatrixXd S;    // n×n, ρ(S) ≤ 1
  Eigen::VectorXd h0;
};

// PBH test: every eigenvalue with |λ| ≥ 1 must be controllable.
bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// One agent's regulation problem stacked as X = [x, h¹, …, hᴵ, xᵒ].
struct AugmentedSystem {
  Eigen::MatrixXd A_bar;
  Eigen::MatrixXd B_bar;
  Eigen::MatrixXd C;
  Eigen::MatrixXd Q;
  int n = 0;                // plant order
  int formation_blocks = 0; // I (1 for a leader)

  int dim() const { return static_cast<int>(A_bar.rows()); }
  int inputs() const { return static_cast<int>(B_bar.cols()); }
};

AugmentedSystem build_leader_augmented(const AgentDynamics& dyn, const FormationDynamics& form,
                                       const Eigen::MatrixXd& A0, const Eigen::MatrixXd& Q);

// `forms` and `alpha` are in the same (ascending leader index) order.
AugmentedSystem build_follower_augmented(const AgentDynamics& dyn,
                                         const std::vector<FormationDynamics>& forms,
                                         const Eigen::MatrixXd& A0,
                                         const std::vector<double>& alpha,
                                         const Eigen::MatrixXd& Q);

// K = −(B̄ᵀPB̄)⁺ B̄ᵀPĀ
Eigen::MatrixXd gain_from_value(const AugmentedSystem& sys, const Eigen::MatrixXd& P);

// CᵀQC + (Ā+B̄K)ᵀ P (Ā+B̄K)
Eigen::MatrixXd bellman_backup(const AugmentedSystem& sys, const Eigen::MatrixXd& P,
                               const Eigen::MatrixXd& K);

enum class ViStop {
  // Stop once K and the plant block-row of P stop moving.  The formation and
  // tracking modes sit on the unit circle and are not penalised, so the rest
  // of P can keep cycling forever from a positive definite start even though
  // the gain is already exact.
  kControlledRows,
  // Require the whole of P to settle.
  kFullMatrix,
};

struct ViOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  ViStop stop = ViStop::kControlledRows;
  Eigen::MatrixXd P0;  // empty → identity
};

struct ViResult {
  Eigen::MatrixXd P;
  Eigen::MatrixXd K;
  int iterations = 0;
  double residual = 0.0;  // Bellman residual on the rows the stopping rule watches
};

// Value iteration P ← CᵀQC + (Ā+B̄K)ᵀP(Ā+B̄K), K ← −(B̄ᵀPB̄)⁺B̄ᵀPĀ from
// P⁰ = I, K⁰ = 0.  Throws ConvergenceError when the budget runs out.
ViResult riccati_value_iteration(const AugmentedSystem& sys, const ViOptions& opt = {});

// Model VI stopped after exactly `iterations` sweeps (no convergence test);
// used to line the oracle up with a learner's iteration counter.
ViResult riccati_value_iteration_steps(const AugmentedSystem& sys, int iterations,
                                       const Eigen::MatrixXd& P0 = {});

// Column blocks of an augmented gain: [K1 | Kh¹ … Khᴵ | Ko].
struct GainBlocks {
  Eigen::MatrixXd K1;
  std::vector<Eigen::MatrixXd> Kh;
  Eigen::MatrixXd Ko;
};

GainBlocks split_gains(const Eigen::MatrixXd& K, int n, int formation_blocks);

// Ū = B⁺(S − A).  Throws AssumptionError when S = A + BU has no solution.
Eigen::MatrixXd min_norm_regulation_solution(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                             const Eigen::MatrixXd& S);

struct GainIdentityReport {
  std::vector<double> formation_residuals;  // ‖K1 + Khʲ/αʲ − Ūʰʲ‖_F per block
  double tracking_residual = 0.0;           // ‖K1 + Ko − Ūᵒ‖_F
  double closed_loop_radius = 0.0;          // ρ(A + B K1)

  double max_formation_residual() const;
};

GainIdentityReport verify_gain_identities(const GainBlocks& gains, const AgentDynamics& dyn,
                                          const std::vector<Eigen::MatrixXd>& Uh,
                                          const Eigen::MatrixXd& Uo,
                                          const std::vector<double>& alpha);

// u = K1 x + Kh h + Ko x̂ᵒ
Eigen::VectorXd leader_control(const GainBlocks& gains, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& h, const Eigen::VectorXd& xo_hat);

// u = K1 x + Ko x̂ᵒ + Σ_q Kh^q ĥ^q over `members` (ascending leader order, as
// in the augmented layout).  The augmented blocks already carry the convex
// weight: Kh^q = α^q·(Ū^q − K1), so no extra α factor is applied here; α is
// only checked for consistency with the member list.
Eigen::VectorXd follower_control(const GainBlocks& gains, const std::vector<int>& members,
                                 const Eigen::VectorXd& x, const Eigen::VectorXd& xo_hat,
                                 const std::map<int, Eigen::VectorXd>& h_hat,
                                 const std::vector<double>& alpha);

}  // namespace pfcc
