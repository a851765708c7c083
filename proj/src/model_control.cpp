#include "pfcc/model_control.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "pfcc/errors.hpp"
#include "pfcc/matops.hpp"

namespace pfcc {

bool is_stabilizable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::Index n = A.rows();
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<double> lambda = es.eigenvalues()(k);
    if (std::abs(lambda) < 1.0) continue;
    Eigen::MatrixXcd pbh(n, n + B.cols());
    pbh.leftCols(n) = A.cast<std::complex<double>>() -
                      lambda * Eigen::MatrixXcd::Identity(n, n);
    pbh.rightCols(B.cols()) = B.cast<std::complex<double>>();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(pbh);
    qr.setThreshold(1e-10);
    if (qr.rank() < n) return false;
  }
  return true;
}

namespace {

void check_square(const Eigen::MatrixXd& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw DimensionError(std::string(what) + " must be " + std::to_string(n) + "x" +
                         std::to_string(n));
}

AugmentedSystem assemble(const AgentDynamics& dyn, const std::vector<Eigen::MatrixXd>& S,
                         const Eigen::MatrixXd& A0, const std::vector<double>& weights,
                         const Eigen::MatrixXd& Q) {
  const int n = dyn.n();
  check_square(dyn.A, n, "A");
  if (dyn.B.rows() != n) throw DimensionError("B must have n rows");
  check_square(A0, n, "A0");
  check_square(Q, n, "Q");
  for (const auto& s : S) check_square(s, n, "S");

  AugmentedSystem sys;
  sys.n = n;
  sys.formation_blocks = static_cast<int>(S.size());
  std::vector<Eigen::MatrixXd> diag{dyn.A};
  diag.insert(diag.end(), S.begin(), S.end());
  diag.push_back(A0);
  sys.A_bar = block_diag(diag);
  const int dim = sys.dim();
  sys.B_bar = Eigen::MatrixXd::Zero(dim, dyn.m());
  sys.B_bar.topRows(n) = dyn.B;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  sys.C = Eigen::MatrixXd::Zero(n, dim);
  sys.C.leftCols(n) = I;
  for (size_t j = 0; j < weights.size(); ++j)
    sys.C.middleCols(n * (1 + j), n) = -weights[j] * I;
  sys.C.rightCols(n) = -I;
  sys.Q = Q;
  return sys;
}

}  // namespace

AugmentedSystem build_leader_augmented(const AgentDynamics& dyn, const FormationDynamics& form,
                                       const Eigen::MatrixXd& A0, const Eigen::MatrixXd& Q) {
  return assemble(dyn, {form.S}, A0, {1.0}, Q);
}

AugmentedSystem build_follower_augmented(const AgentDynamics& dyn,
                                         const std::vector<FormationDynamics>& forms,
                                         const Eigen::MatrixXd& A0,
                                         const std::vector<double>& alpha,
                                         const Eigen::MatrixXd& Q) {
  if (forms.empty()) throw AssumptionError("follower has no influential leader");
  if (forms.size() != alpha.size())
    throw DimensionError("one coefficient per influential leader expected");
  double total = 0.0;
  for (double a : alpha) total += a;
  if (std::abs(total - 1.0) > 1e-9)
    throw AssumptionError("convex coefficients sum to " + std::to_string(total));
  std::vector<Eigen::MatrixXd> S;
  for (const auto& f : forms) S.push_back(f.S);
  return assemble(dyn, S, A0, alpha, Q);
}

Eigen::MatrixXd gain_from_value(const AugmentedSystem& sys, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd BtP = sys.B_bar.transpose() * P;
  return -pinv(BtP * sys.B_bar) * (BtP * sys.A_bar);
}

Eigen::MatrixXd bellman_backup(const AugmentedSystem& sys, const Eigen::MatrixXd& P,
                               const Eigen::MatrixXd& K) {
  const Eigen::MatrixXd Acl = sys.A_bar + sys.B_bar * K;
  Eigen::MatrixXd next = sys.C.transpose() * sys.Q * sys.C + Acl.transpose() * P * Acl;
  return 0.5 * (next + next.transpose());
}

ViResult riccati_value_iteration_steps(const AugmentedSystem& sys, int iterations,
                                       const Eigen::MatrixXd& P0) {
  ViResult r;
  r.P = P0.size() ? P0 : Eigen::MatrixXd::Identity(sys.dim(), sys.dim());
  r.K = Eigen::MatrixXd::Zero(sys.inputs(), sys.dim());
  for (int j = 0; j < iterations; ++j) {
    r.P = bellman_backup(sys, r.P, r.K);
    r.K = gain_from_value(sys, r.P);
  }
  r.iterations = iterations;
  r.residual = (bellman_backup(sys, r.P, r.K) - r.P).norm();
  return r;
}

ViResult riccati_value_iteration(const AugmentedSystem& sys, const ViOptions& opt) {
  const int dim = sys.dim();
  ViResult r;
  r.P = opt.P0.size() ? opt.P0 : Eigen::MatrixXd::Identity(dim, dim);
  if (r.P.rows() != dim || r.P.cols() != dim) throw DimensionError("P0 has the wrong order");
  r.K = Eigen::MatrixXd::Zero(sys.inputs(), dim);
  const int rows = opt.stop == ViStop::kControlledRows ? sys.n : dim;
  for (int j = 1; j <= opt.max_iter; ++j) {
    Eigen::MatrixXd P = bellman_backup(sys, r.P, r.K);
    Eigen::MatrixXd K = gain_from_value(sys, P);
    const double dP = (P.topRows(rows) - r.P.topRows(rows)).norm();
    const double dK = (K - r.K).norm();
    r.P = std::move(P);
    r.K = std::move(K);
    r.iterations = j;
    if (std::max(dP, dK) < opt.tol) {
      r.residual = (bellman_backup(sys, r.P, r.K) - r.P).topRows(rows).norm();
      return r;
    }
  }
  throw ConvergenceError("value iteration did not settle within " + std::to_string(opt.max_iter) +
                         " sweeps");
}

GainBlocks split_gains(const Eigen::MatrixXd& K, int n, int formation_blocks) {
  if (n <= 0 || formation_blocks < 0 || K.cols() != static_cast<Eigen::Index>(n) * (2 + formation_blocks))
    throw DimensionError("gain width " + std::to_string(K.cols()) + " does not match layout with " +
                         std::to_string(formation_blocks) + " formation blocks of order " +
                         std::to_string(n));
  GainBlocks g;
  g.K1 = K.leftCols(n);
  for (int j = 0; j < formation_blocks; ++j) g.Kh.push_back(K.middleCols(n * (1 + j), n));
  g.Ko = K.rightCols(n);
  return g;
}

Eigen::MatrixXd min_norm_regulation_solution(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                             const Eigen::MatrixXd& S) {
  if (A.rows() != A.cols() || S.rows() != A.rows() || S.cols() != A.cols() || B.rows() != A.rows())
    throw DimensionError("regulator equation shapes disagree");
  const Eigen::MatrixXd D = S - A;
  const Eigen::MatrixXd U = pinv(B) * D;
  const double miss = (B * U - D).norm();
  if (miss > 1e-8 * std::max(1.0, D.norm()))
    throw AssumptionError("regulator equation S = A + BU has no solution (residual " +
                          std::to_string(miss) + ")");
  return U;
}

double GainIdentityReport::max_formation_residual() const {
  double worst = 0.0;
  for (double r : formation_residuals) worst = std::max(worst, r);
  return worst;
}

GainIdentityReport verify_gain_identities(const GainBlocks& gains, const AgentDynamics& dyn,
                                          const std::vector<Eigen::MatrixXd>& Uh,
                                          const Eigen::MatrixXd& Uo,
                                          const std::vector<double>& alpha) {
  if (Uh.size() != gains.Kh.size() || alpha.size() != gains.Kh.size())
    throw DimensionError("identity check needs one solution and coefficient per block");
  GainIdentityReport rep;
  for (size_t j = 0; j < gains.Kh.size(); ++j)
    rep.formation_residuals.push_back((gains.K1 + gains.Kh[j] / alpha[j] - Uh[j]).norm());
  rep.tracking_residual = (gains.K1 + gains.Ko - Uo).norm();
  rep.closed_loop_radius = spectral_radius(dyn.A + dyn.B * gains.K1);
  return rep;
}

Eigen::VectorXd leader_control(const GainBlocks& gains, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& h, const Eigen::VectorXd& xo_hat) {
  if (gains.Kh.size() != 1) throw DimensionError("leader gains need exactly one formation block");
  return gains.K1 * x + gains.Kh[0] * h + gains.Ko * xo_hat;
}

Eigen::VectorXd follower_control(const GainBlocks& gains, const std::vector<int>& members,
                                 const Eigen::VectorXd& x, const Eigen::VectorXd& xo_hat,
                                 const std::map<int, Eigen::VectorXd>& h_hat,
                                 const std::vector<double>& alpha) {
  if (members.size() != gains.Kh.size())
    throw DimensionError("gain layout does not match the influential set");
  Eigen::VectorXd u = gains.K1 * x + gains.Ko * xo_hat;
  for (size_t j = 0; j < members.size(); ++j) {
    const int q = members[j];
    auto it = h_hat.find(q);
    if (it == h_hat.end())
      throw DimensionError("no formation estimate for influential leader L" + std::to_string(q + 1));
    if (q < 0 || q >= static_cast<int>(alpha.size()) || !(alpha[q] > 0.0))
      throw AssumptionError("influential leader L" + std::to_string(q + 1) +
                            " has no positive coefficient");
    u += gains.Kh[j] * it->second;
  }
  return u;
}

}  // namespace pfcc
