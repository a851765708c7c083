#include "pfcc/learning.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "pfcc/errors.hpp"
#include "pfcc/matops.hpp"

namespace pfcc {

int default_window(int dim, int inputs) {
  return tri_size(dim) + dim * inputs + tri_size(inputs) + 10;
}

int vecv_index(int i, int j, int dim) {
  if (i > j) std::swap(i, j);
  return i * dim - i * (i - 1) / 2 + (j - i);
}

DataBuffer::DataBuffer(int dim, int inputs, int window)
    : dim_(dim), inputs_(inputs), window_(window) {
  if (dim <= 0 || inputs <= 0 || window <= 0) throw DimensionError("DataBuffer: bad shape");
}

bool DataBuffer::record(const Eigen::VectorXd& X, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& X_next) {
  if (X.size() != X_next.size()) throw DimensionError("DataBuffer: X and X_next differ in size");
  bool kept = true;
  if (X.size() != dim_ || u.size() != inputs_) {
    const int cols = tri_size(static_cast<int>(X.size())) + static_cast<int>(X.size() * u.size()) +
                     tri_size(static_cast<int>(u.size()));
    const int extra = window_ - (tri_size(dim_) + dim_ * inputs_ + tri_size(inputs_));
    dim_ = static_cast<int>(X.size());
    inputs_ = static_cast<int>(u.size());
    window_ = cols + std::max(extra, 0);
    clear();
    kept = false;
  }
  X_.push_back(X);
  U_.push_back(u);
  Xn_.push_back(X_next);
  solvers_.clear();
  while (size() > capacity()) {
    X_.pop_front();
    U_.pop_front();
    Xn_.pop_front();
  }
  return kept;
}

void DataBuffer::clear() {
  solvers_.clear();
  X_.clear();
  U_.clear();
  Xn_.clear();
}

std::shared_ptr<const ExcitedSolver> DataBuffer::cached_solver(const std::string& key) const {
  const auto it = solvers_.find(key);
  return it == solvers_.end() ? nullptr : it->second;
}

void DataBuffer::cache_solver(const std::string& key, std::shared_ptr<const ExcitedSolver> s) const {
  solvers_[key] = std::move(s);
}

bool record_sample(DataBuffer& buf, const Eigen::VectorXd& X, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& X_next) {
  return buf.record(X, u, X_next);
}

Eigen::MatrixXd DataBuffer::Psi() const {
  Eigen::MatrixXd out(size(), tri_size(dim_));
  for (int r = 0; r < size(); ++r) out.row(r) = vecv(X_[r]).transpose();
  return out;
}

Eigen::MatrixXd DataBuffer::Psi_next() const {
  Eigen::MatrixXd out(size(), tri_size(dim_));
  for (int r = 0; r < size(); ++r) out.row(r) = vecv(Xn_[r]).transpose();
  return out;
}

Eigen::MatrixXd DataBuffer::T() const {
  Eigen::MatrixXd out(size(), dim_ * inputs_);
  for (int r = 0; r < size(); ++r) out.row(r) = kron(X_[r], U_[r]).transpose();
  return out;
}

Eigen::MatrixXd DataBuffer::Omega() const {
  Eigen::MatrixXd out(size(), tri_size(inputs_));
  for (int r = 0; r < size(); ++r) out.row(r) = vecv(U_[r]).transpose();
  return out;
}

Eigen::MatrixXd DataBuffer::Theta() const {
  Eigen::MatrixXd out(size(), tri_size(dim_) + dim_ * inputs_ + tri_size(inputs_));
  out << Psi(), 2.0 * T(), Omega();
  return out;
}

Eigen::MatrixXd DataBuffer::Theta_under(const Eigen::MatrixXd& K) const {
  if (K.rows() != inputs_ || K.cols() != dim_) throw DimensionError("Theta_under: gain shape");
  const int a = tri_size(dim_), b = dim_ * inputs_;
  Eigen::MatrixXd out(size(), a + b + tri_size(inputs_));
  for (int r = 0; r < size(); ++r) {
    const Eigen::VectorXd u = K * X_[r];
    out.row(r).head(a) = vecv(X_[r]).transpose();
    out.row(r).segment(a, b) = 2.0 * kron(X_[r], u).transpose();
    out.row(r).tail(tri_size(inputs_)) = vecv(u).transpose();
  }
  return out;
}

ExcitedSolver::ExcitedSolver(const Eigen::MatrixXd& M, const LearnerConfig& cfg,
                             const std::vector<int>& protected_cols, const char* what)
    : rows_(static_cast<int>(M.rows())) {
  if (M.rows() < M.cols())
    throw PersistentExcitationError(std::string(what) + ": " + std::to_string(M.rows()) +
                                    " samples for " + std::to_string(M.cols()) +
                                    " unknowns; collect more data");
  // Equilibrate columns so that quadratic and bilinear features of very
  // different magnitude are judged on the same footing.  Columns that are
  // negligible next to the largest one are not rescaled but zeroed: blowing
  // up, say, the products with an estimate that has already decayed to 1e-100
  // would turn rounding-level content into apparent excitation.
  const double rel_floor = cfg.pe_policy == PePolicy::kStrict
                               ? static_cast<double>(std::max(M.rows(), M.cols())) *
                                     std::numeric_limits<double>::epsilon()
                               : cfg.rank_tol;
  Eigen::VectorXd scale = M.colwise().norm().transpose();
  const double floor = rel_floor * (scale.size() ? scale.maxCoeff() : 0.0);
  Eigen::MatrixXd Ms = M;
  for (Eigen::Index c = 0; c < scale.size(); ++c) {
    if (scale(c) <= floor) {
      scale(c) = 1.0;
      Ms.col(c).setZero();
    } else {
      Ms.col(c) /= scale(c);
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Ms, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  if (smax == 0.0)
    throw PersistentExcitationError(std::string(what) + ": regression matrix is zero");

  double cut = 0.0;
  if (cfg.pe_policy == PePolicy::kStrict) {
    cut = smax * static_cast<double>(std::max(M.rows(), M.cols())) *
          std::numeric_limits<double>::epsilon();
    const double smin = s(s.size() - 1);
    const double cond = smin > cut ? (smax / smin) * (smax / smin) : INFINITY;
    if (!(cond <= cfg.cond_limit))
      throw PersistentExcitationError(std::string(what) +
                                      ": data not persistently exciting (cond of normal matrix " +
                                      std::to_string(cond) + "); add noise or samples");
  } else {
    cut = smax * cfg.rank_tol;
    // Coefficients in `protected_cols` must have no component along the
    // numerical null space.
    const Eigen::MatrixXd& V = svd.matrixV();
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (s(k) > cut) continue;
      for (int c : protected_cols) {
        if (std::abs(V(c, k)) > 1e-6)
          throw PersistentExcitationError(std::string(what) + ": coefficient " + std::to_string(c) +
                                          " is not excited by the data");
      }
    }
  }
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cut) {
      inv(k) = 1.0 / s(k);
      ++rank_;
    }
  }
  pinv_ = scale.cwiseInverse().asDiagonal() * svd.matrixV() * inv.asDiagonal() *
          svd.matrixU().transpose();
}

Eigen::VectorXd ExcitedSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != rows_) throw DimensionError("least squares: row mismatch");
  return pinv_ * rhs;
}

Eigen::VectorXd excited_least_squares(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs,
                                      const LearnerConfig& cfg,
                                      const std::vector<int>& protected_cols, const char* what) {
  if (M.rows() != rhs.size()) throw DimensionError("least squares: row mismatch");
  return ExcitedSolver(M, cfg, protected_cols, what).solve(rhs);
}

namespace {

// Exogenous signals (formation states, tracking estimate) follow fixed
// autonomous dynamics and seldom span their space, so only the plant block is
// required to be identifiable; the min-norm solution is exact on the visited
// states, which is all the Bellman backup ever evaluates.
std::vector<int> plant_value_columns(int dim, int n) {
  std::vector<int> cols;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) cols.push_back(vecv_index(i, j, dim));
  return cols;
}

std::vector<int> plant_model_columns(int dim, int inputs, int n) {
  std::vector<int> cols;
  const int a = tri_size(dim);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < inputs; ++r) cols.push_back(a + c * inputs + r);
  for (int k = 0; k < tri_size(inputs); ++k) cols.push_back(a + dim * inputs + k);
  return cols;
}

const ExcitedSolver& solver_for(const DataBuffer& buf, bool model, int plant_order,
                               const LearnerConfig& cfg) {
  const std::string key = std::string(model ? "model" : "value") + '/' +
                          std::to_string(static_cast<int>(cfg.pe_policy)) + '/' +
                          std::to_string(plant_order) + '/' +
                          std::to_string(std::bit_cast<std::uint64_t>(cfg.cond_limit)) + '/' +
                          std::to_string(std::bit_cast<std::uint64_t>(cfg.rank_tol));
  auto s = buf.cached_solver(key);
  if (!s) {
    const int dim = buf.dim(), m = buf.inputs();
    s = model ? std::make_shared<const ExcitedSolver>(buf.Theta(), cfg,
                                                       plant_model_columns(dim, m, plant_order),
                                                       "model regression")
              : std::make_shared<const ExcitedSolver>(
                    buf.Psi(), cfg, plant_value_columns(dim, plant_order), "value regression");
    buf.cache_solver(key, s);
  }
  return *s;
}

}  // namespace

XiBlocks vi_update_Xi(const DataBuffer& buf, const Eigen::MatrixXd& P, int plant_order,
                      const LearnerConfig& cfg) {
  const int dim = buf.dim(), m = buf.inputs();
  if (P.rows() != dim || P.cols() != dim) throw DimensionError("vi_update_Xi: P has wrong order");
  const Eigen::VectorXd rhs = buf.Psi_next() * vecm(P);
  const Eigen::VectorXd xi = solver_for(buf, true, plant_order, cfg).solve(rhs);
  const int a = tri_size(dim), b = dim * m;
  XiBlocks out;
  out.Xi1 = unvecm(xi.head(a), dim);
  out.Xi2 = unvec(xi.segment(a, b), m, dim);
  out.Xi3 = unvecm(xi.tail(tri_size(m)), m);
  return out;
}

Eigen::MatrixXd vi_update_P(const DataBuffer& buf, const Eigen::MatrixXd& CtQC,
                            const Eigen::MatrixXd& P, const Eigen::MatrixXd& K, int plant_order,
                            const LearnerConfig& cfg) {
  const int dim = buf.dim();
  if (CtQC.rows() != dim || CtQC.cols() != dim) throw DimensionError("vi_update_P: CᵀQC order");
  const XiBlocks xi = vi_update_Xi(buf, P, plant_order, cfg);
  Eigen::VectorXd stacked(tri_size(dim) + dim * buf.inputs() + tri_size(buf.inputs()));
  stacked << vecm(xi.Xi1), vec(xi.Xi2), vecm(xi.Xi3);
  const Eigen::MatrixXd Psi = buf.Psi();
  const Eigen::VectorXd phi = Psi * vecm(CtQC) + buf.Theta_under(K) * stacked;
  const Eigen::VectorXd p = solver_for(buf, false, plant_order, cfg).solve(phi);
  return unvecm(p, dim);
}

Eigen::MatrixXd vi_update_K(const Eigen::MatrixXd& Xi2, const Eigen::MatrixXd& Xi3,
                            int plant_order) {
  if (Xi3.rows() != Xi3.cols() || Xi2.rows() != Xi3.rows())
    throw DimensionError("vi_update_K: block shapes disagree");
  return -pinv(Xi3, plant_order) * Xi2;
}

LearnedController LearnedController::start(int dim, int inputs) {
  LearnedController c;
  c.P_hat = Eigen::MatrixXd::Identity(dim, dim);
  c.K_hat = Eigen::MatrixXd::Zero(inputs, dim);
  return c;
}

Eigen::VectorXd exploration_noise(const LearnerConfig& cfg, int width, long tick,
                                  std::uint64_t stream, LearnerStatus status) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(width);
  if (status == LearnerStatus::kConverged || cfg.noise_std == 0.0) return out;
  const auto t = static_cast<std::uint64_t>(tick);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, cfg.noise_std);
  for (int k = 0; k < width; ++k) out(k) = gauss(rng);
  return out;
}

LearnedController learning_tick(const LearnedController& ctrl, const DataBuffer& buf,
                                const Eigen::MatrixXd& Q, const Eigen::MatrixXd& C,
                                int plant_order, const LearnerConfig& cfg) {
  if (!buf.full()) throw PersistentExcitationError("learning_tick: data window not yet full");
  if (ctrl.status == LearnerStatus::kConverged) return ctrl;
  LearnedController next = ctrl;
  const Eigen::MatrixXd CtQC = C.transpose() * Q * C;
  next.P_hat = vi_update_P(buf, CtQC, ctrl.P_hat, ctrl.K_hat, plant_order, cfg);
  next.Xi_hat = vi_update_Xi(buf, next.P_hat, plant_order, cfg);
  next.K_hat = vi_update_K(next.Xi_hat.Xi2, next.Xi_hat.Xi3, plant_order);
  next.iterations = ctrl.iterations + 1;
  next.last_delta = (next.K_hat - ctrl.K_hat).norm();
  next.status = (next.iterations >= 2 && next.last_delta < cfg.gain_delta_threshold)
                    ? LearnerStatus::kConverged
                    : LearnerStatus::kIterating;
  return next;
}

}  // namespace pfcc
