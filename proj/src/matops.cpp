#include "pfcc/matops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "pfcc/errors.hpp"

namespace pfcc {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}  // namespace

Eigen::VectorXd vecv(const Eigen::VectorXd& d) {
  const int n = static_cast<int>(d.size());
  Eigen::VectorXd out(tri_size(n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    out(k++) = d(i) * d(i);
    for (int j = i + 1; j < n; ++j) out(k++) = kSqrt2 * d(i) * d(j);
  }
  return out;
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol || m.size() == 0;
}

Eigen::VectorXd vecm(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) {
    throw DimensionError("vecm: matrix is " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()) + ", expected square");
  }
  // Relative check so that large Riccati solutions are not rejected for
  // rounding noise in their last bits.
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if (!is_symmetric(s, 1e-12 * scale)) {
    throw DimensionError("vecm: matrix is not symmetric");
  }
  const int n = static_cast<int>(s.rows());
  Eigen::VectorXd out(tri_size(n));
  int k = 0;
  for (int i = 0; i < n; ++i) {
    out(k++) = s(i, i);
    for (int j = i + 1; j < n; ++j) out(k++) = kSqrt2 * s(i, j);
  }
  return out;
}

Eigen::MatrixXd unvecm(const Eigen::VectorXd& v, int n) {
  if (n < 0 || v.size() != tri_size(n)) {
    throw DimensionError("unvecm: length " + std::to_string(v.size()) +
                         " does not match order " + std::to_string(n));
  }
  Eigen::MatrixXd out(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    out(i, i) = v(k++);
    for (int j = i + 1; j < n; ++j) {
      out(i, j) = out(j, i) = v(k++) / kSqrt2;
    }
  }
  return out;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw DimensionError("unvec: length mismatch");
  }
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& b, int max_rank) {
  if (b.size() == 0) return Eigen::MatrixXd::Zero(b.cols(), b.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = s(0) * static_cast<double>(std::max(b.rows(), b.cols())) *
                        std::numeric_limits<double>::epsilon();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && (max_rank < 0 || i < max_rank)) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("spectral_radius: not square");
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd block_diag(const std::vector<Eigen::MatrixXd>& blocks) {
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace pfcc
