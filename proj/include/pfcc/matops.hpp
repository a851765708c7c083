#pragma once

#include <vector>

#include <Eigen/Dense>

namespace pfcc {

// Number of free entries of an n×n symmetric matrix.
constexpr int tri_size(int n) { return n * (n + 1) / 2; }

// Half-vectorisation of the outer square x xᵀ.  Diagonal terms are squares,
// cross terms carry a √2 so that vecv(x)·vecm(P) = xᵀPx.  Entries are taken
// row by row from the upper triangle: (0,0),(0,1),...,(0,n-1),(1,1),...
Eigen::VectorXd vecv(const Eigen::VectorXd& d);

// Same ordering as vecv, off-diagonal entries scaled by √2.  Throws
// DimensionError if `s` is not square or not symmetric to 1e-12.
Eigen::VectorXd vecm(const Eigen::MatrixXd& s);

// Left inverse of vecm.
Eigen::MatrixXd unvecm(const Eigen::VectorXd& v, int n);

// Column stacking.
Eigen::VectorXd vec(const Eigen::MatrixXd& m);

// Inverse of vec for a rows×cols matrix.
Eigen::MatrixXd unvec(const Eigen::VectorXd& v, int rows, int cols);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Moore–Penrose inverse through the SVD.  Singular values at or below
// σ_max·max(rows, cols)·ε are treated as zero.
// max_rank >= 0 additionally keeps only the leading max_rank singular values.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& b, int max_rank = -1);

double spectral_radius(const Eigen::MatrixXd& m);

bool is_symmetric(const Eigen::MatrixXd& m, double tol = 1e-12);

// Dense block-diagonal assembly helper.
Eigen::MatrixXd block_diag(const std::vector<Eigen::MatrixXd>& blocks);

}  // namespace pfcc
