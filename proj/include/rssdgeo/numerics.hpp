#pragma once

#include <Eigen/Dense>

namespace rssdgeo::numerics {

/// Thin SVD of an N x 2 matrix, A = U diag(sigma) V^T.
///
/// Singular values are sorted descending. Signs are fixed so that in every
/// column of U the entry of largest magnitude (lowest row index on ties) is
/// non-negative; the matching column of V absorbs the flip.
struct ThinSvd {
  Eigen::MatrixX2d u;
  Eigen::Vector2d sigma;
  Eigen::Matrix2d v;
};

/// Symmetric eigendecomposition with eigenvalues in descending order.
struct SymEig {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Tolerances shared by the symmetric kernels.
inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kPsdClampTol = 1e-10;
inline constexpr double kPsdRejectTol = 1e-8;

/// True when max |m - m^T| <= tol * max(1, max |m|).
bool is_symmetric(const Eigen::MatrixXd& m, double tol = kSymmetryTol);

SymEig sym_eig(const Eigen::MatrixXd& m);

/// Symmetric PSD square root S with S S^T = S^T S = b.
///
/// Eigenvalues in [-1e-8, 1e-10] are treated as zero; anything more negative
/// (relative to the spectral radius when it exceeds one) throws NotPsdError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& b);

ThinSvd thin_svd(const Eigen::MatrixX2d& a);

/// Largest eigenvalue of a symmetric matrix.
double sym_eig_max(const Eigen::MatrixXd& m);

}  // namespace rssdgeo::numerics
