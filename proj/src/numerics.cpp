#include "rssdgeo/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "rssdgeo/error.hpp"

namespace rssdgeo::numerics {

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

SymEig sym_eig(const Eigen::MatrixXd& m) {
  if (!is_symmetric(m)) throw InvalidArgument("sym_eig: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eig: eigensolver did not converge");
  // Eigen returns ascending order.
  SymEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& b) {
  const SymEig eig = sym_eig(b);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  Eigen::VectorXd root(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda < -kPsdRejectTol * scale)
      throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(lambda) +
                        " is negative");
    // Rounding noise on a zero eigenvalue would otherwise leak ~1e-8 into the
    // root and break its null space.
    root(i) = lambda <= kPsdClampTol * scale ? 0.0 : std::sqrt(lambda);
  }
  Eigen::MatrixXd s = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
  // Symmetrize away the rounding asymmetry of the triple product.
  return 0.5 * (s + s.transpose());
}

ThinSvd thin_svd(const Eigen::MatrixX2d& a) {
  if (a.rows() < 2) throw InvalidArgument("thin_svd: need at least 2 rows");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  if (out.sigma(0) < out.sigma(1)) {
    std::swap(out.sigma(0), out.sigma(1));
    out.u.col(0).swap(out.u.col(1));
    out.v.col(0).swap(out.v.col(1));
  }
  for (int c = 0; c < 2; ++c) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < out.u.rows(); ++r) {
      const double mag = std::abs(out.u(r, c));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (out.u(pivot, c) < 0.0) {
      out.u.col(c) *= -1.0;
      out.v.col(c) *= -1.0;
    }
  }
  return out;
}

double sym_eig_max(const Eigen::MatrixXd& m) {
  if (!is_symmetric(m)) throw InvalidArgument("sym_eig_max: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("sym_eig_max: eigensolver did not converge");
  return solver.eigenvalues().maxCoeff();
}

}  // namespace rssdgeo::numerics
