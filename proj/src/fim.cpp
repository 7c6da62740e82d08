#include "rssdgeo/fim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rssdgeo/error.hpp"
#include "rssdgeo/numerics.hpp"

namespace rssdgeo {

namespace {

double log_gain(double gamma) { return 10.0 * gamma / std::numbers::ln10; }

// Relative singularity test on the unit-diagonal scaling of F, so the very
// different magnitudes of the power and position entries do not matter.
bool is_singular(const Eigen::Matrix3d& f) {
  const Eigen::Vector3d diag = f.diagonal();
  if ((diag.array() <= 0.0).any()) return true;
  const Eigen::Vector3d inv_sqrt = diag.cwiseSqrt().cwiseInverse();
  const Eigen::Matrix3d scaled = inv_sqrt.asDiagonal() * f * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(scaled, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() <= 1e-12 * eig.eigenvalues().maxCoeff();
}

void mark_degenerate(FimSummary& out) {
  out.degenerate = true;
  out.crlb.setConstant(std::numeric_limits<double>::quiet_NaN());
  out.lb_rmse = std::numeric_limits<double>::infinity();
}

}  // namespace

NoiseWeights noise_weights(const Scenario& scenario) {
  const Eigen::VectorXd inv_var = scenario.effective_variance().cwiseInverse();
  NoiseWeights out;
  out.w = inv_var / inv_var.sum();
  out.mean_inv_var = inv_var.mean();
  return out;
}

CouplingMatrix coupling_matrix(const NoiseWeights& weights, Variant variant) {
  CouplingMatrix out;
  out.variant = variant;
  out.b = weights.w.asDiagonal();
  if (variant == Variant::Rssd) out.b -= weights.w * weights.w.transpose();
  return out;
}

SensitivityDiag sensitivity(const Scenario& scenario) {
  const Eigen::ArrayXd r = scenario.horiz_dist.array();
  const Eigen::ArrayXd h = scenario.vert_dist.array();
  return {(r / (r.square() + h.square())).matrix()};
}

Eigen::Matrix2d t_matrix(const Eigen::MatrixX2d& g, const SensitivityDiag& d, const CouplingMatrix& b) {
  if (g.rows() != d.d.size() || b.b.rows() != g.rows() || b.b.cols() != g.rows())
    throw InvalidArgument("t_matrix: dimension mismatch");
  const Eigen::MatrixX2d dg = d.d.asDiagonal() * g;
  const Eigen::Matrix2d t = dg.transpose() * b.b * dg;
  return 0.5 * (t + t.transpose());
}

double det_scale_factor(const Scenario& scenario, const NoiseWeights& weights) {
  const double k = log_gain(scenario.gamma);
  const double n = static_cast<double>(scenario.size());
  const double info = n * weights.mean_inv_var;
  // The unknown P0 of RSSD contributes the Schur pivot a = N mean_inv_var.
  return std::pow(k, 4) * info * info * (scenario.variant == Variant::Rssd ? info : 1.0);
}

FimSummary fim_from_positions(const Scenario& scenario, const Eigen::MatrixX3d& positions,
                              const Eigen::Vector2d& source_xy) {
  const auto n = static_cast<Eigen::Index>(scenario.size());
  if (positions.rows() != n) throw InvalidArgument("fim: positions do not match scenario size");
  const double k = log_gain(scenario.gamma);
  const Eigen::VectorXd inv_var = scenario.effective_variance().cwiseInverse();

  // Rows of the measurement Jacobian: [1, a_x(i), a_y(i)].
  Eigen::MatrixX3d jac(n, 3);
  // D G in the placement's angle convention, g_i = [cos b_i, sin b_i] with
  // x_i - x = r_i sin b_i and y_i - y = r_i cos b_i.
  Eigen::MatrixX2d per_dist(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dx = positions(i, 0) - source_xy.x();
    const double dy = positions(i, 1) - source_xy.y();
    const double d2 = dx * dx + dy * dy + positions(i, 2) * positions(i, 2);
    if (!(d2 > 0.0)) throw InvalidArgument("fim: sensor coincides with the source");
    per_dist.row(i) << dy / d2, dx / d2;
    jac.row(i) << 1.0, k * dx / d2, k * dy / d2;
  }

  FimSummary out;
  out.f = jac.transpose() * inv_var.asDiagonal() * jac;
  out.f = 0.5 * (out.f + out.f.transpose());

  const NoiseWeights weights = noise_weights(scenario);
  const CouplingMatrix b = coupling_matrix(weights, scenario.variant);
  out.t = per_dist.transpose() * b.b * per_dist;
  out.t = 0.5 * (out.t + out.t.transpose());

  if (scenario.variant == Variant::Rssd) {
    out.det_f = out.f.determinant();
    if (is_singular(out.f)) {
      mark_degenerate(out);
    } else {
      out.crlb = out.f.ldlt().solve(Eigen::Matrix3d::Identity());
      out.crlb = 0.5 * (out.crlb + out.crlb.transpose());
      out.lb_rmse = std::sqrt(out.crlb(1, 1) + out.crlb(2, 2));
    }
    return out;
  }

  // RSS: P0 is known, only the position block carries information.
  const Eigen::Matrix2d pos = out.f.bottomRightCorner<2, 2>();
  out.det_f = pos.determinant();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(pos, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues()(0) > 1e-12 * eig.eigenvalues()(1))) {
    mark_degenerate(out);
  } else {
    out.crlb.setZero();
    out.crlb.bottomRightCorner<2, 2>() = pos.inverse();
    out.lb_rmse = std::sqrt(out.crlb(1, 1) + out.crlb(2, 2));
  }
  return out;
}

FimSummary fim_full(const Scenario& scenario, const Placement& placement, const SourceParams& source) {
  return fim_from_positions(scenario, sensor_positions(scenario, placement, source.position),
                            source.position);
}

double lb_rmse(const Eigen::Matrix3d& f) {
  if (!numerics::is_symmetric(f)) throw InvalidArgument("lb_rmse: FIM must be symmetric");
  if (is_singular(f)) return std::numeric_limits<double>::infinity();
  const Eigen::Matrix3d c = f.ldlt().solve(Eigen::Matrix3d::Identity());
  return std::sqrt(c(1, 1) + c(2, 2));
}

Placement apply_orthogonal(const Placement& placement, const Eigen::Matrix2d& u) {
  if (((u.transpose() * u) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidArgument("apply_orthogonal: matrix is not orthogonal");
  return Placement::from_directions(placement.directions() * u.transpose());
}

ConstraintBound g0_bound(double beta_max) {
  if (!(beta_max > 0.0 && beta_max <= kTwoPi))
    throw InvalidArgument("g0_bound: beta_max must lie in (0, 2pi]");
  ConstraintBound out;
  out.beta_max = beta_max;
  if (beta_max <= std::numbers::pi)
    out.g0 = {std::cos(beta_max), 0.0};
  else
    out.g0 = {-1.0, std::cos(beta_max / 2.0)};
  return out;
}

FeasibilityReport is_feasible(const Placement& placement, const ConstraintBound& bound, double tol) {
  FeasibilityReport report;
  const Eigen::MatrixX2d& g = placement.directions();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const auto row = static_cast<std::size_t>(i);
    for (int c = 0; c < 2; ++c) {
      if (g(i, c) < bound.g0(c) - tol) report.violations.push_back({row, c, g(i, c), bound.g0(c)});
    }
    const double norm = g.row(i).norm();
    // cos/sin rows are unit only up to rounding, so a zero tol still
    // allows a few ulps on the norm.
    if (std::abs(norm - 1.0) > std::max(tol, 1e-12)) report.violations.push_back({row, 2, norm, 1.0});
  }
  report.feasible = report.violations.empty();
  return report;
}

}  // namespace rssdgeo
