#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rssdgeo/model.hpp"

namespace rssdgeo {

/// Normalized inverse effective variances, w_i = s_i^-2 / sum_j s_j^-2 with
/// s_i^2 = sigma_i^2 / m, and their mean (1/N) sum_i s_i^-2.
struct NoiseWeights {
  Eigen::VectorXd w;
  double mean_inv_var = 0.0;
};

/// RSSD: diag(w) - w w^T. RSS: diag(w).
struct CouplingMatrix {
  Eigen::MatrixXd b;
  Variant variant = Variant::Rssd;
};

/// Diagonal of D, r_i / d_i^2.
struct SensitivityDiag {
  Eigen::VectorXd d;
};

/// Fisher information for theta = (P0, x, y) and derived quantities. For the
/// RSS variant P0 is known: crlb and det_f refer to the (x, y) block and the
/// P0 row and column of crlb are zero.
struct FimSummary {
  Eigen::Matrix3d f = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d crlb = Eigen::Matrix3d::Zero();
  Eigen::Matrix2d t = Eigen::Matrix2d::Zero();
  double det_f = 0.0;
  double lb_rmse = 0.0;
  /// F numerically singular; crlb is left NaN and lb_rmse is +inf.
  bool degenerate = false;
};

/// Elementwise lower bound on unit direction vectors equivalent to the
/// spread-angle constraint (for beta_max > pi, up to a rotation).
struct ConstraintBound {
  Eigen::Vector2d g0 = Eigen::Vector2d::Constant(-1.0);
  double beta_max = kTwoPi;
};

struct FeasibilityViolation {
  std::size_t row = 0;
  /// 0 = x component, 1 = y component, 2 = unit norm.
  int coordinate = 0;
  double value = 0.0;
  double bound = 0.0;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<FeasibilityViolation> violations;
};

NoiseWeights noise_weights(const Scenario& scenario);
CouplingMatrix coupling_matrix(const NoiseWeights& weights, Variant variant);
SensitivityDiag sensitivity(const Scenario& scenario);

/// T = G^T D B D G.
Eigen::Matrix2d t_matrix(const Eigen::MatrixX2d& g, const SensitivityDiag& d, const CouplingMatrix& b);

/// The factor c with det_f = c |T|: (10 gamma / ln 10)^4 (N s)^3 for RSSD and
/// (10 gamma / ln 10)^4 (N s)^2 for RSS, s the mean inverse variance.
double det_scale_factor(const Scenario& scenario, const NoiseWeights& weights);

/// FIM from explicit sensor positions (rows x, y, z) around a source at
/// `source_xy`, using the scenario's gamma, noise and averaging. The
/// returned t is computed from the same geometry.
FimSummary fim_from_positions(const Scenario& scenario, const Eigen::MatrixX3d& positions,
                              const Eigen::Vector2d& source_xy);

/// FIM for a placement around the source at `source.position`.
FimSummary fim_full(const Scenario& scenario, const Placement& placement, const SourceParams& source);

/// sqrt(C(2,2) + C(3,3)) with C = F^-1; +inf when F is singular.
double lb_rmse(const Eigen::Matrix3d& f);

/// Rotates/reflects every direction, g_i <- u g_i. u must be orthogonal.
Placement apply_orthogonal(const Placement& placement, const Eigen::Matrix2d& u);

ConstraintBound g0_bound(double beta_max);

FeasibilityReport is_feasible(const Placement& placement, const ConstraintBound& bound, double tol);

}  // namespace rssdgeo
