#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rssdgeo/fim.hpp"
#include "rssdgeo/model.hpp"

namespace rssdgeo {

enum class StopRule {
  /// ||AG - X||_F / ||X||_F and |change of ln|T|| both below admm_tol.
  RelativeResidualLogDet,
  /// max(||AG - X||_F, ||G_new - G_old||_F) below admm_tol.
  ResidualAndStep,
};

struct AdmmOptions {
  double rho = 1.0;
  double admm_tol = 1e-4;
  double mm_tol = 1e-3;
  int max_outer = 1000;
  int max_inner = 50;
  StopRule stop_rule = StopRule::RelativeResidualLogDet;
  /// Rescale A = B^1/2 D so the smallest singular value of A G at the uniform
  /// start is 2. rho is then a dimensionless penalty. The ADMM iterates depend
  /// on A and rho only through rho / scale^2, so this picks the working point
  /// independently of distances and noise levels.
  bool normalize = true;

  /// Throws InvalidArgument when a field is non-positive.
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  /// ln|(X^T X)^-1| in physical units (undoing the normalization).
  double objective = 0.0;
  double det_t = 0.0;
  double lb_rmse = 0.0;
  int inner_iters = 0;
  /// ||AG - X||_F in the solver's (normalized) units.
  double primal_residual = 0.0;
  double relative_residual = 0.0;
  double g_change = 0.0;
  double log_det_change = 0.0;
  /// Placement angles of G^k in [0, beta_max].
  Eigen::VectorXd angles;
};

/// Iterate of the outer loop in the solver's working frame. For
/// beta_max > pi the rows of g live on the arc centred at pi/2.
struct AdmmState {
  Eigen::MatrixX2d x;
  Eigen::MatrixX2d g;
  Eigen::MatrixX2d v;
  int k = 0;
  double primal_residual = 0.0;
  std::vector<IterationRecord> trace;
};

struct MmResult {
  Eigen::MatrixX2d g;
  int iterations = 0;
  /// Inner objective at G_0, G_1, ..., when requested.
  std::vector<double> objective;
};

struct OptimizeResult {
  Placement placement;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int iterations = 0;
  double mean_inner = 0.0;
  double lb_rmse = 0.0;
  double lb_rmse_uniform = 0.0;
  double det_t = 0.0;
  double det_t_uniform = 0.0;
  /// Trace index of the returned placement (0 is the uniform start).
  int best_iter = 0;
};

/// beta_i = i beta_max / N for i = 1..N.
Placement uniform_init(int n, double beta_max);

/// Positive root of rho l^2 - sigma l - 2 = 0.
double singular_value_map(double sigma, double rho);

/// argmin over X of -ln|X^T X| + rho/2 ||X||^2 - <J, X>.
Eigen::MatrixX2d x_update(const Eigen::MatrixX2d& j, double rho);

/// Minimizer of g^T q over unit vectors g >= bound.g0. q = 0 returns
/// `previous`. Endpoint ties go to the endpoint with the smaller angle.
Eigen::Vector2d mm_row_update(const Eigen::Vector2d& q, const ConstraintBound& bound,
                              const Eigen::Vector2d& previous);

/// <A^T (V - rho X), G> + rho/2 tr(G^T A^T A G), the G-dependent part of the
/// augmented Lagrangian.
double g_objective(const Eigen::MatrixX2d& g, const Eigen::MatrixX2d& x_next, const Eigen::MatrixX2d& v,
                   const Eigen::MatrixXd& half_bd, double rho);

/// Majorize-minimize loop for the G block. m_tilde = A^T A - lambda_max I.
MmResult g_update_mm(const Eigen::MatrixX2d& x_next, const Eigen::MatrixX2d& v,
                     const Eigen::MatrixX2d& g_start, const Eigen::MatrixXd& half_bd,
                     const Eigen::MatrixXd& m_tilde, double rho, const ConstraintBound& bound,
                     double mm_tol, int max_inner, bool record_objective = false);

/// -ln|X^T X| + <V, AG - X> + rho/2 ||AG - X||^2.
double augmented_lagrangian(const Eigen::MatrixX2d& x, const Eigen::MatrixX2d& g,
                            const Eigen::MatrixX2d& v, const Eigen::MatrixXd& half_bd, double rho);

/// Step-by-step ADMM driver. Construction places G at the uniform start.
class AdmmSolver {
 public:
  AdmmSolver(const Scenario& scenario, const SourceParams& source_guess, const AdmmOptions& options);

  /// One outer iteration. Returns true once the stop rule is met.
  bool step();

  const AdmmState& state() const noexcept { return state_; }
  bool converged() const noexcept { return converged_; }
  /// Best iterate so far, mapped to [0, beta_max].
  OptimizeResult result() const;

  const Eigen::MatrixXd& half_bd() const noexcept { return half_bd_; }
  double scale() const noexcept { return scale_; }
  const ConstraintBound& bound() const noexcept { return bound_; }

 private:
  IterationRecord record(int iter, const Eigen::MatrixX2d& x, int inner, double g_change);
  Placement to_placement(const Eigen::MatrixX2d& g) const;

  Scenario scenario_;
  SourceParams guess_;
  AdmmOptions options_;
  ConstraintBound bound_;
  Placement uniform_;
  double phase_ = 0.0;
  double scale_ = 1.0;
  Eigen::MatrixXd half_bd_;
  Eigen::MatrixXd m_tilde_;
  SensitivityDiag d_;
  CouplingMatrix b_;
  AdmmState state_;
  bool converged_ = false;
  double prev_log_det_ = 0.0;
  int best_iter_ = 0;
  double best_det_ = 0.0;
  Eigen::MatrixX2d best_g_;
  long inner_total_ = 0;
};

OptimizeResult optimize(const Scenario& scenario, const SourceParams& source_guess,
                        const AdmmOptions& options);

/// argmax of r / (h^2 + r^2) over [r_min, r_max] x [h_min, h_max]; returns (r, h).
std::pair<double, double> optimal_distance(std::pair<double, double> r_range,
                                           std::pair<double, double> h_range);

}  // namespace rssdgeo
