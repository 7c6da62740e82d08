#pragma once

#include <Eigen/Dense>

#include "rssdgeo/model.hpp"

namespace rssdgeo {

struct MleOptions {
  /// Spacing unit of the 5 x 5 start grid (offsets -2..2 times this value in
  /// x and y). Zero gives a single start at the initial guess.
  double prior_std = 0.0;
  int max_iter = 200;
  /// Stop once a position step is shorter than this (meters).
  double step_tol = 1e-8;
  double initial_damping = 1e-3;
};

struct MleResult {
  /// (P0, x, y).
  Eigen::Vector3d theta_hat = Eigen::Vector3d::Zero();
  /// sqrt(sum_i ((P_i - P0 + 10 gamma log10 d_i) / sigma_i)^2).
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Weighted residual norm at theta = (P0, x, y).
double mle_residual(const Eigen::VectorXd& measurements, const Eigen::MatrixX3d& sensor_positions,
                    const Eigen::VectorXd& sigma_eff, double gamma, const Eigen::Vector3d& theta);

/// Maximum-likelihood (P0, x, y) by damped Gauss-Newton from a grid of starts
/// around `init`. Each start takes the closed-form best P0 for its position.
/// Needs at least three sensors.
MleResult mle_estimate(const Eigen::VectorXd& measurements, const Eigen::MatrixX3d& sensor_positions,
                       const Eigen::VectorXd& sigma_eff, double gamma, const SourceParams& init,
                       const MleOptions& options = {});

}  // namespace rssdgeo
