#include "rssdgeo/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rssdgeo/error.hpp"

namespace rssdgeo {

namespace {

struct Problem {
  const Eigen::VectorXd& p;
  const Eigen::MatrixX3d& pos;
  Eigen::VectorXd inv_sigma;
  double gamma;

  double log_gain() const { return 10.0 * gamma / std::numbers::ln10; }

  Eigen::VectorXd squared_dist(double x, double y) const {
    return (pos.col(0).array() - x).square() + (pos.col(1).array() - y).square() + pos.col(2).array().square();
  }

  Eigen::VectorXd residual(const Eigen::Vector3d& theta) const {
    const Eigen::ArrayXd d2 = squared_dist(theta(1), theta(2));
    // 10 gamma log10(d) = 5 gamma log10(d^2)
    const Eigen::ArrayXd r = p.array() - theta(0) + 5.0 * gamma * d2.log10();
    return (r * inv_sigma.array()).matrix();
  }

  double cost(const Eigen::Vector3d& theta) const {
    const Eigen::VectorXd r = residual(theta);
    return r.allFinite() ? r.squaredNorm() : std::numeric_limits<double>::infinity();
  }

  Eigen::MatrixX3d jacobian(const Eigen::Vector3d& theta) const {
    const Eigen::ArrayXd d2 = squared_dist(theta(1), theta(2));
    const double k = log_gain();
    Eigen::MatrixX3d j(p.size(), 3);
    j.col(0) = -inv_sigma;
    j.col(1) = (k * (theta(1) - pos.col(0).array()) / d2 * inv_sigma.array()).matrix();
    j.col(2) = (k * (theta(2) - pos.col(1).array()) / d2 * inv_sigma.array()).matrix();
    return j;
  }

  // Weighted least-squares P0 for a fixed position.
  double best_p0(double x, double y) const {
    const Eigen::ArrayXd w = inv_sigma.array().square();
    const Eigen::ArrayXd d2 = squared_dist(x, y);
    return (w * (p.array() + 5.0 * gamma * d2.log10())).sum() / w.sum();
  }
};

MleResult solve_from(const Problem& prob, const Eigen::Vector3d& start, const MleOptions& opt) {
  MleResult out;
  Eigen::Vector3d theta = start;
  double cost = prob.cost(theta);
  double damping = opt.initial_damping;
  for (int it = 1; it <= opt.max_iter && std::isfinite(cost); ++it) {
    out.iterations = it;
    const Eigen::MatrixX3d j = prob.jacobian(theta);
    const Eigen::Matrix3d h = j.transpose() * j;
    const Eigen::Vector3d grad = j.transpose() * prob.residual(theta);
    const Eigen::Vector3d diag = h.diagonal().cwiseMax(1e-12);
    bool stop = false;
    while (true) {
      Eigen::Matrix3d lhs = h;
      lhs.diagonal() += damping * diag;
      const Eigen::Vector3d delta = lhs.ldlt().solve(-grad);
      const double pos_step = delta.tail<2>().norm();
      const Eigen::Vector3d trial = theta + delta;
      const double trial_cost = delta.allFinite() ? prob.cost(trial) : std::numeric_limits<double>::infinity();
      // Near the optimum the cost is flat to rounding long before the
      // position is; accepting rounding-level changes lets the steps settle.
      if (trial_cost <= cost * (1.0 + 1e-12)) {
        theta = trial;
        cost = trial_cost;
        damping = std::max(damping * 0.1, 1e-15);
        if (pos_step < opt.step_tol) {
          out.converged = true;
          stop = true;
        }
        break;
      }
      if (pos_step < opt.step_tol) {
        out.converged = true;
        stop = true;
        break;
      }
      damping *= 10.0;
      if (damping > 1e16) {
        stop = true;
        break;
      }
    }
    if (stop) break;
  }
  out.theta_hat = theta;
  out.residual_norm = std::sqrt(cost);
  if (!theta.allFinite() || !std::isfinite(cost)) out.converged = false;
  return out;
}

}  // namespace

double mle_residual(const Eigen::VectorXd& measurements, const Eigen::MatrixX3d& sensor_positions,
                    const Eigen::VectorXd& sigma_eff, double gamma, const Eigen::Vector3d& theta) {
  const Problem prob{measurements, sensor_positions, sigma_eff.cwiseInverse(), gamma};
  return std::sqrt(prob.cost(theta));
}

MleResult mle_estimate(const Eigen::VectorXd& measurements, const Eigen::MatrixX3d& sensor_positions,
                       const Eigen::VectorXd& sigma_eff, double gamma, const SourceParams& init,
                       const MleOptions& options) {
  const auto n = measurements.size();
  if (n < 3) throw InvalidArgument("mle_estimate: at least three sensors required");
  if (sensor_positions.rows() != n || sigma_eff.size() != n)
    throw InvalidArgument("mle_estimate: dimension mismatch");
  if (!(sigma_eff.array() > 0.0).all()) throw InvalidArgument("mle_estimate: sigma must be > 0");
  if (!(gamma > 0.0)) throw InvalidArgument("mle_estimate: gamma must be > 0");
  if (!(options.prior_std >= 0.0)) throw InvalidArgument("mle_estimate: prior_std must be >= 0");
  const Eigen::RowVector3d first = sensor_positions.row(0);
  if ((sensor_positions.rowwise() - first).cwiseAbs().maxCoeff() == 0.0)
    throw InvalidArgument("mle_estimate: sensors must not all coincide");

  const Problem prob{measurements, sensor_positions, sigma_eff.cwiseInverse(), gamma};
  const int reach = options.prior_std > 0.0 ? 2 : 0;
  MleResult best;
  best.residual_norm = std::numeric_limits<double>::infinity();
  bool have = false;
  for (int ix = -reach; ix <= reach; ++ix) {
    for (int iy = -reach; iy <= reach; ++iy) {
      const double x = init.position.x() + ix * options.prior_std;
      const double y = init.position.y() + iy * options.prior_std;
      const Eigen::Vector3d start(prob.best_p0(x, y), x, y);
      MleResult r = solve_from(prob, start, options);
      if (!have || r.residual_norm < best.residual_norm) {
        best = r;
        have = true;
      }
    }
  }
  return best;
}

}  // namespace rssdgeo
