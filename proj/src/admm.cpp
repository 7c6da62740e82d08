#include "rssdgeo/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rssdgeo/error.hpp"
#include "rssdgeo/numerics.hpp"

namespace rssdgeo {

namespace {

constexpr double kPi = std::numbers::pi;

double log_det2(const Eigen::Matrix2d& m) {
  const double det = m.determinant();
  return det > 0.0 ? std::log(det) : -std::numeric_limits<double>::infinity();
}

// Offset from placement angles to the solver's working arc. For
// beta_max > pi the arc [0, beta_max] is rotated to be centred at pi/2.
double working_phase(double beta_max) { return beta_max > kPi ? kPi / 2.0 - beta_max / 2.0 : 0.0; }

Eigen::MatrixX2d directions_from_angles(const Eigen::VectorXd& angles) {
  Eigen::MatrixX2d g(angles.size(), 2);
  for (Eigen::Index i = 0; i < angles.size(); ++i) g.row(i) = angle_to_direction(angles(i)).transpose();
  return g;
}

}  // namespace

void AdmmOptions::validate() const {
  if (!(rho > 0.0 && std::isfinite(rho))) throw InvalidArgument("admm: rho must be > 0");
  if (!(admm_tol > 0.0)) throw InvalidArgument("admm: admm_tol must be > 0");
  if (!(mm_tol > 0.0)) throw InvalidArgument("admm: mm_tol must be > 0");
  if (max_outer < 1) throw InvalidArgument("admm: max_outer must be >= 1");
  if (max_inner < 1) throw InvalidArgument("admm: max_inner must be >= 1");
}

Placement uniform_init(int n, double beta_max) {
  if (n < 2) throw InvalidArgument("uniform_init: need at least two sensors");
  if (!(beta_max > 0.0 && beta_max <= kTwoPi))
    throw InvalidArgument("uniform_init: beta_max must lie in (0, 2pi]");
  Eigen::VectorXd angles(n);
  for (int i = 0; i < n; ++i) angles(i) = beta_max * (i + 1) / n;
  return Placement::from_angles(angles);
}

double singular_value_map(double sigma, double rho) {
  if (!(sigma >= 0.0)) throw InvalidArgument("singular_value_map: sigma must be >= 0");
  if (!(rho > 0.0)) throw InvalidArgument("singular_value_map: rho must be > 0");
  return (sigma + std::sqrt(sigma * sigma + 8.0 * rho)) / (2.0 * rho);
}

Eigen::MatrixX2d x_update(const Eigen::MatrixX2d& j, double rho) {
  const numerics::ThinSvd svd = numerics::thin_svd(j);
  Eigen::Vector2d lambda;
  for (int c = 0; c < 2; ++c) lambda(c) = singular_value_map(svd.sigma(c), rho);
  return svd.u * lambda.asDiagonal() * svd.v.transpose();
}

Eigen::Vector2d mm_row_update(const Eigen::Vector2d& q, const ConstraintBound& bound,
                              const Eigen::Vector2d& previous) {
  const double norm = q.norm();
  if (norm == 0.0) return previous;
  const Eigen::Vector2d interior = -q / norm;
  if (interior.x() >= bound.g0.x() && interior.y() >= bound.g0.y()) return interior;

  // Arc endpoints, the first one mapping to placement angle 0.
  const double b = bound.beta_max;
  Eigen::Vector2d low, high;
  if (b <= kPi) {
    low = {1.0, 0.0};
    high = angle_to_direction(b);
  } else {
    low = angle_to_direction((5.0 * kPi - b) / 2.0);
    high = angle_to_direction((kPi + b) / 2.0);
  }
  return high.dot(q) < low.dot(q) ? high : low;
}

double g_objective(const Eigen::MatrixX2d& g, const Eigen::MatrixX2d& x_next, const Eigen::MatrixX2d& v,
                   const Eigen::MatrixXd& half_bd, double rho) {
  const Eigen::MatrixX2d c = v - rho * x_next;
  const Eigen::MatrixX2d ag = half_bd * g;
  return (c.array() * ag.array()).sum() + 0.5 * rho * ag.squaredNorm();
}

MmResult g_update_mm(const Eigen::MatrixX2d& x_next, const Eigen::MatrixX2d& v,
                     const Eigen::MatrixX2d& g_start, const Eigen::MatrixXd& half_bd,
                     const Eigen::MatrixXd& m_tilde, double rho, const ConstraintBound& bound,
                     double mm_tol, int max_inner, bool record_objective) {
  const Eigen::MatrixX2d lin = half_bd.transpose() * (v - rho * x_next);
  MmResult out;
  out.g = g_start;
  if (record_objective) out.objective.push_back(g_objective(out.g, x_next, v, half_bd, rho));
  for (int t = 0; t < max_inner; ++t) {
    const Eigen::MatrixX2d q = lin + rho * m_tilde * out.g;
    Eigen::MatrixX2d next(out.g.rows(), 2);
    for (Eigen::Index i = 0; i < q.rows(); ++i)
      next.row(i) = mm_row_update(q.row(i).transpose(), bound, out.g.row(i).transpose()).transpose();
    const double change = (next - out.g).norm();
    out.g = std::move(next);
    out.iterations = t + 1;
    if (record_objective) out.objective.push_back(g_objective(out.g, x_next, v, half_bd, rho));
    if (change < mm_tol) break;
  }
  return out;
}

double augmented_lagrangian(const Eigen::MatrixX2d& x, const Eigen::MatrixX2d& g,
                            const Eigen::MatrixX2d& v, const Eigen::MatrixXd& half_bd, double rho) {
  const Eigen::MatrixX2d r = half_bd * g - x;
  return -log_det2(x.transpose() * x) + (v.array() * r.array()).sum() + 0.5 * rho * r.squaredNorm();
}

AdmmSolver::AdmmSolver(const Scenario& scenario, const SourceParams& source_guess,
                       const AdmmOptions& options)
    : scenario_(scenario), guess_(source_guess), options_(options) {
  scenario_.validate();
  options_.validate();
  const int n = static_cast<int>(scenario_.size());
  bound_ = g0_bound(scenario_.beta_max);
  phase_ = working_phase(scenario_.beta_max);

  d_ = sensitivity(scenario_);
  b_ = coupling_matrix(noise_weights(scenario_), scenario_.variant);
  half_bd_ = numerics::psd_sqrt(b_.b) * d_.d.asDiagonal();

  uniform_ = uniform_init(n, scenario_.beta_max);
  const Eigen::VectorXd start = uniform_.angles().array() + phase_;
  state_.g = directions_from_angles(start);
  if (options_.normalize) {
    const double tau_min = numerics::thin_svd(half_bd_ * state_.g).sigma(1);
    if (tau_min > 0.0 && std::isfinite(tau_min)) scale_ = 2.0 / tau_min;
  }
  half_bd_ *= scale_;
  const Eigen::MatrixXd m = half_bd_.transpose() * half_bd_;
  m_tilde_ = m - numerics::sym_eig_max(m) * Eigen::MatrixXd::Identity(n, n);

  state_.x = half_bd_ * state_.g;
  state_.v = Eigen::MatrixX2d::Zero(n, 2);
  state_.trace.push_back(record(0, state_.x, 0, 0.0));
  // Report the start exactly as the user-facing uniform placement.
  state_.trace.front().angles = uniform_.angles();
  state_.trace.front().lb_rmse = fim_full(scenario_, uniform_, guess_).lb_rmse;
  prev_log_det_ = std::log(state_.trace.front().det_t);
  best_det_ = state_.trace.front().det_t;
  best_g_ = state_.g;
}

IterationRecord AdmmSolver::record(int iter, const Eigen::MatrixX2d& x, int inner, double g_change) {
  IterationRecord rec;
  rec.iter = iter;
  rec.objective = -log_det2(x.transpose() * x) + 4.0 * std::log(scale_);
  rec.det_t = t_matrix(state_.g, d_, b_).determinant();
  const Placement placement = to_placement(state_.g);
  rec.lb_rmse = fim_full(scenario_, placement, guess_).lb_rmse;
  rec.inner_iters = inner;
  const Eigen::MatrixX2d r = half_bd_ * state_.g - x;
  rec.primal_residual = r.norm();
  rec.relative_residual = rec.primal_residual / x.norm();
  rec.g_change = g_change;
  rec.angles = placement.angles();
  return rec;
}

Placement AdmmSolver::to_placement(const Eigen::MatrixX2d& g) const {
  const double b = scenario_.beta_max;
  Eigen::VectorXd angles(g.rows());
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const Eigen::Vector2d row = g.row(i).transpose();
    double a = wrap_angle(std::atan2(row.y(), row.x()) - phase_);
    // Rounding can leave a row a hair outside the arc; snap to the nearer end.
    if (a > b) a = (a - b) < (kTwoPi - a) ? b : 0.0;
    angles(i) = a;
  }
  return Placement::from_angles(angles);
}

bool AdmmSolver::step() {
  if (converged_) return true;
  const double rho = options_.rho;
  AdmmState& s = state_;

  const Eigen::MatrixX2d j = s.v + rho * (half_bd_ * s.g);
  const Eigen::MatrixX2d x = x_update(j, rho);
  MmResult mm = g_update_mm(x, s.v, s.g, half_bd_, m_tilde_, rho, bound_, options_.mm_tol,
                            options_.max_inner);
  const double g_change = (mm.g - s.g).norm();
  s.g = std::move(mm.g);
  s.x = x;
  s.v += rho * (half_bd_ * s.g - x);
  s.k += 1;
  inner_total_ += mm.iterations;

  IterationRecord rec = record(s.k, x, mm.iterations, g_change);
  s.primal_residual = rec.primal_residual;
  const double log_det = std::log(rec.det_t);
  rec.log_det_change = std::abs(log_det - prev_log_det_);
  prev_log_det_ = log_det;

  const double uniform_lb = s.trace.front().lb_rmse;
  if (rec.det_t > best_det_ && rec.lb_rmse <= uniform_lb) {
    best_det_ = rec.det_t;
    best_g_ = s.g;
    best_iter_ = s.k;
  }

  switch (options_.stop_rule) {
    case StopRule::RelativeResidualLogDet:
      converged_ = rec.relative_residual < options_.admm_tol && rec.log_det_change < options_.admm_tol;
      break;
    case StopRule::ResidualAndStep:
      converged_ = std::max(rec.primal_residual, rec.g_change) < options_.admm_tol;
      break;
  }
  s.trace.push_back(std::move(rec));
  return converged_;
}

OptimizeResult AdmmSolver::result() const {
  OptimizeResult out;
  out.placement = best_iter_ == 0 ? uniform_ : to_placement(best_g_);
  out.trace = state_.trace;
  out.converged = converged_;
  out.iterations = state_.k;
  out.mean_inner = state_.k > 0 ? static_cast<double>(inner_total_) / state_.k : 0.0;
  out.best_iter = best_iter_;
  out.det_t = best_det_;
  out.lb_rmse = state_.trace[static_cast<std::size_t>(best_iter_)].lb_rmse;
  out.det_t_uniform = state_.trace.front().det_t;
  out.lb_rmse_uniform = state_.trace.front().lb_rmse;
  return out;
}

OptimizeResult optimize(const Scenario& scenario, const SourceParams& source_guess,
                        const AdmmOptions& options) {
  AdmmSolver solver(scenario, source_guess, options);
  while (solver.state().k < options.max_outer && !solver.step()) {
  }
  return solver.result();
}

std::pair<double, double> optimal_distance(std::pair<double, double> r_range,
                                           std::pair<double, double> h_range) {
  const auto [r_min, r_max] = r_range;
  const auto [h_min, h_max] = h_range;
  if (!(r_min > 0.0 && r_min <= r_max && std::isfinite(r_max)))
    throw InvalidArgument("optimal_distance: need 0 < r_min <= r_max");
  if (!(h_min >= 0.0 && h_min <= h_max && std::isfinite(h_max)))
    throw InvalidArgument("optimal_distance: need 0 <= h_min <= h_max");
  const double r = h_min > 0.0 ? std::clamp(h_min, r_min, r_max) : r_min;
  return {r, h_min};
}

}  // namespace rssdgeo
