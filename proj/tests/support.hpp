// Test-only helpers and independent reference computations.
#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rssdgeo/model.hpp"

namespace testsupport {

inline constexpr double kPi = std::numbers::pi;

inline double rad(double deg) { return deg == 360.0 ? 2.0 * kPi : deg * kPi / 180.0; }

inline rssdgeo::Scenario make_scenario(const std::vector<double>& sigma2, double beta_max_deg, double r = 1000.0,
                                       double h = 100.0, int m = 10) {
  rssdgeo::Scenario s;
  const auto n = static_cast<Eigen::Index>(sigma2.size());
  s.horiz_dist = Eigen::VectorXd::Constant(n, r);
  s.vert_dist = Eigen::VectorXd::Constant(n, h);
  s.noise_std.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.noise_std(i) = std::sqrt(sigma2[static_cast<std::size_t>(i)]);
  s.gamma = 2.0;
  s.samples_per_position = m;
  s.beta_max = rad(beta_max_deg);
  return s;
}

inline rssdgeo::Scenario case_a(double beta_max_deg = 120.0) {
  return make_scenario({8, 8, 8, 8, 2, 2, 2, 2}, beta_max_deg);
}

inline rssdgeo::Scenario case_b(double beta_max_deg = 120.0) {
  return make_scenario({4, 4, 4, 4, 4, 4, 4, 4}, beta_max_deg);
}

inline rssdgeo::Scenario random_scenario(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> r(200.0, 3000.0), h(0.0, 400.0), sd(0.5, 4.0), g(1.5, 4.0);
  rssdgeo::Scenario s;
  s.horiz_dist.resize(n);
  s.vert_dist.resize(n);
  s.noise_std.resize(n);
  for (int i = 0; i < n; ++i) {
    s.horiz_dist(i) = r(gen);
    s.vert_dist(i) = h(gen);
    s.noise_std(i) = sd(gen);
  }
  s.gamma = g(gen);
  s.samples_per_position = 1 + static_cast<int>(gen() % 10);
  s.beta_max = std::uniform_real_distribution<double>(0.3, 2.0 * kPi)(gen);
  return s;
}

inline Eigen::VectorXd random_angles(std::mt19937_64& gen, int n, double hi = 2.0 * kPi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = u(gen);
  return a;
}

// 3x3 inverse by the adjugate; no library solver involved.
inline Eigen::Matrix3d cofactor_inverse(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d adj;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int r0 = (r + 1) % 3, r1 = (r + 2) % 3, c0 = (c + 1) % 3, c1 = (c + 2) % 3;
      adj(c, r) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  }
  const double det = m(0, 0) * adj(0, 0) + m(0, 1) * adj(1, 0) + m(0, 2) * adj(2, 0);
  return adj / det;
}

inline double det3(const Eigen::Matrix3d& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// FIM entry by entry from the scalar sums a = sum s^-2, b = sum s^-2 [a_x, a_y],
// H = sum s^-2 [a_x, a_y]^T [a_x, a_y], with a_x = k r sin(beta) / d^2 and
// a_y = k r cos(beta) / d^2 for the sensor layout (sin, cos).
inline Eigen::Matrix3d direct_fim(const rssdgeo::Scenario& s, const Eigen::VectorXd& angles) {
  const double k = 10.0 * s.gamma / std::log(10.0);
  double a = 0, bx = 0, by = 0, hxx = 0, hxy = 0, hyy = 0;
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    const double var = s.noise_std(i) * s.noise_std(i) / s.samples_per_position;
    const double d2 = s.horiz_dist(i) * s.horiz_dist(i) + s.vert_dist(i) * s.vert_dist(i);
    const double ax = k * s.horiz_dist(i) * std::sin(angles(i)) / d2;
    const double ay = k * s.horiz_dist(i) * std::cos(angles(i)) / d2;
    a += 1.0 / var;
    bx += ax / var;
    by += ay / var;
    hxx += ax * ax / var;
    hxy += ax * ay / var;
    hyy += ay * ay / var;
  }
  Eigen::Matrix3d f;
  f << a, bx, by, bx, hxx, hxy, by, hxy, hyy;
  return f;
}

// T as a weighted scatter: sum w d^2 g g^T - (sum w d g)(sum w d g)^T.
inline Eigen::Matrix2d t_sum_form(const rssdgeo::Scenario& s, const Eigen::VectorXd& angles) {
  Eigen::VectorXd inv(angles.size());
  for (Eigen::Index i = 0; i < angles.size(); ++i)
    inv(i) = s.samples_per_position / (s.noise_std(i) * s.noise_std(i));
  const double total = inv.sum();
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  Eigen::Vector2d first = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    const double w = inv(i) / total;
    const double d = s.horiz_dist(i) / (s.horiz_dist(i) * s.horiz_dist(i) + s.vert_dist(i) * s.vert_dist(i));
    const Eigen::Vector2d g(std::cos(angles(i)), std::sin(angles(i)));
    second += w * d * d * g * g.transpose();
    first += w * d * g;
  }
  return second - first * first.transpose();
}

// Largest eigenvalue by shifted power iteration.
inline double power_iteration_max(const Eigen::MatrixXd& m, int iters = 200000) {
  const auto n = m.rows();
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) shift = std::max(shift, m.row(i).cwiseAbs().sum());
  const Eigen::MatrixXd p = m + shift * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd w = p * v;
    const double next = v.dot(w);
    v = w.normalized();
    if (std::abs(next - lambda) <= 1e-15 * std::abs(next) && k > 100) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return v.dot(p * v) - shift;
}

// Membership in the arc the direction constraint describes: [0, beta_max]
// when beta_max <= pi, else [0, pi/2 + beta_max/2] U [5pi/2 - beta_max/2, 2pi).
inline bool in_equivalent_set(double beta, double beta_max) {
  if (beta_max <= kPi) return beta >= 0.0 && beta <= beta_max;
  return beta <= kPi / 2.0 + beta_max / 2.0 || beta >= 5.0 * kPi / 2.0 - beta_max / 2.0;
}

// -ln|X^T X| + rho/2 ||X||^2 - <J, X>
inline double x_objective(const Eigen::MatrixX2d& x, const Eigen::MatrixX2d& j, double rho) {
  const double det = (x.transpose() * x).determinant();
  if (!(det > 0.0)) return INFINITY;
  return -std::log(det) + 0.5 * rho * x.squaredNorm() - (j.array() * x.array()).sum();
}

// Generic gradient descent with backtracking on the X objective.
inline Eigen::MatrixX2d x_numeric_minimizer(const Eigen::MatrixX2d& j, double rho, const Eigen::MatrixX2d& start) {
  Eigen::MatrixX2d x = start;
  double f = x_objective(x, j, rho);
  double step = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const Eigen::MatrixX2d grad = -2.0 * x * (x.transpose() * x).inverse() + rho * x - j;
    if (grad.norm() < 1e-11) break;
    while (true) {
      const Eigen::MatrixX2d trial = x - step * grad;
      const double ft = x_objective(trial, j, rho);
      if (ft <= f - 1e-4 * step * grad.squaredNorm()) {
        x = trial;
        f = ft;
        step *= 2.0;
        break;
      }
      step *= 0.5;
      if (step < 1e-20) return x;
    }
  }
  return x;
}

}  // namespace testsupport
