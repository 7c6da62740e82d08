#include <cmath>

#include <doctest.h>

#include "rssdgeo/admm.hpp"
#include "rssdgeo/error.hpp"
#include "rssdgeo/estimator.hpp"
#include "rssdgeo/model.hpp"
#include "rssdgeo/rng.hpp"
#include "support.hpp"

using namespace rssdgeo;
namespace ts = testsupport;

namespace {

struct Setup {
  Scenario s;
  SourceParams truth;
  Eigen::MatrixX3d pos;
  Eigen::VectorXd sigma_eff;
};

Setup make_setup(const Scenario& s, const Placement& p) {
  Setup out{s, {}, {}, {}};
  out.truth.p0 = -30.0;
  out.truth.position = s.source_xy();
  out.pos = sensor_positions(s, p, s.source_xy());
  out.sigma_eff = s.effective_variance().cwiseSqrt();
  return out;
}

Eigen::VectorXd noiseless(const Setup& st) {
  Eigen::VectorXd m(st.pos.rows());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Eigen::Vector3d d(st.pos(i, 0) - st.truth.position.x(), st.pos(i, 1) - st.truth.position.y(), st.pos(i, 2));
    m(i) = mean_rss(st.truth.p0, st.s.gamma, d.norm());
  }
  return m;
}

Eigen::Vector3d theta_of(const SourceParams& p) { return {p.p0, p.position.x(), p.position.y()}; }

}  // namespace

TEST_CASE("noiseless measurements: truth is a fixed point") {
  const Setup st = make_setup(ts::case_a(120), uniform_init(8, ts::rad(120)));
  const MleResult r = mle_estimate(noiseless(st), st.pos, st.sigma_eff, st.s.gamma, st.truth);
  CHECK(r.converged);
  CHECK((r.theta_hat.tail<2>() - st.truth.position).norm() < 1e-6);
  CHECK(std::abs(r.theta_hat(0) - st.truth.p0) < 1e-6);
  CHECK(r.residual_norm < 1e-8);
}

TEST_CASE("noiseless measurements: recovery from a 200 m offset") {
  const Setup st = make_setup(ts::case_a(120), uniform_init(8, ts::rad(120)));
  const Eigen::VectorXd meas = noiseless(st);

  // The residual surface on a 200 x 200 grid over +-300 m has its lowest
  // point in the cell at the truth, so a 200 m offset lies in its basin.
  double best = INFINITY;
  Eigen::Vector2d best_xy;
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      const Eigen::Vector2d xy(-300.0 + 600.0 * i / 199, -300.0 + 600.0 * j / 199);
      double p0 = 0.0, w = 0.0;
      for (Eigen::Index k = 0; k < meas.size(); ++k) {
        const double d = Eigen::Vector3d(st.pos(k, 0) - xy.x(), st.pos(k, 1) - xy.y(), st.pos(k, 2)).norm();
        const double wk = 1.0 / (st.sigma_eff(k) * st.sigma_eff(k));
        p0 += wk * (meas(k) + 10.0 * st.s.gamma * std::log10(d));
        w += wk;
      }
      const double cost = mle_residual(meas, st.pos, st.sigma_eff, st.s.gamma, {p0 / w, xy.x(), xy.y()});
      if (cost < best) {
        best = cost;
        best_xy = xy;
      }
    }
  CHECK(best_xy.norm() < 600.0 / 199);

  for (double ang : {0.0, 1.0, 2.5, 4.0}) {
    SourceParams init = st.truth;
    init.p0 = -50.0;
    init.position += 200.0 * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    const MleResult r = mle_estimate(meas, st.pos, st.sigma_eff, st.s.gamma, init);
    CAPTURE(ang);
    CHECK(r.converged);
    CHECK((r.theta_hat.tail<2>() - st.truth.position).norm() < 1e-4);
  }
}

TEST_CASE("constant offset on all measurements shifts only P0") {
  const Scenario s = ts::case_b(200);
  const Setup st = make_setup(s, uniform_init(8, s.beta_max));
  const Eigen::VectorXd meas = simulate_measurements(s, st.pos, st.truth, 11);
  const MleResult a = mle_estimate(meas, st.pos, st.sigma_eff, s.gamma, st.truth);
  for (double c : {-7.5, 3.0, 20.0}) {
    const Eigen::VectorXd shifted = meas.array() + c;
    const MleResult b = mle_estimate(shifted, st.pos, st.sigma_eff, s.gamma, st.truth);
    CHECK(b.theta_hat(0) - a.theta_hat(0) == doctest::Approx(c).epsilon(1e-9));
    CHECK((b.theta_hat.tail<2>() - a.theta_hat.tail<2>()).norm() < 1e-8);
  }
}

TEST_CASE("estimate never ends above the residual at the initial guess") {
  const Scenario s = ts::case_a(280);
  const Setup st = make_setup(s, uniform_init(8, s.beta_max));
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd meas = simulate_measurements(s, st.pos, st.truth, 100 + t);
    SourceParams init = st.truth;
    init.p0 = rng.normal(-30.0, 10.0);
    init.position += Eigen::Vector2d(rng.normal(0, 150), rng.normal(0, 150));
    const MleResult r = mle_estimate(meas, st.pos, st.sigma_eff, s.gamma, init, {.prior_std = 50.0});
    CHECK(r.residual_norm <= mle_residual(meas, st.pos, st.sigma_eff, s.gamma, theta_of(init)) + 1e-12);
    CHECK(r.residual_norm >= 0.0);
  }
}

TEST_CASE("Monte-Carlo RMSE is not below the lower bound") {
  const Scenario s = ts::case_a(120);
  const OptimizeResult opt = optimize(s, {}, AdmmOptions{});
  const Setup st = make_setup(s, opt.placement);
  const int trials = 1000;
  Eigen::VectorXd sq(trials);
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd meas = simulate_measurements(s, st.pos, st.truth, 1000 + t);
    const MleResult r = mle_estimate(meas, st.pos, st.sigma_eff, s.gamma, st.truth);
    sq(t) = (r.theta_hat.tail<2>() - st.truth.position).squaredNorm();
  }
  const double mse = sq.mean();
  const double rmse = std::sqrt(mse);
  const double sd = std::sqrt((sq.array() - mse).square().sum() / (trials - 1));
  const double se = sd / std::sqrt(double(trials)) / (2.0 * rmse);
  INFO("rmse " << rmse << " lb " << opt.lb_rmse << " se " << se);
  CHECK(rmse >= opt.lb_rmse - 3.0 * se);
}

TEST_CASE("estimator input checks") {
  const Setup st = make_setup(ts::case_b(), uniform_init(8, ts::rad(120)));
  const Eigen::VectorXd meas = noiseless(st);
  CHECK_THROWS_AS(mle_estimate(meas.head(2), st.pos.topRows(2), st.sigma_eff.head(2), 2.0, st.truth),
                  InvalidArgument);
  CHECK_THROWS_AS(mle_estimate(meas.head(5), st.pos, st.sigma_eff, 2.0, st.truth), InvalidArgument);
  Eigen::MatrixX3d same = st.pos;
  for (Eigen::Index i = 1; i < same.rows(); ++i) same.row(i) = same.row(0);
  CHECK_THROWS_AS(mle_estimate(meas, same, st.sigma_eff, 2.0, st.truth), InvalidArgument);
}
