#include "rssdgeo/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "rssdgeo/error.hpp"
#include "rssdgeo/estimator.hpp"
#include "rssdgeo/fim.hpp"
#include "rssdgeo/numerics.hpp"
#include "rssdgeo/rng.hpp"

namespace rssdgeo {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string deg(double rad) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", rad * kRadToDeg);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double improvement_pct(const OptimizeResult& r) { return 100.0 * (1.0 - r.lb_rmse / r.lb_rmse_uniform); }

Scenario with_beta(const Scenario& s, double beta_max) {
  Scenario out = s;
  out.beta_max = beta_max;
  return out;
}

SourceParams truth_of(const ScenarioDocument& doc) { return {doc.p0, doc.scenario.source_xy()}; }

}  // namespace

void Table::write_csv(std::ostream& out) const {
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
}

std::string Table::to_csv() const {
  std::ostringstream s;
  write_csv(s);
  return s.str();
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

Scenario resample_sensors(const Scenario& base, int n) {
  if (n < 1) throw InvalidArgument("resample_sensors: n must be >= 1");
  const auto nt = static_cast<long>(base.size());
  Scenario out = base;
  out.horiz_dist.resize(n);
  out.vert_dist.resize(n);
  out.noise_std.resize(n);
  for (long j = 0; j < n; ++j) {
    const long src = j * nt / n;
    out.horiz_dist(j) = base.horiz_dist(src);
    out.vert_dist(j) = base.vert_dist(src);
    out.noise_std(j) = base.noise_std(src);
  }
  return out;
}

std::string format_placement(const Placement& placement) {
  std::string out;
  for (Eigen::Index i = 0; i < placement.angles().size(); ++i) {
    if (i) out += ';';
    out += deg(placement.angles()(i));
  }
  return out;
}

Table run_optimize(const ScenarioDocument& doc, const AdmmOptions& options, const RunConfig& config) {
  Table t;
  t.header = {"beta_max_deg", "lb_rmse_uniform_m", "lb_rmse_opt_m", "improvement_pct", "iterations",
              "mean_inner_iters", "converged", "placement_deg", "scenario_hash", "seed"};
  const OptimizeResult r = optimize(doc.scenario, truth_of(doc), options);
  t.any_nonconverged = !r.converged;
  t.rows.push_back({deg(doc.scenario.beta_max), num(r.lb_rmse_uniform), num(r.lb_rmse), num(improvement_pct(r)),
                    std::to_string(r.iterations), num(r.mean_inner), r.converged ? "1" : "0",
                    format_placement(r.placement), hex(scenario_hash(doc)), std::to_string(config.seed)});
  return t;
}

Table run_convergence(const ScenarioDocument& doc, const std::vector<double>& beta_max_list,
                      const AdmmOptions& options, const RunConfig& config) {
  std::vector<OptimizeResult> results(beta_max_list.size());
  parallel_for(results.size(), config.jobs, [&](std::size_t i) {
    results[i] = optimize(with_beta(doc.scenario, beta_max_list[i]), truth_of(doc), options);
  });
  Table t;
  t.header = {"beta_max_deg", "iter", "lb_rmse_m", "objective", "inner_iters", "primal_residual",
              "mean_inner_iters", "converged", "scenario_hash", "seed"};
  const std::string h = hex(scenario_hash(doc));
  for (std::size_t i = 0; i < results.size(); ++i) {
    const OptimizeResult& r = results[i];
    t.any_nonconverged = t.any_nonconverged || !r.converged;
    for (const IterationRecord& rec : r.trace)
      t.rows.push_back({deg(beta_max_list[i]), std::to_string(rec.iter), num(rec.lb_rmse), num(rec.objective),
                        std::to_string(rec.inner_iters), num(rec.primal_residual), num(r.mean_inner),
                        r.converged ? "1" : "0", h, std::to_string(config.seed)});
  }
  return t;
}

Table run_sweep_n(const ScenarioDocument& doc, const std::vector<int>& n_list,
                  const std::vector<double>& beta_max_list, const AdmmOptions& options,
                  const RunConfig& config) {
  for (int n : n_list)
    if (n < 3) throw InvalidArgument("sweep-n: every n must be >= 3");
  const std::size_t nb = beta_max_list.size();
  std::vector<OptimizeResult> results(n_list.size() * nb);
  parallel_for(results.size(), config.jobs, [&](std::size_t k) {
    const Scenario s = with_beta(resample_sensors(doc.scenario, n_list[k / nb]), beta_max_list[k % nb]);
    results[k] = optimize(s, truth_of(doc), options);
  });
  Table t;
  t.header = {"n", "beta_max_deg", "lb_rmse_uniform_m", "lb_rmse_opt_m", "improvement_pct", "iterations",
              "converged", "placement_deg", "scenario_hash", "seed"};
  const std::string h = hex(scenario_hash(doc));
  for (std::size_t k = 0; k < results.size(); ++k) {
    const OptimizeResult& r = results[k];
    t.any_nonconverged = t.any_nonconverged || !r.converged;
    t.rows.push_back({std::to_string(n_list[k / nb]), deg(beta_max_list[k % nb]), num(r.lb_rmse_uniform),
                      num(r.lb_rmse), num(improvement_pct(r)), std::to_string(r.iterations),
                      r.converged ? "1" : "0", format_placement(r.placement), h, std::to_string(config.seed)});
  }
  return t;
}

Table run_sweep_angle(const ScenarioDocument& doc, const std::vector<double>& beta_grid,
                      const AdmmOptions& options, const RunConfig& config) {
  std::vector<OptimizeResult> results(beta_grid.size());
  parallel_for(results.size(), config.jobs, [&](std::size_t i) {
    results[i] = optimize(with_beta(doc.scenario, beta_grid[i]), truth_of(doc), options);
  });
  Table t;
  t.header = {"beta_max_deg", "lb_rmse_uniform_m", "lb_rmse_opt_m", "improvement_pct", "iterations",
              "converged", "placement_deg", "scenario_hash", "seed"};
  const std::string h = hex(scenario_hash(doc));
  for (std::size_t i = 0; i < results.size(); ++i) {
    const OptimizeResult& r = results[i];
    t.any_nonconverged = t.any_nonconverged || !r.converged;
    t.rows.push_back({deg(beta_grid[i]), num(r.lb_rmse_uniform), num(r.lb_rmse), num(improvement_pct(r)),
                      std::to_string(r.iterations), r.converged ? "1" : "0", format_placement(r.placement), h,
                      std::to_string(config.seed)});
  }
  return t;
}

Table run_practical(const ScenarioDocument& doc, const PracticalConfig& practical,
                    const AdmmOptions& options, const RunConfig& config) {
  if (practical.trials < 1) throw InvalidArgument("practical: trials must be >= 1");
  if (!(practical.prior_std >= 0.0) || !std::isfinite(practical.prior_std))
    throw InvalidArgument("practical: prior_std must be >= 0");
  const Scenario& s = doc.scenario;
  const SourceParams truth = truth_of(doc);
  const OptimizeResult theoretical = optimize(s, truth, options);
  const Eigen::VectorXd sigma_eff = s.effective_variance().cwiseSqrt();

  struct Trial {
    double prior_err = 0.0;
    double lb = 0.0;
    double est_err = 0.0;
    bool converged = false;
    Placement placement;
  };
  std::vector<Trial> trials(static_cast<std::size_t>(practical.trials));
  const Rng root(config.seed);
  parallel_for(trials.size(), config.jobs, [&](std::size_t k) {
    Rng stream = root.split(k);
    const double ex = stream.normal(0.0, practical.prior_std);
    const double ey = stream.normal(0.0, practical.prior_std);
    SourceParams guess = truth;
    guess.position += Eigen::Vector2d(ex, ey);

    const OptimizeResult r = optimize(s, guess, options);
    const Eigen::MatrixX3d pos = sensor_positions(s, r.placement, guess.position);
    Trial& tr = trials[k];
    tr.prior_err = std::hypot(ex, ey);
    tr.lb = fim_from_positions(s, pos, truth.position).lb_rmse;
    tr.converged = r.converged;
    tr.placement = r.placement;
    if (practical.run_mle) {
      const Eigen::VectorXd meas = simulate_measurements(s, pos, truth, stream.split(1).key());
      MleOptions mo;
      mo.prior_std = practical.prior_std;
      const MleResult est = mle_estimate(meas, pos, sigma_eff, s.gamma, guess, mo);
      tr.est_err = (est.theta_hat.tail<2>() - truth.position).norm();
    }
  });

  Table t;
  t.header = {"trial", "prior_err_m", "lb_rmse_theoretical_m", "lb_rmse_practical_m", "empirical_rmse_m",
              "converged", "placement_deg", "scenario_hash", "seed"};
  const std::string h = hex(scenario_hash(doc));
  const std::string seed = std::to_string(config.seed);
  double sum_prior = 0.0, sum_lb = 0.0, sum_sq_err = 0.0;
  bool all_converged = theoretical.converged;
  for (std::size_t k = 0; k < trials.size(); ++k) {
    const Trial& tr = trials[k];
    sum_prior += tr.prior_err;
    sum_lb += tr.lb;
    sum_sq_err += tr.est_err * tr.est_err;
    all_converged = all_converged && tr.converged;
    t.rows.push_back({std::to_string(k), num(tr.prior_err), num(theoretical.lb_rmse), num(tr.lb),
                      practical.run_mle ? num(tr.est_err) : "", tr.converged ? "1" : "0",
                      format_placement(tr.placement), h, seed});
  }
  const double n = static_cast<double>(trials.size());
  t.rows.push_back({"mean", num(sum_prior / n), num(theoretical.lb_rmse), num(sum_lb / n),
                    practical.run_mle ? num(std::sqrt(sum_sq_err / n)) : "", all_converged ? "1" : "0",
                    format_placement(theoretical.placement), h, seed});
  t.any_nonconverged = !all_converged;
  return t;
}

ValidationReport validate_scenario(const ScenarioDocument& doc) {
  doc.scenario.validate();
  ValidationReport r;
  r.n = doc.scenario.size();
  const NoiseWeights w = noise_weights(doc.scenario);
  r.weights = w.w;
  r.mean_inv_var = w.mean_inv_var;
  r.g0 = g0_bound(doc.scenario.beta_max).g0;
  const Eigen::VectorXd ev = numerics::sym_eig(coupling_matrix(w, doc.scenario.variant).b).values;
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  r.b_rank = static_cast<int>((ev.array() > tol).count());
  r.beta_max_deg = doc.scenario.beta_max * kRadToDeg;
  r.hash = scenario_hash(doc);
  return r;
}

std::string format_report(const ValidationReport& r) {
  std::ostringstream s;
  s << "sensors: " << r.n << '\n';
  s << "weights:";
  for (Eigen::Index i = 0; i < r.weights.size(); ++i) s << ' ' << num(r.weights(i));
  s << '\n';
  s << "mean_inv_var: " << num(r.mean_inv_var) << '\n';
  s << "beta_max_deg: " << num(r.beta_max_deg) << '\n';
  s << "g0: " << num(r.g0.x()) << ' ' << num(r.g0.y()) << '\n';
  s << "b_rank: " << r.b_rank << '\n';
  s << "scenario_hash: " << hex(r.hash) << '\n';
  return s.str();
}

}  // namespace rssdgeo
