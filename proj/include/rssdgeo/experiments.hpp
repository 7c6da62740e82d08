#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rssdgeo/admm.hpp"
#include "rssdgeo/scenario_io.hpp"

namespace rssdgeo {

/// Rows of already formatted CSV cells under a fixed header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool any_nonconverged = false;

  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

struct RunConfig {
  std::uint64_t seed = 1;
  /// Worker threads; 0 picks the hardware concurrency.
  int jobs = 0;
};

struct PracticalConfig {
  double prior_std = 0.0;
  int trials = 100;
  /// Also simulate measurements and run the estimator per trial.
  bool run_mle = false;
};

/// Runs body(i) for i in [0, count) on a bounded pool of workers. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Copy of `base` with n sensors; sensor j takes the parameters of template
/// sensor floor(j * N_template / n).
Scenario resample_sensors(const Scenario& base, int n);

Table run_optimize(const ScenarioDocument& doc, const AdmmOptions& options, const RunConfig& config);
Table run_convergence(const ScenarioDocument& doc, const std::vector<double>& beta_max_list,
                      const AdmmOptions& options, const RunConfig& config);
Table run_sweep_n(const ScenarioDocument& doc, const std::vector<int>& n_list,
                  const std::vector<double>& beta_max_list, const AdmmOptions& options,
                  const RunConfig& config);
Table run_sweep_angle(const ScenarioDocument& doc, const std::vector<double>& beta_grid,
                      const AdmmOptions& options, const RunConfig& config);
/// One row per trial followed by a "mean" row. The LB-RMSE columns are the
/// bound at the true source for sensors placed around the true source
/// (theoretical) and around the noisy prior (practical).
Table run_practical(const ScenarioDocument& doc, const PracticalConfig& practical,
                    const AdmmOptions& options, const RunConfig& config);

struct ValidationReport {
  std::size_t n = 0;
  Eigen::VectorXd weights;
  double mean_inv_var = 0.0;
  Eigen::Vector2d g0 = Eigen::Vector2d::Zero();
  int b_rank = 0;
  double beta_max_deg = 0.0;
  std::uint64_t hash = 0;
};

ValidationReport validate_scenario(const ScenarioDocument& doc);
std::string format_report(const ValidationReport& report);

/// Placement angles in degrees, six decimals, separated by ';'.
std::string format_placement(const Placement& placement);

}  // namespace rssdgeo
