// Command-line front end. Talks to the library only through the C API.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rssdgeo/rssdgeo.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct Common {
  std::string scenario;
  std::string out = "-";
  uint64_t seed = 1;
  int jobs = 0;
  std::string stop_rule = "relative";
  rg_options options{};
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
  app->add_option("--out", c.out, "CSV output path ('-' for stdout)");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--rho", c.options.rho, "ADMM penalty (dimensionless)")->check(CLI::PositiveNumber);
  app->add_option("--admm-tol", c.options.admm_tol, "Outer convergence threshold")->check(CLI::PositiveNumber);
  app->add_option("--mm-tol", c.options.mm_tol, "MM convergence threshold")->check(CLI::PositiveNumber);
  app->add_option("--max-outer", c.options.max_outer, "Outer iteration cap")->check(CLI::PositiveNumber);
  app->add_option("--max-inner", c.options.max_inner, "MM iteration cap")->check(CLI::PositiveNumber);
  app->add_option("--stop-rule", c.stop_rule, "Outer stop rule")
      ->check(CLI::IsMember({"relative", "residual-step"}));
  app->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

int report_error(rg_status status) {
  std::fprintf(stderr, "error: %s\n", rg_last_error());
  return status == RG_ERR_CONFIG || status == RG_ERR_INVALID_ARGUMENT ? kExitConfig : kExitError;
}

std::vector<double> to_radians(const std::vector<double>& degrees) {
  std::vector<double> out;
  out.reserve(degrees.size());
  for (double d : degrees) out.push_back(d == 360.0 ? 2.0 * 3.14159265358979323846 : d * kDegToRad);
  return out;
}

std::vector<double> default_angle_grid() {
  std::vector<double> out;
  for (int i = 4; i <= 48; ++i) out.push_back(7.5 * i);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spread-angle constrained UAV placement for RSSD localization"};
  app.require_subcommand(1);

  Common common;
  rg_options_default(&common.options);

  double beta_override = 0.0;
  std::vector<double> conv_betas{120, 200, 280, 360};
  std::vector<int> sweep_ns{4, 8, 12, 16};
  std::vector<double> sweep_n_betas{120};
  std::vector<double> sweep_betas = default_angle_grid();
  double prior_std = std::sqrt(12500.0);
  int trials = 100;
  bool run_mle = false;
  std::string validate_path;

  CLI::App* optimize = app.add_subcommand("optimize", "Optimize the placement for one scenario");
  add_common(optimize, common);
  optimize->add_option("--beta-max-deg", beta_override, "Override the scenario's spread angle")
      ->check(CLI::Range(0.0, 360.0));

  CLI::App* convergence = app.add_subcommand("convergence", "Per-iteration LB-RMSE traces");
  add_common(convergence, common);
  convergence->add_option("--beta", conv_betas, "Spread angles in degrees")->check(CLI::Range(0.0, 360.0));

  CLI::App* sweep_n = app.add_subcommand("sweep-n", "LB-RMSE versus number of UAVs");
  add_common(sweep_n, common);
  sweep_n->add_option("--n", sweep_ns, "Swarm sizes")->check(CLI::Range(3, 100000));
  sweep_n->add_option("--beta", sweep_n_betas, "Spread angles in degrees")->check(CLI::Range(0.0, 360.0));

  CLI::App* sweep_angle = app.add_subcommand("sweep-angle", "LB-RMSE versus spread angle");
  add_common(sweep_angle, common);
  sweep_angle->add_option("--beta", sweep_betas, "Spread angles in degrees")->check(CLI::Range(0.0, 360.0));

  CLI::App* practical = app.add_subcommand("practical", "Placement around a noisy prior estimate");
  add_common(practical, common);
  practical->add_option("--prior-std", prior_std, "Prior error std per axis (m)")
      ->check(CLI::NonNegativeNumber);
  practical->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  practical->add_flag("--mle", run_mle, "Simulate measurements and estimate the source");

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario and print derived quantities");
  validate->add_option("--scenario", validate_path, "Scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    rg_scenario* s = nullptr;
    rg_status st = rg_scenario_load(validate_path.c_str(), &s);
    if (st != RG_OK) return report_error(st);
    size_t needed = 0;
    rg_validate_report(s, nullptr, 0, &needed);
    std::string text(needed, '\0');
    st = rg_validate_report(s, text.data(), text.size(), &needed);
    rg_scenario_free(s);
    if (st != RG_OK) return report_error(st);
    std::fputs(text.c_str(), stdout);
    return kExitOk;
  }

  common.options.stop_rule = common.stop_rule == "relative" ? RG_STOP_RELATIVE : RG_STOP_RESIDUAL_STEP;
  rg_run_config config;
  rg_run_config_default(&config);
  config.seed = common.seed;
  config.jobs = common.jobs;
  config.prior_std = prior_std;
  config.trials = trials;
  config.run_mle = run_mle ? 1 : 0;

  rg_scenario* s = nullptr;
  rg_status st = rg_scenario_load(common.scenario.c_str(), &s);
  if (st != RG_OK) return report_error(st);

  const auto start = std::chrono::steady_clock::now();
  rg_table* table = nullptr;
  if (optimize->parsed()) {
    if (beta_override > 0.0) st = rg_scenario_set_beta_max(s, to_radians({beta_override})[0]);
    if (st == RG_OK) st = rg_run_optimize(s, &common.options, &config, &table);
  } else if (convergence->parsed()) {
    const auto b = to_radians(conv_betas);
    st = rg_run_convergence(s, b.data(), b.size(), &common.options, &config, &table);
  } else if (sweep_n->parsed()) {
    const auto b = to_radians(sweep_n_betas);
    st = rg_run_sweep_n(s, sweep_ns.data(), sweep_ns.size(), b.data(), b.size(), &common.options, &config, &table);
  } else if (sweep_angle->parsed()) {
    const auto b = to_radians(sweep_betas);
    st = rg_run_sweep_angle(s, b.data(), b.size(), &common.options, &config, &table);
  } else if (practical->parsed()) {
    st = rg_run_practical(s, &common.options, &config, &table);
  }
  rg_scenario_free(s);
  if (st != RG_OK) return report_error(st);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  st = rg_table_write_csv(table, common.out.c_str());
  const bool nonconverged = rg_table_any_nonconverged(table) != 0;
  const size_t rows = rg_table_rows(table);
  rg_table_free(table);
  if (st != RG_OK) return report_error(st);
  std::fprintf(stderr, "rows: %zu, elapsed: %.3f s%s\n", rows, elapsed,
               nonconverged ? ", some runs did not converge" : "");
  return nonconverged ? kExitNotConverged : kExitOk;
}
