#include "rssdgeo/rssdgeo.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <new>
#include <string>

#include "rssdgeo/admm.hpp"
#include "rssdgeo/error.hpp"
#include "rssdgeo/experiments.hpp"
#include "rssdgeo/fim.hpp"
#include "rssdgeo/scenario_io.hpp"

struct rg_scenario {
  rssdgeo::ScenarioDocument doc;
};

struct rg_result {
  rssdgeo::OptimizeResult result;
};

struct rg_table {
  rssdgeo::Table table;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_path;

rg_status fail(rg_status status, const std::string& message, const std::string& path = "") {
  g_error = message;
  g_error_path = path;
  return status;
}

// Runs fn, mapping exceptions to status codes.
template <class Fn>
rg_status guarded(Fn&& fn) {
  g_error.clear();
  g_error_path.clear();
  try {
    return fn();
  } catch (const rssdgeo::ConfigError& e) {
    return fail(RG_ERR_CONFIG, e.what(), e.path());
  } catch (const rssdgeo::InvalidArgument& e) {
    return fail(RG_ERR_INVALID_ARGUMENT, e.what());
  } catch (const rssdgeo::NotPsdError& e) {
    return fail(RG_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RG_ERR_INTERNAL, "unknown error");
  }
}

rssdgeo::AdmmOptions to_options(const rg_options* o) {
  rssdgeo::AdmmOptions out;
  if (!o) return out;
  out.rho = o->rho;
  out.admm_tol = o->admm_tol;
  out.mm_tol = o->mm_tol;
  out.max_outer = o->max_outer;
  out.max_inner = o->max_inner;
  if (o->stop_rule != RG_STOP_RELATIVE && o->stop_rule != RG_STOP_RESIDUAL_STEP)
    throw rssdgeo::InvalidArgument("options: unknown stop rule");
  out.stop_rule = o->stop_rule == RG_STOP_RELATIVE ? rssdgeo::StopRule::RelativeResidualLogDet
                                                   : rssdgeo::StopRule::ResidualAndStep;
  out.normalize = o->normalize != 0;
  out.validate();
  return out;
}

rssdgeo::RunConfig to_config(const rg_run_config* c) {
  rssdgeo::RunConfig out;
  if (c) {
    out.seed = c->seed;
    out.jobs = c->jobs;
  }
  return out;
}

rg_status copy_text(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf || cap < text.size() + 1) return fail(RG_ERR_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return RG_OK;
}

rg_status emit_table(rssdgeo::Table table, rg_table** out) {
  *out = new rg_table{std::move(table)};
  return RG_OK;
}

template <class T>
void require(const T* p, const char* what) {
  if (!p) throw rssdgeo::InvalidArgument(std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* rg_version(void) { return "0.1.0"; }
const char* rg_last_error(void) { return g_error.c_str(); }
const char* rg_last_error_path(void) { return g_error_path.c_str(); }

void rg_options_default(rg_options* options) {
  if (!options) return;
  const rssdgeo::AdmmOptions d;
  options->rho = d.rho;
  options->admm_tol = d.admm_tol;
  options->mm_tol = d.mm_tol;
  options->max_outer = d.max_outer;
  options->max_inner = d.max_inner;
  options->stop_rule = RG_STOP_RELATIVE;
  options->normalize = 1;
}

void rg_run_config_default(rg_run_config* config) {
  if (!config) return;
  config->seed = 1;
  config->jobs = 0;
  config->prior_std = 0.0;
  config->trials = 100;
  config->run_mle = 0;
}

rg_status rg_scenario_load(const char* path, rg_scenario** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new rg_scenario{rssdgeo::load_scenario(path)};
    return RG_OK;
  });
}

rg_status rg_scenario_parse(const char* json_text, rg_scenario** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new rg_scenario{rssdgeo::parse_scenario(json_text)};
    return RG_OK;
  });
}

void rg_scenario_free(rg_scenario* scenario) { delete scenario; }

size_t rg_scenario_size(const rg_scenario* scenario) { return scenario ? scenario->doc.scenario.size() : 0; }

double rg_scenario_beta_max(const rg_scenario* scenario) {
  return scenario ? scenario->doc.scenario.beta_max : std::numeric_limits<double>::quiet_NaN();
}

rg_status rg_scenario_set_beta_max(rg_scenario* scenario, double beta_max) {
  return guarded([&] {
    require(scenario, "scenario");
    rssdgeo::g0_bound(beta_max);
    scenario->doc.scenario.beta_max = beta_max;
    return RG_OK;
  });
}

uint64_t rg_scenario_hash(const rg_scenario* scenario) {
  return scenario ? rssdgeo::scenario_hash(scenario->doc) : 0;
}

rg_status rg_evaluate(const rg_scenario* scenario, const double* angles, size_t n, double* lb_rmse,
                      double* det_t) {
  return guarded([&] {
    require(scenario, "scenario");
    require(angles, "angles");
    const rssdgeo::Scenario& s = scenario->doc.scenario;
    if (n != s.size()) throw rssdgeo::InvalidArgument("evaluate: angle count does not match scenario");
    const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(angles, static_cast<Eigen::Index>(n));
    const rssdgeo::FimSummary f = rssdgeo::fim_full(s, rssdgeo::Placement::from_angles(a),
                                                    {scenario->doc.p0, s.source_xy()});
    if (lb_rmse) *lb_rmse = f.lb_rmse;
    if (det_t) *det_t = f.t.determinant();
    return RG_OK;
  });
}

rg_status rg_optimize(const rg_scenario* scenario, const rg_options* options, rg_result** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    const rssdgeo::Scenario& s = scenario->doc.scenario;
    *out = new rg_result{rssdgeo::optimize(s, {scenario->doc.p0, s.source_xy()}, to_options(options))};
    return RG_OK;
  });
}

void rg_result_free(rg_result* result) { delete result; }
int rg_result_converged(const rg_result* r) { return r && r->result.converged ? 1 : 0; }
int rg_result_iterations(const rg_result* r) { return r ? r->result.iterations : 0; }
double rg_result_mean_inner(const rg_result* r) { return r ? r->result.mean_inner : 0.0; }
double rg_result_lb_rmse(const rg_result* r) {
  return r ? r->result.lb_rmse : std::numeric_limits<double>::quiet_NaN();
}
double rg_result_lb_rmse_uniform(const rg_result* r) {
  return r ? r->result.lb_rmse_uniform : std::numeric_limits<double>::quiet_NaN();
}
double rg_result_det_t(const rg_result* r) { return r ? r->result.det_t : std::numeric_limits<double>::quiet_NaN(); }

size_t rg_result_angles(const rg_result* r, double* angles, size_t n) {
  if (!r) return 0;
  const Eigen::VectorXd& a = r->result.placement.angles();
  const auto total = static_cast<size_t>(a.size());
  for (size_t i = 0; angles && i < n && i < total; ++i) angles[i] = a(static_cast<Eigen::Index>(i));
  return total;
}

size_t rg_result_trace_length(const rg_result* r) { return r ? r->result.trace.size() : 0; }

double rg_result_trace_lb_rmse(const rg_result* r, size_t i) {
  if (!r || i >= r->result.trace.size()) return std::numeric_limits<double>::quiet_NaN();
  return r->result.trace[i].lb_rmse;
}

rg_status rg_optimal_distance(double r_min, double r_max, double h_min, double h_max, double* r, double* h) {
  return guarded([&] {
    const auto [rs, hs] = rssdgeo::optimal_distance({r_min, r_max}, {h_min, h_max});
    if (r) *r = rs;
    if (h) *h = hs;
    return RG_OK;
  });
}

rg_status rg_run_optimize(const rg_scenario* scenario, const rg_options* options, const rg_run_config* config,
                          rg_table** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    return emit_table(rssdgeo::run_optimize(scenario->doc, to_options(options), to_config(config)), out);
  });
}

rg_status rg_run_convergence(const rg_scenario* scenario, const double* beta_max, size_t n_beta,
                             const rg_options* options, const rg_run_config* config, rg_table** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(beta_max, "beta_max");
    require(out, "out");
    const std::vector<double> betas(beta_max, beta_max + n_beta);
    for (double b : betas) rssdgeo::g0_bound(b);
    return emit_table(rssdgeo::run_convergence(scenario->doc, betas, to_options(options), to_config(config)),
                      out);
  });
}

rg_status rg_run_sweep_n(const rg_scenario* scenario, const int* n_list, size_t n_n, const double* beta_max,
                         size_t n_beta, const rg_options* options, const rg_run_config* config, rg_table** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(n_list, "n_list");
    require(beta_max, "beta_max");
    require(out, "out");
    const std::vector<int> ns(n_list, n_list + n_n);
    const std::vector<double> betas(beta_max, beta_max + n_beta);
    for (double b : betas) rssdgeo::g0_bound(b);
    return emit_table(rssdgeo::run_sweep_n(scenario->doc, ns, betas, to_options(options), to_config(config)),
                      out);
  });
}

rg_status rg_run_sweep_angle(const rg_scenario* scenario, const double* beta_max, size_t n_beta,
                             const rg_options* options, const rg_run_config* config, rg_table** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(beta_max, "beta_max");
    require(out, "out");
    const std::vector<double> betas(beta_max, beta_max + n_beta);
    for (double b : betas) rssdgeo::g0_bound(b);
    return emit_table(rssdgeo::run_sweep_angle(scenario->doc, betas, to_options(options), to_config(config)),
                      out);
  });
}

rg_status rg_run_practical(const rg_scenario* scenario, const rg_options* options, const rg_run_config* config,
                           rg_table** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    rssdgeo::PracticalConfig pc;
    if (config) {
      pc.prior_std = config->prior_std;
      pc.trials = config->trials;
      pc.run_mle = config->run_mle != 0;
    }
    return emit_table(rssdgeo::run_practical(scenario->doc, pc, to_options(options), to_config(config)), out);
  });
}

void rg_table_free(rg_table* table) { delete table; }
size_t rg_table_rows(const rg_table* table) { return table ? table->table.rows.size() : 0; }
int rg_table_any_nonconverged(const rg_table* table) { return table && table->table.any_nonconverged ? 1 : 0; }

rg_status rg_table_write_csv(const rg_table* table, const char* path) {
  return guarded([&] {
    require(table, "table");
    if (!path || std::strcmp(path, "-") == 0) {
      table->table.write_csv(std::cout);
      std::cout.flush();
      return RG_OK;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) return fail(RG_ERR_IO, std::string("cannot open '") + path + "' for writing");
    table->table.write_csv(out);
    out.close();
    if (!out) return fail(RG_ERR_IO, std::string("write to '") + path + "' failed");
    return RG_OK;
  });
}

rg_status rg_table_csv(const rg_table* table, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(table, "table");
    return copy_text(table->table.to_csv(), buf, cap, needed);
  });
}

rg_status rg_validate_report(const rg_scenario* scenario, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(scenario, "scenario");
    return copy_text(rssdgeo::format_report(rssdgeo::validate_scenario(scenario->doc)), buf, cap, needed);
  });
}

}  // extern "C"
