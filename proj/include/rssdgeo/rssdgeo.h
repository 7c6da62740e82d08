/* C interface to the rssdgeo placement optimizer.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an rg_status; on failure
 * rg_last_error() describes the problem for the calling thread. Angles are in
 * radians unless a name says otherwise.
 */
#ifndef RSSDGEO_H
#define RSSDGEO_H

#include <stddef.h>
#include <stdint.h>

#if defined(RSSDGEO_BUILDING_LIBRARY)
#define RG_API __attribute__((visibility("default")))
#else
#define RG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rg_status {
  RG_OK = 0,
  RG_ERR_INVALID_ARGUMENT = 1,
  RG_ERR_CONFIG = 2,
  RG_ERR_NUMERIC = 3,
  RG_ERR_IO = 4,
  RG_ERR_BUFFER_TOO_SMALL = 5,
  RG_ERR_INTERNAL = 6
} rg_status;

typedef enum rg_stop_rule {
  /* relative primal residual and change of ln|T| below admm_tol */
  RG_STOP_RELATIVE = 0,
  /* max(primal residual, change of G) below admm_tol */
  RG_STOP_RESIDUAL_STEP = 1
} rg_stop_rule;

typedef struct rg_options {
  double rho;
  double admm_tol;
  double mm_tol;
  int max_outer;
  int max_inner;
  int stop_rule;
  int normalize;
} rg_options;

typedef struct rg_run_config {
  uint64_t seed;
  int jobs;
  /* practical mode only */
  double prior_std;
  int trials;
  int run_mle;
} rg_run_config;

typedef struct rg_scenario rg_scenario;
typedef struct rg_result rg_result;
typedef struct rg_table rg_table;

RG_API const char* rg_version(void);
RG_API const char* rg_last_error(void);
/* Field path of the last configuration error, "" when none. */
RG_API const char* rg_last_error_path(void);

RG_API void rg_options_default(rg_options* options);
RG_API void rg_run_config_default(rg_run_config* config);

RG_API rg_status rg_scenario_load(const char* path, rg_scenario** out);
RG_API rg_status rg_scenario_parse(const char* json_text, rg_scenario** out);
RG_API void rg_scenario_free(rg_scenario* scenario);
RG_API size_t rg_scenario_size(const rg_scenario* scenario);
RG_API double rg_scenario_beta_max(const rg_scenario* scenario);
RG_API rg_status rg_scenario_set_beta_max(rg_scenario* scenario, double beta_max);
RG_API uint64_t rg_scenario_hash(const rg_scenario* scenario);

/* LB-RMSE and |T| of a placement around the true source. */
RG_API rg_status rg_evaluate(const rg_scenario* scenario, const double* angles, size_t n,
                             double* lb_rmse, double* det_t);

RG_API rg_status rg_optimize(const rg_scenario* scenario, const rg_options* options, rg_result** out);
RG_API void rg_result_free(rg_result* result);
RG_API int rg_result_converged(const rg_result* result);
RG_API int rg_result_iterations(const rg_result* result);
RG_API double rg_result_mean_inner(const rg_result* result);
RG_API double rg_result_lb_rmse(const rg_result* result);
RG_API double rg_result_lb_rmse_uniform(const rg_result* result);
RG_API double rg_result_det_t(const rg_result* result);
/* Copies min(n, N) angles; returns N. */
RG_API size_t rg_result_angles(const rg_result* result, double* angles, size_t n);
RG_API size_t rg_result_trace_length(const rg_result* result);
/* LB-RMSE at trace entry i (0 is the uniform start); NaN when out of range. */
RG_API double rg_result_trace_lb_rmse(const rg_result* result, size_t i);

RG_API rg_status rg_optimal_distance(double r_min, double r_max, double h_min, double h_max, double* r,
                                     double* h);

RG_API rg_status rg_run_optimize(const rg_scenario* scenario, const rg_options* options,
                                 const rg_run_config* config, rg_table** out);
RG_API rg_status rg_run_convergence(const rg_scenario* scenario, const double* beta_max, size_t n_beta,
                                    const rg_options* options, const rg_run_config* config, rg_table** out);
RG_API rg_status rg_run_sweep_n(const rg_scenario* scenario, const int* n_list, size_t n_n,
                                const double* beta_max, size_t n_beta, const rg_options* options,
                                const rg_run_config* config, rg_table** out);
RG_API rg_status rg_run_sweep_angle(const rg_scenario* scenario, const double* beta_max, size_t n_beta,
                                    const rg_options* options, const rg_run_config* config, rg_table** out);
RG_API rg_status rg_run_practical(const rg_scenario* scenario, const rg_options* options,
                                  const rg_run_config* config, rg_table** out);

RG_API void rg_table_free(rg_table* table);
RG_API size_t rg_table_rows(const rg_table* table);
RG_API int rg_table_any_nonconverged(const rg_table* table);
/* Writes the CSV to `path`, or to stdout when path is NULL or "-". */
RG_API rg_status rg_table_write_csv(const rg_table* table, const char* path);
/* Copies the CSV text including the terminating NUL. *needed receives the
 * required size; RG_ERR_BUFFER_TOO_SMALL when cap is smaller. */
RG_API rg_status rg_table_csv(const rg_table* table, char* buf, size_t cap, size_t* needed);

/* Human-readable derived quantities (weights, mean inverse variance, g0,
 * rank of B). Same buffer protocol as rg_table_csv. */
RG_API rg_status rg_validate_report(const rg_scenario* scenario, char* buf, size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
