/* jumpwass: jump-diffusion simulation and Wasserstein-bound verification.
 *
 * C interface of the shared library. All entry points return jw_status;
 * results travel through opaque handles or out-parameters. On any error
 * jw_last_error() returns a thread-local message describing what failed.
 */
#ifndef JUMPWASS_JUMPWASS_H
#define JUMPWASS_JUMPWASS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jw_status {
    JW_OK = 0,
    JW_ERR_INVALID_ARGUMENT = 1,
    JW_ERR_PARSE = 2,
    JW_ERR_NUMERIC = 3,
    JW_ERR_IO = 4,
    JW_ERR_UNSUPPORTED = 5,
    JW_ERR_INTERNAL = 6
} jw_status;

typedef struct jw_scenario jw_scenario;   /* parsed scenario file */
typedef struct jw_report jw_report;       /* verification / distance report */
typedef struct jw_constants jw_constants; /* flow-moment constant set */

const char* jw_version(void);
const char* jw_last_error(void);

/* ---- scenarios ---- */
jw_status jw_scenario_parse(const char* json_text, jw_scenario** out);
jw_status jw_scenario_load(const char* path, jw_scenario** out);
void jw_scenario_free(jw_scenario* s);
/* serialized canonical form; free with jw_string_free */
jw_status jw_scenario_to_json(const jw_scenario* s, char** out);
jw_status jw_scenario_set_seed(jw_scenario* s, uint64_t seed);
jw_status jw_scenario_set_paths(jw_scenario* s, int n_paths);
jw_status jw_scenario_set_steps(jw_scenario* s, int n_steps);

/* ---- pipeline runs ---- */
jw_status jw_run_verify(const jw_scenario* s, int threads, jw_report** out);
jw_status jw_run_distances(const jw_scenario* s, int threads, jw_report** out);
jw_status jw_run_constants(const jw_scenario* s, int threads, jw_constants** out);
/* one verify run per value of the dotted scenario parameter; CSV to path */
jw_status jw_run_sweep_csv(const jw_scenario* s, const char* parameter, const double* values,
                           size_t n_values, int threads, const char* csv_out_path);

/* ---- reports ---- */
void jw_report_free(jw_report* r);
jw_status jw_report_to_json(const jw_report* r, char** out);
jw_status jw_report_to_csv(const jw_report* r, char** out); /* header + one row */
/* 1 if every verdict passed or was inconclusive; 0 on a verified violation */
jw_status jw_report_all_ok(const jw_report* r, int* out);
/* numeric report fields: "w1", "dw3_lower", "theta_u", "theta_sigma",
 * "theta_nu", "rhs_smooth_w3", "rhs_wasserstein_f", "rhs_wasserstein_aggregate",
 * "characteristic_bound_aggregate", "aborted" */
jw_status jw_report_get(const jw_report* r, const char* field, double* out);
/* write <dir>/<scenario>_report.json / .csv and terminal samples */
jw_status jw_report_write(const jw_report* r, const char* dir, const char* format);
/* terminal samples in the versioned binary layout (distances reports only) */
jw_status jw_report_write_samples_binary(const jw_report* r, const char* path);

void jw_constants_free(jw_constants* c);
jw_status jw_constants_to_json(const jw_constants* c, char** out);

void jw_string_free(char* s);

/* ---- direct numeric entry points (bound formulas and distances) ---- */
jw_status jw_frullani_tv(double alpha, double beta, double* out);
jw_status jw_cardan_minimize(double d0, double d1, double d2, double d3, double* alpha_star,
                             double* min_value, double* bound);
/* F(theta_u, theta_sigma, theta_nu) with constants A1,A2,B1,B2,B3 supplied
 * and C1..C3 computed internally */
jw_status jw_f_evaluate(double theta_u, double theta_sigma, double theta_nu, double a1, double a2,
                        double b1, double b2, double b3, double* out);
/* Fortet-Mourier distance between discrete measures given as parallel
 * location/weight arrays */
jw_status jw_fm_discrete(const double* loc_a, const double* w_a, size_t n_a, const double* loc_b,
                         const double* w_b, size_t n_b, double* out);
jw_status jw_w1_samples(const double* a, size_t n_a, const double* b, size_t n_b, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* JUMPWASS_JUMPWASS_H */
