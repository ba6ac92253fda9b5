#ifndef DSIG_H
#define DSIG_H

/* C interface to the dsig library. Every fallible call returns a
 * dsig_status; on failure dsig_last_error() describes the most recent
 * error of the calling thread. Handles are opaque and released with the
 * matching *_free function, which accepts NULL. */

#include <stddef.h>

#if defined(_WIN32)
#define DSIG_API __declspec(dllexport)
#else
#define DSIG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsig_status {
    DSIG_OK = 0,
    DSIG_INVALID_ARGUMENT,
    DSIG_INVALID_PARAMS,
    DSIG_NO_REAL_ROOT_TAIL,
    DSIG_UNSUPPORTED_ORDER,
    DSIG_TAIL_NOT_CONVERGED,
    DSIG_SHAPE_MISMATCH,
    DSIG_BLOW_UP,
    DSIG_INVALID_QUERY,
    DSIG_DEGENERATE_DENOMINATOR,
    DSIG_INSUFFICIENT_SAMPLES,
    DSIG_NONPOSITIVE_VALUE,
    DSIG_MISSING_CHANNEL,
    DSIG_CONFIG,
    DSIG_IO,
    DSIG_INTERNAL
} dsig_status;

typedef enum dsig_multiplier_kind { DSIG_K0 = 0, DSIG_K1, DSIG_DT_K0, DSIG_DT_K1 } dsig_multiplier_kind;

typedef enum dsig_regime { DSIG_REAL_DISTINCT = 0, DSIG_COMPLEX_PAIR, DSIG_DEGENERATE } dsig_regime;

typedef struct dsig_params {
    double sigma;
    double sigma1;
    double sigma2;
    double mu1;
    double mu2;
    int n;
} dsig_params;

typedef struct dsig_roots {
    double re_lambda1, im_lambda1;
    double re_lambda2, im_lambda2;
    dsig_regime regime;
} dsig_roots;

typedef struct dsig_config dsig_config;
typedef struct dsig_text dsig_text;
typedef struct dsig_report dsig_report;

DSIG_API const char* dsig_version(void);
DSIG_API const char* dsig_last_error(void);
DSIG_API const char* dsig_status_name(dsig_status s);

/* Reference parameters σ = 2, σ1 = 0.5, σ2 = 1.5, μ1 = μ2 = 1. */
DSIG_API dsig_params dsig_params_reference(int n);

DSIG_API dsig_status dsig_characteristic_roots(const dsig_params* p, double rho, dsig_roots* out);
DSIG_API dsig_status dsig_multiplier(const dsig_params* p, dsig_multiplier_kind kind, double rho, double t,
                                     double* re, double* im);
DSIG_API dsig_status dsig_epsilon_star(const dsig_params* p, double* out);
DSIG_API dsig_status dsig_bessel_j(double mu, double x, double* out);

/* ---- configuration ---- */

DSIG_API dsig_status dsig_config_load(const char* path, dsig_config** out);
DSIG_API dsig_status dsig_config_parse(const char* text, dsig_config** out);
/* Overrides one key; unknown keys fail with DSIG_CONFIG. */
DSIG_API dsig_status dsig_config_set(dsig_config* cfg, const char* key, const char* value);
DSIG_API void dsig_config_free(dsig_config* cfg);

/* ---- owned text buffers ---- */

DSIG_API const char* dsig_text_data(const dsig_text* t);
DSIG_API size_t dsig_text_size(const dsig_text* t);
DSIG_API void dsig_text_free(dsig_text* t);

/* ---- single runs; outputs are CSV or JSON text ---- */

DSIG_API dsig_status dsig_run_roots(const dsig_config* cfg, dsig_text** csv);
DSIG_API dsig_status dsig_run_kernel(const dsig_config* cfg, dsig_text** profile_csv, dsig_text** norms_json);
/* semilinear = 0 runs the linear problem. *blowup receives the flag. */
DSIG_API dsig_status dsig_run_simulation(const dsig_config* cfg, int semilinear, dsig_text** csv,
                                         dsig_text** summary_json, int* blowup);
DSIG_API dsig_status dsig_run_rates(const dsig_config* cfg, dsig_text** json);

/* ---- batch verification ---- */

/* Runs every *.cfg in the given files or directories. Per-experiment
 * failures are recorded in the report, not returned. */
DSIG_API dsig_status dsig_verify(const char* const* paths, size_t count, dsig_report** out);
DSIG_API size_t dsig_report_size(const dsig_report* r);
DSIG_API int dsig_report_all_passed(const dsig_report* r);
/* Entry accessors return NULL when i is out of range. Status is one of
 * "pass", "fail", "infeasible", "error". */
DSIG_API const char* dsig_report_entry_name(const dsig_report* r, size_t i);
DSIG_API const char* dsig_report_entry_status(const dsig_report* r, size_t i);
DSIG_API const char* dsig_report_entry_message(const dsig_report* r, size_t i);
DSIG_API dsig_status dsig_report_json(const dsig_report* r, dsig_text** json);
DSIG_API dsig_status dsig_report_write(const dsig_report* r, const char* dir);
DSIG_API void dsig_report_free(dsig_report* r);

/* Worker cap in effect (DSIG_MAX_WORKERS or hardware concurrency). */
DSIG_API int dsig_max_workers(void);

#ifdef __cplusplus
}
#endif

#endif
