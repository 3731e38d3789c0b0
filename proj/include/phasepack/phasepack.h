#ifndef PHASEPACK_PHASEPACK_H
#define PHASEPACK_PHASEPACK_H

/*
 * C interface to the PhasePack library.
 *
 * Complex vectors and matrices are passed as interleaved doubles
 * (re0, im0, re1, im1, ...); matrices are row-major. Every fallible call
 * returns a pp_status; on failure pp_last_error() describes the problem
 * for the calling thread. Handles are opaque and released with the
 * matching *_free function, which accepts NULL.
 *
 * Text outputs use (buf, cap, needed): at most cap bytes including the
 * terminating NUL are written, and *needed (if non-NULL) receives the
 * full length plus one.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(PHASEPACK_BUILDING)
#define PP_API __attribute__((visibility("default")))
#else
#define PP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pp_status {
    PP_OK = 0,
    PP_ERR_INVALID_ARGUMENT = 1,
    PP_ERR_DIMENSION = 2,
    PP_ERR_UNKNOWN_KEY = 3,
    PP_ERR_INVALID_VALUE = 4,
    PP_ERR_UNKNOWN_NAME = 5,
    PP_ERR_CONFIGURATION = 6,
    PP_ERR_CAPABILITY = 7,
    PP_ERR_PARSE = 8,
    PP_ERR_INTEGRITY = 9,
    PP_ERR_IO = 10,
    PP_ERR_DEGENERATE = 11,
    PP_ERR_MISSING_TRUTH = 12,
    PP_ERR_ZERO_OPERATOR = 13,
    PP_ERR_INTERNAL = 99
} pp_status;

PP_API const char* pp_version(void);
PP_API const char* pp_status_name(pp_status status);
/* Message of the most recent failure on this thread ("" if none). */
PP_API const char* pp_last_error(void);

/* ---- operators ---- */

typedef struct pp_operator pp_operator;

/* Returns 0 on success. `in` and `out` are interleaved complex arrays. */
typedef int (*pp_apply_fn)(void* user, const double* in, double* out);

PP_API pp_status pp_operator_dense(const double* entries, size_t m, size_t n, pp_operator** out);
/* masks: num_masks blocks of height*width complex entries. */
PP_API pp_status pp_operator_masked_fourier(size_t height, size_t width, size_t num_masks, const double* masks,
                                            pp_operator** out);
/* n = 0 leaves the signal length unspecified; adjoint may be NULL. Solving
 * with such an operator fails until both are supplied. */
PP_API pp_status pp_operator_callbacks(size_t m, size_t n, pp_apply_fn forward, pp_apply_fn adjoint, void* user,
                                       pp_operator** out);
PP_API void pp_operator_free(pp_operator* op);

PP_API size_t pp_operator_rows(const pp_operator* op);
PP_API size_t pp_operator_cols(const pp_operator* op);
PP_API pp_status pp_operator_forward(const pp_operator* op, const double* x, double* y);
PP_API pp_status pp_operator_adjoint(const pp_operator* op, const double* y, double* x);
PP_API pp_status pp_operator_adjoint_test(const pp_operator* op, int trials, uint64_t seed, double* worst);

/* ---- problems ---- */

typedef struct pp_problem pp_problem;

PP_API pp_status pp_problem_gaussian(size_t n, size_t m, int is_complex, uint64_t seed, pp_problem** out);
/* pixels: height*width row-major reals; NULL selects a 16x16 checkerboard. */
PP_API pp_status pp_problem_image(const double* pixels, size_t height, size_t width, size_t num_masks, uint64_t seed,
                                  pp_problem** out);
PP_API pp_status pp_problem_image_file(const char* pgm_path, size_t num_masks, uint64_t seed, pp_problem** out);
/* xt may be NULL. The operator is shared, not copied. */
PP_API pp_status pp_problem_create(const pp_operator* op, const double* b0, const double* xt, pp_problem** out);
PP_API pp_status pp_problem_load_bundle(const char* path, pp_problem** out);
PP_API pp_status pp_problem_save_bundle(const pp_problem* problem, const char* path);
PP_API void pp_problem_free(pp_problem* problem);

/* Replaces b0 by max(b0 + w, 0) with 20 log10(|b0| / |w|) = snr_db. */
PP_API pp_status pp_problem_add_noise(pp_problem* problem, double snr_db, uint64_t seed);

PP_API size_t pp_problem_m(const pp_problem* problem);
PP_API size_t pp_problem_n(const pp_problem* problem);
PP_API int pp_problem_has_truth(const pp_problem* problem);
PP_API pp_status pp_problem_measurements(const pp_problem* problem, double* b0);
PP_API pp_status pp_problem_truth(const pp_problem* problem, double* xt);
/* New handle to the problem's operator. */
PP_API pp_status pp_problem_operator(const pp_problem* problem, pp_operator** out);

/* ---- options ---- */

typedef struct pp_options pp_options;

PP_API pp_status pp_options_create(pp_options** out);
PP_API void pp_options_free(pp_options* opts);
/* Keys and value syntax follow the option registry below. */
PP_API pp_status pp_options_set(pp_options* opts, const char* key, const char* value);
/* Ground truth for reconstruction-error stopping; NULL clears it. */
PP_API pp_status pp_options_set_truth(pp_options* opts, const double* xt, size_t n);
/* Value of `key` after resolving defaults (global, then per-algorithm). */
PP_API pp_status pp_options_get(const pp_options* opts, const char* key, char* buf, size_t cap, size_t* needed);

PP_API size_t pp_option_count(void);
PP_API const char* pp_option_name(size_t index);
PP_API const char* pp_option_default(size_t index);
PP_API const char* pp_option_description(size_t index);
PP_API size_t pp_algorithm_count(void);
PP_API const char* pp_algorithm_name(size_t index);
PP_API size_t pp_init_method_count(void);
PP_API const char* pp_init_method_name(size_t index);

/* ---- solving ---- */

typedef struct pp_solution pp_solution;

typedef enum pp_series {
    PP_SERIES_RESIDUALS = 0,
    PP_SERIES_MEASUREMENT_ERRORS = 1,
    PP_SERIES_RECON_ERRORS = 2,
    PP_SERIES_TIMES = 3
} pp_series;

PP_API pp_status pp_solve(const pp_problem* problem, const pp_options* opts, uint64_t seed, pp_solution** out);
/* n = 0 infers the signal length from the operator. */
PP_API pp_status pp_solve_operator(const pp_operator* op, const double* b0, size_t m, size_t n, const pp_options* opts,
                                   uint64_t seed, pp_solution** out);
PP_API void pp_solution_free(pp_solution* sol);

PP_API size_t pp_solution_n(const pp_solution* sol);
PP_API pp_status pp_solution_x(const pp_solution* sol, double* x);
PP_API int pp_solution_iterations(const pp_solution* sol);
PP_API double pp_solution_total_time(const pp_solution* sol);
/* "tolReached", "maxIters", "maxTime" or "stagnation". */
PP_API const char* pp_solution_termination(const pp_solution* sol);
/* Length of the series; copies it to out when out is non-NULL. */
PP_API size_t pp_solution_series(const pp_solution* sol, pp_series which, double* out);
PP_API size_t pp_solution_warning_count(const pp_solution* sol);
PP_API const char* pp_solution_warning(const pp_solution* sol, size_t index);
/* Fully resolved option value used by the solve. */
PP_API pp_status pp_solution_option(const pp_solution* sol, const char* key, char* buf, size_t cap, size_t* needed);

/* ---- metrics ---- */

PP_API pp_status pp_recon_error(const double* x, const double* xt, size_t n, double* out);
PP_API pp_status pp_correlation(const double* x, const double* xt, size_t n, double* out);
PP_API pp_status pp_measurement_error(const pp_operator* op, const double* x, const double* b, double* out);
PP_API pp_status pp_aggregate(const double* values, size_t count, const char* policy, double success_constant,
                              int higher_is_better, double* out);

/* ---- benchmark ---- */

typedef struct pp_benchmark pp_benchmark;
typedef struct pp_benchmark_result pp_benchmark_result;

PP_API pp_status pp_benchmark_create(const char* xitem, const char* yitem, const char* dataset, pp_benchmark** out);
PP_API void pp_benchmark_free(pp_benchmark* bench);
PP_API pp_status pp_benchmark_set_xvals(pp_benchmark* bench, const double* xvals, size_t count);
PP_API pp_status pp_benchmark_set_param(pp_benchmark* bench, const char* key, const char* value);
/* label may be NULL (the algorithm name is used). */
PP_API pp_status pp_benchmark_add_algorithm(pp_benchmark* bench, const char* label, size_t* index);
PP_API pp_status pp_benchmark_algorithm_set(pp_benchmark* bench, size_t index, const char* key, const char* value);
/* Checks the configuration without running it. */
PP_API pp_status pp_benchmark_validate(const pp_benchmark* bench);
PP_API pp_status pp_benchmark_run(const pp_benchmark* bench, uint64_t seed, pp_benchmark_result** out);

PP_API size_t pp_benchmark_param_count(void);
PP_API const char* pp_benchmark_param_name(size_t index);
PP_API const char* pp_benchmark_param_default(size_t index);
PP_API const char* pp_benchmark_param_description(size_t index);
PP_API const char* pp_benchmark_support_table(void);

PP_API void pp_benchmark_result_free(pp_benchmark_result* result);
PP_API size_t pp_benchmark_result_rows(const pp_benchmark_result* result);
PP_API size_t pp_benchmark_result_curve_count(const pp_benchmark_result* result);
PP_API const char* pp_benchmark_result_curve_label(const pp_benchmark_result* result, size_t index);
/* Copies the aggregated curve (one value per x value) to yvals. */
PP_API pp_status pp_benchmark_result_curve(const pp_benchmark_result* result, size_t index, double* yvals);
PP_API pp_status pp_benchmark_result_csv(const pp_benchmark_result* result, char* buf, size_t cap, size_t* needed);
/* Writes results.csv, plot.svg and, when requested, signals.csv. */
PP_API pp_status pp_benchmark_result_write(const pp_benchmark_result* result, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
