/* C interface to the capped rotated second-order cone library.
 *
 * Every fallible call returns a caprsoc_status; on failure the message is
 * available from caprsoc_last_error() on the calling thread until the next
 * failing call. Handles are opaque and owned by the caller, who releases them
 * with the matching *_free function (NULL is accepted).
 */
#ifndef CAPRSOC_H
#define CAPRSOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(CAPRSOC_BUILDING_LIBRARY)
#define CAPRSOC_API __attribute__((visibility("default")))
#else
#define CAPRSOC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum caprsoc_status {
  CAPRSOC_OK = 0,
  CAPRSOC_INVALID_ARGUMENT = 1,
  CAPRSOC_DIMENSION_MISMATCH = 2,
  CAPRSOC_UNSUPPORTED = 3,
  CAPRSOC_INTERNAL_INCONSISTENCY = 4,
  CAPRSOC_STEP_FAILURE = 5,
  CAPRSOC_IO = 6,
  CAPRSOC_PARSE = 7,
  CAPRSOC_UNKNOWN = 99
} caprsoc_status;

typedef enum caprsoc_case {
  CAPRSOC_CASE_MEMBER = 0,
  CAPRSOC_CASE_ORIGIN,
  CAPRSOC_CASE_Y_AXIS,
  CAPRSOC_CASE_CAP_INTERIOR,
  CAPRSOC_CASE_CAP_PARABOLA,
  CAPRSOC_CASE_Z_SEGMENT,
  CAPRSOC_CASE_CONE_BOUNDARY_QUARTIC,
  CAPRSOC_CASE_CONE_BOUNDARY_SYMMETRIC
} caprsoc_case;

CAPRSOC_API const char* caprsoc_version(void);
/* snake_case name such as "invalid_argument". */
CAPRSOC_API const char* caprsoc_status_name(caprsoc_status status);
CAPRSOC_API const char* caprsoc_case_name(caprsoc_case c);
CAPRSOC_API const char* caprsoc_last_error(void);

/* ---- projection ------------------------------------------------------- */

/* Projects (x[0..m), y, z) onto the set with cap u. Outputs may alias inputs.
 * case_out and multiplier_out may be NULL. */
CAPRSOC_API caprsoc_status caprsoc_project(double u, size_t m, const double* x, double y, double z, double* x_out,
                                           double* y_out, double* z_out, caprsoc_case* case_out,
                                           double* multiplier_out);

/* count three-dimensional points stored as consecutive (x, y, z) triples.
 * cases may be NULL. The result does not depend on threads. */
CAPRSOC_API caprsoc_status caprsoc_project_batch(double u, size_t count, const double* xyz, double* out,
                                                 caprsoc_case* cases, unsigned threads);

/* Grid-search reference projection with the default oracle settings. */
CAPRSOC_API caprsoc_status caprsoc_oracle_project(double u, size_t m, const double* x, double y, double z,
                                                  double* x_out, double* y_out, double* z_out);

/* Largest (v - p).(w - p) over sampled and structured members w. */
CAPRSOC_API caprsoc_status caprsoc_certificate(double u, size_t m, const double* vx, double vy, double vz,
                                               const double* px, double py, double pz, size_t samples, uint64_t seed,
                                               double* cert_out);

/* n points with coordinates uniform on [-2, 2], as triples in out[0..3n). */
CAPRSOC_API caprsoc_status caprsoc_gen_points(size_t n, uint64_t seed, double* out);

/* Runs the projection benchmark and writes its CSV to csv_path. */
CAPRSOC_API caprsoc_status caprsoc_proj_bench(const size_t* sizes, size_t nsizes, int reps, uint64_t seed,
                                              size_t cert_samples, const char* csv_path);

/* ---- regression problems ---------------------------------------------- */

typedef struct caprsoc_problem caprsoc_problem;

/* A is t x n in column-major order. */
CAPRSOC_API caprsoc_status caprsoc_problem_create(size_t t, size_t n, const double* a, const double* b,
                                                  double gamma1, double gamma2, caprsoc_problem** out);
CAPRSOC_API caprsoc_status caprsoc_problem_synthetic(size_t t, size_t n, size_t sparsity, double noise, uint64_t seed,
                                                     double gamma1, double gamma2, caprsoc_problem** out);
/* Encodes a CSV file with the given column declarations; the response column
 * becomes b. */
CAPRSOC_API caprsoc_status caprsoc_problem_from_csv(const char* path, const char* schema, double gamma1,
                                                    double gamma2, caprsoc_problem** out);
/* q consecutive groups, the remainder going to the last one. */
CAPRSOC_API caprsoc_status caprsoc_problem_set_consecutive_groups(caprsoc_problem* p, size_t q);
CAPRSOC_API caprsoc_status caprsoc_problem_dims(const caprsoc_problem* p, size_t* t, size_t* n, size_t* q);
/* JSON encoding report for CSV-backed problems, "" otherwise. Owned by p. */
CAPRSOC_API const char* caprsoc_problem_encoding_report(const caprsoc_problem* p);
CAPRSOC_API void caprsoc_problem_free(caprsoc_problem* p);

/* ---- solvers ----------------------------------------------------------- */

typedef enum caprsoc_method { CAPRSOC_PG = 0, CAPRSOC_FISTA = 1 } caprsoc_method;
typedef enum caprsoc_step_mode { CAPRSOC_STEP_CONSTANT = 0, CAPRSOC_STEP_BACKTRACKING = 1 } caprsoc_step_mode;
typedef enum caprsoc_stop_mode {
  CAPRSOC_STOP_OBJECTIVE_TARGET = 0,
  CAPRSOC_STOP_FIXED_POINT_RESIDUAL = 1,
  CAPRSOC_STOP_MAX_ITER = 2
} caprsoc_stop_mode;

typedef struct caprsoc_solver_config {
  caprsoc_method method;
  caprsoc_step_mode step_mode;
  double lipschitz; /* <= 0: estimate */
  double s0;        /* <= 0: method default */
  double alpha;
  double beta_pg;
  double beta_fista;
  int max_iter;
  caprsoc_stop_mode stop_mode;
  double target;
  double rel_gap;
  double residual_tol;
  uint64_t seed;
} caprsoc_solver_config;

CAPRSOC_API void caprsoc_solver_config_default(caprsoc_solver_config* cfg);

typedef struct caprsoc_report caprsoc_report;

typedef struct caprsoc_trace_row {
  int k;
  double f;
  double step;
  double residual;
  double time_ms;
} caprsoc_trace_row;

CAPRSOC_API caprsoc_status caprsoc_solve(const caprsoc_problem* p, const caprsoc_solver_config* cfg,
                                         caprsoc_report** out);
CAPRSOC_API double caprsoc_report_objective(const caprsoc_report* r);
CAPRSOC_API double caprsoc_report_residual(const caprsoc_report* r);
CAPRSOC_API double caprsoc_report_lipschitz(const caprsoc_report* r);
CAPRSOC_API double caprsoc_report_time_ms(const caprsoc_report* r);
CAPRSOC_API int caprsoc_report_iterations(const caprsoc_report* r);
CAPRSOC_API const char* caprsoc_report_termination(const caprsoc_report* r);
CAPRSOC_API size_t caprsoc_report_trace_length(const caprsoc_report* r);
CAPRSOC_API caprsoc_status caprsoc_report_trace_row(const caprsoc_report* r, size_t k, caprsoc_trace_row* row);
/* Copies the final x (length n). */
CAPRSOC_API caprsoc_status caprsoc_report_solution(const caprsoc_report* r, double* x, size_t n);
CAPRSOC_API caprsoc_status caprsoc_report_write_trace_csv(const caprsoc_report* r, const char* path);
CAPRSOC_API void caprsoc_report_free(caprsoc_report* r);

#ifdef __cplusplus
}
#endif

#endif /* CAPRSOC_H */
