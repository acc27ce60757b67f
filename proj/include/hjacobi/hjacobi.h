/*
 * C interface to the hjacobi solver library.
 *
 * Objects are opaque handles created by hj_*_create / hj_*_run functions and
 * released with the matching hj_*_destroy. Every fallible call returns an
 * hj_status; on failure hj_last_error_message() describes the cause for the
 * calling thread until its next failing call.
 *
 * Grid values are interior DOFs only, row-major with x fastest in 2D.
 */
#ifndef HJACOBI_H
#define HJACOBI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HJACOBI_BUILDING_LIBRARY)
#    define HJ_API __declspec(dllexport)
#  else
#    define HJ_API __declspec(dllimport)
#  endif
#else
#  define HJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hj_status {
  HJ_OK = 0,
  HJ_ERR_INVALID_ARGUMENT = 1,
  HJ_ERR_INVALID_PROBLEM = 2,
  HJ_ERR_INVALID_CONFIG = 3,
  HJ_ERR_SINGULAR = 4,
  HJ_ERR_NUMERICAL_FAILURE = 5,
  HJ_ERR_SIZE_LIMIT = 6,
  HJ_ERR_IO = 7,
  HJ_ERR_INTERNAL = 99
} hj_status;

typedef struct hj_problem hj_problem;
typedef struct hj_report hj_report;
typedef struct hj_sweep hj_sweep;

typedef struct hj_stencil5 {
  double west;
  double east;
  double south;
  double north;
  double center;
} hj_stencil5;

typedef struct hj_problem_info {
  int dim;
  size_t nx;
  size_t ny; /* 1 for 1D problems */
  size_t dof_count;
  double dx;
  double dy; /* 0 for 1D problems */
} hj_problem_info;

typedef struct hj_classic_config {
  double tolerance_factor;
  uint64_t max_iterations;
  uint64_t residual_check_interval;
  uint32_t workers;
} hj_classic_config;

typedef struct hj_hier_config {
  uint32_t tpb_x;
  uint32_t tpb_y; /* ignored in 1D */
  uint32_t subiterations;
  uint32_t overlap_x;
  uint32_t overlap_y; /* ignored in 1D */
  double tolerance_factor;
  uint64_t max_cycles;
  uint32_t workers;
} hj_hier_config;

typedef struct hj_resource_figures {
  uint64_t operational_blocks;
  uint64_t operational_threads;
  uint64_t shared_bytes_per_block;
  int warp_aligned;
} hj_resource_figures;

typedef struct hj_report_summary {
  double initial_residual;
  double final_residual;
  uint64_t cycles;
  uint64_t subiterations_per_cycle;
  uint64_t total_updates;
  int converged;
  int has_resources;
  hj_resource_figures resources;
} hj_report_summary;

typedef struct hj_sweep_spec {
  int dim;
  size_t nx;
  size_t ny; /* ignored in 1D */
  uint32_t tpb_x;
  uint32_t tpb_y; /* ignored in 1D */
  const uint32_t* k_list;
  size_t k_count;
  const uint32_t* overlap_list;
  size_t overlap_count;
  double tolerance_factor;
  uint64_t max_cycles;
  uint32_t workers;
} hj_sweep_spec;

typedef struct hj_sweep_record {
  int dim;
  size_t nx;
  size_t ny;
  uint32_t tpb_x;
  uint32_t tpb_y;
  uint32_t k;
  uint32_t overlap;
  uint64_t cycles;
  uint64_t total_subiterations;
  double final_residual;
  int converged;
  uint64_t operational_blocks;
  uint64_t operational_threads;
  uint64_t shared_bytes_per_block;
} hj_sweep_record;

HJ_API const char* hj_status_string(hj_status status);
HJ_API const char* hj_last_error_message(void);

/* Problems */
HJ_API hj_status hj_problem_create_poisson_1d(size_t n_interior, hj_problem** out);
HJ_API hj_status hj_problem_create_poisson_2d(size_t nx, size_t ny, hj_problem** out);
HJ_API hj_status hj_problem_create_1d(size_t n_interior, double dx, const double* sub,
                                      const double* diag, const double* sup, const double* rhs,
                                      hj_problem** out);
HJ_API hj_status hj_problem_create_2d(size_t nx, size_t ny, double dx, double dy,
                                      const hj_stencil5* coeffs, const double* rhs,
                                      hj_problem** out);
HJ_API void hj_problem_destroy(hj_problem* problem);
HJ_API hj_status hj_problem_get_info(const hj_problem* problem, hj_problem_info* out);

HJ_API hj_status hj_residual_norm(const hj_problem* problem, const double* x, size_t len,
                                  double* out);
HJ_API hj_status hj_direct_solve(const hj_problem* problem, double* x_out, size_t len);
HJ_API hj_status hj_spectral_radius(const hj_problem* problem, size_t iterations, double* out);

/* Solvers. A null initial_guess means all ones. */
HJ_API void hj_classic_config_default(hj_classic_config* config);
HJ_API void hj_hier_config_default(hj_hier_config* config);

HJ_API hj_status hj_classic_solve(const hj_problem* problem, const double* initial_guess,
                                  size_t len, const hj_classic_config* config, hj_report** out);
HJ_API hj_status hj_hier_solve(const hj_problem* problem, const double* initial_guess,
                               size_t len, const hj_hier_config* config, hj_report** out);

HJ_API hj_status hj_resource_figures_compute(int dim, size_t nx, size_t ny,
                                             const hj_hier_config* config,
                                             hj_resource_figures* out);

/* Reports */
HJ_API void hj_report_destroy(hj_report* report);
HJ_API hj_status hj_report_get_summary(const hj_report* report, hj_report_summary* out);
HJ_API size_t hj_report_history_length(const hj_report* report);
HJ_API hj_status hj_report_copy_history(const hj_report* report, double* out, size_t len);
HJ_API hj_status hj_report_copy_solution(const hj_report* report, double* out, size_t len);

/* Experiment sweeps over (k, overlap); rows sorted by k then overlap. */
HJ_API hj_status hj_sweep_run(const hj_sweep_spec* spec, hj_sweep** out);
HJ_API void hj_sweep_destroy(hj_sweep* sweep);
HJ_API size_t hj_sweep_size(const hj_sweep* sweep);
HJ_API hj_status hj_sweep_get_record(const hj_sweep* sweep, size_t index, hj_sweep_record* out);
/* Atomic: temp file then rename; no partial file on failure. */
HJ_API hj_status hj_sweep_write_csv(const hj_sweep* sweep, const char* path);

/* Resource table across spec->overlap_list, written atomically as CSV. */
HJ_API hj_status hj_resources_write_csv(const hj_sweep_spec* spec, const char* path);

#ifdef __cplusplus
}
#endif

#endif
