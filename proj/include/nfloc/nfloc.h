/* nfloc: near-field magnetic-induction pose estimation.
 *
 * All functions return NFLOC_OK or an error status. On error, a message
 * describing the failure is available from nfloc_last_error_message() on
 * the calling thread until the next call into the library.
 */
#ifndef NFLOC_NFLOC_H
#define NFLOC_NFLOC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NFLOC_BUILDING_LIBRARY)
#    define NFLOC_API __declspec(dllexport)
#  else
#    define NFLOC_API __declspec(dllimport)
#  endif
#else
#  define NFLOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nfloc_status {
  NFLOC_OK = 0,
  NFLOC_ERR_INVALID_PARAMETER = 1,
  NFLOC_ERR_INVALID_ARGUMENT = 2,
  NFLOC_ERR_SINGULAR_GEOMETRY = 3,
  NFLOC_ERR_UNBOUNDED_POSE = 4,
  NFLOC_ERR_RANK_DEFICIENT = 5,
  NFLOC_ERR_DEGENERATE_RHS = 6,
  NFLOC_ERR_DIMENSION_MISMATCH = 7,
  NFLOC_ERR_NUMERICAL_FAILURE = 8,
  NFLOC_ERR_CONFIG = 9,
  NFLOC_ERR_IO = 10,
  NFLOC_ERR_NULL_POINTER = 11,
  NFLOC_ERR_INTERNAL = 12
} nfloc_status;

typedef enum nfloc_algorithm {
  NFLOC_ALG_ML5D = 0,
  NFLOC_ALG_ML3D = 1,
  NFLOC_ALG_WLS = 2,
  NFLOC_ALG_CASCADE = 3,
  NFLOC_ALG_BASELINE = 4
} nfloc_algorithm;

typedef enum nfloc_termination {
  NFLOC_TERM_STEP_TOLERANCE = 0,
  NFLOC_TERM_GRADIENT_TOLERANCE = 1,
  NFLOC_TERM_MAX_ITERATIONS = 2,
  NFLOC_TERM_NUMERICAL_FAILURE = 3,
  NFLOC_TERM_DIRECT = 4
} nfloc_termination;

typedef enum nfloc_format { NFLOC_FORMAT_CSV = 0, NFLOC_FORMAT_JSON = 1 } nfloc_format;

typedef struct nfloc_params nfloc_params;
typedef struct nfloc_topology nfloc_topology;
typedef struct nfloc_config nfloc_config;

/* Position in metres; phi (azimuth) and theta (polar angle) in radians. */
typedef struct nfloc_pose {
  double position[3];
  double phi;
  double theta;
} nfloc_pose;

typedef struct nfloc_bounds {
  double peb;
  double naive_peb;
  double angle_bound_phi;
  double angle_bound_theta;
  double angle_bound_rms;
  double naive_angle_bound_rms;
  double fim_condition;
} nfloc_bounds;

typedef struct nfloc_solver_options {
  int max_iterations;
  double min_step;
  double initial_damping;
  double damping_increase;
  double damping_decrease;
  double gradient_tolerance;
  double fd_relative_step;
} nfloc_solver_options;

typedef struct nfloc_estimate {
  nfloc_pose pose;
  int has_orientation;
  double residual_cost;
  int iterations;
  int refine_iterations;
  nfloc_termination termination;
} nfloc_estimate;

NFLOC_API const char* nfloc_version(void);
NFLOC_API const char* nfloc_status_string(nfloc_status status);
NFLOC_API const char* nfloc_last_error_message(void);
NFLOC_API void nfloc_solver_options_default(nfloc_solver_options* out);
NFLOC_API void nfloc_string_free(char* s);

/* Physical parameters. Reference values include the tabulated received and
 * noise powers; the closed-form variant derives both from coil data. */
NFLOC_API nfloc_status nfloc_params_reference(nfloc_params** out);
NFLOC_API nfloc_status nfloc_params_reference_closed_form(nfloc_params** out);
NFLOC_API nfloc_status nfloc_params_from_json(const char* json, nfloc_params** out);
NFLOC_API nfloc_status nfloc_params_to_json(const nfloc_params* params, char** json_out);
NFLOC_API nfloc_status nfloc_params_rho(const nfloc_params* params, double* rho_out);
NFLOC_API nfloc_status nfloc_params_sigma2(const nfloc_params* params, double* sigma2_out);
NFLOC_API void nfloc_params_free(nfloc_params* params);

/* Anchor sets. positions and orientations are row-major count x 3;
 * orientations are normalized. */
NFLOC_API nfloc_status nfloc_topology_create(const double* positions, const double* orientations,
                                             size_t count, nfloc_topology** out);
/* Wall-mounted layout in a side_x x side_y x height room. */
NFLOC_API nfloc_status nfloc_topology_generate(size_t count, double side_x, double side_y,
                                               double height, nfloc_topology** out);
NFLOC_API size_t nfloc_topology_size(const nfloc_topology* topology);
NFLOC_API nfloc_status nfloc_topology_anchor(const nfloc_topology* topology, size_t index,
                                             double position[3], double orientation[3]);
NFLOC_API void nfloc_topology_free(nfloc_topology* topology);

/* Noiseless received amplitudes s_n (sqrt(W)) into out[0..size). */
NFLOC_API nfloc_status nfloc_forward_model(const nfloc_pose* pose, const nfloc_topology* topology,
                                           double rho, double* out, size_t out_len);

/* Cramer-Rao bounds; condition_cap <= 0 selects the default (1e12). */
NFLOC_API nfloc_status nfloc_bounds_compute(const nfloc_pose* pose, const nfloc_topology* topology,
                                            double rho, double sigma2, double condition_cap,
                                            nfloc_bounds* out);

/* options may be NULL for defaults. */
NFLOC_API nfloc_status nfloc_estimate_pose(nfloc_algorithm algorithm, const double* measurements,
                                           size_t count, const nfloc_topology* topology, double rho,
                                           double sigma2, const nfloc_pose* init,
                                           const nfloc_solver_options* options,
                                           nfloc_estimate* out);

/* K starts drawn uniformly in [lower, upper] with orientations uniform on
 * the sphere; keeps the lowest-cost run. */
NFLOC_API nfloc_status nfloc_multi_start(nfloc_algorithm algorithm, const double* measurements,
                                         size_t count, const nfloc_topology* topology, double rho,
                                         double sigma2, int starts, const double lower[3],
                                         const double upper[3], uint64_t seed,
                                         const nfloc_solver_options* options, nfloc_estimate* out);

/* q-quantile of the alignment loss 20 log10 |b^T o| (dB) for independent
 * uniform orientations. */
NFLOC_API nfloc_status nfloc_alignment_loss_percentile(double q, uint64_t samples, uint64_t seed,
                                                       double* out_db);

/* Experiment configuration. path NULL loads defaults. */
NFLOC_API nfloc_status nfloc_config_load(const char* path, nfloc_config** out);
NFLOC_API nfloc_status nfloc_config_from_json(const char* json, nfloc_config** out);
NFLOC_API nfloc_status nfloc_config_to_json(const nfloc_config* config, char** json_out);
NFLOC_API nfloc_status nfloc_config_set_seed(nfloc_config* config, uint64_t seed);
NFLOC_API nfloc_status nfloc_config_set_trials(nfloc_config* config, size_t trials);
NFLOC_API nfloc_status nfloc_config_set_threads(nfloc_config* config, unsigned threads);
/* Room side_x, side_y, height in metres. */
NFLOC_API nfloc_status nfloc_config_room(const nfloc_config* config, double dims[3]);
NFLOC_API nfloc_status nfloc_config_topology(const nfloc_config* config, nfloc_topology** out);
NFLOC_API nfloc_status nfloc_config_params(const nfloc_config* config, nfloc_params** out);
NFLOC_API void nfloc_config_free(nfloc_config* config);

/* kind: topology | power-curve | peb-sweep | crlb-cdf | algo-compare.
 * Writes tables, summary.json and metadata.json into out_dir. If
 * summary_json is non-NULL it receives the summary document, to be released
 * with nfloc_string_free. */
NFLOC_API nfloc_status nfloc_experiment_run(const nfloc_config* config, const char* kind,
                                            const char* out_dir, nfloc_format format,
                                            char** summary_json);

#ifdef __cplusplus
}
#endif

#endif
