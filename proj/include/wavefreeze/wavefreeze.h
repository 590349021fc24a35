#ifndef WAVEFREEZE_H
#define WAVEFREEZE_H

#include <stddef.h>

#if defined(_WIN32)
#define WF_API __declspec(dllexport)
#else
#define WF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure wf_last_error() holds the
   message for the calling thread until its next API call. Output pointers
   are written only on success. */
typedef enum wf_status {
  WF_OK = 0,
  WF_E_PRECONDITION = 1,
  WF_E_DOMAIN = 2,
  WF_E_NUMERIC = 3,
  WF_E_NO_SOLUTION = 4,
  WF_E_DEGENERATE = 5,
  WF_E_CONFIG = 6,
  WF_E_IO = 7,
  WF_E_INTERNAL = 8
} wf_status;

WF_API const char* wf_version(void);
WF_API const char* wf_status_string(wf_status status);
WF_API const char* wf_last_error(void);
/* Command-line exit code for a status: 0, 2 (config), 3 (numeric) or 4 (no solution). */
WF_API int wf_exit_code(wf_status status);

/* ---- reaction ---- */

typedef struct wf_reaction wf_reaction;

typedef struct wf_reaction_info {
  double alpha_root;
  double f_prime_0;
  double f_prime_1;
  double mass_integral;
  double sup_norm;
  int bistable; /* 1 when every bistability check passes */
} wf_reaction_info;

WF_API wf_status wf_reaction_nagumo(double alpha, wf_reaction** out);
/* f and f' sampled at n >= 2 equally spaced points of [0,1]. */
WF_API wf_status wf_reaction_tabulated(const double* f, const double* f_prime, size_t n, wf_reaction** out);
WF_API void wf_reaction_free(wf_reaction* reaction);
WF_API wf_status wf_reaction_eval(const wf_reaction* reaction, double u, double* f, double* f_prime);
WF_API wf_status wf_reaction_get_info(const wf_reaction* reaction, wf_reaction_info* out);

/* ---- phase plane ---- */

/* Speed of the front connecting 0 to 1, by bisection to width tol. */
WF_API wf_status wf_heteroclinic_speed(const wf_reaction* reaction, double tol, double* c);

typedef struct wf_profile wf_profile;

typedef struct wf_profile_info {
  double a;
  double b;
  double lambda_r;
  double theta;
  double upsilon;
  double grad_l2_sq;
  double slope_residual;
  double identity_residual;
  int resolution_limited;
} wf_profile_info;

/* Stationary profile of the nonlocal problem on an interval of length r, with profile(0) = 1/2. */
WF_API wf_status wf_stationary_solve(const wf_reaction* reaction, double r, double tol, wf_profile** out);
WF_API void wf_profile_free(wf_profile* profile);
WF_API wf_status wf_profile_get_info(const wf_profile* profile, wf_profile_info* out);
WF_API wf_status wf_profile_eval(const wf_profile* profile, double x, double* value, double* slope);

/* ---- evolution ---- */

typedef enum wf_functional {
  WF_FUNCTIONAL_QUOTIENT = 0,
  WF_FUNCTIONAL_POTENTIAL = 1,
  WF_FUNCTIONAL_INTEGRAL_MASS = 2
} wf_functional;

typedef enum wf_initial_kind {
  WF_INITIAL_LINEAR_RAMP = 0,
  WF_INITIAL_SINE_MIX = 1,
  WF_INITIAL_STEP = 2
} wf_initial_kind;

typedef struct wf_evolve_params {
  double half_width; /* interval [-J, J] */
  int cells;         /* M >= 8 */
  wf_initial_kind initial;
  double step_lo;
  double step_hi;
  wf_functional functional;
  double final_time;
  double atol;
  double rtol;
} wf_evolve_params;

/* J = 40, M = 800, linear ramp, quotient functional, T = 150, tolerances 1e-8. */
WF_API wf_evolve_params wf_evolve_defaults(void);

typedef struct wf_evolution wf_evolution;

WF_API wf_status wf_evolve(const wf_reaction* reaction, const wf_evolve_params* params, wf_evolution** out);
WF_API void wf_evolution_free(wf_evolution* evolution);
WF_API wf_status wf_evolution_final(const wf_evolution* evolution, double* lambda, double* gamma, double* t);
WF_API size_t wf_evolution_nodes(const wf_evolution* evolution);
/* Copies min(n, nodes) node values. */
WF_API wf_status wf_evolution_state(const wf_evolution* evolution, double* v, size_t n);
WF_API size_t wf_evolution_history_length(const wf_evolution* evolution);
WF_API wf_status wf_evolution_history(const wf_evolution* evolution, double* t, double* lambda, size_t n);

/* ---- spectrum ---- */

typedef enum wf_operator_kind { WF_OPERATOR_LOCAL = 0, WF_OPERATOR_NONLOCAL = 1 } wf_operator_kind;

typedef struct wf_spectrum wf_spectrum;

/* Eigenvalues of the operator linearized at the profile on a grid of spacing dx.
   discrete_basis != 0 linearizes around the equilibrium of the discrete system. */
WF_API wf_status wf_spectrum_compute(const wf_reaction* reaction, const wf_profile* profile, double dx,
                                     wf_operator_kind kind, int discrete_basis, wf_spectrum** out);
WF_API void wf_spectrum_free(wf_spectrum* spectrum);
WF_API size_t wf_spectrum_size(const wf_spectrum* spectrum);
/* Sorted by descending real part; copies min(n, size) values. */
WF_API wf_status wf_spectrum_eigenvalues(const wf_spectrum* spectrum, double* re, double* im, size_t n);
WF_API wf_status wf_spectrum_rightmost(const wf_spectrum* spectrum, double* re, double* im, int* is_real);
/* All three stability checks; passed = 1 when they hold. */
WF_API wf_status wf_spectrum_check(const wf_spectrum* spectrum, double rho0, double phi, int* passed);

/* Eigenvalues of a dense row-major n x n matrix (unsorted). */
WF_API wf_status wf_dense_eigenvalues(const double* matrix, size_t n, double* re, double* im);

/* ---- configuration and commands ---- */

typedef struct wf_config wf_config;

WF_API wf_status wf_config_new(wf_config** out);
WF_API void wf_config_free(wf_config* config);
WF_API wf_status wf_config_preset(wf_config* config, const char* name);
WF_API wf_status wf_config_load(wf_config* config, const char* path);
WF_API wf_status wf_config_set(wf_config* config, const char* key, const char* value);
/* "key=value" */
WF_API wf_status wf_config_override(wf_config* config, const char* assignment);
/* Copies the value with a terminating NUL when it fits; *needed receives strlen + 1. */
WF_API wf_status wf_config_get(const wf_config* config, const char* key, char* buffer, size_t size, size_t* needed);

typedef struct wf_run_result wf_run_result;

/* Runs evolve, stationary, speed, spectrum, validate or sweep and writes the
   artifacts into out_dir. Returns WF_OK whenever the command ran; its own
   success is reported by wf_run_exit_code. */
WF_API wf_status wf_run(const char* command, const wf_config* config, const char* out_dir, wf_run_result** out);
WF_API void wf_run_result_free(wf_run_result* result);
WF_API int wf_run_exit_code(const wf_run_result* result);
WF_API const char* wf_run_message(const wf_run_result* result);
WF_API const char* wf_run_summary_json(const wf_run_result* result);

#ifdef __cplusplus
}
#endif

#endif
