/*
 * C interface to the intrinsic optical bistability library.
 *
 * All frequencies are in units of the decay rate gamma (pass gamma = 1 for
 * the usual normalization). Functions return an iob_status; on failure the
 * message is available from iob_last_error() until the next call on the
 * same thread. Result objects are opaque handles released with the
 * matching *_destroy function.
 */
#ifndef IOB_IOB_H
#define IOB_IOB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(IOB_BUILDING_LIBRARY)
#    define IOB_API __declspec(dllexport)
#  else
#    define IOB_API __declspec(dllimport)
#  endif
#else
#  define IOB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum iob_status {
    IOB_OK = 0,
    IOB_ERR_INVALID_ARGUMENT = 1,
    IOB_ERR_INCONSISTENT_MECHANISM = 2,
    IOB_ERR_NO_PHYSICAL_ROOT = 3,
    IOB_ERR_SINGULAR = 4,
    IOB_ERR_BRANCH_ABSENT = 5,
    IOB_ERR_STEP_UNDERFLOW = 6,
    IOB_ERR_BUFFER_TOO_SMALL = 7,
    IOB_ERR_INTERNAL = 8
} iob_status;

typedef enum iob_mechanism {
    IOB_MECH_LORENTZ = 0,
    IOB_MECH_DETUNING = 1,
    IOB_MECH_JOINT = 2
} iob_mechanism;

typedef enum iob_branch {
    IOB_BRANCH_LOWER = 0,
    IOB_BRANCH_MIDDLE = 1,
    IOB_BRANCH_UPPER = 2
} iob_branch;

typedef struct iob_params {
    double gamma;
    double delta;
    double omega;
    double zeta_lorentz;
    double zeta_detuning;
} iob_params;

typedef struct iob_solution {
    double w;
    double rho22;
    double rho12_re, rho12_im;
    double omega_eff_re, omega_eff_im;
    double delta_eff;
    int branch;   /* iob_branch */
    int stable;
    int marginal;
    double residual;
} iob_solution;

typedef struct iob_spectrum_coefficients {
    double a, a0, b4, b2, b0;
    double nu_p_sq;
    double gamma6;
} iob_spectrum_coefficients;

typedef struct iob_spectrum_info {
    iob_spectrum_coefficients coefficients;
    iob_solution state;
    double elastic_weight;
    double nu_p;       /* satellite offset, valid when has_sidebands */
    int has_sidebands;
    int unstable;
} iob_spectrum_info;

typedef struct iob_bloch_state {
    double u, v, w;
} iob_bloch_state;

typedef struct iob_scan iob_scan;
typedef struct iob_spectrum iob_spectrum;
typedef struct iob_trajectory iob_trajectory;
typedef struct iob_verify_report iob_verify_report;

IOB_API const char* iob_version(void);
IOB_API const char* iob_last_error(void);
IOB_API iob_params iob_default_params(void);

/* core */
IOB_API iob_status iob_validate_params(const iob_params* p, iob_mechanism m);
IOB_API iob_status iob_zeta_total(const iob_params* p, iob_mechanism m, double* out);

/* steady state; cubic coefficients are returned as {c3, c2, c1, c0} */
IOB_API iob_status iob_cubic_coefficients(const iob_params* p, iob_mechanism m,
                                          double out[4]);
/* Physical roots W in (0, 1], ascending; *count receives the number found. */
IOB_API iob_status iob_solve_inversion(const iob_params* p, iob_mechanism m,
                                       double* roots, size_t capacity, size_t* count);
/* Steady states at p->omega ordered by excitation (lower first). */
IOB_API iob_status iob_steady_states(const iob_params* p, iob_mechanism m,
                                     iob_solution* out, size_t capacity, size_t* count);
IOB_API iob_status iob_effective_params(double w, const iob_params* p, iob_mechanism m,
                                        double* omega_eff_re, double* omega_eff_im,
                                        double* delta_eff);
IOB_API iob_status iob_classify_stability(double w, const iob_params* p, iob_mechanism m,
                                          int* stable, int* marginal,
                                          double* max_real_part);
/* *found is 0 when the response is monostable on [omega_lo, omega_hi]. */
IOB_API iob_status iob_find_thresholds(const iob_params* p, iob_mechanism m,
                                       double omega_lo, double omega_hi, int* found,
                                       double* omega_up, double* omega_down,
                                       int* range_warning);

IOB_API iob_status iob_scan_create(const iob_params* p, iob_mechanism m,
                                   const double* omega_grid, size_t n, iob_scan** out);
IOB_API size_t iob_scan_size(const iob_scan* s);
/* Solutions at grid point i; a per-point solver failure is reported as the
   returned status with the message in iob_last_error(). */
IOB_API iob_status iob_scan_point(const iob_scan* s, size_t i, double* omega,
                                  iob_solution* out, size_t capacity, size_t* count);
IOB_API iob_status iob_scan_thresholds(const iob_scan* s, int* found, double* omega_up,
                                       double* omega_down, int* range_warning);
IOB_API void iob_scan_destroy(iob_scan* s);

/* spectrum */
IOB_API iob_status iob_spectrum_coefficients_eval(double omega_eff_sq, double delta_eff,
                                                  double gamma,
                                                  iob_spectrum_coefficients* out);
IOB_API double iob_incoherent_spectrum(double nu, const iob_spectrum_coefficients* c,
                                       double rho22, double gamma);
IOB_API iob_status iob_oracle_spectrum(double nu, double omega_eff_re, double omega_eff_im,
                                       double delta_eff, double gamma, double w,
                                       double rho12_re, double rho12_im, double* out);
IOB_API double iob_free_atom_saturation_max(double gamma);
/* nu_grid may be NULL (n = 0) to use the default symmetric grid. */
IOB_API iob_status iob_spectrum_create(const iob_params* p, iob_mechanism m, iob_branch b,
                                       const double* nu_grid, size_t n, iob_spectrum** out);
IOB_API size_t iob_spectrum_size(const iob_spectrum* s);
IOB_API const double* iob_spectrum_nu(const iob_spectrum* s);
IOB_API const double* iob_spectrum_density(const iob_spectrum* s);
IOB_API iob_status iob_spectrum_get_info(const iob_spectrum* s, iob_spectrum_info* out);
IOB_API iob_status iob_spectrum_sum_rule(const iob_spectrum* s, double* ratio);
IOB_API void iob_spectrum_destroy(iob_spectrum* s);

/* dynamics */
IOB_API iob_status iob_bloch_rhs(const iob_bloch_state* s, const iob_params* p,
                                 iob_mechanism m, double omega_now, iob_bloch_state* out);
IOB_API iob_status iob_jacobian(const iob_bloch_state* s, const iob_params* p,
                                iob_mechanism m, double omega_now, double out[9]);
/* Constant drive p->omega, n_samples uniform samples over [0, t_end]. */
IOB_API iob_status iob_integrate(const iob_bloch_state* s0, const iob_params* p,
                                 iob_mechanism m, double t_end, size_t n_samples,
                                 double rel_tol, double abs_tol, iob_trajectory** out);
IOB_API iob_status iob_sweep(const iob_params* p, iob_mechanism m, double omega_start,
                             double omega_end, double ramp_rate, iob_trajectory** out);
IOB_API size_t iob_trajectory_size(const iob_trajectory* t);
IOB_API iob_status iob_trajectory_sample(const iob_trajectory* t, size_t i, double* time,
                                         iob_bloch_state* state, double* omega);
IOB_API size_t iob_trajectory_jump_count(const iob_trajectory* t);
IOB_API double iob_trajectory_jump(const iob_trajectory* t, size_t i);
IOB_API int iob_trajectory_non_adiabatic(const iob_trajectory* t);
IOB_API double iob_trajectory_manifold_distance(const iob_trajectory* t);
IOB_API void iob_trajectory_destroy(iob_trajectory* t);

/* verification suite; inject_printed_b2 swaps in the uncorrected b2 term */
IOB_API iob_status iob_verify_run(uint64_t seed, int inject_printed_b2,
                                  iob_verify_report** out);
IOB_API size_t iob_verify_count(const iob_verify_report* r);
IOB_API iob_status iob_verify_check(const iob_verify_report* r, size_t i, const char** name,
                                    int* passed, double* max_deviation, double* tolerance);
IOB_API int iob_verify_all_passed(const iob_verify_report* r);
IOB_API void iob_verify_destroy(iob_verify_report* r);

#ifdef __cplusplus
}
#endif

#endif
