/*
 * gwlss: linear spectral statistics of generalized Wigner matrices.
 *
 * Plain C interface over opaque handles. Every fallible call returns a
 * gwlss_status; on failure gwlss_last_error() describes the cause (the
 * message is per thread and valid until the next failing call on it).
 */
#ifndef GWLSS_H
#define GWLSS_H

#include <stddef.h>
#include <stdint.h>

#if defined(GWLSS_BUILDING_LIBRARY)
#define GWLSS_API __attribute__((visibility("default")))
#else
#define GWLSS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gwlss_status {
  GWLSS_OK = 0,
  GWLSS_VERIFY_FAILED = 1,
  GWLSS_ERR_CONFIG = 2,
  GWLSS_ERR_NUMERICAL = 3,
  GWLSS_ERR_INVALID_ARGUMENT = 4,
  GWLSS_ERR_IO = 5,
  GWLSS_ERR_INTERNAL = 6
} gwlss_status;

typedef enum gwlss_family {
  GWLSS_GAUSSIAN = 0,
  GWLSS_RADEMACHER = 1,
  GWLSS_TWO_POINT = 2,
  GWLSS_UNIFORM = 3
} gwlss_family;

typedef struct gwlss_profile gwlss_profile;
typedef struct gwlss_testfn gwlss_testfn;
typedef struct gwlss_ensemble gwlss_ensemble;
typedef struct gwlss_experiment gwlss_experiment;

typedef struct gwlss_profile_report {
  double row_sum_err;
  double min_entry_n;
  double max_entry_n;
  double spectral_gap;
} gwlss_profile_report;

typedef struct gwlss_prediction {
  double V;
  double E;
  double B;
  int beta;
  int J;
  double tail_estimate;
  int tail_warning;
  int has_integral;
  double V_integral;
  int paths_agree;
} gwlss_prediction;

/* Overrides applied on top of an experiment file. */
typedef struct gwlss_overrides {
  int has_seed;
  uint64_t seed;
  int threads;      /* < 0: keep the file value */
  long replicas;    /* <= 0: keep the file value */
  int quick;
  const char* out_dir; /* NULL: keep the file value */
  int progress;     /* progress lines on stderr */
} gwlss_overrides;

GWLSS_API const char* gwlss_last_error(void);
GWLSS_API const char* gwlss_version(void);
GWLSS_API void gwlss_string_free(char* s);

/* Variance profiles. Matrices are dense, row-major, n x n. */
GWLSS_API gwlss_status gwlss_profile_flat(long n, gwlss_profile** out);
GWLSS_API gwlss_status gwlss_profile_band(long n, long w, gwlss_profile** out);
GWLSS_API gwlss_status gwlss_profile_random(long n, uint64_t seed, double roughness,
                                            gwlss_profile** out);
GWLSS_API gwlss_status gwlss_profile_from_matrix(const double* s, long n, gwlss_profile** out);
GWLSS_API gwlss_status gwlss_profile_read_csv(const char* path, gwlss_profile** out);
GWLSS_API gwlss_status gwlss_profile_write_csv(const gwlss_profile* p, const char* path);
GWLSS_API void gwlss_profile_free(gwlss_profile* p);
GWLSS_API long gwlss_profile_size(const gwlss_profile* p);
GWLSS_API gwlss_status gwlss_profile_get_report(const gwlss_profile* p, gwlss_profile_report* out);
GWLSS_API gwlss_status gwlss_profile_matrix(const gwlss_profile* p, double* out);
/* out[j-1] = tr S^j for j = 1..J. */
GWLSS_API gwlss_status gwlss_profile_trace_powers(const gwlss_profile* p, int J, double* out);
/* tr(S (1 - M S)^{-1}). */
GWLSS_API gwlss_status gwlss_profile_resolvent_trace(const gwlss_profile* p, double m_re,
                                                     double m_im, double* out_re, double* out_im);
GWLSS_API gwlss_status gwlss_validate_matrix(const double* s, long n, gwlss_profile_report* out);

/* Test functions. */
GWLSS_API gwlss_status gwlss_testfn_parse(const char* descriptor, gwlss_testfn** out);
GWLSS_API void gwlss_testfn_free(gwlss_testfn* f);
GWLSS_API gwlss_status gwlss_testfn_eval(const gwlss_testfn* f, double x, double* out);
/* out has J + 1 entries t_0..t_J. */
GWLSS_API gwlss_status gwlss_testfn_cheb_coeffs(const gwlss_testfn* f, int J, double* out,
                                                double* tail_estimate);

/* Ensembles. The profile may be freed after creation. */
GWLSS_API gwlss_status gwlss_ensemble_create(const gwlss_profile* p, int beta,
                                             gwlss_family offdiag, double offdiag_p,
                                             gwlss_family diag, double diag_p,
                                             gwlss_ensemble** out);
GWLSS_API void gwlss_ensemble_free(gwlss_ensemble* e);

GWLSS_API gwlss_status gwlss_predict(const gwlss_ensemble* e, const gwlss_testfn* f,
                                     int with_integral, gwlss_prediction* out);
/* out has `replicas` entries; independent of `threads`. */
GWLSS_API gwlss_status gwlss_simulate_lss(const gwlss_ensemble* e, const gwlss_testfn* f,
                                          uint64_t seed, long replicas, int threads,
                                          double* out);

/* Experiments read from a YAML or JSON file. `overrides` may be NULL. */
GWLSS_API gwlss_status gwlss_experiment_load(const char* path, const gwlss_overrides* overrides,
                                             gwlss_experiment** out);
GWLSS_API void gwlss_experiment_free(gwlss_experiment* x);
/* command: predict | simulate | verify | maxpoly | profile. On GWLSS_OK and
 * GWLSS_VERIFY_FAILED, *report receives a JSON string to release with
 * gwlss_string_free. */
GWLSS_API gwlss_status gwlss_experiment_run(gwlss_experiment* x, const char* command,
                                            char** report);

#ifdef __cplusplus
}
#endif

#endif /* GWLSS_H */
