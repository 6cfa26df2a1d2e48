/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the multiway distributed-relay rate library.
 *
 * The library evaluates achievable sum rates of a lattice-coded
 * physical-layer network coding scheme over K multi-antenna users and N
 * single-antenna relays, together with cooperative-relay rates, a
 * cut-set outer bound, decode-and-forward / amplify-and-forward
 * baselines, and an exact small-scale executable model of the lattice
 * exchange protocol.
 *
 * Conventions:
 *  - All functions return mdrc_status; MDRC_OK is 0.
 *  - Out-parameters are written only on MDRC_OK.
 *  - Objects behind opaque handles are immutable after creation and may
 *    be shared across threads; creation and destruction are not
 *    synchronized.
 *  - Strings returned through char** are heap-allocated; release them
 *    with mdrc_string_free.
 *  - mdrc_last_error_message() describes the most recent failure on the
 *    calling thread.
 */

#ifndef MDRC_H
#define MDRC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MDRC_API __declspec(dllexport)
#else
#define MDRC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdrc_status {
  MDRC_OK = 0,
  MDRC_ERR_INVALID_ARGUMENT = 1,
  MDRC_ERR_PARSE = 2,
  MDRC_ERR_RANK_DEFICIENT = 3,
  MDRC_ERR_NOT_SYMMETRIC = 4,
  MDRC_ERR_NOT_PSD = 5,
  MDRC_ERR_TRACE_BUDGET = 6,
  MDRC_ERR_EMPTY_GAINS = 7,
  MDRC_ERR_ZERO_GAIN = 8,
  MDRC_ERR_INCONSISTENT_INPUTS = 9,
  MDRC_ERR_UNBOUNDED = 10,
  MDRC_ERR_NON_CONVERGENCE = 11,
  MDRC_ERR_INVALID_REGIME = 12,
  MDRC_ERR_IO = 13,
  MDRC_ERR_INTERNAL = 14
} mdrc_status;

typedef enum mdrc_scheme {
  MDRC_SCHEME_DIST = 0,   /* lattice scheme, distributed relays */
  MDRC_SCHEME_COOP = 1,   /* lattice scheme, cooperating relays */
  MDRC_SCHEME_CUTSET = 2, /* cut-set outer bound (per-cut relaxation) */
  MDRC_SCHEME_DF = 3,     /* decode-and-forward baseline */
  MDRC_SCHEME_AF = 4      /* amplify-and-forward baseline */
} mdrc_scheme;

typedef struct mdrc_scenario mdrc_scenario; /* parsed configuration */
typedef struct mdrc_instance mdrc_instance; /* one channel draw */

MDRC_API const char* mdrc_version(void);
MDRC_API const char* mdrc_status_name(mdrc_status status);
/* Message of the last error raised on this thread (never NULL). */
MDRC_API const char* mdrc_last_error_message(void);
MDRC_API void mdrc_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Scenario configuration                                              */
/*
 * JSON schema: {"K":3,"M":4,"N":4,"alpha":0.5,"user_power":1.0,
 *               "relay_power":[0.25,...],"sigma2_relay":1.0,
 *               "sigma2_user":1.0,"snr_grid_db":[...],"seeds":[...]}
 * Powers are linear multipliers of the sweep reference power
 * P = sigma2_relay * 10^(snr_db/10).
 */

MDRC_API mdrc_status mdrc_scenario_parse_json(const char* json_text,
                                              mdrc_scenario** out_scenario);
MDRC_API mdrc_status mdrc_scenario_load_file(const char* path,
                                             mdrc_scenario** out_scenario);
MDRC_API mdrc_status mdrc_scenario_to_json(const mdrc_scenario* scenario,
                                           char** out_json);
/* Copies up to `capacity` grid values into `out_grid`; writes the full
 * grid length to `out_count`. Either pointer may be NULL. */
MDRC_API mdrc_status mdrc_scenario_snr_grid(const mdrc_scenario* scenario,
                                            double* out_grid, size_t capacity,
                                            size_t* out_count);
MDRC_API void mdrc_scenario_free(mdrc_scenario* scenario);

/* ------------------------------------------------------------------ */
/* Channel instances                                                   */

MDRC_API mdrc_status mdrc_instance_sample(const mdrc_scenario* scenario,
                                          uint64_t seed,
                                          mdrc_instance** out_instance);
MDRC_API void mdrc_instance_free(mdrc_instance* instance);
MDRC_API mdrc_status mdrc_instance_effective_relays(const mdrc_instance* instance,
                                                    int* out_effective_relays);
/* Squared triangular sub-channel gain r_k(n,n)^2 (0-based k, n). */
MDRC_API mdrc_status mdrc_instance_subchannel_gain(const mdrc_instance* instance,
                                                   int user, int sub_channel,
                                                   double* out_gain);

/* ------------------------------------------------------------------ */
/* Rate solvers                                                        */

typedef struct mdrc_solve_options {
  int refine_relay_covariance; /* 0/1: supergradient ascent on Q_R */
  double inner_tol;            /* inner solver tolerance (default 1e-7) */
  long max_iterations;         /* inner iteration budget (default 1e5) */
} mdrc_solve_options;

MDRC_API void mdrc_solve_options_init(mdrc_solve_options* options);

/* Sum rate in bits per channel use of `scheme` at `snr_db`, using the
 * scenario's alpha and power multipliers. `out_relaxed_bound` (may be
 * NULL) is set to 1 when the value is a deliberately loosened upper
 * bound (the cut-set evaluation maximizes each cut independently). */
MDRC_API mdrc_status mdrc_sum_rate(const mdrc_scenario* scenario,
                                   const mdrc_instance* instance,
                                   mdrc_scheme scheme, double snr_db,
                                   const mdrc_solve_options* options,
                                   double* out_sum_rate_bits,
                                   int* out_relaxed_bound);

/* Same, overriding the scenario's time split. */
MDRC_API mdrc_status mdrc_sum_rate_alpha(const mdrc_scenario* scenario,
                                         const mdrc_instance* instance,
                                         mdrc_scheme scheme, double alpha,
                                         double snr_db,
                                         const mdrc_solve_options* options,
                                         double* out_sum_rate_bits,
                                         int* out_relaxed_bound);

/* Asymptotic sum-rate gap bound (bits/channel use) between the
 * distributed scheme and the cut-set bound; exact zero for alpha > 1/2.
 * `out_std_error` (may be NULL) receives the Monte Carlo standard error. */
MDRC_API mdrc_status mdrc_gap_bound(int users, int antennas, int relays,
                                    double alpha, int64_t mc_samples,
                                    uint64_t seed, double* out_delta_bits,
                                    double* out_std_error);

/* ------------------------------------------------------------------ */
/* Sweeps, verification, lattice demo                                  */

/* CSV with header scheme,snr_db,alpha,seed,sum_rate_bits,relaxed_bound,status;
 * one row per (scheme, snr, seed) from the scenario grid. `schemes_csv`
 * is a comma-separated subset of dist,coop,cutset,df,af. */
MDRC_API mdrc_status mdrc_run_sweep(const mdrc_scenario* scenario,
                                    const char* schemes_csv,
                                    const mdrc_solve_options* options,
                                    char** out_csv);

/* Distributed and cooperative rates over an alpha grid (same CSV schema;
 * the alpha column carries the swept value). */
MDRC_API mdrc_status mdrc_run_alpha_sweep(const mdrc_scenario* scenario,
                                          const double* alphas, size_t n_alphas,
                                          const double* snrs_db, size_t n_snrs,
                                          const mdrc_solve_options* options,
                                          char** out_csv);

/* Scaled verification of the high-SNR claims on the scenario's seed
 * list. Writes a human-readable report and the number of failed checks. */
MDRC_API mdrc_status mdrc_verify(const mdrc_scenario* scenario,
                                 const mdrc_solve_options* options,
                                 char** out_report, int* out_failures);

/* Noiseless/noisy lattice exchange demo. `chain_json` is one chain
 * object {"dim":1,"g":1.0,"q":[8,4,2]} or an array of chains (one per
 * sub-channel). Runs `runs` seeded random exchanges and reports per-pair
 * recovery rates; `out_failures` counts failed ordered-pair recoveries. */
MDRC_API mdrc_status mdrc_lattice_demo(const char* chain_json, uint64_t runs,
                                       double noise_sigma, char** out_report,
                                       uint64_t* out_failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MDRC_H */
