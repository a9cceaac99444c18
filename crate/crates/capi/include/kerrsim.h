/* C interface to the kerrsim dissipative Kerr-cavity simulator. */

#ifndef KERRSIM_H
#define KERRSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum KerrsimStatus {
  KERRSIM_STATUS_OK = 0,
  KERRSIM_STATUS_NULL_POINTER = 1,
  KERRSIM_STATUS_INVALID_ARGUMENT = 2,
  KERRSIM_STATUS_DIMENSION_MISMATCH = 3,
  /**
   * The requested RK4 step violates the stability guard.
   */
  KERRSIM_STATUS_STABILITY_GUARD = 4,
  /**
   * The dense Liouvillian propagator refused a dimension this large.
   */
  KERRSIM_STATUS_MEMORY_GUARD = 5,
  KERRSIM_STATUS_INTERNAL_ERROR = 6,
} KerrsimStatus;

/**
 * Opaque density-matrix handle.
 */
typedef struct KerrsimState KerrsimState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *kerrsim_status_message(enum KerrsimStatus status);

/**
 * Library version as a NUL-terminated string.
 */
const char *kerrsim_version(void);

/**
 * Create the Fock state `|n><n|` in an `dim`-level truncation.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum KerrsimStatus kerrsim_state_fock(uint32_t dim, uint32_t n, struct KerrsimState **out);

/**
 * Create a truncated, renormalized coherent state.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum KerrsimStatus kerrsim_state_coherent(uint32_t dim,
                                          double alpha_re,
                                          double alpha_im,
                                          struct KerrsimState **out);

/**
 * Create a thermal state with the given mean occupation.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum KerrsimStatus kerrsim_state_thermal(uint32_t dim, double mean_n, struct KerrsimState **out);

/**
 * Create a cat state `|α> + e^{iφ}|-α>` (normalized after truncation).
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum KerrsimStatus kerrsim_state_cat(uint32_t dim,
                                     double alpha_re,
                                     double alpha_im,
                                     double phase,
                                     struct KerrsimState **out);

/**
 * Deep-copy a state handle.
 *
 * # Safety
 * `state` must be a live handle from this library; `out` as above.
 */
enum KerrsimStatus kerrsim_state_clone(const struct KerrsimState *state, struct KerrsimState **out);

/**
 * Release a state handle. Passing NULL is a no-op.
 *
 * # Safety
 * `state` must be a pointer previously returned by this library and not
 * yet freed.
 */
void kerrsim_state_free(struct KerrsimState *state);

/**
 * Number of retained Fock levels, or 0 for NULL.
 *
 * # Safety
 * `state` must be a live handle or NULL.
 */
uint32_t kerrsim_state_dim(const struct KerrsimState *state);

/**
 * Read one matrix element `ρ_{mn}`.
 *
 * # Safety
 * `state` must be a live handle; `re`/`im` must be writable.
 */
enum KerrsimStatus kerrsim_state_element(const struct KerrsimState *state,
                                         uint32_t m,
                                         uint32_t n,
                                         double *re,
                                         double *im);

/**
 * Evolve through the closed-form operator-sum channel.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum KerrsimStatus kerrsim_evolve_kraus(const struct KerrsimState *state,
                                        double chi,
                                        double gamma,
                                        double t,
                                        struct KerrsimState **out);

/**
 * Evolve by fixed-step RK4 integration of the master equation.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum KerrsimStatus kerrsim_evolve_rk4(const struct KerrsimState *state,
                                      double chi,
                                      double gamma,
                                      double t,
                                      uint64_t steps,
                                      struct KerrsimState **out);

/**
 * Evolve by exponentiating the vectorized Liouvillian.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum KerrsimStatus kerrsim_evolve_liouville(const struct KerrsimState *state,
                                            double chi,
                                            double gamma,
                                            double t,
                                            struct KerrsimState **out);

/**
 * `Tr ρ²`.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum KerrsimStatus kerrsim_purity(const struct KerrsimState *state, double *out);

/**
 * `Tr(n̂ ρ)`.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum KerrsimStatus kerrsim_mean_photon_number(const struct KerrsimState *state, double *out);

/**
 * Smallest eigenvalue of ρ.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum KerrsimStatus kerrsim_min_eigenvalue(const struct KerrsimState *state, double *out);

/**
 * Overlap `<n|ρ|n>` with a Fock state.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum KerrsimStatus kerrsim_fidelity_fock(const struct KerrsimState *state, uint32_t n, double *out);

/**
 * Complex trace of ρ.
 *
 * # Safety
 * `state` must be a live handle; `re`/`im` must be writable.
 */
enum KerrsimStatus kerrsim_trace(const struct KerrsimState *state, double *re, double *im);

/**
 * Trace distance between two states of equal dimension.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum KerrsimStatus kerrsim_trace_distance(const struct KerrsimState *a,
                                          const struct KerrsimState *b,
                                          double *out);

/**
 * The dissipation coefficient `Λ_{m,n}` at the given couplings and time.
 *
 * # Safety
 * `re`/`im` must be writable.
 */
enum KerrsimStatus kerrsim_lambda_coefficient(uint32_t m,
                                              uint32_t n,
                                              double chi,
                                              double gamma,
                                              double t,
                                              double *re,
                                              double *im);

/**
 * Deviation of the generalized-Kraus completeness sum from the identity.
 *
 * # Safety
 * `out` must be writable.
 */
enum KerrsimStatus kerrsim_completeness_residual(uint32_t dim,
                                                 double chi,
                                                 double gamma,
                                                 double t,
                                                 double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* KERRSIM_H */
