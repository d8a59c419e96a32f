#ifndef MZBATH_H
#define MZBATH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum MzStatus {
  MZ_STATUS_OK = 0,
  MZ_STATUS_NULL_POINTER = 1,
  MZ_STATUS_CONFIG = 2,
  MZ_STATUS_DOMAIN = 3,
  MZ_STATUS_QUADRATURE = 4,
  MZ_STATUS_STEP_SIZE = 5,
  MZ_STATUS_TRACE = 6,
  MZ_STATUS_POSITIVITY = 7,
  MZ_STATUS_SUPPORT = 8,
  MZ_STATUS_CROSS_CHECK = 9,
  MZ_STATUS_IO = 10,
  MZ_STATUS_PANIC = 11,
} MzStatus;

/**
 * Opaque bath parameter set.
 */
typedef struct MzBath MzBath;

/**
 * Opaque 2×2 density matrix.
 */
typedef struct MzDensityMatrix MzDensityMatrix;

/**
 * Opaque interferometer configuration.
 */
typedef struct MzInterferometer MzInterferometer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mz_version(void);

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or
 * 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t mz_last_error_message(char *buf, size_t len);

/**
 * Build a density matrix from row-major real and imaginary parts.
 *
 * # Safety
 * `re` and `im` must point to 4 doubles; `out` must be writable.
 */
enum MzStatus mz_density_matrix_new(const double *re,
                                    const double *im,
                                    struct MzDensityMatrix **out);

/**
 * # Safety
 * `dm` must be null or a handle from this library not yet freed.
 */
void mz_density_matrix_free(struct MzDensityMatrix *dm);

/**
 * Row-major elements into `re[4]` and `im[4]`.
 *
 * # Safety
 * `dm` must be a live handle; `re`, `im` must be writable for 4 doubles.
 */
enum MzStatus mz_density_matrix_elements(const struct MzDensityMatrix *dm, double *re, double *im);

/**
 * Von Neumann entropy in bits.
 *
 * # Safety
 * `dm` must be a live handle; `out` writable.
 */
enum MzStatus mz_von_neumann_entropy(const struct MzDensityMatrix *dm, double *out);

/**
 * Distillable coherence S(Ξ[ρ]) − S(ρ) in bits.
 *
 * # Safety
 * `dm` must be a live handle; `out` writable.
 */
enum MzStatus mz_distillable_coherence(const struct MzDensityMatrix *dm, double *out);

/**
 * Mixedness 1 − Tr ρ².
 *
 * # Safety
 * `dm` must be a live handle; `out` writable.
 */
enum MzStatus mz_mixedness(const struct MzDensityMatrix *dm, double *out);

/**
 * Relative entropy S(ρ‖σ) in bits; `MZ_STATUS_SUPPORT` when undefined.
 *
 * # Safety
 * `rho`, `sigma` must be live handles; `out` writable.
 */
enum MzStatus mz_relative_entropy(const struct MzDensityMatrix *rho,
                                  const struct MzDensityMatrix *sigma,
                                  double *out);

/**
 * Bath with temperature in K and cutoff, system frequency in s⁻¹.
 *
 * # Safety
 * `out` must be writable.
 */
enum MzStatus mz_bath_new(double temperature,
                          double cutoff,
                          double coupling,
                          double system_frequency,
                          struct MzBath **out);

/**
 * # Safety
 * `b` must be null or a live handle.
 */
void mz_bath_free(struct MzBath *b);

/**
 * Markov rate Γ and mean occupation n̄.
 *
 * # Safety
 * `b` must be a live handle; outputs writable.
 */
enum MzStatus mz_bath_markov(const struct MzBath *b, double *rate, double *occupation);

/**
 * J(ω).
 *
 * # Safety
 * `b` must be a live handle; `out` writable.
 */
enum MzStatus mz_spectral_density(const struct MzBath *b, double omega, double *out);

/**
 * Noise kernel κ(τ).
 *
 * # Safety
 * `b` must be a live handle; `out` writable.
 */
enum MzStatus mz_noise_kernel(const struct MzBath *b, double tau, double *out);

/**
 * Dissipation kernel μ(τ).
 *
 * # Safety
 * `b` must be a live handle; `out` writable.
 */
enum MzStatus mz_dissipation_kernel(const struct MzBath *b, double tau, double *out);

/**
 * Δ(t), γ(t) on a strictly increasing grid of `len` times.
 *
 * # Safety
 * `times` readable and `delta`, `gamma` writable for `len` doubles.
 */
enum MzStatus mz_transient_coefficients(const struct MzBath *b,
                                        const double *times,
                                        size_t len,
                                        double *delta,
                                        double *gamma);

/**
 * Interferometer at phase φ with default pointer geometry for `bath`.
 *
 * # Safety
 * `b` must be a live handle; `out` writable.
 */
enum MzStatus mz_interferometer_new(double phase,
                                    const struct MzBath *b,
                                    struct MzInterferometer **out);

/**
 * # Safety
 * `cfg` must be null or a live handle.
 */
void mz_interferometer_free(struct MzInterferometer *cfg);

/**
 * State after BS2 at time `t`; free the result with `mz_density_matrix_free`.
 *
 * # Safety
 * `cfg` must be a live handle; `out` writable.
 */
enum MzStatus mz_pipeline_state(const struct MzInterferometer *cfg,
                                double t,
                                struct MzDensityMatrix **out);

/**
 * Click probabilities of detectors D1 and D2 at time `t`.
 *
 * # Safety
 * `cfg` must be a live handle; outputs writable.
 */
enum MzStatus mz_detector_probabilities(const struct MzInterferometer *cfg,
                                        double t,
                                        double *d1,
                                        double *d2);

/**
 * Fringe visibility at time `t`.
 *
 * # Safety
 * `cfg` must be a live handle; `out` writable.
 */
enum MzStatus mz_fringe_visibility(const struct MzInterferometer *cfg, double t, double *out);

/**
 * Pr(P) at `len` momenta.
 *
 * # Safety
 * `p` readable and `density` writable for `len` doubles.
 */
enum MzStatus mz_momentum_distribution(const struct MzInterferometer *cfg,
                                       double t,
                                       const double *p,
                                       size_t len,
                                       double *density);

/**
 * Closed-form entropy S(η, n̄) in bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum MzStatus mz_entropy_closed_form(double eta, double occupation, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MZBATH_H */
