#ifndef SIXCYL_H
#define SIXCYL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SixcylStatus {
  SIXCYL_STATUS_OK = 0,
  SIXCYL_STATUS_NULL_POINTER = 1,
  SIXCYL_STATUS_INVALID_ARGUMENT = 2,
  SIXCYL_STATUS_OUT_OF_RANGE = 3,
  SIXCYL_STATUS_NUMERICAL = 4,
  SIXCYL_STATUS_BUFFER_TOO_SMALL = 5,
  SIXCYL_STATUS_INTERNAL = 6,
} SixcylStatus;

typedef enum SixcylVerdict {
  SIXCYL_VERDICT_CERTIFIED_SHARP_MAX = 0,
  SIXCYL_VERDICT_FAILED_A = 1,
  SIXCYL_VERDICT_FAILED_B = 2,
} SixcylVerdict;

// Opaque certificate handle.
typedef struct SixcylCertificate SixcylCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string of the library. Static; do not free.
const char *sixcyl_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread; do not free.
const char *sixcyl_last_error(void);

// Distance between two tangent lines given by `(φ, κ, δ)`.
//
// # Safety
// `out` must be NULL or valid for a write of one `double`.
enum SixcylStatus sixcyl_line_distance(double phi1,
                                       double kappa1,
                                       double delta1,
                                       double phi2,
                                       double kappa2,
                                       double delta2,
                                       double *out);

// Angles `(φ, δ, κ)` of the curve point with parameter `x ∈ (0, 1]` and the
// common squared distance of its twelve relevant pairs.
//
// # Safety
// Each out pointer must be NULL or valid for a write of one `double`;
// `d2_out` may be NULL, the others may not.
enum SixcylStatus sixcyl_curve_point(double x,
                                     double *phi_out,
                                     double *delta_out,
                                     double *kappa_out,
                                     double *d2_out);

// Closed form of `d(A, D(ξ))²` (`which = 0`) or `d(A, F(ξ))²` (`which = 1`)
// along the curve, with the moving line turned by `arctan Ξ`.
//
// # Safety
// `out` must be NULL or valid for a write of one `double`.
enum SixcylStatus sixcyl_closed_form(double x, double xi, uint32_t which, double *out);

// Run the certificate at the curve point `x = p/q`.
//
// # Safety
// `out` must be NULL or valid for a write of one pointer. On success the
// handle must be released with [`sixcyl_certificate_free`].
enum SixcylStatus sixcyl_certify(int64_t p, int64_t q, struct SixcylCertificate **out);

// Run the certificate on the two-function example `(−y + 3x², y − x²)`.
//
// # Safety
// As for [`sixcyl_certify`].
enum SixcylStatus sixcyl_certify_toy(struct SixcylCertificate **out);

// # Safety
// `cert` must be NULL or a handle from this library that was not yet freed.
void sixcyl_certificate_free(struct SixcylCertificate *cert);

// # Safety
// `cert` must be a live handle; `out` valid for one write.
enum SixcylStatus sixcyl_certificate_verdict(const struct SixcylCertificate *cert,
                                             enum SixcylVerdict *out);

// Numerical rank of the gradient matrix and dimension of its kernel.
//
// # Safety
// `cert` must be a live handle; out pointers valid for one write each.
enum SixcylStatus sixcyl_certificate_dims(const struct SixcylCertificate *cert,
                                          size_t *rank_out,
                                          size_t *e_dim_out);

// Copy the eigenvalues of the restricted form, ascending, into `buf`.
// `*len_out` always receives the count; with `cap` too small nothing is
// copied and `BufferTooSmall` is returned.
//
// # Safety
// `cert` must be a live handle; `buf` valid for `cap` writes; `len_out`
// valid for one write.
enum SixcylStatus sixcyl_certificate_eigenvalues(const struct SixcylCertificate *cert,
                                                 double *buf,
                                                 size_t cap,
                                                 size_t *len_out);

// Copy the dependency coefficients (first entry 1) into `buf`; the count is
// zero when condition (A) failed.
//
// # Safety
// As for [`sixcyl_certificate_eigenvalues`].
enum SixcylStatus sixcyl_certificate_lambda(const struct SixcylCertificate *cert,
                                            double *buf,
                                            size_t cap,
                                            size_t *len_out);

// The certificate as JSON. Free the string with [`sixcyl_string_free`].
//
// # Safety
// `cert` must be a live handle; `out` valid for one write.
enum SixcylStatus sixcyl_certificate_json(const struct SixcylCertificate *cert,
                                          uint64_t seed,
                                          char **out);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void sixcyl_string_free(char *s);

// Count samples with `D ≥ D(C₆,ₓ)` over `n_samples` seeded random
// directions scaled by each of the `n_t` values in `t`.
//
// # Safety
// `t` must be valid for `n_t` reads; `violations_out` for one write.
enum SixcylStatus sixcyl_perturb(int64_t p,
                                 int64_t q,
                                 size_t n_samples,
                                 const double *t,
                                 size_t n_t,
                                 uint64_t seed,
                                 size_t *violations_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIXCYL_H */
