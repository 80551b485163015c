#ifndef SCHWARZIAN_LAB_H
#define SCHWARZIAN_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define SL_FLAG_POLE 1

#define SL_FLAG_OVERFLOW 2

#define SL_FLAG_CRITICAL_POINT 4

/**
 * Result code of every fallible call. The first five match the CLI exit codes.
 */
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_IDENTITY_FAILED = 1,
  SL_STATUS_PARSE_ERROR = 2,
  SL_STATUS_EVAL_ERROR = 3,
  SL_STATUS_IO_ERROR = 4,
  SL_STATUS_INVALID_ARGUMENT = 5,
  SL_STATUS_NULL_POINTER = 6,
  SL_STATUS_PANIC = 7,
} SlStatus;

typedef enum SlVerdict {
  SL_VERDICT_BOUNDED = 0,
  SL_VERDICT_DIVERGENT = 1,
  SL_VERDICT_INCONCLUSIVE = 2,
} SlVerdict;

/**
 * A parsed family `f_n(z)`.
 */
typedef struct SlFamily SlFamily;

/**
 * Per-point results of a grid scan.
 */
typedef struct SlScanReport SlScanReport;

typedef struct SlTolerance {
  double abs;
  double rel;
} SlTolerance;

typedef struct SlThresholds {
  double slope_threshold;
  double decay_threshold;
  double cap;
} SlThresholds;

typedef struct SlGridSpec {
  double re_min;
  double re_max;
  double im_min;
  double im_max;
  size_t nx;
  size_t ny;
  double neighborhood_radius;
  size_t neighborhood_samples;
} SlGridSpec;

typedef struct SlComplex {
  double re;
  double im;
} SlComplex;

/**
 * Value and first three derivatives at a point.
 */
typedef struct SlJet {
  struct SlComplex v;
  struct SlComplex d1;
  struct SlComplex d2;
  struct SlComplex d3;
} SlJet;

/**
 * Coefficients of `(a z + b) / (c z + d)`; normalized on use.
 */
typedef struct SlMobius {
  struct SlComplex a;
  struct SlComplex b;
  struct SlComplex c;
  struct SlComplex d;
} SlMobius;

typedef struct SlIdentityReport {
  struct SlComplex lhs;
  struct SlComplex rhs;
  double abs_gap;
  double rel_gap;
  struct SlTolerance tolerance;
  bool pass;
} SlIdentityReport;

typedef struct SlScanPoint {
  struct SlComplex z;
  double sup_stat;
  /**
   * 0 when no sample was finite.
   */
  uint32_t argmax_n;
  double growth_slope;
  /**
   * Bitwise OR of the `SL_FLAG_*` constants.
   */
  uint8_t flags;
  size_t finite_samples;
  enum SlVerdict verdict;
} SlScanPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sl_version(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *sl_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void sl_string_free(char *s);

struct SlTolerance sl_tolerance_default(void);

struct SlThresholds sl_thresholds_default(void);

/**
 * Grid with the default neighborhood radius and sample count.
 */
struct SlGridSpec sl_grid_spec(double re_min,
                               double re_max,
                               double im_min,
                               double im_max,
                               size_t nx,
                               size_t ny);

/**
 * Parses `source` into a new family. On a parse error `*error_offset`
 * (if non-null) receives the byte offset of the failure.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum SlStatus sl_family_parse(const char *source,
                              struct SlFamily **out_family,
                              size_t *error_offset);

/**
 * Looks up a named catalog family such as `example1`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum SlStatus sl_family_from_catalog(const char *name, struct SlFamily **out_family);

/**
 * # Safety
 * `family` must be null or a handle from this library not yet freed.
 */
void sl_family_free(struct SlFamily *family);

/**
 * Canonical source text of the family, released with `sl_string_free`.
 *
 * # Safety
 * `family` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_family_to_string(const struct SlFamily *family, char **out_text);

/**
 * # Safety
 * `family` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_eval_jet(const struct SlFamily *family,
                          double n,
                          struct SlComplex z,
                          struct SlJet *out_jet);

/**
 * Schwarzian derivative of `f_n` at `z`.
 *
 * # Safety
 * `family` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_schwarzian(const struct SlFamily *family,
                            double n,
                            struct SlComplex z,
                            struct SlComplex *out_value);

/**
 * Spherical derivative `|f'| / (1 + |f|^2)` of `f_n` at `z`.
 *
 * # Safety
 * `family` must be a live handle; `out` must be writable.
 */
enum SlStatus sl_spherical_derivative(const struct SlFamily *family,
                                      double n,
                                      struct SlComplex z,
                                      double *out_value);

/**
 * Compares `S_{m∘f}(z)` with `S_f(z)`. A null `tol` uses the default.
 * Returns `IdentityFailed` with `out` filled when the gap is too large.
 *
 * # Safety
 * Pointers must be valid; `tol` may be null.
 */
enum SlStatus sl_check_mobius_invariance(const struct SlFamily *family,
                                         double n,
                                         const struct SlMobius *m,
                                         struct SlComplex z,
                                         const struct SlTolerance *tol,
                                         struct SlIdentityReport *out_report);

/**
 * Compares `S_{g∘f}(z)` with `S_g(f(z)) f'(z)^2 + S_f(z)`.
 *
 * # Safety
 * Pointers must be valid; `tol` may be null.
 */
enum SlStatus sl_check_composition(const struct SlFamily *f,
                                   const struct SlFamily *g,
                                   double n,
                                   struct SlComplex z,
                                   const struct SlTolerance *tol,
                                   struct SlIdentityReport *out_report);

/**
 * Compares `S_{1/(f-w)}(z)` with `S_f(z)` for an omitted value `w`.
 *
 * # Safety
 * Pointers must be valid; `tol` may be null.
 */
enum SlStatus sl_check_reciprocal(const struct SlFamily *family,
                                  double n,
                                  struct SlComplex omitted,
                                  struct SlComplex z,
                                  const struct SlTolerance *tol,
                                  struct SlIdentityReport *out_report);

/**
 * Checks `S_g(φ(z)) φ'(z)^2 = S_f(z)` for `φ∘f = g∘φ`.
 *
 * # Safety
 * Pointers must be valid; `tol` may be null.
 */
enum SlStatus sl_check_conjugation(const struct SlFamily *f,
                                   const struct SlFamily *g,
                                   const struct SlMobius *phi,
                                   double n,
                                   struct SlComplex z,
                                   const struct SlTolerance *tol,
                                   struct SlIdentityReport *out_report);

/**
 * Marty scan of `sup f_n^#` over each grid neighborhood. A null
 * `n_values` with `n_len == 0` sweeps `1..=64`; `workers == 0` uses every
 * core. Results do not depend on `workers`.
 *
 * # Safety
 * Pointers must be valid; `n_values` must hold `n_len` entries.
 */
enum SlStatus sl_marty_scan(const struct SlFamily *family,
                            const struct SlGridSpec *grid,
                            const uint32_t *n_values,
                            size_t n_len,
                            uint64_t seed,
                            size_t workers,
                            struct SlScanReport **out_report);

/**
 * Scan of the spherical derivative of `z ↦ S_{f_n}(z)`; arguments as in
 * `sl_marty_scan`.
 *
 * # Safety
 * Pointers must be valid; `n_values` must hold `n_len` entries.
 */
enum SlStatus sl_sd_family_scan(const struct SlFamily *family,
                                const struct SlGridSpec *grid,
                                const uint32_t *n_values,
                                size_t n_len,
                                uint64_t seed,
                                size_t workers,
                                struct SlScanReport **out_report);

/**
 * Number of grid points in the report; 0 for null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t sl_scan_report_len(const struct SlScanReport *report);

/**
 * Point `index` in row-major order (real part fastest), classified with
 * `thresholds` or the defaults when null.
 *
 * # Safety
 * Pointers must be valid; `thresholds` may be null.
 */
enum SlStatus sl_scan_report_point(const struct SlScanReport *report,
                                   size_t index,
                                   const struct SlThresholds *thresholds_in,
                                   struct SlScanPoint *out_point);

/**
 * The report as CSV, byte-identical to the CLI scan output.
 *
 * # Safety
 * Pointers must be valid; `thresholds` may be null.
 */
enum SlStatus sl_scan_report_to_csv(const struct SlScanReport *report,
                                    const struct SlThresholds *thresholds_in,
                                    char **out_text);

/**
 * # Safety
 * `report` must be null or a handle from this library not yet freed.
 */
void sl_scan_report_free(struct SlScanReport *report);

/**
 * Cauchy estimate `k! m / r^k` for `|f^(k)(z0)|` given `|f| <= m` on the
 * circle of radius `r`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_cauchy_derivative_bound(double m, double r, uint32_t k, double *out_value);

/**
 * Bound on `|S_f|` from `|f''| <= m2`, `|f'''| <= m3` and `|f'| >= epsilon`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SlStatus sl_sd_bound_from_hypotheses(double m2, double m3, double epsilon, double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHWARZIAN_LAB_H */
