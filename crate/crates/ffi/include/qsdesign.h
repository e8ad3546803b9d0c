#ifndef QSDESIGN_H
#define QSDESIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QsStatus {
  QS_STATUS_OK = 0,
  QS_STATUS_NULL_POINTER = 1,
  QS_STATUS_INVALID_ARGUMENT = 2,
  QS_STATUS_UNSUPPORTED = 3,
  QS_STATUS_PARSE = 4,
  QS_STATUS_IO = 5,
  QS_STATUS_BUFFER_TOO_SMALL = 6,
  QS_STATUS_INTERNAL = 7,
} QsStatus;

/**
 * Opaque design handle.
 */
typedef struct QsDesign QsDesign;

/**
 * Threshold-accepting settings; `weight_num / weight_den` weighs `r_ave`
 * against the Hamming term for blocked designs.
 */
typedef struct QsTaConfig {
  size_t outer;
  size_t inner;
  double t_initial;
  double t_final;
  int64_t weight_num;
  int64_t weight_den;
} QsTaConfig;

typedef struct QsMetrics {
  size_t n;
  size_t m;
  uint64_t d1;
  uint64_t d2sq;
  uint64_t dh;
  double r_ave;
  /**
   * True when `r_ave_num / r_ave_den` holds `r_ave` exactly.
   */
  bool r_ave_exact;
  int64_t r_ave_num;
  int64_t r_ave_den;
  /**
   * Common adjacent-pair count, 0 when unbalanced.
   */
  uint64_t pair_count;
  uint64_t d1_upper;
  uint64_t d2sq_upper;
  uint64_t dh_upper;
  double d1_ratio;
  double d2_ratio;
  bool is_pair_balanced;
  bool is_marginally_coupled;
} QsMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *qs_last_error(void);

struct QsTaConfig qs_ta_config_default(void);

/**
 * Builds a design with `n` runs and `m` components. `config` may be NULL for
 * the defaults.
 *
 * # Safety
 * `config` is NULL or points to a valid `QsTaConfig`; `out` is a valid
 * pointer to writable storage for one handle.
 */
enum QsStatus qs_generate(size_t n,
                          size_t m,
                          uint64_t seed,
                          const struct QsTaConfig *config,
                          struct QsDesign **out);

/**
 * Reads a design CSV (and its sidecar, if present).
 *
 * # Safety
 * `path` is a NUL-terminated string; `out` is valid for one handle write.
 */
enum QsStatus qs_design_read(const char *path, struct QsDesign **out);

/**
 * Writes the design CSV and its `.meta.json` sidecar.
 *
 * # Safety
 * `design` is a live handle; `path` is a NUL-terminated string.
 */
enum QsStatus qs_design_write(const struct QsDesign *design, const char *path);

/**
 * # Safety
 * `design` is NULL or a handle not yet freed.
 */
void qs_design_free(struct QsDesign *design);

/**
 * Number of runs, or 0 for NULL.
 *
 * # Safety
 * `design` is NULL or a live handle.
 */
size_t qs_design_runs(const struct QsDesign *design);

/**
 * Number of components, or 0 for NULL.
 *
 * # Safety
 * `design` is NULL or a live handle.
 */
size_t qs_design_components(const struct QsDesign *design);

/**
 * Copies the quantitative part, row-major, into `buf` (at least `n * m` values).
 *
 * # Safety
 * `design` is a live handle and `buf` is writable for `len` values.
 */
enum QsStatus qs_design_copy_x(const struct QsDesign *design, uint32_t *buf, size_t len);

/**
 * Copies the sequence part, row-major, into `buf` (at least `n * m` values).
 *
 * # Safety
 * `design` is a live handle and `buf` is writable for `len` values.
 */
enum QsStatus qs_design_copy_o(const struct QsDesign *design, uint32_t *buf, size_t len);

/**
 * # Safety
 * `design` is a live handle and `out` points to writable `QsMetrics`.
 */
enum QsStatus qs_evaluate(const struct QsDesign *design, struct QsMetrics *out);

/**
 * Profit of a strategy on the built-in six-city instance. `stays` are in
 * visit order; `order` lists the 1-based cities visited.
 *
 * # Safety
 * `stays` and `order` are readable for `m` values; `out` is writable.
 */
enum QsStatus qs_tsp_profit(const double *stays, const uint32_t *order, size_t m, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSDESIGN_H */
