#ifndef LCD_REDUCE_H
#define LCD_REDUCE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum LcdStatus {
  LCD_STATUS_OK = 0,
  LCD_STATUS_NULL_POINTER = 1,
  LCD_STATUS_INVALID_ARGUMENT = 2,
  LCD_STATUS_INVALID_MIXTURE = 3,
  LCD_STATUS_DIMENSION_MISMATCH = 4,
  LCD_STATUS_BUFFER_TOO_SMALL = 5,
  LCD_STATUS_FAILED = 6,
  LCD_STATUS_PANIC = 7,
} LcdStatus;

/*
 Coefficient of the mean term in the large-width gradient.
 */
typedef enum LcdKappa {
  /*
   `C_b - 1`, the exact derivative.
   */
  LCD_KAPPA_CB_MINUS_ONE = 0,
  /*
   `C_b`.
   */
  LCD_KAPPA_CB = 1,
} LcdKappa;

/*
 How the optimizer stopped.
 */
typedef enum LcdOptimStatus {
  LCD_OPTIM_STATUS_CONVERGED = 0,
  LCD_OPTIM_STATUS_MAX_ITERS = 1,
  LCD_OPTIM_STATUS_LINE_SEARCH_FAILED = 2,
} LcdOptimStatus;

/*
 Opaque weighted point set.
 */
typedef struct LcdMixture LcdMixture;

/*
 Distance with its term breakdown. `is_exact` selects the meaning of
 `constant`: the largest kernel width when nonzero, else `C_b`.
 */
typedef struct LcdDistanceReport {
  double total;
  double d_y;
  double d_xy;
  double d_x;
  double d_e;
  double constant;
  uint8_t is_exact;
} LcdDistanceReport;

/*
 Reduction settings. Obtain defaults from [`lcd_reduce_config_default`].
 */
typedef struct LcdReduceConfig {
  size_t target_count;
  double c_b;
  enum LcdKappa kappa;
  uint64_t seed;
  size_t max_iters;
  double grad_tol;
  double step_tol;
  size_t multistart;
} LcdReduceConfig;

/*
 Outcome of [`lcd_reduce`].
 */
typedef struct LcdReduceResult {
  enum LcdOptimStatus status;
  size_t iterations;
  double distance;
} LcdReduceResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer is
 valid until the next call into this library on the same thread.
 */
const char *lcd_last_error_message(void);

/*
 Creates a mixture from `count` row-major points of `dim` coordinates.
 `weights` may be null for equal weights; otherwise positive weights are
 normalized to unit sum.

 # Safety
 `locations` must point to `count * dim` doubles, `weights` (if non-null)
 to `count` doubles, and `out` to writable storage for one pointer.
 */
enum LcdStatus lcd_mixture_new(size_t dim,
                               size_t count,
                               const double *locations,
                               const double *weights,
                               struct LcdMixture **out);

/*
 Releases a mixture. Null is ignored.

 # Safety
 `m` must come from this library and not be used afterwards.
 */
void lcd_mixture_free(struct LcdMixture *m);

/*
 Number of points, or 0 for null.

 # Safety
 `m` must be null or a live handle.
 */
size_t lcd_mixture_count(const struct LcdMixture *m);

/*
 Dimension, or 0 for null.

 # Safety
 `m` must be null or a live handle.
 */
size_t lcd_mixture_dim(const struct LcdMixture *m);

/*
 Copies the row-major locations into `buf` (`count * dim` values).

 # Safety
 `m` must be a live handle and `buf` must hold `len` doubles.
 */
enum LcdStatus lcd_mixture_locations(const struct LcdMixture *m, double *buf, size_t len);

/*
 Copies the weights into `buf` (`count` values).

 # Safety
 `m` must be a live handle and `buf` must hold `len` doubles.
 */
enum LcdStatus lcd_mixture_weights(const struct LcdMixture *m, double *buf, size_t len);

/*
 Exact distance with largest kernel width `b_max`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum LcdStatus lcd_distance_exact(const struct LcdMixture *reduced,
                                  const struct LcdMixture *original,
                                  double b_max,
                                  struct LcdDistanceReport *out);

/*
 Large-width distance with penalty constant `c_b`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum LcdStatus lcd_distance_approx(const struct LcdMixture *reduced,
                                   const struct LcdMixture *original,
                                   double c_b,
                                   struct LcdDistanceReport *out);

/*
 Gradient of the large-width distance with respect to the reduced
 locations, written row-major into `buf` (`count * dim` values).

 # Safety
 Handles must be live and `buf` must hold `len` doubles.
 */
enum LcdStatus lcd_grad_approx(const struct LcdMixture *reduced,
                               const struct LcdMixture *original,
                               double c_b,
                               enum LcdKappa kappa_mode,
                               double *buf,
                               size_t len);

/*
 Default settings for reducing to `target_count` points.
 */
struct LcdReduceConfig lcd_reduce_config_default(size_t target_count);

/*
 Reduces `original` to an equally weighted mixture. `result` may be null.

 # Safety
 `original` must be live, `config` readable, `out` writable.
 */
enum LcdStatus lcd_reduce(const struct LcdMixture *original,
                          const struct LcdReduceConfig *config,
                          struct LcdMixture **out,
                          struct LcdReduceResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LCD_REDUCE_H */
