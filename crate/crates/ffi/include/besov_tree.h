#ifndef BESOV_TREE_H
#define BESOV_TREE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BtStatus {
  BT_STATUS_OK = 0,
  BT_STATUS_NULL_POINTER = 1,
  BT_STATUS_INVALID_PARAMS = 2,
  BT_STATUS_SHAPE_MISMATCH = 3,
  BT_STATUS_INVALID_ARGUMENT = 4,
  BT_STATUS_DEPTH_TOO_SMALL = 5,
  BT_STATUS_IO = 6,
  BT_STATUS_PARSE = 7,
  BT_STATUS_NUMERICAL = 8,
  BT_STATUS_PANIC = 9,
} BtStatus;

typedef struct BtBoundary BtBoundary;

typedef struct BtParams BtParams;

typedef struct BtTree BtTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into this library.
const char *bt_last_error(void);

// # Safety
// `out` must be a valid pointer to writable storage.
enum BtStatus bt_params_new(size_t k,
                            double eps,
                            double beta,
                            double lambda,
                            double p,
                            size_t depth,
                            struct BtParams **out);

// Reads a `key=value` config file.
//
// # Safety
// `path` must be a nul-terminated string and `out` writable.
enum BtStatus bt_params_load(const char *path, struct BtParams **out);

// Copy of `params` with an explicit smoothness `theta`.
//
// # Safety
// `params` must come from this library; `out` must be writable.
enum BtStatus bt_params_with_theta(const struct BtParams *params,
                                   double theta,
                                   struct BtParams **out);

// # Safety
// `params` must come from this library (or be null) and not be used again.
void bt_params_free(struct BtParams *params);

// A boundary function from `K^N` cell values.
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be writable.
enum BtStatus bt_boundary_new(size_t k,
                              size_t depth,
                              const double *values,
                              size_t len,
                              struct BtBoundary **out);

// # Safety
// `path` must be a nul-terminated string and `out` writable.
enum BtStatus bt_boundary_read(const char *path, struct BtBoundary **out);

// # Safety
// `f` must come from this library and `path` be a nul-terminated string.
enum BtStatus bt_boundary_write(const struct BtBoundary *f, const char *path);

// Number of cells, or 0 for a null handle.
//
// # Safety
// `f` must come from this library or be null.
size_t bt_boundary_len(const struct BtBoundary *f);

// Copies the cell values into `buf`, which must hold exactly
// `bt_boundary_len(f)` doubles.
//
// # Safety
// `f` must come from this library; `buf` must point to `len` writable doubles.
enum BtStatus bt_boundary_values(const struct BtBoundary *f, double *buf, size_t len);

// # Safety
// `f` must come from this library (or be null) and not be used again.
void bt_boundary_free(struct BtBoundary *f);

// Dyadic energy with the `θ`, `λ`, `p` of `params`.
//
// # Safety
// Handles must come from this library; `out` must be writable.
enum BtStatus bt_dyadic_energy(const struct BtBoundary *f,
                               const struct BtParams *params,
                               double *out);

// Pairwise energy with the `θ`, `p` of `params`.
//
// # Safety
// Handles must come from this library; `out` must be writable.
enum BtStatus bt_double_integral_energy(const struct BtBoundary *f,
                                        const struct BtParams *params,
                                        double *out);

// # Safety
// `f` must come from this library; `out` must be writable.
enum BtStatus bt_lp_norm(const struct BtBoundary *f, double p, double *out);

// # Safety
// Handles must come from this library; `out` must be writable.
enum BtStatus bt_whitney_extend(const struct BtBoundary *f,
                                const struct BtParams *params,
                                struct BtTree **out);

// Extension along the levels `α(n) = base^n`.
//
// # Safety
// Handles must come from this library; `out` must be writable.
enum BtStatus bt_alpha_extend(const struct BtBoundary *f,
                              size_t base,
                              const struct BtParams *params,
                              struct BtTree **out);

// The layered (non-linear) extension. Needs `p = (β − log K)/ε`.
//
// # Safety
// Handles must come from this library; `out` must be writable.
enum BtStatus bt_gagliardo_extend(const struct BtBoundary *f,
                                  const struct BtParams *params,
                                  struct BtTree **out);

// Deepest-level values of `u`.
//
// # Safety
// `u` must come from this library; `out` must be writable.
enum BtStatus bt_trace(const struct BtTree *u, struct BtBoundary **out);

// Depth of `u`, or 0 for a null handle.
//
// # Safety
// `u` must come from this library or be null.
size_t bt_tree_depth(const struct BtTree *u);

// `L^p` part, gradient part and their sum; any output may be null.
//
// # Safety
// Handles must come from this library; non-null outputs must be writable.
enum BtStatus bt_newtonian_norm(const struct BtTree *u,
                                const struct BtParams *params,
                                double *lp_part,
                                double *gradient_part,
                                double *total);

// # Safety
// `u` must come from this library (or be null) and not be used again.
void bt_tree_free(struct BtTree *u);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BESOV_TREE_H */
