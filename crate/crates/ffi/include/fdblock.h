#ifndef FDBLOCK_H
#define FDBLOCK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  /**
   * Laplacian on a `dim`-dimensional grid.
   */
  FDB_OPERATOR_LAPLACE = 0,
  /**
   * 1-D Laplacian through the rotation-based LCU circuit.
   */
  FDB_OPERATOR_LCU = 1,
  FDB_OPERATOR_DERIVATIVE = 2,
  FDB_OPERATOR_GRADIENT = 3,
  FDB_OPERATOR_DIVERGENCE = 4,
  FDB_OPERATOR_WAVE = 5,
} FdbOperator;

typedef enum {
  FDB_STATUS_OK = 0,
  FDB_STATUS_NULL_POINTER = 1,
  FDB_STATUS_INVALID_ARGUMENT = 2,
  FDB_STATUS_SIZE_LIMIT = 3,
  FDB_STATUS_BUFFER_TOO_SMALL = 4,
  FDB_STATUS_MODEL = 5,
  FDB_STATUS_INTERNAL = 6,
} FdbStatus;

/**
 * Opaque encoding handle.
 */
typedef struct FdbEncoding FdbEncoding;

typedef struct {
  size_t t_count;
  size_t clifford_count;
  size_t rotation_count;
  size_t ancilla_high_water;
  size_t qubit_count;
} FdbGateCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *fdb_last_error(void);

/**
 * Builds an encoding. `dim` is read for [`FdbOperator::Laplace`] only.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
FdbStatus fdb_encoding_new(FdbOperator op, size_t dim, size_t n, FdbEncoding **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `e` must be null or a handle from [`fdb_encoding_new`] not yet freed.
 */
void fdb_encoding_free(FdbEncoding *e);

/**
 * Sub-normalization `alpha`; NaN for a null handle.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
double fdb_encoding_alpha(const FdbEncoding *e);

/**
 * Ancilla qubit count `m`; 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
size_t fdb_encoding_ancillas(const FdbEncoding *e);

/**
 * System dimension `N_D`; 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
size_t fdb_encoding_system_dim(const FdbEncoding *e);

/**
 * Total circuit width; 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
size_t fdb_encoding_num_qubits(const FdbEncoding *e);

/**
 * Checks every reference block at tolerance `tol`.
 *
 * # Safety
 * `e` must be a live handle; `max_deviation` and `passed` must be valid or null.
 */
FdbStatus fdb_encoding_verify(const FdbEncoding *e,
                              double tol,
                              double *max_deviation,
                              bool *passed);

/**
 * Success probability for the real samples `values[0..len]`, normalized
 * internally, via circuit simulation.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
FdbStatus fdb_success_probability(const FdbEncoding *e,
                                  const double *values,
                                  size_t len,
                                  double *out);

/**
 * Copies block `(row, col)` into `buf` as row-major interleaved `(re, im)`
 * pairs, `2 N_D^2` doubles in all.
 *
 * # Safety
 * `buf` must point to `capacity` writable doubles.
 */
FdbStatus fdb_encoding_block(const FdbEncoding *e,
                             size_t row,
                             size_t col,
                             double *buf,
                             size_t capacity);

/**
 * The circuit in text form. Free the string with [`fdb_string_free`].
 *
 * # Safety
 * `out` must be writable.
 */
FdbStatus fdb_encoding_export(const FdbEncoding *e, char **out);

/**
 * Releases a string from this library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void fdb_string_free(char *s);

/**
 * Clifford+T counts for the encoding circuit.
 *
 * # Safety
 * `out` must be writable.
 */
FdbStatus fdb_encoding_resources(const FdbEncoding *e, FdbGateCounts *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FDBLOCK_H */
