#ifndef PDO_H
#define PDO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PdoStatus {
  PDO_STATUS_OK = 0,
  PDO_STATUS_NULL_POINTER = 1,
  PDO_STATUS_INVALID_ARGUMENT = 2,
  PDO_STATUS_OUT_OF_RANGE = 3,
  PDO_STATUS_NOT_INVERTIBLE = 4,
  PDO_STATUS_BUFFER_TOO_SMALL = 5,
  PDO_STATUS_PANIC = 6,
} PdoStatus;

// Polynomial in xi with big integer coefficients.
typedef struct PdoPoly PdoPoly;

// Table of PDO(0), ..., PDO(len - 1).
typedef struct PdoTable PdoTable;

// Outcome of [`pdo_verify`].
typedef struct PdoVerifyResult {
  bool passed;
  uint64_t checked_count;
  // Meaningful only when `passed` is false.
  uint64_t counterexample_n;
} PdoVerifyResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *pdo_status_str(enum PdoStatus status);

// Message of the last failed call on this thread (empty if none).
//
// # Safety
// `buf` must point to `cap` writable bytes; `out_len` must be valid.
enum PdoStatus pdo_last_error_message(char *buf, size_t cap, size_t *out_len);

// Builds PDO(0), ..., PDO(order - 1).
//
// # Safety
// `out_table` must be a valid pointer; the handle it receives must be released
// with [`pdo_table_free`].
enum PdoStatus pdo_table_new(size_t order, struct PdoTable **out_table);

// # Safety
// `table` must be null or a handle from [`pdo_table_new`] not yet freed.
void pdo_table_free(struct PdoTable *table);

// # Safety
// `table` must be a live handle; `out_len` must be valid.
enum PdoStatus pdo_table_len(const struct PdoTable *table, size_t *out_len);

// PDO(n) as a decimal string.
//
// # Safety
// `table` must be a live handle, `buf` must point to `cap` writable bytes
// and `out_len` must be valid.
enum PdoStatus pdo_table_value_str(const struct PdoTable *table,
                                   size_t n,
                                   char *buf,
                                   size_t cap,
                                   size_t *out_len);

// PDO(n) when it fits in 64 bits, otherwise `OutOfRange`.
//
// # Safety
// `table` must be a live handle; `out_value` must be valid.
enum PdoStatus pdo_table_value_u64(const struct PdoTable *table, size_t n, uint64_t *out_value);

// Checks `PDO(lhs_stride n + lhs_offset) == PDO(rhs_stride n) (mod modulus)`
// for `start <= n < end`. `rhs_stride = 0` compares with 0 instead.
//
// # Safety
// `table` must be a live handle; `out_result` must be valid.
enum PdoStatus pdo_verify(const struct PdoTable *table,
                          uint64_t lhs_stride,
                          uint64_t lhs_offset,
                          uint64_t rhs_stride,
                          uint64_t modulus,
                          uint64_t start,
                          uint64_t end,
                          struct PdoVerifyResult *out_result);

// Least xi-degree of `Phi_k`.
//
// # Safety
// `out_tau` must be valid.
enum PdoStatus pdo_tau(uint32_t k, uint64_t *out_tau);

// # Safety
// `out_poly` must be valid; release the handle with [`pdo_poly_free`].
enum PdoStatus pdo_poly_zeta(uint32_t i, uint32_t j, struct PdoPoly **out_poly);

// # Safety
// As [`pdo_poly_zeta`].
enum PdoStatus pdo_poly_lambda(uint32_t k, struct PdoPoly **out_poly);

// # Safety
// As [`pdo_poly_zeta`].
enum PdoStatus pdo_poly_phi(uint32_t k, struct PdoPoly **out_poly);

// # Safety
// As [`pdo_poly_zeta`].
enum PdoStatus pdo_poly_gamma6(struct PdoPoly **out_poly);

// # Safety
// `poly` must be null or a live handle.
void pdo_poly_free(struct PdoPoly *poly);

// Number of nonzero terms.
//
// # Safety
// `poly` must be a live handle; `out_count` must be valid.
enum PdoStatus pdo_poly_term_count(const struct PdoPoly *poly, size_t *out_count);

// Top degree; `OutOfRange` for the zero polynomial.
//
// # Safety
// `poly` must be a live handle; `out_degree` must be valid.
enum PdoStatus pdo_poly_degree(const struct PdoPoly *poly, uint32_t *out_degree);

// The `index`-th nonzero term in ascending degree.
//
// # Safety
// `poly` must be a live handle, `out_degree` and `out_len` valid, and
// `buf` must point to `cap` writable bytes.
enum PdoStatus pdo_poly_term(const struct PdoPoly *poly,
                             size_t index,
                             uint32_t *out_degree,
                             char *buf,
                             size_t cap,
                             size_t *out_len);

// Coefficient of `xi^degree` (possibly "0").
//
// # Safety
// As [`pdo_poly_term`].
enum PdoStatus pdo_poly_coeff_str(const struct PdoPoly *poly,
                                  uint32_t degree,
                                  char *buf,
                                  size_t cap,
                                  size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PDO_H */
