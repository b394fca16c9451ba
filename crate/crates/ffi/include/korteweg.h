#ifndef KORTEWEG_H
#define KORTEWEG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum KwStatus {
  KW_STATUS_OK = 0,
  KW_STATUS_NULL_POINTER = 1,
  KW_STATUS_INVALID_ARGUMENT = 2,
  KW_STATUS_INVALID_GRID = 3,
  KW_STATUS_GRID_MISMATCH = 4,
  KW_STATUS_DUMP_FORMAT = 5,
  KW_STATUS_IO = 6,
  KW_STATUS_PARSE = 7,
  KW_STATUS_CONSTRAINT_VIOLATION = 8,
  KW_STATUS_NUMERICAL = 9,
  KW_STATUS_PANIC = 10,
} KwStatus;

/**
 * Scalar field handle.
 */
typedef struct KwField KwField;

/**
 * Periodic grid handle.
 */
typedef struct KwGrid KwGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty if none. Owned by the library.
 */
const char *kw_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *kw_version(void);

/**
 * Creates a `dim`-dimensional grid (`dim` is 1 or 2). `length` may be null for `2π` periods.
 *
 * # Safety
 * `resolution` must point to `dim` values, `length` to `dim` values or be null,
 * and `out` must be a valid pointer.
 */
enum KwStatus kw_grid_new(size_t dim,
                          const size_t *resolution,
                          const double *length,
                          struct KwGrid **out);

/**
 * # Safety
 * `grid` must come from [`kw_grid_new`] and not be used afterwards; null is ignored.
 */
void kw_grid_free(struct KwGrid *grid);

/**
 * Number of samples on the grid, 0 for null.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t kw_grid_len(const struct KwGrid *grid);

/**
 * Copies `len` row-major samples into a new field on `grid`.
 *
 * # Safety
 * `grid` must be a live handle, `values` must point to `len` doubles and `out` must be valid.
 */
enum KwStatus kw_field_from_values(const struct KwGrid *grid,
                                   const double *values,
                                   size_t len,
                                   struct KwField **out);

/**
 * # Safety
 * `field` must come from this library and not be used afterwards; null is ignored.
 */
void kw_field_free(struct KwField *field);

/**
 * Number of samples, 0 for null.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t kw_field_len(const struct KwField *field);

/**
 * Copies the samples into `out`, which must hold exactly `kw_field_len` doubles.
 *
 * # Safety
 * `field` must be a live handle and `out` must point to `len` writable doubles.
 */
enum KwStatus kw_field_values(const struct KwField *field, double *out, size_t len);

/**
 * Loads component `component` of a field dump.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum KwStatus kw_field_load_dump(const char *path, size_t component, struct KwField **out);

/**
 * Writes a single-component dump.
 *
 * # Safety
 * `field` must be a live handle and `path` a NUL-terminated string.
 */
enum KwStatus kw_field_save_dump(const struct KwField *field, const char *path);

/**
 * `‖field‖_{B^s_{p,r}}`; pass `INFINITY` for `p` or `r` as needed.
 * `homogeneous` selects the mean-free flavor when nonzero.
 *
 * # Safety
 * `field` must be a live handle and `out` a valid pointer.
 */
enum KwStatus kw_besov_norm(const struct KwField *field,
                            double s,
                            double p,
                            double r,
                            int homogeneous,
                            double *out);

/**
 * Runs a scenario given as JSON text. Relative output directories resolve
 * against `output_root` (null: the environment default). On success
 * `*summary_json` receives the run summary and `*exit_code` the command-line
 * exit status (0 completed, 1 breakdown or blow-up).
 *
 * # Safety
 * String arguments must be NUL-terminated or null where allowed; out pointers must be valid.
 */
enum KwStatus kw_simulate_json(const char *config_json,
                               const char *output_root,
                               char **summary_json,
                               int *exit_code);

/**
 * Runs a verification suite (or `"all"`). `*report_json` receives the checks as
 * a JSON array and `*all_passed` is 1 iff every check passed.
 *
 * # Safety
 * `suite` must be NUL-terminated; out pointers must be valid.
 */
enum KwStatus kw_verify(const char *suite, char **report_json, int *all_passed);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void kw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KORTEWEG_H */
