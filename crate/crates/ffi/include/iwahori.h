#ifndef IWAHORI_H
#define IWAHORI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IwahoriStatus {
  IWAHORI_STATUS_OK = 0,
  IWAHORI_STATUS_NULL_POINTER = 1,
  IWAHORI_STATUS_INVALID_UTF8 = 2,
  // The configuration or an argument failed validation.
  IWAHORI_STATUS_CONFIG = 3,
  // A computation hit an internal limit or a broken invariant.
  IWAHORI_STATUS_INTERNAL = 4,
  IWAHORI_STATUS_RUNTIME = 5,
  IWAHORI_STATUS_PANIC = 6,
} IwahoriStatus;

typedef enum IwahoriFormat {
  IWAHORI_FORMAT_JSON = 0,
  IWAHORI_FORMAT_CSV = 1,
  IWAHORI_FORMAT_DOT = 2,
} IwahoriFormat;

// A validated job: datum, twist and optional `mu`, `J`, length bound.
typedef struct IwahoriJob IwahoriJob;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a
// success. Valid until the next call on the same thread.
const char *iwahori_last_error(void);

// Library version as a static string.
const char *iwahori_version(void);

// # Safety
// `s` must come from this library or be null.
void iwahori_string_free(char *s);

// # Safety
// `config_json` must be a NUL-terminated string; `out` must be writable.
enum IwahoriStatus iwahori_job_new(const char *config_json, struct IwahoriJob **out);

// # Safety
// `job` must come from `iwahori_job_new` or be null.
void iwahori_job_free(struct IwahoriJob *job);

// `Adm^J(mu)`; needs `mu`.
//
// # Safety
// `job` must be a live handle and `out` writable.
enum IwahoriStatus iwahori_job_adm(const struct IwahoriJob *job,
                                   enum IwahoriFormat format,
                                   char **out);

// Straight classes up to the length bound with their Hasse diagram.
//
// # Safety
// `job` must be a live handle and `out` writable.
enum IwahoriStatus iwahori_job_classes(const struct IwahoriJob *job,
                                       enum IwahoriFormat format,
                                       char **out);

// Newton point, Kottwitz invariant and straightness per element.
//
// # Safety
// `job` must be a live handle and `out` writable.
enum IwahoriStatus iwahori_job_newton(const struct IwahoriJob *job,
                                      enum IwahoriFormat format,
                                      char **out);

// `B(G, mu)`; needs `mu`.
//
// # Safety
// `job` must be a live handle and `out` writable.
enum IwahoriStatus iwahori_job_bgmu(const struct IwahoriJob *job,
                                    enum IwahoriFormat format,
                                    char **out);

// Runs the named check (`"all"`, `"A"`, `"tri"`, ...) on this job and
// writes the JSON reports. A failing check is not an error: inspect the
// summary.
//
// # Safety
// `job` must be a live handle, `which` NUL-terminated, `out` writable.
enum IwahoriStatus iwahori_job_check(const struct IwahoriJob *job, const char *which, char **out);

// Length of an element.
//
// # Safety
// `job` must be a live handle, `element_json` NUL-terminated, `out`
// writable.
enum IwahoriStatus iwahori_job_length(const struct IwahoriJob *job,
                                      const char *element_json,
                                      uint64_t *out);

// Whether `x <= y` in the Bruhat order.
//
// # Safety
// `job` must be a live handle, both elements NUL-terminated, `out`
// writable.
enum IwahoriStatus iwahori_job_bruhat_leq(const struct IwahoriJob *job,
                                          const char *x_json,
                                          const char *y_json,
                                          bool *out);

// Writes `{"newton": [..], "kappa": [..], "straight": bool}` for an
// element under the job's twist.
//
// # Safety
// `job` must be a live handle, `element_json` NUL-terminated, `out`
// writable.
enum IwahoriStatus iwahori_job_newton_point(const struct IwahoriJob *job,
                                            const char *element_json,
                                            char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IWAHORI_H */
