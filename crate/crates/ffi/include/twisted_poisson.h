#ifndef TWISTED_POISSON_H
#define TWISTED_POISSON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; `TP_INPUT` and `TP_COMPUTATION` mirror CLI exit codes 2 and 3.
 */
typedef enum TpStatus {
  TP_OK = 0,
  TP_NULL_ARGUMENT = 1,
  TP_INVALID_UTF8 = 2,
  TP_INPUT = 3,
  TP_COMPUTATION = 4,
  TP_NOT_FOUND = 5,
  TP_PANIC = 6,
} TpStatus;

typedef enum TpConvention {
  TP_CONVENTION_PAIRING = 0,
  TP_CONVENTION_NORMALIZED = 1,
} TpConvention;

/**
 * Parsed manifest.
 */
typedef struct TpManifest TpManifest;

/**
 * Verdict report.
 */
typedef struct TpReport TpReport;

/**
 * Twisted Poisson structure extracted from a manifest.
 */
typedef struct TpStructure TpStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. Owned by the library.
 */
const char *tp_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void tp_string_free(char *s);

/**
 * Parse manifest source text.
 *
 * # Safety
 * `src` is a NUL-terminated string; `out` is a writable pointer.
 */
enum TpStatus tp_manifest_parse(const char *src,
                                enum TpConvention convention,
                                struct TpManifest **out);

/**
 * Load and parse a manifest file.
 *
 * # Safety
 * `path` is a NUL-terminated string; `out` is a writable pointer.
 */
enum TpStatus tp_manifest_load(const char *path,
                               enum TpConvention convention,
                               struct TpManifest **out);

/**
 * # Safety
 * `m` is null or a handle from `tp_manifest_parse`/`tp_manifest_load` not yet freed.
 */
void tp_manifest_free(struct TpManifest *m);

/**
 * Number of named objects in the manifest; 0 for a null handle.
 *
 * # Safety
 * `m` is null or a live manifest handle.
 */
size_t tp_manifest_len(const struct TpManifest *m);

/**
 * Extract the structure `name`. Twisted symplectic entries yield their induced structure.
 *
 * # Safety
 * `m` is a live manifest handle; `name` is a NUL-terminated string; `out` is writable.
 */
enum TpStatus tp_manifest_structure(const struct TpManifest *m,
                                    const char *name,
                                    struct TpStructure **out);

/**
 * # Safety
 * `s` is null or a structure handle not yet freed.
 */
void tp_structure_free(struct TpStructure *s);

/**
 * Dimension of the structure's chart; 0 for a null handle.
 *
 * # Safety
 * `s` is null or a live structure handle.
 */
size_t tp_structure_dim(const struct TpStructure *s);

/**
 * Structural identities of the structure as a report.
 *
 * # Safety
 * `s` is a live structure handle; `out` is writable.
 */
enum TpStatus tp_structure_verify(const struct TpStructure *s, struct TpReport **out);

/**
 * Bracket `{f, g}` in canonical text form; free the result with `tp_string_free`.
 *
 * # Safety
 * `s` is a live structure handle; `f`, `g` are NUL-terminated strings; `out` is writable.
 */
enum TpStatus tp_structure_bracket(const struct TpStructure *s,
                                   const char *f,
                                   const char *g,
                                   char **out);

/**
 * # Safety
 * `r` is null or a report handle not yet freed.
 */
void tp_report_free(struct TpReport *r);

/**
 * True when the report has no FAIL entry; false for a null handle.
 *
 * # Safety
 * `r` is null or a live report handle.
 */
bool tp_report_passed(const struct TpReport *r);

/**
 * `path = VERDICT` rendering of the report; free with `tp_string_free`. Null for a null handle.
 *
 * # Safety
 * `r` is null or a live report handle.
 */
char *tp_report_machine(const struct TpReport *r);

/**
 * Run the command-line front end in-process. `argv[0]` is the program name.
 *
 * Returns the CLI exit code, or -1 when an argument is null or not UTF-8. When non-null,
 * `out_text`/`err_text` receive the captured streams (free with `tp_string_free`).
 *
 * # Safety
 * `argv` points to `argc` NUL-terminated strings; the out pointers are null or writable.
 */
int tp_run(int argc, const char *const *argv, char **out_text, char **err_text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWISTED_POISSON_H */
