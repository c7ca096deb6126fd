#ifndef DISCO_H
#define DISCO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DiscoStatus {
  DISCO_STATUS_OK = 0,
  // A required pointer argument was null.
  DISCO_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  DISCO_STATUS_INVALID_UTF8 = 2,
  // Loading finished but a definition failed to check or a test failed.
  // The output string still holds the report.
  DISCO_STATUS_LOAD_FAILED = 3,
  // The output contained an interior NUL byte.
  DISCO_STATUS_INVALID_OUTPUT = 4,
  // The interpreter panicked; the session should be freed.
  DISCO_STATUS_PANIC = 5,
} DiscoStatus;

// Opaque REPL session.
typedef struct DiscoSession DiscoSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Create a session. With `offline` set, OEIS lookups never touch the
// network. Never returns null.
struct DiscoSession *disco_session_new(bool offline);

// # Safety
// `session` must come from [`disco_session_new`] and not be used afterwards.
void disco_session_free(struct DiscoSession *session);

// Seed for randomized property testing.
//
// # Safety
// `session` must be a live handle.
enum DiscoStatus disco_session_set_seed(struct DiscoSession *session, uint64_t seed);

// Switch between unicode (the default) and ASCII output.
//
// # Safety
// `session` must be a live handle.
enum DiscoStatus disco_session_set_ascii(struct DiscoSession *session, bool ascii);

// Run one REPL line. `*out` receives the output blocks' text joined by
// newlines (empty for no output). Disco-level errors are output, not a
// failing status.
//
// # Safety
// `session` must be a live handle, `line` a NUL-terminated string and
// `out` a valid pointer.
enum DiscoStatus disco_session_exec(struct DiscoSession *session, const char *line, char **out);

// Like [`disco_session_exec`], but `*out` is a JSON array of
// `{kind, text, docURL?}` blocks.
//
// # Safety
// As for [`disco_session_exec`].
enum DiscoStatus disco_session_exec_json(struct DiscoSession *session,
                                         const char *line,
                                         char **out);

// Load one source file's contents under `name`, replacing previously
// loaded definitions, and run its tests. `*out` receives the load report.
//
// # Safety
// `session` must be a live handle, `name` and `contents` NUL-terminated
// strings and `out` a valid pointer.
enum DiscoStatus disco_session_load(struct DiscoSession *session,
                                    const char *name,
                                    const char *contents,
                                    char **out);

// Release a string returned through an `out` parameter.
//
// # Safety
// `s` must come from this library and not be freed twice.
void disco_string_free(char *s);

// Message for the most recent failure on this thread, or null. Valid
// until the next failing call on the same thread.
const char *disco_last_error(void);

// Library version as a static string.
const char *disco_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DISCO_H */
