#ifndef FO2_H
#define FO2_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result code of every fallible call.
 */
typedef enum Fo2Status {
  FO2_STATUS_OK = 0,
  /*
   Null pointer, bad UTF-8 or an out-of-range argument.
   */
  FO2_STATUS_INVALID_ARGUMENT = 1,
  /*
   Malformed regex, automaton, monoid table or ranker.
   */
  FO2_STATUS_PARSE = 2,
  /*
   The two decision routes disagree, or a theory check failed.
   */
  FO2_STATUS_INCONSISTENCY = 3,
  /*
   A size, work or level bound was exceeded.
   */
  FO2_STATUS_BUDGET = 4,
  /*
   A panic was caught at the boundary.
   */
  FO2_STATUS_INTERNAL = 5,
} Fo2Status;

/*
 Minimal complete DFA.
 */
typedef struct Fo2Dfa Fo2Dfa;

/*
 Finite monoid, with its generators when built from an automaton.
 */
typedef struct Fo2Monoid Fo2Monoid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer is
 valid until the next call into the library from this thread.
 */
const char *fo2_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void fo2_string_free(char *s);

/*
 Minimal DFA of a regular expression. `alphabet` may be null (letters
 used) or a string such as `"ab"`.

 # Safety
 String arguments must be null-terminated; `out` must be writable.
 */
enum Fo2Status fo2_dfa_from_regex(const char *regex, const char *alphabet, struct Fo2Dfa **out_dfa);

/*
 Parses a DFA description and minimizes it.

 # Safety
 As [`fo2_dfa_from_regex`].
 */
enum Fo2Status fo2_dfa_from_text(const char *description, struct Fo2Dfa **out_dfa);

/*
 Number of states, 0 for a null handle.

 # Safety
 `dfa` must be null or a live handle.
 */
uintptr_t fo2_dfa_num_states(const struct Fo2Dfa *dfa);

/*
 # Safety
 `dfa` must be a live handle; `word` null-terminated; `accepted` writable.
 */
enum Fo2Status fo2_dfa_accepts(const struct Fo2Dfa *dfa, const char *word, bool *accepted);

/*
 # Safety
 `dfa` must be null or a handle not freed before.
 */
void fo2_dfa_free(struct Fo2Dfa *dfa);

/*
 Syntactic monoid of the automaton's language.

 # Safety
 `dfa` must be a live handle; `out_monoid` writable.
 */
enum Fo2Status fo2_monoid_from_dfa(const struct Fo2Dfa *dfa, struct Fo2Monoid **out_monoid);

/*
 Parses a monoid multiplication table.

 # Safety
 `table` null-terminated; `out_monoid` writable.
 */
enum Fo2Status fo2_monoid_from_text(const char *table, struct Fo2Monoid **out_monoid);

/*
 Number of elements, 0 for a null handle.

 # Safety
 `monoid` must be null or a live handle.
 */
uintptr_t fo2_monoid_size(const struct Fo2Monoid *monoid);

/*
 Least level `m` with the monoid in `R_{m+1}` and `L_{m+1}`, searching up
 to `max_m`. Writes -1 when the monoid is outside DA; a level above
 `max_m` is [`Fo2Status::Budget`].

 # Safety
 `monoid` must be a live handle; `level` writable.
 */
enum Fo2Status fo2_monoid_level(const struct Fo2Monoid *monoid, uintptr_t max_m, int32_t *level);

/*
 Membership in `R_m`.

 # Safety
 `monoid` must be a live handle; `member` writable.
 */
enum Fo2Status fo2_monoid_in_rm(const struct Fo2Monoid *monoid, uintptr_t m, bool *member);

/*
 Membership in `L_m`.

 # Safety
 As [`fo2_monoid_in_rm`].
 */
enum Fo2Status fo2_monoid_in_lm(const struct Fo2Monoid *monoid, uintptr_t m, bool *member);

/*
 Full analysis with both routes as a JSON document, as printed by
 `fo2 analyze --json`.

 # Safety
 `monoid` must be a live handle; `json` writable. Free the result with
 [`fo2_string_free`].
 */
enum Fo2Status fo2_monoid_analyze_json(const struct Fo2Monoid *monoid,
                                       uintptr_t max_m,
                                       char **json);

/*
 # Safety
 `monoid` must be null or a handle not freed before.
 */
void fo2_monoid_free(struct Fo2Monoid *monoid);

/*
 Evaluates a ranker such as `"Xa Yb Xc"` on a word over the symbols
 occurring in both. `position` receives the 1-based position or 0 when
 undefined.

 # Safety
 Strings null-terminated; `position` and `condensed` writable.
 */
enum Fo2Status fo2_ranker_eval(const char *word,
                               const char *ranker,
                               uintptr_t *position,
                               bool *condensed);

/*
 Parses a ranker against `alphabet` and reports its depth and block count.

 # Safety
 Strings null-terminated; `depth` and `blocks` writable.
 */
enum Fo2Status fo2_ranker_shape(const char *ranker,
                                const char *alphabet,
                                uintptr_t *depth,
                                uintptr_t *blocks);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FO2_H */
