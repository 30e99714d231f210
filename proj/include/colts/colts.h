/* C interface to the colts library. Handles are opaque; every call returns a
 * colts_status and the message of the most recent failure on the calling
 * thread is available from colts_last_error(). */
#ifndef COLTS_COLTS_H
#define COLTS_COLTS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(COLTS_BUILDING)
#    define COLTS_API __declspec(dllexport)
#  else
#    define COLTS_API __declspec(dllimport)
#  endif
#else
#  define COLTS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum colts_status {
  COLTS_OK = 0,
  COLTS_E_INVALID_ARGUMENT = 1,
  COLTS_E_FEWER_THAN_THREE_OBSERVATIONS = 2,
  COLTS_E_NON_MONOTONE_POSITIONS = 3,
  COLTS_E_FIT_DIVERGED = 4,
  COLTS_E_NON_POSITIVE_POSITION = 5,
  COLTS_E_NON_POSITIVE_SLOPE = 6,
  COLTS_E_PORT_OUT_OF_RANGE = 7,
  COLTS_E_POSITION_BEYOND_CORPUS = 8,
  COLTS_E_MISSING_TREND = 9,
  COLTS_E_WLEVEL_UNDEFINED = 10,
  COLTS_E_SCOPE_BEFORE_X = 11,
  COLTS_E_EXTERNAL_COMMAND_FAILED = 12,
  COLTS_E_UNPARSABLE_EXTERNAL_OUTPUT = 13,
  COLTS_E_POSITION_BEYOND_FOLD = 14,
  COLTS_E_NO_CLEVEL = 15,
  COLTS_E_NON_VIABLE_INFLATION = 16,
  COLTS_E_CORPUS_PARSE = 17,
  COLTS_E_IO = 18,
  COLTS_E_CONFIG = 19,
  COLTS_E_NOT_FOUND = 20, /* level or key outside the handle */
  COLTS_E_INTERNAL = 99
} colts_status;

typedef struct colts_power_fit {
  double a;
  double b;
  double c;
  double residual_norm;
} colts_power_fit;

typedef struct colts_trace colts_trace;
typedef struct colts_corpus colts_corpus;
typedef struct colts_config colts_config;

COLTS_API const char* colts_version(void);
COLTS_API const char* colts_status_name(colts_status status);
/* Message of the last failure on this thread; empty after a success. */
COLTS_API const char* colts_last_error(void);

/* Learning trends. `anchor` may be NULL. */
COLTS_API colts_status colts_fit(const uint64_t* positions, const double* accuracies, size_t count,
                                 const double* anchor, colts_power_fit* out);
COLTS_API colts_status colts_value(const colts_power_fit* fit, double x, double* out);
COLTS_API colts_status colts_slope(const colts_power_fit* fit, double x, double* out);
COLTS_API colts_status colts_mu(const colts_power_fit* fit, double x, double* out);
COLTS_API colts_status colts_step(const colts_power_fit* fit, double x, double port, uint64_t* out);
COLTS_API colts_status colts_port_of(double step, double mu, double* out);
COLTS_API colts_status colts_tune_geometric(uint64_t eta, uint64_t plevel_position, double* out);
COLTS_API colts_status colts_tune_port(double psi, uint64_t eta, uint64_t step_at_plevel,
                                       uint64_t remaining, double* out);
/* 0 when unscoped; otherwise the scope end position. */
COLTS_API colts_status colts_layer(const colts_power_fit* fit, double x, uint64_t scope_end,
                                   double* out);

/* Learning traces. */
COLTS_API colts_status colts_trace_new(colts_trace** out);
COLTS_API void colts_trace_free(colts_trace* trace);
/* The observation is kept even when its fit fails (status FIT_DIVERGED). */
COLTS_API colts_status colts_trace_extend(colts_trace* trace, uint64_t position, double accuracy);
COLTS_API colts_status colts_trace_anchor_from(colts_trace* trace, size_t omega);
COLTS_API colts_status colts_trace_levels(const colts_trace* trace, size_t* out);
COLTS_API colts_status colts_trace_trend(const colts_trace* trace, size_t level, colts_power_fit* out);
COLTS_API colts_status colts_trace_anchored_trend(const colts_trace* trace, size_t level,
                                                  colts_power_fit* out);
COLTS_API colts_status colts_trace_is_relevant(const colts_trace* trace, size_t level,
                                               double tolerance, int* out);
/* Working / prediction level, 1-based; NOT_FOUND when undefined so far. */
COLTS_API colts_status colts_trace_wlevel(const colts_trace* trace, double nu, unsigned slowdown,
                                          unsigned lookahead, size_t* out);
COLTS_API colts_status colts_trace_plevel(const colts_trace* trace, size_t omega, size_t* out);

/* Sentence corpora (`word<TAB>tag`, blank line between sentences). */
COLTS_API colts_status colts_corpus_load(const char* path, colts_corpus** out);
COLTS_API void colts_corpus_free(colts_corpus* corpus);
COLTS_API colts_status colts_corpus_sentences(const colts_corpus* corpus, size_t* out);
COLTS_API colts_status colts_corpus_words(const colts_corpus* corpus, uint64_t* out);
COLTS_API colts_status colts_corpus_align(const colts_corpus* corpus, uint64_t position, uint64_t* out);

/* Experiment configuration. */
COLTS_API colts_status colts_config_new(colts_config** out);
COLTS_API void colts_config_free(colts_config* config);
COLTS_API colts_status colts_config_set(colts_config* config, const char* key, const char* value);
/* Copies the value into `buffer` (NUL-terminated, truncated to `capacity`);
 * `required`, when not NULL, receives the full length plus one. */
COLTS_API colts_status colts_config_get(const colts_config* config, const char* key, char* buffer,
                                        size_t capacity, size_t* required);
/* Name of the index-th configuration key; NOT_FOUND past the last one. */
COLTS_API colts_status colts_config_key(size_t index, const char** out);
COLTS_API colts_status colts_config_load_file(colts_config* config, const char* path);
COLTS_API colts_status colts_config_apply_env(colts_config* config);
/* Newline-separated diagnostics go to `buffer` as for colts_config_get;
 * `count` receives their number. Returns COLTS_OK iff there are none,
 * COLTS_E_CONFIG otherwise. */
COLTS_API colts_status colts_config_validate(const colts_config* config, char* buffer,
                                             size_t capacity, size_t* required, size_t* count);

/* Runs the configured frame (and inflated variant) and writes the artifacts
 * under the configured output directory. The summary path is copied to
 * `summary_path` as for colts_config_get; both may be NULL. */
COLTS_API colts_status colts_run_experiment(const colts_config* config, char* summary_path,
                                            size_t capacity, size_t* required);

#ifdef __cplusplus
}
#endif

#endif
