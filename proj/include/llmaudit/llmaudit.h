#ifndef LLMAUDIT_LLMAUDIT_H
#define LLMAUDIT_LLMAUDIT_H

/* C interface to the llmaudit library.
 *
 * Every fallible call returns an llmaudit_status. On failure a message is
 * available from llmaudit_last_error() on the calling thread until the next
 * call on that thread. Strings returned through char** are owned by the
 * caller and released with llmaudit_string_free(). */

#include <stddef.h>

#if defined(_WIN32)
#define LLMAUDIT_API __declspec(dllexport)
#else
#define LLMAUDIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum llmaudit_status {
  LLMAUDIT_OK = 0,
  LLMAUDIT_ERR_INVALID_ARGUMENT = 1,
  LLMAUDIT_ERR_IO = 2,
  LLMAUDIT_ERR_PARSE = 3,
  LLMAUDIT_ERR_CACHE_MISS = 4,
  LLMAUDIT_ERR_NETWORK = 5,
  LLMAUDIT_ERR_AUTH = 6,
  LLMAUDIT_ERR_PROVIDER = 7,
  LLMAUDIT_ERR_INTERNAL = 99
} llmaudit_status;

enum { LLMAUDIT_FORMAT_JSON = 1, LLMAUDIT_FORMAT_CSV = 2 };

typedef struct llmaudit_benchmark llmaudit_benchmark;
typedef struct llmaudit_gateway llmaudit_gateway;

LLMAUDIT_API const char* llmaudit_version(void);
LLMAUDIT_API const char* llmaudit_last_error(void);
LLMAUDIT_API void llmaudit_string_free(char* s);

/* Scores in order sequence, levenshtein, jaccard, cosine, each in [0, 100]. */
LLMAUDIT_API llmaudit_status llmaudit_similarity(const char* a, const char* b, double out[4]);

LLMAUDIT_API llmaudit_status llmaudit_benchmark_load(const char* path, llmaudit_benchmark** out);
LLMAUDIT_API size_t llmaudit_benchmark_size(const llmaudit_benchmark* benchmark);
LLMAUDIT_API void llmaudit_benchmark_free(llmaudit_benchmark* benchmark);

/* mode is "record" (or "live_record") or "replay". */
LLMAUDIT_API llmaudit_status llmaudit_gateway_open(const char* providers_path,
                                                   const char* cache_path, const char* mode,
                                                   llmaudit_gateway** out);
LLMAUDIT_API llmaudit_status llmaudit_gateway_flush(llmaudit_gateway* gateway);
/* Flushes pending records before releasing. */
LLMAUDIT_API void llmaudit_gateway_free(llmaudit_gateway* gateway);

/* Run commands. options_json may be NULL for defaults. On success or on an
 * operational failure during the run, *report_json receives the report
 * document (which then carries an "error" entry); *all_passed is 1 when
 * every audited provider passed. Configuration errors leave *report_json
 * NULL. */
LLMAUDIT_API llmaudit_status llmaudit_run_consistency(llmaudit_gateway* gateway,
                                                      const llmaudit_benchmark* benchmark,
                                                      const char* options_json,
                                                      char** report_json, int* all_passed);
LLMAUDIT_API llmaudit_status llmaudit_run_self_validation(llmaudit_gateway* gateway,
                                                          const llmaudit_benchmark* benchmark,
                                                          const char* options_json,
                                                          char** report_json, int* all_passed);
LLMAUDIT_API llmaudit_status llmaudit_run_cross_validation(llmaudit_gateway* gateway,
                                                           const llmaudit_benchmark* benchmark,
                                                           const char* options_json,
                                                           char** report_json, int* all_passed);

/* Combines report documents into the tables document. */
LLMAUDIT_API llmaudit_status llmaudit_build_tables(const char* const* report_jsons, size_t count,
                                                   char** tables_json);

/* Writes <out_dir>/<stem>.json and/or one <table>.csv per tabular view. */
LLMAUDIT_API llmaudit_status llmaudit_emit(const char* report_json, const char* out_dir,
                                           const char* stem, int formats);

#ifdef __cplusplus
}
#endif

#endif
