// Copyright 2026 The dlama Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface of the dlama library.
 *
 * Every fallible call returns a dlama_status and, on failure, stores a
 * message retrievable with dlama_last_error() on the context passed in.
 * Strings returned through `char**` out-parameters are owned by the caller
 * and released with dlama_string_free(). A context must not be used from
 * two threads at once; distinct contexts are independent.
 */

#ifndef DLAMA_DLAMA_H_
#define DLAMA_DLAMA_H_

#include <stddef.h>

#if defined(_WIN32)
#define DLAMA_API __declspec(dllexport)
#else
#define DLAMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dlama_status {
  DLAMA_OK = 0,
  DLAMA_ERR_INVALID_ARGUMENT = 1,
  DLAMA_ERR_CONFIG = 2,
  DLAMA_ERR_IO = 3,
  DLAMA_ERR_PARSE = 4,
  DLAMA_ERR_SCHEMA = 5,
  DLAMA_ERR_TRANSPORT = 6,
  DLAMA_ERR_CACHE_MISS = 7,
  DLAMA_ERR_PIPELINE = 8,
  DLAMA_ERR_INTERNAL = 9
} dlama_status;

typedef struct dlama_context dlama_context;
typedef struct dlama_pair_config dlama_pair_config;
typedef struct dlama_build_options dlama_build_options;

typedef void (*dlama_log_fn)(const char* line, void* user_data);

DLAMA_API const char* dlama_version(void);
DLAMA_API const char* dlama_status_name(dlama_status status);
/* NULL-terminated list of bundled pair names. */
DLAMA_API const char* const* dlama_builtin_pair_names(void);
/* JSON description of the file formats. */
DLAMA_API const char* dlama_schema_text(void);
DLAMA_API void dlama_string_free(char* s);

/* Contexts hold the endpoint settings, cache location and logger. */
DLAMA_API dlama_status dlama_context_new(dlama_context** out);
DLAMA_API void dlama_context_free(dlama_context* ctx);
/* Message of the last failed call on `ctx`; empty after a success. */
DLAMA_API const char* dlama_last_error(const dlama_context* ctx);
/* Keys: sparql_endpoint, wikipedia_api_url, wikipedia_rest_url, user_agent,
 * cache_dir, offline (true/false), max_retries, min_request_interval_ms,
 * initial_backoff_ms, timeout_s, article_parallelism. */
DLAMA_API dlama_status dlama_context_set(dlama_context* ctx, const char* key, const char* value);
/* Applies DLAMA_SPARQL_ENDPOINT, DLAMA_CACHE_DIR, DLAMA_OFFLINE and
 * DLAMA_USER_AGENT. */
DLAMA_API dlama_status dlama_context_load_env(dlama_context* ctx);
DLAMA_API void dlama_context_set_logger(dlama_context* ctx, dlama_log_fn fn, void* user_data);

DLAMA_API dlama_status dlama_pair_config_load_builtin(dlama_context* ctx, const char* name,
                                                      dlama_pair_config** out);
DLAMA_API dlama_status dlama_pair_config_load_file(dlama_context* ctx, const char* path,
                                                   dlama_pair_config** out);
DLAMA_API dlama_status dlama_pair_config_to_json(dlama_context* ctx, const dlama_pair_config* cfg,
                                                 char** out_json);
DLAMA_API void dlama_pair_config_free(dlama_pair_config* cfg);

DLAMA_API dlama_status dlama_build_options_new(dlama_build_options** out);
DLAMA_API void dlama_build_options_free(dlama_build_options* opts);
/* Keys: augment (true/false), max_triples, sort (article-size|edits),
 * langs (comma list), predicates (comma list), regions (comma list),
 * page_size, concurrency, allow_partial (true/false). */
DLAMA_API dlama_status dlama_build_options_set(dlama_context* ctx, dlama_build_options* opts,
                                               const char* key, const char* value);

/* Runs the curation pipeline and writes `<pair>.<region>.<predicate>.jsonl`
 * files into `out_dir`. `out_summary_json` (optional) receives the written
 * paths, triple counts and per-slice failures. */
DLAMA_API dlama_status dlama_build(dlama_context* ctx, const dlama_pair_config* cfg,
                                   const dlama_build_options* opts, const char* out_dir,
                                   char** out_summary_json);

/* Adds superclass (and, for P19/P20, territory) objects to a benchmark file. */
DLAMA_API dlama_status dlama_augment_file(dlama_context* ctx, const char* in_path,
                                          const char* out_path);

/* Renders a prompts file for a benchmark using the pair's templates.
 * `question_mode` selects question patterns instead of cloze patterns;
 * `mask` may be NULL for the default marker. */
DLAMA_API dlama_status dlama_render_prompts(dlama_context* ctx, const dlama_pair_config* cfg,
                                            const char* benchmark_path, const char* language,
                                            int question_mode, const char* mask,
                                            char** out_jsonl);

typedef struct dlama_eval_flags {
  /* Apply the bundled religion label merges. */
  int builtin_unifier;
  /* Optional `surface<TAB>canonical` file merged on top. */
  const char* unifier_path;
  /* Case-insensitive substring matching for free-text records. */
  int ignore_case;
  /* Entropy tie-break language; NULL or "" for the default. */
  const char* reference_language;
} dlama_eval_flags;

/* Any of the three outputs may be NULL. */
DLAMA_API dlama_status dlama_eval(dlama_context* ctx, const char* const* gold_paths,
                                  size_t n_gold, const char* predictions_path,
                                  const dlama_eval_flags* flags, char** out_report_json,
                                  char** out_table, char** out_distribution_csv);

/* Per-file object entropy as JSON. `flags` may be NULL. */
DLAMA_API dlama_status dlama_entropy(dlama_context* ctx, const char* const* benchmark_paths,
                                     size_t n_paths, const dlama_eval_flags* flags,
                                     char** out_json);

/* Western share of a triple dump. The Western region is `region_name` of
 * `cfg`. With `resolver_table_path` NULL, countries are resolved through the
 * endpoint. */
DLAMA_API dlama_status dlama_bias_audit(dlama_context* ctx, const char* dump_path,
                                        const dlama_pair_config* cfg, const char* region_name,
                                        const char* resolver_table_path, char** out_json,
                                        char** out_table);

DLAMA_API dlama_status dlama_overlap(dlama_context* ctx, const char* const* benchmark_paths,
                                     size_t n_paths, const char* dump_path, char** out_json);

/* `out_any_flagged` (optional) is set to 1 when some augmented cell is below
 * its raw counterpart. */
DLAMA_API dlama_status dlama_compare(dlama_context* ctx, const char* raw_report_path,
                                     const char* augmented_report_path, char** out_json,
                                     char** out_table, int* out_any_flagged);

DLAMA_API dlama_status dlama_score_qa(dlama_context* ctx, const char* response,
                                      const char* const* gold_labels, size_t n_gold,
                                      int ignore_case, int* out_match);

/* Parses and validates a benchmark file. */
DLAMA_API dlama_status dlama_benchmark_validate(dlama_context* ctx, const char* path,
                                                size_t* out_n_triples);

#ifdef __cplusplus
}
#endif

#endif /* DLAMA_DLAMA_H_ */
