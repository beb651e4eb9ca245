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

#include "dlama/dlama.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "core/errors.h"
#include "core/eval.h"
#include "core/fileio.h"
#include "core/harvest_client.h"
#include "core/pipeline.h"
#include "core/regions.h"
#include "core/store.h"
#include "core/text.h"
#include "json.hpp"

struct dlama_context {
  dlama::EndpointConfig endpoint;
  std::shared_ptr<dlama::HarvestClient> client;
  std::string last_error;
  dlama_log_fn log_fn = nullptr;
  void* log_user = nullptr;
  std::mutex log_mutex;
};

struct dlama_pair_config {
  dlama::PairConfig config;
};

struct dlama_build_options {
  dlama::PipelineOptions options;
};

namespace {

using dlama::Error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void emit(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw dlama::InvalidArgument("expected a boolean, got '" + v + "'");
}

long long parse_int(const std::string& v, long long min, long long max) {
  size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw dlama::InvalidArgument("expected an integer, got '" + v + "'");
  if (n < min || n > max) {
    throw dlama::InvalidArgument("value " + v + " out of range [" + std::to_string(min) + ", " +
                                 std::to_string(max) + "]");
  }
  return n;
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  for (const auto& item : dlama::split(v, ',')) {
    std::string t = dlama::trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

// Runs `fn`, translating exceptions into status codes and the context's
// last error.
template <typename Fn>
dlama_status guarded(dlama_context* ctx, Fn&& fn) {
  auto fail = [&](dlama_status status, const char* what) {
    if (ctx) ctx->last_error = what;
    return status;
  };
  try {
    fn();
    if (ctx) ctx->last_error.clear();
    return DLAMA_OK;
  } catch (const dlama::InvalidArgument& e) {
    return fail(DLAMA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const dlama::ConfigError& e) {
    return fail(DLAMA_ERR_CONFIG, e.what());
  } catch (const dlama::IoError& e) {
    return fail(DLAMA_ERR_IO, e.what());
  } catch (const dlama::SchemaError& e) {
    return fail(DLAMA_ERR_SCHEMA, e.what());
  } catch (const dlama::ParseError& e) {
    return fail(DLAMA_ERR_PARSE, e.what());
  } catch (const dlama::TransportError& e) {
    return fail(DLAMA_ERR_TRANSPORT, e.what());
  } catch (const dlama::CacheMiss& e) {
    return fail(DLAMA_ERR_CACHE_MISS, e.what());
  } catch (const dlama::PipelineError& e) {
    return fail(DLAMA_ERR_PIPELINE, e.what());
  } catch (const std::exception& e) {
    return fail(DLAMA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DLAMA_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw dlama::InvalidArgument(what);
}

dlama::HarvestClient& client_of(dlama_context* ctx) {
  if (!ctx->client) ctx->client = dlama::make_harvest_client(ctx->endpoint);
  return *ctx->client;
}

dlama::ProgressFn progress_of(dlama_context* ctx) {
  if (!ctx->log_fn) return {};
  return [ctx](const std::string& line) {
    std::lock_guard<std::mutex> lock(ctx->log_mutex);
    ctx->log_fn(line.c_str(), ctx->log_user);
  };
}

std::vector<dlama::BenchmarkSet> read_sets(const char* const* paths, size_t n) {
  require(paths != nullptr || n == 0, "benchmark path list is null");
  require(n > 0, "at least one benchmark file is required");
  std::vector<dlama::BenchmarkSet> sets;
  for (size_t i = 0; i < n; ++i) {
    require(paths[i] != nullptr, "benchmark path is null");
    sets.push_back(dlama::read_benchmark(paths[i]));
  }
  return sets;
}

dlama::LabelUnifier unifier_from(const dlama_eval_flags* flags) {
  dlama::LabelUnifier u;
  if (!flags) return u;
  if (flags->builtin_unifier) u = dlama::LabelUnifier::builtin_religions();
  if (flags->unifier_path && *flags->unifier_path) {
    u = u.merged(dlama::LabelUnifier::from_tsv(dlama::read_file(flags->unifier_path)));
  }
  return u;
}

}  // namespace

extern "C" {

const char* dlama_version(void) { return DLAMA_VERSION_STRING; }

const char* dlama_status_name(dlama_status status) {
  switch (status) {
    case DLAMA_OK: return "ok";
    case DLAMA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DLAMA_ERR_CONFIG: return "configuration error";
    case DLAMA_ERR_IO: return "i/o error";
    case DLAMA_ERR_PARSE: return "parse error";
    case DLAMA_ERR_SCHEMA: return "schema error";
    case DLAMA_ERR_TRANSPORT: return "transport error";
    case DLAMA_ERR_CACHE_MISS: return "cache miss";
    case DLAMA_ERR_PIPELINE: return "pipeline error";
    case DLAMA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* const* dlama_builtin_pair_names(void) {
  static const char* const kNames[] = {"arab_west", "asia_west", "south_america_west", nullptr};
  return kNames;
}

const char* dlama_schema_text(void) { return dlama::schema_text().data(); }

void dlama_string_free(char* s) { std::free(s); }

dlama_status dlama_context_new(dlama_context** out) {
  if (!out) return DLAMA_ERR_INVALID_ARGUMENT;
  try {
    *out = new dlama_context();
  } catch (...) {
    return DLAMA_ERR_INTERNAL;
  }
  return DLAMA_OK;
}

void dlama_context_free(dlama_context* ctx) { delete ctx; }

const char* dlama_last_error(const dlama_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

dlama_status dlama_context_set(dlama_context* ctx, const char* key, const char* value) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(key && value, "key and value are required");
    const std::string k = key;
    const std::string v = value;
    dlama::EndpointConfig next = ctx->endpoint;
    if (k == "sparql_endpoint") {
      next.sparql_url = v;
    } else if (k == "wikipedia_api_url") {
      next.wikipedia_api_url_pattern = v;
    } else if (k == "wikipedia_rest_url") {
      next.wikipedia_rest_url_pattern = v;
    } else if (k == "user_agent") {
      next.user_agent = v;
    } else if (k == "cache_dir") {
      next.cache_dir = v;
    } else if (k == "offline") {
      next.offline = parse_bool(v);
    } else if (k == "max_retries") {
      next.max_retries = static_cast<int>(parse_int(v, 0, 20));
    } else if (k == "min_request_interval_ms") {
      next.min_request_interval = std::chrono::milliseconds(parse_int(v, 0, 600000));
    } else if (k == "initial_backoff_ms") {
      next.initial_backoff = std::chrono::milliseconds(parse_int(v, 0, 600000));
    } else if (k == "timeout_s") {
      next.request_timeout = std::chrono::seconds(parse_int(v, 1, 3600));
    } else if (k == "article_parallelism") {
      next.article_parallelism = static_cast<int>(parse_int(v, 1, 64));
    } else {
      throw dlama::InvalidArgument("unknown context setting '" + k + "'");
    }
    if (auto problems = next.validate(); !problems.empty()) throw dlama::ConfigError(problems.front());
    ctx->endpoint = std::move(next);
    ctx->client.reset();
  });
}

dlama_status dlama_context_load_env(dlama_context* ctx) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    dlama::EndpointConfig next = dlama::EndpointConfig::from_env(ctx->endpoint);
    if (auto problems = next.validate(); !problems.empty()) throw dlama::ConfigError(problems.front());
    ctx->endpoint = std::move(next);
    ctx->client.reset();
  });
}

void dlama_context_set_logger(dlama_context* ctx, dlama_log_fn fn, void* user_data) {
  if (!ctx) return;
  ctx->log_fn = fn;
  ctx->log_user = user_data;
}

dlama_status dlama_pair_config_load_builtin(dlama_context* ctx, const char* name,
                                            dlama_pair_config** out) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(name && out, "name and out are required");
    *out = new dlama_pair_config{dlama::load_builtin_config(name)};
  });
}

dlama_status dlama_pair_config_load_file(dlama_context* ctx, const char* path,
                                         dlama_pair_config** out) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(path && out, "path and out are required");
    *out = new dlama_pair_config{dlama::load_pair_config_file(path)};
  });
}

dlama_status dlama_pair_config_to_json(dlama_context* ctx, const dlama_pair_config* cfg,
                                       char** out_json) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(cfg && out_json, "cfg and out_json are required");
    emit(out_json, dlama::serialize_pair_config(cfg->config));
  });
}

void dlama_pair_config_free(dlama_pair_config* cfg) { delete cfg; }

dlama_status dlama_build_options_new(dlama_build_options** out) {
  if (!out) return DLAMA_ERR_INVALID_ARGUMENT;
  try {
    *out = new dlama_build_options();
  } catch (...) {
    return DLAMA_ERR_INTERNAL;
  }
  return DLAMA_OK;
}

void dlama_build_options_free(dlama_build_options* opts) { delete opts; }

dlama_status dlama_build_options_set(dlama_context* ctx, dlama_build_options* opts,
                                     const char* key, const char* value) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(opts && key && value, "options, key and value are required");
    const std::string k = key;
    const std::string v = value;
    auto& o = opts->options;
    if (k == "augment") {
      o.augment = parse_bool(v);
    } else if (k == "max_triples") {
      o.max_triples = static_cast<int>(parse_int(v, 1, 100000000));
    } else if (k == "sort") {
      auto key_value = dlama::parse_sort_key(v);
      if (!key_value) throw dlama::InvalidArgument("unknown sort key '" + v + "' (article-size|edits)");
      o.sort_key = *key_value;
    } else if (k == "langs") {
      o.languages = parse_list(v);
      require(!o.languages.empty(), "langs must list at least one language");
    } else if (k == "predicates") {
      o.predicates.clear();
      for (const auto& p : parse_list(v)) o.predicates.push_back(dlama::PropertyId::parse(p));
    } else if (k == "regions") {
      o.regions = parse_list(v);
    } else if (k == "page_size") {
      o.page_size = static_cast<int>(parse_int(v, 1, dlama::kMaxPageSize));
    } else if (k == "concurrency") {
      o.concurrency = static_cast<int>(parse_int(v, 1, 64));
    } else if (k == "allow_partial") {
      o.allow_partial = parse_bool(v);
    } else {
      throw dlama::InvalidArgument("unknown build option '" + k + "'");
    }
  });
}

dlama_status dlama_build(dlama_context* ctx, const dlama_pair_config* cfg,
                         const dlama_build_options* opts, const char* out_dir,
                         char** out_summary_json) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(cfg && out_dir, "cfg and out_dir are required");
    dlama::PipelineOptions options = opts ? opts->options : dlama::PipelineOptions{};
    options.progress = progress_of(ctx);
    dlama::PairResult result = dlama::run_pair(cfg->config, client_of(ctx), options);
    nlohmann::ordered_json summary;
    summary["pair"] = cfg->config.name;
    summary["augmented"] = options.augment;
    nlohmann::ordered_json written = nlohmann::ordered_json::array();
    for (const auto& [key, set] : result.sets) {
      const auto path = std::filesystem::path(out_dir) / dlama::benchmark_file_name(set);
      dlama::write_benchmark(path, set);
      nlohmann::ordered_json e;
      e["path"] = path.string();
      e["region"] = key.first;
      e["predicate_id"] = key.second.str();
      e["n_triples"] = set.triples.size();
      written.push_back(std::move(e));
    }
    summary["written"] = std::move(written);
    nlohmann::ordered_json failures = nlohmann::ordered_json::object();
    for (const auto& [key, why] : result.failures) failures[key.first + "/" + key.second.str()] = why;
    summary["failures"] = std::move(failures);
    emit(out_summary_json, summary.dump(2) + "\n");
  });
}

dlama_status dlama_augment_file(dlama_context* ctx, const char* in_path, const char* out_path) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(in_path && out_path, "in_path and out_path are required");
    dlama::BenchmarkSet set = dlama::read_benchmark(in_path);
    const std::vector<std::string> languages = dlama::benchmark_languages(set);
    dlama::FetchLog log;
    dlama::StageContext stage{&client_of(ctx), &log, dlama::kDefaultPageSize, progress_of(ctx)};
    set.triples = dlama::augment_set(std::move(set.triples), set.predicate_id, languages, stage);
    set.augmented = true;
    set.provenance.created_at = std::max(set.provenance.created_at, log.latest_fetched_at());
    if (log.size() > 0) {
      set.provenance.cache_digest =
          set.provenance.cache_digest.empty()
              ? log.digest()
              : dlama::ResponseCache::key_for(set.provenance.cache_digest + "+" + log.digest());
    }
    set.provenance.tool_version = std::string(dlama::tool_version());
    dlama::write_benchmark(out_path, set);
  });
}

dlama_status dlama_render_prompts(dlama_context* ctx, const dlama_pair_config* cfg,
                                  const char* benchmark_path, const char* language,
                                  int question_mode, const char* mask, char** out_jsonl) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(cfg && benchmark_path && language && out_jsonl,
            "cfg, benchmark_path, language and out_jsonl are required");
    dlama::BenchmarkSet set = dlama::read_benchmark(benchmark_path);
    const dlama::PromptTemplate* t = cfg->config.find_template(set.predicate_id, language);
    if (!t) {
      throw dlama::ConfigError("pair " + cfg->config.name + " has no " + language +
                               " template for " + set.predicate_id.str());
    }
    const auto mode = question_mode ? dlama::PromptMode::kQuestion : dlama::PromptMode::kCloze;
    emit(out_jsonl, dlama::serialize_prompts(dlama::render_prompt_file(
                        *t, set, language, mode, mask ? mask : dlama::kMaskMarker)));
  });
}

dlama_status dlama_eval(dlama_context* ctx, const char* const* gold_paths, size_t n_gold,
                        const char* predictions_path, const dlama_eval_flags* flags,
                        char** out_report_json, char** out_table, char** out_distribution_csv) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(predictions_path != nullptr, "predictions_path is required");
    auto gold = read_sets(gold_paths, n_gold);
    dlama::PredictionFile predictions = dlama::read_predictions(predictions_path);
    dlama::LabelUnifier unifier = unifier_from(flags);
    dlama::EvalOptions options;
    options.unifier = &unifier;
    if (flags) {
      options.qa.ignore_case = flags->ignore_case != 0;
      if (flags->reference_language) options.reference_language = flags->reference_language;
    }
    dlama::EvalReport report = dlama::compute_p_at_1(predictions, gold, options);
    emit(out_report_json, dlama::serialize_eval_report(report));
    emit(out_table, dlama::format_eval_table(report));
    emit(out_distribution_csv, dlama::distribution_csv(report));
  });
}

dlama_status dlama_entropy(dlama_context* ctx, const char* const* benchmark_paths, size_t n_paths,
                           const dlama_eval_flags* flags, char** out_json) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(out_json != nullptr, "out_json is required");
    auto sets = read_sets(benchmark_paths, n_paths);
    dlama::LabelUnifier unifier = unifier_from(flags);
    dlama::EvalOptions options;
    options.unifier = &unifier;
    if (flags && flags->reference_language) options.reference_language = flags->reference_language;
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (size_t i = 0; i < sets.size(); ++i) {
      nlohmann::ordered_json e;
      e["path"] = benchmark_paths[i];
      e["pair"] = sets[i].pair;
      e["region"] = sets[i].region;
      e["predicate_id"] = sets[i].predicate_id.str();
      e["n_triples"] = sets[i].triples.size();
      e["entropy"] = sets[i].triples.empty() ? nlohmann::ordered_json(nullptr)
                                             : nlohmann::ordered_json(dlama::compute_entropy(sets[i], options));
      j.push_back(std::move(e));
    }
    emit(out_json, j.dump(2) + "\n");
  });
}

dlama_status dlama_bias_audit(dlama_context* ctx, const char* dump_path,
                              const dlama_pair_config* cfg, const char* region_name,
                              const char* resolver_table_path, char** out_json,
                              char** out_table) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(dump_path && cfg && region_name, "dump_path, cfg and region_name are required");
    const dlama::Region* west = cfg->config.find_region(region_name);
    if (!west) {
      throw dlama::InvalidArgument("pair " + cfg->config.name + " has no region '" +
                                   region_name + "'");
    }
    const auto triples = dlama::read_triple_dump(dump_path);
    dlama::BiasReport report;
    if (resolver_table_path && *resolver_table_path) {
      auto resolver = dlama::TableCountryResolver::from_tsv(dlama::read_file(resolver_table_path));
      report = dlama::bias_audit(triples, *west, resolver);
    } else {
      dlama::ClientCountryResolver resolver(client_of(ctx));
      report = dlama::bias_audit(triples, *west, resolver);
    }
    emit(out_json, dlama::serialize_bias_report(report));
    emit(out_table, dlama::format_bias_table(report));
  });
}

dlama_status dlama_overlap(dlama_context* ctx, const char* const* benchmark_paths, size_t n_paths,
                           const char* dump_path, char** out_json) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(dump_path && out_json, "dump_path and out_json are required");
    auto sets = read_sets(benchmark_paths, n_paths);
    const auto dump = dlama::read_triple_dump(dump_path);
    emit(out_json, dlama::serialize_overlap_report(dlama::overlap_with_dump(sets, dump)));
  });
}

dlama_status dlama_compare(dlama_context* ctx, const char* raw_report_path,
                           const char* augmented_report_path, char** out_json, char** out_table,
                           int* out_any_flagged) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(raw_report_path && augmented_report_path, "both report paths are required");
    const auto raw = dlama::read_eval_report(raw_report_path);
    const auto aug = dlama::read_eval_report(augmented_report_path);
    const auto comparison = dlama::compare_raw_vs_augmented(raw, aug);
    emit(out_json, dlama::serialize_comparison(comparison));
    emit(out_table, dlama::format_comparison_table(comparison));
    if (out_any_flagged) *out_any_flagged = comparison.any_flagged() ? 1 : 0;
  });
}

dlama_status dlama_score_qa(dlama_context* ctx, const char* response,
                            const char* const* gold_labels, size_t n_gold, int ignore_case,
                            int* out_match) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(response && out_match && (gold_labels || n_gold == 0),
            "response, gold_labels and out_match are required");
    std::vector<std::string> gold;
    for (size_t i = 0; i < n_gold; ++i) {
      require(gold_labels[i] != nullptr, "gold label is null");
      gold.emplace_back(gold_labels[i]);
    }
    dlama::QaOptions qa;
    qa.ignore_case = ignore_case != 0;
    *out_match = dlama::score_qa_response(response, gold, qa) ? 1 : 0;
  });
}

dlama_status dlama_benchmark_validate(dlama_context* ctx, const char* path,
                                      size_t* out_n_triples) {
  if (!ctx) return DLAMA_ERR_INVALID_ARGUMENT;
  return guarded(ctx, [&] {
    require(path != nullptr, "path is required");
    const auto set = dlama::read_benchmark(path);
    if (out_n_triples) *out_n_triples = set.triples.size();
  });
}

}  // extern "C"
