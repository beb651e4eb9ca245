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

// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dlama/dlama.h"

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ContextDeleter {
  void operator()(dlama_context* c) const { dlama_context_free(c); }
};
struct ConfigDeleter {
  void operator()(dlama_pair_config* c) const { dlama_pair_config_free(c); }
};
struct OptionsDeleter {
  void operator()(dlama_build_options* o) const { dlama_build_options_free(o); }
};

using Context = std::unique_ptr<dlama_context, ContextDeleter>;
using Config = std::unique_ptr<dlama_pair_config, ConfigDeleter>;
using Options = std::unique_ptr<dlama_build_options, OptionsDeleter>;

// Owns a string returned by the library.
class Owned {
 public:
  Owned() = default;
  ~Owned() { dlama_string_free(s_); }
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  char** out() { return &s_; }
  std::string str() const { return s_ ? std::string(s_) : std::string(); }

 private:
  char* s_ = nullptr;
};

void check(dlama_context* ctx, dlama_status status) {
  if (status != DLAMA_OK) {
    throw DomainError(std::string(dlama_status_name(status)) + ": " + dlama_last_error(ctx));
  }
}

void log_to_stderr(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

void write_output(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot write " + path);
  out << data;
  if (!out.flush()) throw DomainError("cannot write " + path);
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const char* const* p = dlama_builtin_pair_names(); *p; ++p) out.emplace_back(*p);
  return out;
}

struct EndpointFlags {
  bool offline = false;
  std::string cache_dir;
  std::string endpoint;
  std::string user_agent;

  void add_to(CLI::App* app) {
    app->add_flag("--offline", offline, "Fail instead of fetching when a response is not cached");
    app->add_option("--cache-dir", cache_dir, "Response cache directory");
    app->add_option("--endpoint", endpoint, "SPARQL endpoint URL");
    app->add_option("--user-agent", user_agent, "HTTP User-Agent");
  }

  // Environment first, flags on top.
  void apply(dlama_context* ctx) const {
    check(ctx, dlama_context_load_env(ctx));
    if (offline) check(ctx, dlama_context_set(ctx, "offline", "true"));
    if (!cache_dir.empty()) check(ctx, dlama_context_set(ctx, "cache_dir", cache_dir.c_str()));
    if (!endpoint.empty()) check(ctx, dlama_context_set(ctx, "sparql_endpoint", endpoint.c_str()));
    if (!user_agent.empty()) check(ctx, dlama_context_set(ctx, "user_agent", user_agent.c_str()));
  }
};

struct PairFlags {
  std::string pair;
  std::string config_path;

  void add_to(CLI::App* app, bool required) {
    auto* p = app->add_option("--pair", pair, "Bundled pair: arab_west, asia_west, south_america_west")
                  ->check(CLI::IsMember(builtin_names()));
    auto* c = app->add_option("--config", config_path, "Pair configuration file")
                  ->check(CLI::ExistingFile);
    p->excludes(c);
    if (required) {
      app->callback([p, c] {
        if (p->count() == 0 && c->count() == 0) throw CLI::RequiredError("--pair or --config");
      });
    }
  }

  Config load(dlama_context* ctx, const char* fallback = nullptr) const {
    dlama_pair_config* cfg = nullptr;
    if (!config_path.empty()) {
      check(ctx, dlama_pair_config_load_file(ctx, config_path.c_str(), &cfg));
    } else {
      const std::string name = pair.empty() && fallback ? fallback : pair;
      check(ctx, dlama_pair_config_load_builtin(ctx, name.c_str(), &cfg));
    }
    return Config(cfg);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curate culturally balanced factual-probing benchmarks from Wikidata and score model predictions."};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string(dlama_version()));
  bool print_schema_flag = false;
  app.add_flag("--print-schema", print_schema_flag, "Print the file-format schema and exit");

  // build
  auto* build = app.add_subcommand("build", "Run the curation pipeline for a pair");
  PairFlags build_pair;
  build_pair.add_to(build, true);
  EndpointFlags build_endpoint;
  build_endpoint.add_to(build);
  std::vector<std::string> build_predicates;
  std::vector<std::string> build_regions;
  std::string build_out;
  int max_triples = 0;
  std::string sort_key;
  std::string langs;
  bool no_augment = false;
  bool allow_partial = false;
  int page_size = 0;
  int concurrency = 0;
  build->add_option("--predicate", build_predicates, "Predicate id (repeatable or comma list)")
      ->delimiter(',');
  build->add_option("--region", build_regions, "Region name (repeatable)")->delimiter(',');
  build->add_option("--out", build_out, "Output directory")->required();
  build->add_option("--max-triples", max_triples, "Cap per (region, predicate)")
      ->check(CLI::PositiveNumber);
  build->add_option("--sort", sort_key, "Ranking signal")
      ->check(CLI::IsMember({"article-size", "edits"}));
  build->add_option("--langs", langs, "Comma-separated label languages");
  build->add_flag("--no-augment", no_augment, "Skip superclass and territory augmentation");
  build->add_flag("--allow-partial", allow_partial, "Write successful slices even if some fail");
  build->add_option("--page-size", page_size, "SPARQL page size")->check(CLI::Range(1, 10000));
  build->add_option("--concurrency", concurrency, "Slices run in parallel")->check(CLI::Range(1, 64));

  // augment
  auto* augment = app.add_subcommand("augment", "Augment raw benchmark files with superclass objects");
  EndpointFlags augment_endpoint;
  augment_endpoint.add_to(augment);
  std::vector<std::string> augment_inputs;
  std::string augment_out;
  augment->add_option("inputs", augment_inputs, "Raw benchmark files")->required()->check(CLI::ExistingFile);
  augment->add_option("--out", augment_out, "Output directory")->required();

  // prompts
  auto* prompts = app.add_subcommand("prompts", "Render prompts for a benchmark file");
  PairFlags prompts_pair;
  prompts_pair.add_to(prompts, false);
  std::string prompts_benchmark, prompts_lang, prompts_mode = "cloze", prompts_mask, prompts_out;
  prompts->add_option("--benchmark", prompts_benchmark, "Benchmark file")->required()->check(CLI::ExistingFile);
  prompts->add_option("--lang", prompts_lang, "Prompt language")->required();
  prompts->add_option("--mode", prompts_mode, "cloze or question")
      ->check(CLI::IsMember({"cloze", "question"}));
  prompts->add_option("--mask", prompts_mask, "Mask marker for cloze prompts");
  prompts->add_option("--out", prompts_out, "Output file (default standard output)");

  // eval
  auto* eval = app.add_subcommand("eval", "Compute P@1 for a prediction file");
  std::vector<std::string> eval_gold;
  std::string eval_pred, eval_unifier, eval_report, eval_csv, eval_ref_lang;
  bool eval_no_unify = false, eval_ignore_case = false;
  eval->add_option("--gold", eval_gold, "Gold benchmark file (repeatable)")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", eval_pred, "Prediction file")->required()->check(CLI::ExistingFile);
  eval->add_flag("--no-unify", eval_no_unify, "Disable the bundled religion label merges");
  eval->add_option("--unifier", eval_unifier, "Extra surface<TAB>canonical label merges")
      ->check(CLI::ExistingFile);
  eval->add_flag("--ignore-case", eval_ignore_case, "Case-insensitive matching of free-text answers");
  eval->add_option("--reference-lang", eval_ref_lang, "Entropy tie-break language");
  eval->add_option("--report", eval_report, "Write the JSON report here");
  eval->add_option("--csv", eval_csv, "Write label distribution CSV here");

  // entropy
  auto* entropy = app.add_subcommand("entropy", "Object entropy of benchmark files");
  std::vector<std::string> entropy_inputs;
  std::string entropy_ref_lang;
  bool entropy_no_unify = false;
  entropy->add_option("inputs", entropy_inputs, "Benchmark files")->required()->check(CLI::ExistingFile);
  entropy->add_option("--reference-lang", entropy_ref_lang, "Tie-break language");
  entropy->add_flag("--no-unify", entropy_no_unify, "Disable the bundled religion label merges");

  // bias-audit
  auto* bias = app.add_subcommand("bias-audit", "Western share of an external triple dump");
  PairFlags bias_pair;
  bias_pair.add_to(bias, false);
  EndpointFlags bias_endpoint;
  bias_endpoint.add_to(bias);
  std::string bias_dump, bias_region = "west", bias_table, bias_json;
  bias->add_option("--dump", bias_dump, "LAMA JSON lines or subject/predicate/object TSV")
      ->required()->check(CLI::ExistingFile);
  bias->add_option("--region", bias_region, "Name of the Western region in the pair");
  bias->add_option("--resolver-table", bias_table, "entity<TAB>countries table instead of the endpoint")
      ->check(CLI::ExistingFile);
  bias->add_option("--json", bias_json, "Write the JSON report here");

  // overlap
  auto* overlap = app.add_subcommand("overlap", "Share of benchmark triples present in a dump");
  std::vector<std::string> overlap_inputs;
  std::string overlap_dump;
  overlap->add_option("inputs", overlap_inputs, "Benchmark files")->required()->check(CLI::ExistingFile);
  overlap->add_option("--dump", overlap_dump, "Reference triple dump")->required()->check(CLI::ExistingFile);

  // compare
  auto* compare = app.add_subcommand("compare", "Raw versus augmented P@1 deltas");
  std::string compare_raw, compare_aug, compare_json;
  compare->add_option("--raw", compare_raw, "Report on the raw benchmark")->required()->check(CLI::ExistingFile);
  compare->add_option("--augmented", compare_aug, "Report on the augmented benchmark")
      ->required()->check(CLI::ExistingFile);
  compare->add_option("--json", compare_json, "Write the JSON comparison here");

  auto* schema = app.add_subcommand("print-schema", "Print the file-format schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (print_schema_flag || schema->parsed()) {
    std::cout << dlama_schema_text();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  dlama_context* raw_ctx = nullptr;
  if (dlama_context_new(&raw_ctx) != DLAMA_OK) {
    std::cerr << "dlama: cannot create context\n";
    return kExitDomain;
  }
  Context ctx(raw_ctx);
  dlama_context_set_logger(ctx.get(), log_to_stderr, nullptr);

  try {
    if (build->parsed()) {
      build_endpoint.apply(ctx.get());
      Config cfg = build_pair.load(ctx.get());
      dlama_build_options* raw_opts = nullptr;
      if (dlama_build_options_new(&raw_opts) != DLAMA_OK) throw DomainError("cannot allocate options");
      Options opts(raw_opts);
      auto set = [&](const char* key, const std::string& value) {
        check(ctx.get(), dlama_build_options_set(ctx.get(), opts.get(), key, value.c_str()));
      };
      auto join = [](const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
        return out;
      };
      if (no_augment) set("augment", "false");
      if (max_triples > 0) set("max_triples", std::to_string(max_triples));
      if (!sort_key.empty()) set("sort", sort_key);
      if (!langs.empty()) set("langs", langs);
      if (!build_predicates.empty()) set("predicates", join(build_predicates));
      if (!build_regions.empty()) set("regions", join(build_regions));
      if (page_size > 0) set("page_size", std::to_string(page_size));
      if (concurrency > 0) set("concurrency", std::to_string(concurrency));
      if (allow_partial) set("allow_partial", "true");
      Owned summary;
      check(ctx.get(), dlama_build(ctx.get(), cfg.get(), opts.get(), build_out.c_str(), summary.out()));
      std::cout << summary.str();
    } else if (augment->parsed()) {
      augment_endpoint.apply(ctx.get());
      for (const auto& in : augment_inputs) {
        const std::string name = std::filesystem::path(in).filename().string();
        const std::string out = (std::filesystem::path(augment_out) / name).string();
        check(ctx.get(), dlama_augment_file(ctx.get(), in.c_str(), out.c_str()));
        std::cout << out << "\n";
      }
    } else if (prompts->parsed()) {
      Config cfg = prompts_pair.load(ctx.get(), "arab_west");
      Owned jsonl;
      check(ctx.get(), dlama_render_prompts(ctx.get(), cfg.get(), prompts_benchmark.c_str(),
                                            prompts_lang.c_str(), prompts_mode == "question",
                                            prompts_mask.empty() ? nullptr : prompts_mask.c_str(),
                                            jsonl.out()));
      write_output(prompts_out, jsonl.str());
    } else if (eval->parsed()) {
      auto gold = c_strings(eval_gold);
      dlama_eval_flags flags{};
      flags.builtin_unifier = eval_no_unify ? 0 : 1;
      flags.unifier_path = eval_unifier.empty() ? nullptr : eval_unifier.c_str();
      flags.ignore_case = eval_ignore_case ? 1 : 0;
      flags.reference_language = eval_ref_lang.c_str();
      Owned report, table, csv;
      check(ctx.get(), dlama_eval(ctx.get(), gold.data(), gold.size(), eval_pred.c_str(), &flags,
                                  report.out(), table.out(), csv.out()));
      if (!eval_report.empty()) write_output(eval_report, report.str());
      if (!eval_csv.empty()) write_output(eval_csv, csv.str());
      std::cout << table.str();
    } else if (entropy->parsed()) {
      auto inputs = c_strings(entropy_inputs);
      dlama_eval_flags flags{};
      flags.builtin_unifier = entropy_no_unify ? 0 : 1;
      flags.reference_language = entropy_ref_lang.c_str();
      Owned json;
      check(ctx.get(), dlama_entropy(ctx.get(), inputs.data(), inputs.size(), &flags, json.out()));
      std::cout << json.str();
    } else if (bias->parsed()) {
      bias_endpoint.apply(ctx.get());
      Config cfg = bias_pair.load(ctx.get(), "arab_west");
      Owned json, table;
      check(ctx.get(), dlama_bias_audit(ctx.get(), bias_dump.c_str(), cfg.get(), bias_region.c_str(),
                                        bias_table.empty() ? nullptr : bias_table.c_str(),
                                        json.out(), table.out()));
      if (!bias_json.empty()) write_output(bias_json, json.str());
      std::cout << table.str();
    } else if (overlap->parsed()) {
      auto inputs = c_strings(overlap_inputs);
      Owned json;
      check(ctx.get(), dlama_overlap(ctx.get(), inputs.data(), inputs.size(), overlap_dump.c_str(),
                                     json.out()));
      std::cout << json.str();
    } else if (compare->parsed()) {
      Owned json, table;
      int flagged = 0;
      check(ctx.get(), dlama_compare(ctx.get(), compare_raw.c_str(), compare_aug.c_str(), json.out(),
                                     table.out(), &flagged));
      if (!compare_json.empty()) write_output(compare_json, json.str());
      std::cout << table.str();
      if (flagged) std::cerr << "dlama: warning: some augmented cells score below raw\n";
    }
  } catch (const DomainError& e) {
    std::cerr << "dlama: error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "dlama: error: " << e.what() << "\n";
    return kExitDomain;
  }
  return 0;
}
