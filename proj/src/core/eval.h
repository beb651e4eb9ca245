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

// Prompt rendering and the evaluation metrics.

#ifndef DLAMA_CORE_EVAL_H_
#define DLAMA_CORE_EVAL_H_

#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/harvest_client.h"
#include "core/ids.h"
#include "core/pipeline.h"
#include "core/regions.h"
#include "core/store.h"

namespace dlama {

inline constexpr std::string_view kMaskMarker = "[MASK]";

// Substitutes the subject label for `[X]` and `mask` for `[Y]` in one pass
// over the pattern; substituted text is never re-scanned. Question mode uses
// the template's question pattern and has no `[Y]`.
std::string render_prompt(const PromptTemplate& t, const FactTriple& triple,
                          std::string_view language, PromptMode mode = PromptMode::kCloze,
                          std::string_view mask = kMaskMarker);

// Prompt file for every triple of `set`.
PromptFile render_prompt_file(const PromptTemplate& t, const BenchmarkSet& set,
                              std::string_view language, PromptMode mode,
                              std::string_view mask = kMaskMarker);

struct CandidateSet {
  PropertyId predicate_id;
  std::string language;
  std::vector<std::string> labels;  // unique, ascending byte order
};

// Union of every object label of the given sets (one predicate).
CandidateSet build_candidate_set(std::span<const BenchmarkSet> sets, std::string_view language);

class LabelUnifier {
 public:
  LabelUnifier() = default;
  // Throws ConfigError when the mapping is not idempotent, i.e. some
  // canonical label is itself mapped elsewhere.
  explicit LabelUnifier(std::map<std::string, std::string> mapping);

  // Muslim/Islam, Christian/Christianity, Hindu/Hinduism.
  static LabelUnifier builtin_religions();
  // `surface<TAB>canonical` lines; `#` comments and blank lines ignored.
  static LabelUnifier from_tsv(std::string_view text);

  // Adds `other`'s entries; the result must stay idempotent.
  LabelUnifier merged(const LabelUnifier& other) const;

  const std::string& unify(const std::string& label) const;
  const std::map<std::string, std::string>& mapping() const { return mapping_; }

 private:
  std::map<std::string, std::string> mapping_;
};

struct PredicateStats {
  int64_t n = 0;
  int64_t hits = 0;
  double p_at_1 = 0.0;
  std::optional<double> entropy;

  friend bool operator==(const PredicateStats&, const PredicateStats&) = default;
};

struct RegionStats {
  int64_t n = 0;
  int64_t hits = 0;
  double p_at_1 = 0.0;

  friend bool operator==(const RegionStats&, const RegionStats&) = default;
};

struct DistributionEntry {
  std::string label;
  int64_t correct = 0;
  int64_t wrong = 0;

  friend bool operator==(const DistributionEntry&, const DistributionEntry&) = default;
};

struct EvalReport {
  std::string model_id;
  std::string prompt_language;
  double p_at_1 = 0.0;
  int64_t n_triples = 0;
  int64_t n_hits = 0;
  // Gold triples that have no prediction record.
  int64_t n_unpredicted = 0;
  std::map<PropertyId, PredicateStats> per_predicate;
  std::map<std::string, RegionStats> per_region;
  // Predicted (unified) label counts per predicate, by descending total then
  // label.
  std::map<PropertyId, std::vector<DistributionEntry>> distribution;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct QaOptions {
  bool ignore_case = false;
};

struct EvalOptions {
  const LabelUnifier* unifier = nullptr;
  QaOptions qa;
  // Language used to break entropy ties; defaults to "en" when present.
  std::string reference_language;
};

// Every record must reference a gold triple; orphans raise InvalidArgument.
// A record matching several gold triples (same subject in two regions) is
// scored against each.
EvalReport compute_p_at_1(const PredictionFile& predictions, std::span<const BenchmarkSet> gold,
                          const EvalOptions& options = {});

// Shannon entropy (bits) of the per-triple representative objects. The
// representative is the triple's object that occurs most often across the
// whole set; ties go to the smaller label in the reference language (unified
// when a unifier is given), then to the smaller id. Throws InvalidArgument
// for an empty set.
double compute_entropy(std::span<const FactTriple> triples, const EvalOptions& options = {});
double compute_entropy(const BenchmarkSet& set, const EvalOptions& options = {});

// Representative object per triple, as used by compute_entropy.
std::vector<EntityId> representative_objects(std::span<const FactTriple> triples,
                                             const EvalOptions& options = {});

// NFC plus whitespace collapsing, and case folding when requested.
std::string normalize_for_qa(std::string_view text, const QaOptions& options = {});

// True iff some non-empty gold label is a substring of the response after
// normalizing both sides.
bool score_qa_response(std::string_view response, std::span<const std::string> gold_labels,
                       const QaOptions& options = {});

std::string serialize_eval_report(const EvalReport& report);
EvalReport parse_eval_report(std::string_view text);
EvalReport read_eval_report(const std::filesystem::path& path);
std::string format_eval_table(const EvalReport& report);
// predicate_id,label,correct_count,wrong_count
std::string distribution_csv(const EvalReport& report);

// Bias audit over external triple dumps.

struct DumpTriple {
  EntityId subject_id;
  PropertyId predicate_id;
  EntityId object_id;
};

// Reads LAMA-style JSON lines (`sub_uri`, `predicate_id`, `obj_uri`) or
// tab-separated `subject predicate object` lines; the format is detected per
// line. Throws ParseError with the line number on malformed input.
void read_triple_dump(std::istream& in, const std::function<void(const DumpTriple&)>& sink);
std::vector<DumpTriple> read_triple_dump(const std::filesystem::path& path);

class CountryResolver {
 public:
  virtual ~CountryResolver() = default;
  // Countries of citizenship or location per entity. Entities that cannot be
  // resolved are left out of the result.
  virtual std::map<EntityId, std::vector<EntityId>> resolve(std::span<const EntityId> ids) = 0;
};

// Fixed table read from `entity<TAB>country[,country...]` lines.
class TableCountryResolver : public CountryResolver {
 public:
  explicit TableCountryResolver(std::map<EntityId, std::vector<EntityId>> table);
  static TableCountryResolver from_tsv(std::string_view text);
  std::map<EntityId, std::vector<EntityId>> resolve(std::span<const EntityId> ids) override;

 private:
  std::map<EntityId, std::vector<EntityId>> table_;
};

// Asks the endpoint for P27 and P17 values, memoizing answers.
class ClientCountryResolver : public CountryResolver {
 public:
  explicit ClientCountryResolver(HarvestClient& client, int page_size = kDefaultPageSize);
  std::map<EntityId, std::vector<EntityId>> resolve(std::span<const EntityId> ids) override;

 private:
  HarvestClient& client_;
  int page_size_;
  std::map<EntityId, std::vector<EntityId>> memo_;
  std::set<EntityId> queried_;
};

struct BiasCounts {
  int64_t western = 0;
  int64_t rest = 0;
  int64_t unknown = 0;

  int64_t total() const { return western + rest + unknown; }
  double western_pct() const;
  double rest_pct() const;
  double unknown_pct() const;

  friend bool operator==(const BiasCounts&, const BiasCounts&) = default;
};

struct BiasReport {
  std::map<PropertyId, BiasCounts> per_predicate;
  BiasCounts total;
};

// A triple counts as Western when its subject or object is a Western
// country or resolves to one; as rest when some side resolves but none to
// the West; unknown otherwise.
BiasReport bias_audit(std::span<const DumpTriple> triples, const Region& western,
                      CountryResolver& resolver);

std::string serialize_bias_report(const BiasReport& report);
std::string format_bias_table(const BiasReport& report);

// Share of benchmark triples found in a reference dump, matching on
// (subject, predicate, any gold object).
struct OverlapCounts {
  int64_t n = 0;
  int64_t found = 0;
  double pct() const { return n == 0 ? 0.0 : 100.0 * static_cast<double>(found) / n; }
};

struct OverlapReport {
  std::map<std::string, OverlapCounts> per_set;  // benchmark file name
  OverlapCounts total;
};

OverlapReport overlap_with_dump(std::span<const BenchmarkSet> sets,
                                std::span<const DumpTriple> dump);
std::string serialize_overlap_report(const OverlapReport& report);

struct ComparisonCell {
  std::string scope;  // "overall", "predicate" or "region"
  std::string key;
  double raw = 0.0;
  double augmented = 0.0;
  double delta = 0.0;
  // augmented < raw
  bool flagged = false;
};

struct Comparison {
  std::vector<ComparisonCell> cells;
  bool any_flagged() const;
};

// Cells present in both reports; predicate and region cells in key order.
Comparison compare_raw_vs_augmented(const EvalReport& raw, const EvalReport& augmented);
std::string serialize_comparison(const Comparison& c);
std::string format_comparison_table(const Comparison& c);

}  // namespace dlama

#endif  // DLAMA_CORE_EVAL_H_
