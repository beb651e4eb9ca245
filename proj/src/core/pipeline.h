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

// The curation pipeline: harvest, rank, expand, label, augment.

#ifndef DLAMA_CORE_PIPELINE_H_
#define DLAMA_CORE_PIPELINE_H_

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/harvest_client.h"
#include "core/ids.h"
#include "core/regions.h"

namespace dlama {

struct RawTriple {
  EntityId subject_id;
  std::vector<EntityId> object_ids;   // sorted, unique
  std::vector<std::string> sitelinks;  // sorted, unique
  // Set by rank_and_select; empty when no linked article exists.
  std::optional<int64_t> rank_value;

  friend bool operator==(const RawTriple&, const RawTriple&) = default;
};

struct FactTriple {
  EntityId subject_id;
  std::map<std::string, std::string> subject_labels;
  std::vector<EntityId> object_ids;  // sorted, unique
  // Per language, aligned with object_ids.
  std::map<std::string, std::vector<std::string>> object_labels;
  std::string region_name;
  PropertyId predicate_id;
  std::optional<int64_t> rank_value;
  SortKey rank_source = SortKey::kArticleSize;

  friend bool operator==(const FactTriple&, const FactTriple&) = default;
};

// Checks the FactTriple invariants for `languages`; one message per problem.
std::vector<std::string> validate_fact_triple(const FactTriple& t,
                                              std::span<const std::string> languages);

// entity -> language -> label
using LabelTable = std::map<EntityId, std::map<std::string, std::string>>;

// Directed child -> parent graph. Self-edges are dropped on insertion.
class SubclassGraph {
 public:
  void add_node(const EntityId& id);
  void add_edge(const EntityId& child, const EntityId& parent);

  const std::set<EntityId>& nodes() const { return nodes_; }
  const std::set<std::pair<EntityId, EntityId>>& edges() const { return edges_; }
  std::vector<EntityId> parents(const EntityId& id) const;

  // Every node reachable through one or more edges, excluding `id` itself
  // even when it lies on a cycle. Sorted.
  std::vector<EntityId> ancestors(const EntityId& id) const;

  // Some cycle as a node path whose last element links back to the first.
  std::optional<std::vector<EntityId>> find_cycle() const;

 private:
  std::set<EntityId> nodes_;
  std::set<std::pair<EntityId, EntityId>> edges_;
  std::map<EntityId, std::vector<EntityId>> parents_;
};

// Progress sink; receives one line per event.
using ProgressFn = std::function<void(const std::string&)>;

struct StageContext {
  HarvestClient* client = nullptr;
  FetchLog* log = nullptr;
  int page_size = kDefaultPageSize;
  ProgressFn progress;
};

// Subjects per query in the id-list stages.
inline constexpr size_t kIdChunkSize = 500;

// Step 1. Pages until a short page; rows grouped by subject.
std::vector<RawTriple> harvest(const PredicateSpec& spec, const Region& region,
                               const StageContext& ctx);

// Groups harvest rows by subject, unioning objects and sitelinks.
std::vector<RawTriple> group_harvest_rows(const RowSet& rows);

struct ArticleStats {
  // URL -> rank metric (byte size or edit count).
  std::map<std::string, int64_t> value;
};

ArticleStats article_stats(const ArticleMetaResult& meta, SortKey key);

// Step 2. Descending rank value, no-article triples last, ties by ascending
// subject id, first `max_triples` kept.
std::vector<RawTriple> rank_and_select(std::vector<RawTriple> triples, const ArticleStats& stats,
                                       int max_triples);

// Step 3. Unions every statement object into each triple's object set.
std::vector<RawTriple> expand_objects(std::vector<RawTriple> selected, const PredicateSpec& spec,
                                      const StageContext& ctx);

// Labels for `ids` in `languages`; the smallest label wins when the endpoint
// returns several for one language.
LabelTable fetch_labels(std::span<const EntityId> ids, std::span<const std::string> languages,
                        const StageContext& ctx);

// Step 4 over already fetched labels. Unlabeled objects are dropped; the
// triple goes when its subject is unlabeled or no object remains.
std::vector<FactTriple> join_labels(std::span<const RawTriple> triples,
                                    std::span<const std::string> languages,
                                    const LabelTable& labels, const PredicateSpec& spec,
                                    const std::string& region_name);

// Step 5 graphs.
SubclassGraph build_subclass_graph(std::span<const EntityId> object_ids, const StageContext& ctx);
SubclassGraph build_territory_graph(std::span<const EntityId> place_ids, const StageContext& ctx);

// Adds all graph ancestors of the triple's objects that carry a label in
// every language of `labels`-backed lookup. Idempotent.
FactTriple augment_objects(const FactTriple& triple, const SubclassGraph& graph,
                           const LabelTable& labels);

inline bool uses_territory_expansion(const PropertyId& p) {
  return p.str() == "P19" || p.str() == "P20";
}

// Step 5 for a whole set: fetches graphs and ancestor labels, then augments.
std::vector<FactTriple> augment_set(std::vector<FactTriple> triples, const PropertyId& predicate,
                                    std::span<const std::string> languages,
                                    const StageContext& ctx);

struct BenchmarkProvenance {
  std::string created_at;
  std::string cache_digest;
  std::string tool_version;

  friend bool operator==(const BenchmarkProvenance&, const BenchmarkProvenance&) = default;
};

struct BenchmarkSet {
  std::string pair;
  std::string region;
  PropertyId predicate_id;
  bool augmented = true;
  std::vector<FactTriple> triples;
  BenchmarkProvenance provenance;

  friend bool operator==(const BenchmarkSet&, const BenchmarkSet&) = default;
};

std::string_view tool_version();

struct PipelineOptions {
  bool augment = true;
  // Overrides of the per-predicate settings when set.
  std::optional<int> max_triples;
  std::optional<SortKey> sort_key;
  std::vector<std::string> languages;
  // Restricts the run to these predicates; empty runs all.
  std::vector<PropertyId> predicates;
  // Restricts the run to these regions; empty runs both.
  std::vector<std::string> regions;
  int page_size = kDefaultPageSize;
  int concurrency = 2;
  bool allow_partial = false;
  ProgressFn progress;
};

// One (region, predicate) slice end to end.
BenchmarkSet run_slice(const PairConfig& config, const Region& region, const PredicateSpec& spec,
                       HarvestClient& client, const PipelineOptions& options);

using SliceKey = std::pair<std::string, PropertyId>;

struct PairResult {
  std::map<SliceKey, BenchmarkSet> sets;
  std::map<SliceKey, std::string> failures;
};

// Runs every selected slice. Without allow_partial any failure raises a
// PipelineError listing all failed slices.
PairResult run_pair(const PairConfig& config, HarvestClient& client,
                    const PipelineOptions& options);

}  // namespace dlama

#endif  // DLAMA_CORE_PIPELINE_H_
