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

// SPARQL text generation for the curation steps. Every builder is a pure
// function of its arguments: identical inputs give byte-identical text.

#ifndef DLAMA_CORE_SPARQL_H_
#define DLAMA_CORE_SPARQL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/ids.h"
#include "core/regions.h"

namespace dlama {

enum class QueryKind {
  kHarvest,
  kAllObjects,
  kLabels,
  kSubclassEdges,
  kTerritoryChain,
  kArticleLinks,
};

std::string_view to_string(QueryKind kind);

inline constexpr int kDefaultPageSize = 2000;
inline constexpr int kMaxPageSize = 10000;
// Upper bound on ids in one VALUES block; callers chunk larger inputs.
inline constexpr size_t kMaxValuesPerQuery = 10000;

// 1-based page of a LIMIT/OFFSET paginated query.
struct Page {
  int number = 1;
  int size = kDefaultPageSize;

  int64_t offset() const { return static_cast<int64_t>(number - 1) * size; }
};

struct SparqlQuery {
  std::string text;
  QueryKind kind = QueryKind::kHarvest;
  int page_size = kDefaultPageSize;
  int64_t offset = 0;
};

// Step 1: (subject, object, article) rows for subjects of the region.
SparqlQuery build_harvest_query(const PredicateSpec& spec, const Region& region,
                                Page page = {});

// Step 3: every object of `predicate` for the given subjects, with no
// restriction on the object side.
SparqlQuery build_all_objects_query(std::span<const EntityId> subject_ids,
                                    const PropertyId& predicate, Page page = {});

// Step 4: (entity, language, label) rows for the requested languages.
SparqlQuery build_labels_query(std::span<const EntityId> entity_ids,
                               std::span<const std::string> languages, Page page = {});

// (child, parent) P279 edges reachable upward from the given objects.
SparqlQuery build_subclass_edges_query(std::span<const EntityId> object_ids,
                                       Page page = {});

// (place, ancestor) pairs over transitive P131 for birth/death places.
SparqlQuery build_territory_chain_query(std::span<const EntityId> place_ids,
                                        Page page = {});

// (subject, article) rows restricted to the given Wikipedia sites.
SparqlQuery build_article_links_query(std::span<const EntityId> subject_ids,
                                      std::span<const std::string> sites, Page page = {});

// Minimal grammar check: SELECT and WHERE present, braces and parentheses
// balanced outside of string literals and IRIs. Returns one message per
// problem found.
std::vector<std::string> check_query_grammar(std::string_view text);

// Grammar check plus the page-size limit.
std::vector<std::string> validate_query(const SparqlQuery& query);

}  // namespace dlama

#endif  // DLAMA_CORE_SPARQL_H_
