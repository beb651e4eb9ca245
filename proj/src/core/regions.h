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

// Declarative vocabulary of the curation framework: regions (culture
// proxies), predicate specifications, prompt templates, and the bundled pair
// configurations.

#ifndef DLAMA_CORE_REGIONS_H_
#define DLAMA_CORE_REGIONS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/ids.h"

namespace dlama {

// Closed set of entity labels a predicate's subject and object are drawn
// from.
enum class EntityClass {
  kCity,
  kContinent,
  kCountry,
  kGenre,
  kInstrument,
  kLanguage,
  kOccupation,
  kOriginalNetwork,
  kPerson,
  kPieceOfWork,
  kPlace,
  kRecordLabel,
};

std::string_view to_string(EntityClass c);
std::optional<EntityClass> parse_entity_class(std::string_view text);

// Person subjects are filtered on citizenship, place-like subjects on the
// country they are located in.
enum class RegionFilterMode { kSubjectCitizenship, kSubjectLocation };

std::string_view to_string(RegionFilterMode m);
std::optional<RegionFilterMode> parse_region_filter_mode(std::string_view text);

enum class SortKey { kArticleSize, kEditCount };

std::string_view to_string(SortKey k);
// Accepts "article_size"/"article-size" and "edit_count"/"edits".
std::optional<SortKey> parse_sort_key(std::string_view text);

struct CountryRef {
  EntityId wikidata_id;
  std::string display_name;

  friend bool operator==(const CountryRef&, const CountryRef&) = default;
};

struct Region {
  std::string name;
  std::vector<CountryRef> countries;
  std::map<EntityId, std::vector<std::string>> wikipedia_sites;

  bool contains(const EntityId& country) const;
  // Sorted union of every country's sites, English included.
  std::vector<std::string> all_sites() const;

  friend bool operator==(const Region&, const Region&) = default;
};

struct PredicateSpec {
  PropertyId predicate_id;
  std::string label;
  EntityClass subject_class = EntityClass::kPerson;
  EntityClass object_class = EntityClass::kPlace;
  RegionFilterMode region_filter_mode = RegionFilterMode::kSubjectCitizenship;
  std::vector<std::string> languages;
  int max_triples = 1000;
  SortKey sort_key = SortKey::kArticleSize;

  friend bool operator==(const PredicateSpec&, const PredicateSpec&) = default;
};

inline constexpr std::string_view kSubjectPlaceholder = "[X]";
inline constexpr std::string_view kObjectPlaceholder = "[Y]";

struct PromptTemplate {
  PropertyId predicate_id;
  std::string language;
  std::string pattern;
  std::optional<std::string> question_pattern;

  friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

struct PairConfig {
  std::string name;
  std::vector<std::string> languages;
  Region region_a;
  Region region_b;
  std::vector<PredicateSpec> predicates;
  std::vector<PromptTemplate> templates;

  const PredicateSpec* find_predicate(const PropertyId& id) const;
  const PromptTemplate* find_template(const PropertyId& id,
                                      std::string_view language) const;
  const Region* find_region(std::string_view region_name) const;

  friend bool operator==(const PairConfig&, const PairConfig&) = default;
};

// The relation predicates the bundled pairs cover, in ascending order.
const std::vector<PropertyId>& supported_predicates();

std::vector<std::string> builtin_pair_names();

// Throws ConfigError naming the valid options for an unknown pair.
PairConfig load_builtin_config(std::string_view pair_name);

PairConfig load_pair_config_file(const std::filesystem::path& path);

// Parses and validates the JSON pair-configuration format. `origin` is used
// in error messages.
PairConfig parse_pair_config(std::string_view text, std::string_view origin);
std::string serialize_pair_config(const PairConfig& config);

// Returns one message per broken template rule; empty when valid.
std::vector<std::string> validate_template(const PromptTemplate& t);

// Structural checks over a whole configuration (region invariants,
// disjointness, template coverage). Empty when valid.
std::vector<std::string> validate_pair_config(const PairConfig& config);

}  // namespace dlama

#endif  // DLAMA_CORE_REGIONS_H_
