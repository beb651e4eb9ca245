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

#include "core/regions.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "core/fileio.h"
#include "json.hpp"

namespace dlama {

namespace embedded {
extern const char kArabWestConfig[];
extern const char kAsiaWestConfig[];
extern const char kSouthAmericaWestConfig[];
}  // namespace embedded

namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::pair<EntityClass, std::string_view>, 12>
    kEntityClassNames = {{
        {EntityClass::kCity, "City"},
        {EntityClass::kContinent, "Continent"},
        {EntityClass::kCountry, "Country"},
        {EntityClass::kGenre, "Genre"},
        {EntityClass::kInstrument, "Instrument"},
        {EntityClass::kLanguage, "Language"},
        {EntityClass::kOccupation, "Occupation"},
        {EntityClass::kOriginalNetwork, "Original Network"},
        {EntityClass::kPerson, "Person"},
        {EntityClass::kPieceOfWork, "Piece of Work"},
        {EntityClass::kPlace, "Place"},
        {EntityClass::kRecordLabel, "Record Label"},
    }};

struct BuiltinPair {
  std::string_view name;
  const char* text;
};

const std::array<BuiltinPair, 3>& builtin_pairs() {
  static const std::array<BuiltinPair, 3> pairs = {{
      {"arab_west", embedded::kArabWestConfig},
      {"asia_west", embedded::kAsiaWestConfig},
      {"south_america_west", embedded::kSouthAmericaWestConfig},
  }};
  return pairs;
}

size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  size_t count = 0;
  for (size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

// All parse failures below are reported as ConfigError with the origin.
class ConfigReader {
 public:
  explicit ConfigReader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(origin_ + ": " + what);
  }

  void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                  const std::string& where) const {
    if (!obj.is_object()) fail(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail("unknown field '" + key + "' in " + where);
      }
    }
  }

  const json& field(const json& obj, const char* key, const std::string& where) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail("missing field '" + std::string(key) + "' in " + where);
    return *it;
  }

  std::string string_field(const json& obj, const char* key,
                           const std::string& where) const {
    const json& v = field(obj, key, where);
    if (!v.is_string()) fail("field '" + std::string(key) + "' in " + where + " must be a string");
    return v.get<std::string>();
  }

  std::vector<std::string> string_list(const json& v, const std::string& where) const {
    if (!v.is_array()) fail(where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& item : v) {
      if (!item.is_string()) fail(where + " must be an array of strings");
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  Region region(const json& obj, const std::string& where) const {
    check_keys(obj, {"name", "countries"}, where);
    Region r;
    r.name = string_field(obj, "name", where);
    const json& countries = field(obj, "countries", where);
    if (!countries.is_array()) fail(where + ".countries must be an array");
    for (const auto& c : countries) {
      std::string cw = where + ".countries[" + std::to_string(r.countries.size()) + "]";
      check_keys(c, {"id", "name", "sites"}, cw);
      auto id = EntityId::try_parse(string_field(c, "id", cw));
      if (!id) fail(cw + ".id must match Q[0-9]+");
      r.countries.push_back({*id, string_field(c, "name", cw)});
      r.wikipedia_sites[*id] = string_list(field(c, "sites", cw), cw + ".sites");
    }
    return r;
  }

  PredicateSpec predicate(const json& obj, const std::vector<std::string>& pair_languages,
                          const std::string& where) const {
    check_keys(obj, {"id", "label", "subject_class", "object_class", "region_filter",
                     "languages", "max_triples", "sort_key"},
               where);
    PredicateSpec p;
    auto id = PropertyId::try_parse(string_field(obj, "id", where));
    if (!id) fail(where + ".id must match P[0-9]+");
    p.predicate_id = *id;
    if (obj.contains("label")) p.label = string_field(obj, "label", where);
    auto subject = parse_entity_class(string_field(obj, "subject_class", where));
    auto object = parse_entity_class(string_field(obj, "object_class", where));
    if (!subject || !object) fail(where + ": unknown entity class");
    p.subject_class = *subject;
    p.object_class = *object;
    auto mode = parse_region_filter_mode(string_field(obj, "region_filter", where));
    if (!mode) fail(where + ".region_filter must be subject_citizenship or subject_location");
    p.region_filter_mode = *mode;
    p.languages = obj.contains("languages")
                      ? string_list(obj["languages"], where + ".languages")
                      : pair_languages;
    if (obj.contains("max_triples")) {
      const json& m = obj["max_triples"];
      if (!m.is_number_integer() || m.get<int64_t>() <= 0 || m.get<int64_t>() > 1000000) {
        fail(where + ".max_triples must be a positive integer");
      }
      p.max_triples = m.get<int>();
    }
    if (obj.contains("sort_key")) {
      auto key = parse_sort_key(string_field(obj, "sort_key", where));
      if (!key) fail(where + ".sort_key must be article_size or edit_count");
      p.sort_key = *key;
    }
    return p;
  }

  PromptTemplate prompt_template(const json& obj, const std::string& where) const {
    check_keys(obj, {"predicate_id", "language", "pattern", "question"}, where);
    PromptTemplate t;
    auto id = PropertyId::try_parse(string_field(obj, "predicate_id", where));
    if (!id) fail(where + ".predicate_id must match P[0-9]+");
    t.predicate_id = *id;
    t.language = string_field(obj, "language", where);
    t.pattern = string_field(obj, "pattern", where);
    if (obj.contains("question")) t.question_pattern = string_field(obj, "question", where);
    return t;
  }

 private:
  std::string origin_;
};

json region_to_json(const Region& r) {
  json countries = json::array();
  for (const auto& c : r.countries) {
    json entry;
    entry["id"] = c.wikidata_id.str();
    entry["name"] = c.display_name;
    auto it = r.wikipedia_sites.find(c.wikidata_id);
    entry["sites"] = it == r.wikipedia_sites.end() ? std::vector<std::string>{} : it->second;
    countries.push_back(std::move(entry));
  }
  json out;
  out["name"] = r.name;
  out["countries"] = std::move(countries);
  return out;
}

}  // namespace

std::string_view to_string(EntityClass c) {
  for (const auto& [value, name] : kEntityClassNames) {
    if (value == c) return name;
  }
  return "?";
}

std::optional<EntityClass> parse_entity_class(std::string_view text) {
  for (const auto& [value, name] : kEntityClassNames) {
    if (name == text) return value;
  }
  return std::nullopt;
}

std::string_view to_string(RegionFilterMode m) {
  return m == RegionFilterMode::kSubjectCitizenship ? "subject_citizenship"
                                                    : "subject_location";
}

std::optional<RegionFilterMode> parse_region_filter_mode(std::string_view text) {
  if (text == "subject_citizenship") return RegionFilterMode::kSubjectCitizenship;
  if (text == "subject_location") return RegionFilterMode::kSubjectLocation;
  return std::nullopt;
}

std::string_view to_string(SortKey k) {
  return k == SortKey::kArticleSize ? "article_size" : "edit_count";
}

std::optional<SortKey> parse_sort_key(std::string_view text) {
  if (text == "article_size" || text == "article-size") return SortKey::kArticleSize;
  if (text == "edit_count" || text == "edits") return SortKey::kEditCount;
  return std::nullopt;
}

bool Region::contains(const EntityId& country) const {
  return std::any_of(countries.begin(), countries.end(),
                     [&](const CountryRef& c) { return c.wikidata_id == country; });
}

std::vector<std::string> Region::all_sites() const {
  std::set<std::string> sites = {"en"};
  for (const auto& [id, list] : wikipedia_sites) sites.insert(list.begin(), list.end());
  return {sites.begin(), sites.end()};
}

const PredicateSpec* PairConfig::find_predicate(const PropertyId& id) const {
  for (const auto& p : predicates) {
    if (p.predicate_id == id) return &p;
  }
  return nullptr;
}

const PromptTemplate* PairConfig::find_template(const PropertyId& id,
                                                std::string_view language) const {
  for (const auto& t : templates) {
    if (t.predicate_id == id && t.language == language) return &t;
  }
  return nullptr;
}

const Region* PairConfig::find_region(std::string_view region_name) const {
  if (region_a.name == region_name) return &region_a;
  if (region_b.name == region_name) return &region_b;
  return nullptr;
}

const std::vector<PropertyId>& supported_predicates() {
  static const std::vector<PropertyId> ids = [] {
    std::vector<PropertyId> out;
    for (const char* p : {"P17", "P19", "P20", "P27", "P30", "P36", "P37", "P47", "P103",
                          "P106", "P136", "P190", "P264", "P364", "P449", "P495", "P530",
                          "P1303", "P1376", "P1412"}) {
      out.push_back(PropertyId::parse(p));
    }
    return out;
  }();
  return ids;
}

std::vector<std::string> builtin_pair_names() {
  std::vector<std::string> names;
  for (const auto& p : builtin_pairs()) names.emplace_back(p.name);
  return names;
}

PairConfig load_builtin_config(std::string_view pair_name) {
  for (const auto& p : builtin_pairs()) {
    if (p.name == pair_name) {
      return parse_pair_config(p.text, "builtin:" + std::string(p.name));
    }
  }
  std::string valid;
  for (const auto& p : builtin_pairs()) {
    if (!valid.empty()) valid += ", ";
    valid += p.name;
  }
  throw ConfigError("unknown pair '" + std::string(pair_name) + "'; valid options: " + valid);
}

PairConfig load_pair_config_file(const std::filesystem::path& path) {
  return parse_pair_config(read_file(path), path.string());
}

PairConfig parse_pair_config(std::string_view text, std::string_view origin) {
  ConfigReader reader{std::string(origin)};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    reader.fail(std::string("invalid JSON: ") + e.what());
  }
  reader.check_keys(doc, {"dlama_config", "name", "languages", "region_a", "region_b",
                          "predicates", "templates"},
                    "config");
  const json& version = reader.field(doc, "dlama_config", "config");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    reader.fail("unsupported dlama_config version (expected 1)");
  }
  PairConfig config;
  config.name = reader.string_field(doc, "name", "config");
  config.languages = reader.string_list(reader.field(doc, "languages", "config"), "languages");
  config.region_a = reader.region(reader.field(doc, "region_a", "config"), "region_a");
  config.region_b = reader.region(reader.field(doc, "region_b", "config"), "region_b");
  const json& predicates = reader.field(doc, "predicates", "config");
  if (!predicates.is_array()) reader.fail("predicates must be an array");
  for (const auto& p : predicates) {
    config.predicates.push_back(reader.predicate(
        p, config.languages, "predicates[" + std::to_string(config.predicates.size()) + "]"));
  }
  const json& templates = reader.field(doc, "templates", "config");
  if (!templates.is_array()) reader.fail("templates must be an array");
  for (const auto& t : templates) {
    config.templates.push_back(
        reader.prompt_template(t, "templates[" + std::to_string(config.templates.size()) + "]"));
  }
  if (auto problems = validate_pair_config(config); !problems.empty()) {
    std::string joined;
    for (const auto& p : problems) joined += "\n  " + p;
    reader.fail("invalid configuration:" + joined);
  }
  return config;
}

std::string serialize_pair_config(const PairConfig& config) {
  json doc;
  doc["dlama_config"] = 1;
  doc["name"] = config.name;
  doc["languages"] = config.languages;
  doc["region_a"] = region_to_json(config.region_a);
  doc["region_b"] = region_to_json(config.region_b);
  json predicates = json::array();
  for (const auto& p : config.predicates) {
    json entry;
    entry["id"] = p.predicate_id.str();
    if (!p.label.empty()) entry["label"] = p.label;
    entry["subject_class"] = std::string(to_string(p.subject_class));
    entry["object_class"] = std::string(to_string(p.object_class));
    entry["region_filter"] = std::string(to_string(p.region_filter_mode));
    if (p.languages != config.languages) entry["languages"] = p.languages;
    entry["max_triples"] = p.max_triples;
    entry["sort_key"] = std::string(to_string(p.sort_key));
    predicates.push_back(std::move(entry));
  }
  doc["predicates"] = std::move(predicates);
  json templates = json::array();
  for (const auto& t : config.templates) {
    json entry;
    entry["predicate_id"] = t.predicate_id.str();
    entry["language"] = t.language;
    entry["pattern"] = t.pattern;
    if (t.question_pattern) entry["question"] = *t.question_pattern;
    templates.push_back(std::move(entry));
  }
  doc["templates"] = std::move(templates);
  return doc.dump(2, ' ', false) + "\n";
}

std::vector<std::string> validate_template(const PromptTemplate& t) {
  std::vector<std::string> problems;
  const size_t xs = count_occurrences(t.pattern, kSubjectPlaceholder);
  const size_t ys = count_occurrences(t.pattern, kObjectPlaceholder);
  if (xs == 0) problems.emplace_back("missing `[X]`");
  if (xs > 1) problems.emplace_back("duplicate `[X]`");
  if (ys == 0) problems.emplace_back("missing `[Y]`");
  if (ys > 1) problems.emplace_back("duplicate `[Y]`");
  if (t.question_pattern) {
    const size_t qx = count_occurrences(*t.question_pattern, kSubjectPlaceholder);
    if (qx == 0) problems.emplace_back("question: missing `[X]`");
    if (qx > 1) problems.emplace_back("question: duplicate `[X]`");
    if (count_occurrences(*t.question_pattern, kObjectPlaceholder) > 0) {
      problems.emplace_back("question: unexpected `[Y]`");
    }
  }
  return problems;
}

std::vector<std::string> validate_pair_config(const PairConfig& config) {
  std::vector<std::string> problems;
  if (config.name.empty()) problems.emplace_back("pair name is empty");
  if (config.languages.empty()) problems.emplace_back("languages must be non-empty");

  std::set<EntityId> seen_a;
  for (const Region* region : {&config.region_a, &config.region_b}) {
    const std::string where = "region '" + region->name + "'";
    if (region->name.empty()) problems.emplace_back("region name is empty");
    if (region->countries.empty()) problems.push_back(where + " has no countries");
    std::set<EntityId> ids;
    for (const auto& c : region->countries) {
      if (!ids.insert(c.wikidata_id).second) {
        problems.push_back(where + " lists " + c.wikidata_id.str() + " twice");
      }
      auto it = region->wikipedia_sites.find(c.wikidata_id);
      if (it == region->wikipedia_sites.end() || it->second.empty()) {
        problems.push_back(where + ": " + c.wikidata_id.str() + " has no Wikipedia site");
      }
    }
    if (region == &config.region_a) {
      seen_a = std::move(ids);
    } else {
      for (const auto& id : ids) {
        if (seen_a.count(id)) {
          problems.push_back("regions '" + config.region_a.name + "' and '" + region->name +
                             "' share country " + id.str());
        }
      }
    }
  }
  if (config.region_a.name == config.region_b.name) {
    problems.emplace_back("regions must have distinct names");
  }

  const auto& supported = supported_predicates();
  std::set<PropertyId> predicate_ids;
  for (const auto& p : config.predicates) {
    const std::string where = "predicate " + p.predicate_id.str();
    if (!predicate_ids.insert(p.predicate_id).second) problems.push_back(where + " listed twice");
    if (std::find(supported.begin(), supported.end(), p.predicate_id) == supported.end()) {
      problems.push_back(where + " is not a supported predicate");
    }
    if (p.languages.empty()) problems.push_back(where + " has no languages");
    if (p.max_triples <= 0) problems.push_back(where + " max_triples must be positive");
    for (const auto& lang : p.languages) {
      if (!config.find_template(p.predicate_id, lang)) {
        problems.push_back(where + " has no template for language '" + lang + "'");
      }
    }
  }
  for (const auto& t : config.templates) {
    for (const auto& v : validate_template(t)) {
      problems.push_back("template " + t.predicate_id.str() + "/" + t.language + ": " + v);
    }
  }
  return problems;
}

}  // namespace dlama
