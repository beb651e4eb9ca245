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

#include "core/sparql.h"

#include <algorithm>
#include <set>

#include "core/errors.h"

namespace dlama {

namespace {

constexpr std::string_view kPrefixWd = "PREFIX wd: <http://www.wikidata.org/entity/>\n";
constexpr std::string_view kPrefixWdt =
    "PREFIX wdt: <http://www.wikidata.org/prop/direct/>\n";
constexpr std::string_view kPrefixSchema = "PREFIX schema: <http://schema.org/>\n";
constexpr std::string_view kPrefixRdfs =
    "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n";

// Class each entity label is checked against. Person uses a direct
// instance-of test; Place and Country subjects carry no class triple because
// the predicate (or the region binding) already implies it.
struct ClassConstraint {
  EntityClass entity_class;
  std::string_view class_id;
  bool direct;
};

constexpr ClassConstraint kClassConstraints[] = {
    {EntityClass::kCity, "Q515", false},
    {EntityClass::kContinent, "Q5107", false},
    {EntityClass::kCountry, "Q6256", false},
    {EntityClass::kGenre, "Q188451", false},
    {EntityClass::kInstrument, "Q34379", false},
    {EntityClass::kLanguage, "Q34770", false},
    {EntityClass::kOccupation, "Q12737077", false},
    {EntityClass::kOriginalNetwork, "Q15265344", false},
    {EntityClass::kPerson, "Q5", true},
    {EntityClass::kPieceOfWork, "Q386724", false},
    {EntityClass::kRecordLabel, "Q18127", false},
};

std::string class_triple(std::string_view var, EntityClass c) {
  for (const auto& k : kClassConstraints) {
    if (k.entity_class != c) continue;
    std::string out = "  ?";
    out += var;
    out += k.direct ? " wdt:P31 wd:" : " wdt:P31/wdt:P279* wd:";
    out += k.class_id;
    out += " .\n";
    return out;
  }
  return {};
}

std::vector<EntityId> sorted_unique(std::span<const EntityId> ids) {
  std::set<EntityId> unique(ids.begin(), ids.end());
  return {unique.begin(), unique.end()};
}

std::string values_clause(std::string_view var, const std::vector<EntityId>& ids) {
  std::string out = "  VALUES ?";
  out += var;
  out += " {";
  for (const auto& id : ids) {
    out += " wd:";
    out += id.str();
  }
  out += " }\n";
  return out;
}

void check_code(std::string_view code, std::string_view what) {
  const bool ok = !code.empty() && code.size() <= 32 &&
                  std::all_of(code.begin(), code.end(), [](char c) {
                    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
                  });
  if (!ok) throw InvalidArgument("invalid " + std::string(what) + " '" + std::string(code) + "'");
}

std::string sites_clause(std::span<const std::string> sites) {
  std::set<std::string> unique(sites.begin(), sites.end());
  std::string out = "VALUES ?site {";
  for (const auto& site : unique) {
    check_code(site, "site code");
    out += " <https://" + site + ".wikipedia.org/>";
  }
  out += " }";
  return out;
}

std::vector<EntityId> checked_ids(std::span<const EntityId> ids, std::string_view what) {
  auto unique = sorted_unique(ids);
  if (unique.empty()) throw InvalidArgument(std::string(what) + " must be non-empty");
  if (unique.size() > kMaxValuesPerQuery) {
    throw InvalidArgument(std::string(what) + ": " + std::to_string(unique.size()) +
                          " ids exceed the per-query limit of " +
                          std::to_string(kMaxValuesPerQuery) + "; chunk the input");
  }
  return unique;
}

SparqlQuery finish(std::string body, std::string_view order_by, QueryKind kind, Page page) {
  if (page.size <= 0 || page.size > kMaxPageSize) {
    throw InvalidArgument("page size must be in [1, " + std::to_string(kMaxPageSize) + "]");
  }
  if (page.number < 1) throw InvalidArgument("page numbers start at 1");
  SparqlQuery q;
  q.kind = kind;
  q.page_size = page.size;
  q.offset = page.offset();
  q.text = std::move(body);
  q.text += "}\nORDER BY ";
  q.text += order_by;
  q.text += "\nLIMIT " + std::to_string(page.size);
  q.text += "\nOFFSET " + std::to_string(q.offset) + "\n";
  return q;
}

std::string_view location_property(EntityClass subject_class) {
  return subject_class == EntityClass::kPieceOfWork ? "P495" : "P17";
}

}  // namespace

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::kHarvest: return "harvest";
    case QueryKind::kAllObjects: return "all_objects";
    case QueryKind::kLabels: return "labels";
    case QueryKind::kSubclassEdges: return "subclass_edges";
    case QueryKind::kTerritoryChain: return "territory_chain";
    case QueryKind::kArticleLinks: return "article_links";
  }
  return "?";
}

SparqlQuery build_harvest_query(const PredicateSpec& spec, const Region& region, Page page) {
  if (region.countries.empty()) {
    throw InvalidArgument("region '" + region.name + "' has no countries");
  }
  std::vector<EntityId> countries;
  for (const auto& c : region.countries) countries.push_back(c.wikidata_id);
  countries = sorted_unique(countries);

  std::string text;
  text += kPrefixWd;
  text += kPrefixWdt;
  text += kPrefixSchema;
  text += "SELECT DISTINCT ?subject ?object ?article WHERE {\n";
  if (spec.subject_class == EntityClass::kCountry) {
    text += values_clause("subject", countries);
  } else {
    text += values_clause("region_country", countries);
    const std::string_view filter_property =
        spec.region_filter_mode == RegionFilterMode::kSubjectCitizenship
            ? std::string_view("P27")
            : location_property(spec.subject_class);
    text += "  ?subject wdt:";
    text += filter_property;
    text += " ?region_country .\n";
    text += class_triple("subject", spec.subject_class);
  }
  text += "  ?subject wdt:" + spec.predicate_id.str() + " ?object .\n";
  text += class_triple("object", spec.object_class);
  text += "  OPTIONAL {\n    ";
  text += sites_clause(region.all_sites());
  text += "\n    ?article schema:about ?subject ;\n";
  text += "             schema:isPartOf ?site .\n";
  text += "  }\n";
  return finish(std::move(text), "?subject ?object ?article", QueryKind::kHarvest, page);
}

SparqlQuery build_all_objects_query(std::span<const EntityId> subject_ids,
                                    const PropertyId& predicate, Page page) {
  auto ids = checked_ids(subject_ids, "subject list");
  std::string text;
  text += kPrefixWd;
  text += kPrefixWdt;
  text += "SELECT DISTINCT ?subject ?object WHERE {\n";
  text += values_clause("subject", ids);
  text += "  ?subject wdt:" + predicate.str() + " ?object .\n";
  return finish(std::move(text), "?subject ?object", QueryKind::kAllObjects, page);
}

SparqlQuery build_labels_query(std::span<const EntityId> entity_ids,
                               std::span<const std::string> languages, Page page) {
  auto ids = checked_ids(entity_ids, "entity list");
  std::set<std::string> langs(languages.begin(), languages.end());
  if (langs.empty()) throw InvalidArgument("language list must be non-empty");
  std::string text;
  text += kPrefixWd;
  text += kPrefixRdfs;
  text += "SELECT DISTINCT ?entity ?language ?label WHERE {\n";
  text += values_clause("entity", ids);
  text += "  ?entity rdfs:label ?label .\n";
  text += "  BIND(LANG(?label) AS ?language)\n";
  text += "  FILTER(?language IN (";
  bool first = true;
  for (const auto& lang : langs) {
    check_code(lang, "language code");
    if (!first) text += ", ";
    text += "\"" + lang + "\"";
    first = false;
  }
  text += "))\n";
  return finish(std::move(text), "?entity ?language ?label", QueryKind::kLabels, page);
}

SparqlQuery build_subclass_edges_query(std::span<const EntityId> object_ids, Page page) {
  auto ids = checked_ids(object_ids, "object list");
  std::string text;
  text += kPrefixWd;
  text += kPrefixWdt;
  text += "SELECT DISTINCT ?child ?parent WHERE {\n";
  text += values_clause("start", ids);
  text += "  ?start wdt:P279* ?child .\n";
  text += "  ?child wdt:P279 ?parent .\n";
  return finish(std::move(text), "?child ?parent", QueryKind::kSubclassEdges, page);
}

SparqlQuery build_territory_chain_query(std::span<const EntityId> place_ids, Page page) {
  auto ids = checked_ids(place_ids, "place list");
  std::string text;
  text += kPrefixWd;
  text += kPrefixWdt;
  text += "SELECT DISTINCT ?place ?ancestor WHERE {\n";
  text += values_clause("place", ids);
  text += "  ?place wdt:P131+ ?ancestor .\n";
  return finish(std::move(text), "?place ?ancestor", QueryKind::kTerritoryChain, page);
}

SparqlQuery build_article_links_query(std::span<const EntityId> subject_ids,
                                      std::span<const std::string> sites, Page page) {
  auto ids = checked_ids(subject_ids, "subject list");
  if (sites.empty()) throw InvalidArgument("site list must be non-empty");
  std::string text;
  text += kPrefixWd;
  text += kPrefixSchema;
  text += "SELECT DISTINCT ?subject ?article WHERE {\n";
  text += values_clause("subject", ids);
  text += "  " + sites_clause(sites) + "\n";
  text += "  ?article schema:about ?subject ;\n";
  text += "           schema:isPartOf ?site .\n";
  return finish(std::move(text), "?subject ?article", QueryKind::kArticleLinks, page);
}

std::vector<std::string> check_query_grammar(std::string_view text) {
  std::vector<std::string> problems;
  std::string code;  // text with literals, IRIs and comments removed
  code.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '"' || c == '\'') {
      size_t end = i + 1;
      while (end < text.size() && text[end] != c && text[end] != '\n') {
        if (text[end] == '\\') ++end;
        ++end;
      }
      if (end >= text.size() || text[end] != c) {
        problems.emplace_back("unterminated string literal");
        break;
      }
      code += ' ';
      i = end;
    } else if (c == '<') {
      // An IRI has no whitespace before its closing '>'; anything else is a
      // comparison operator.
      size_t end = text.find_first_of(">\n\t ", i + 1);
      if (end != std::string_view::npos && text[end] == '>') {
        code += ' ';
        i = end;
      } else {
        code += c;
      }
    } else if (c == '#') {
      size_t end = text.find('\n', i);
      if (end == std::string_view::npos) break;
      i = end - 1;
    } else {
      code += c;
    }
  }

  std::string upper = code;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (upper.find("SELECT") == std::string::npos) problems.emplace_back("missing SELECT");
  if (upper.find("WHERE") == std::string::npos) problems.emplace_back("missing WHERE");

  std::vector<char> stack;
  bool balanced = true;
  for (char c : code) {
    if (c == '{' || c == '(') {
      stack.push_back(c);
    } else if (c == '}' || c == ')') {
      const char open = c == '}' ? '{' : '(';
      if (stack.empty() || stack.back() != open) {
        balanced = false;
        break;
      }
      stack.pop_back();
    }
  }
  if (!balanced || !stack.empty()) problems.emplace_back("unbalanced braces or parentheses");
  return problems;
}

std::vector<std::string> validate_query(const SparqlQuery& query) {
  auto problems = check_query_grammar(query.text);
  if (query.page_size <= 0 || query.page_size > kMaxPageSize) {
    problems.push_back("page size " + std::to_string(query.page_size) + " outside [1, " +
                       std::to_string(kMaxPageSize) + "]");
  }
  if (query.offset < 0) problems.emplace_back("negative offset");
  return problems;
}

}  // namespace dlama
