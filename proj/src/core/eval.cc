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

#include "core/eval.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <tuple>

#include "core/errors.h"
#include "core/fileio.h"
#include "core/sparql.h"
#include "core/text.h"
#include "json.hpp"

namespace dlama {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double percent(int64_t part, int64_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

size_t count_of(std::string_view text, std::string_view needle) {
  size_t n = 0;
  for (size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

// Replaces each placeholder occurrence in `pattern` in a single pass.
std::string substitute(std::string_view pattern,
                       std::span<const std::pair<std::string_view, std::string_view>> subs) {
  std::string out;
  size_t i = 0;
  while (i < pattern.size()) {
    bool replaced = false;
    for (const auto& [from, to] : subs) {
      if (pattern.substr(i, from.size()) == from) {
        out.append(to);
        i += from.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out += pattern[i++];
  }
  return out;
}

std::string reference_language_for(const FactTriple& t, const EvalOptions& options) {
  if (!options.reference_language.empty() &&
      t.object_labels.contains(options.reference_language)) {
    return options.reference_language;
  }
  if (t.object_labels.contains("en")) return "en";
  return t.object_labels.empty() ? std::string() : t.object_labels.begin()->first;
}

std::string tie_label(const FactTriple& t, size_t index, const EvalOptions& options) {
  const std::string lang = reference_language_for(t, options);
  if (lang.empty()) return t.object_ids[index].str();
  const auto& labels = t.object_labels.at(lang);
  const std::string& label = index < labels.size() ? labels[index] : t.object_ids[index].str();
  return options.unifier ? options.unifier->unify(label) : label;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double json_number(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

int64_t json_count(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<int64_t>() < 0) {
    throw ParseError(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<int64_t>();
}

}  // namespace

std::string render_prompt(const PromptTemplate& t, const FactTriple& triple,
                          std::string_view language, PromptMode mode, std::string_view mask) {
  if (t.language != language) {
    throw InvalidArgument("template language '" + t.language + "' does not match '" +
                          std::string(language) + "'");
  }
  auto label = triple.subject_labels.find(std::string(language));
  if (label == triple.subject_labels.end() || label->second.empty()) {
    throw InvalidArgument("subject " + triple.subject_id.str() + " has no '" +
                          std::string(language) + "' label");
  }
  if (mode == PromptMode::kQuestion) {
    if (!t.question_pattern) {
      throw InvalidArgument("template " + t.predicate_id.str() + "/" + t.language +
                            " has no question pattern");
    }
    const std::string& q = *t.question_pattern;
    if (count_of(q, kSubjectPlaceholder) != 1 || count_of(q, kObjectPlaceholder) != 0) {
      throw InvalidArgument("question pattern must contain `[X]` once and no `[Y]`: " + q);
    }
    const std::pair<std::string_view, std::string_view> subs[] = {
        {kSubjectPlaceholder, label->second}};
    return substitute(q, subs);
  }
  if (auto problems = validate_template(t); !problems.empty()) {
    std::string what = "invalid template " + t.predicate_id.str() + "/" + t.language + ":";
    for (const auto& p : problems) what += " " + p + ";";
    what.pop_back();
    throw InvalidArgument(what);
  }
  const std::pair<std::string_view, std::string_view> subs[] = {
      {kSubjectPlaceholder, label->second}, {kObjectPlaceholder, mask}};
  return substitute(t.pattern, subs);
}

PromptFile render_prompt_file(const PromptTemplate& t, const BenchmarkSet& set,
                              std::string_view language, PromptMode mode, std::string_view mask) {
  PromptFile out;
  out.pair = set.pair;
  out.region = set.region;
  out.predicate_id = set.predicate_id;
  out.language = std::string(language);
  out.mode = mode;
  if (mode == PromptMode::kCloze) {
    out.mask = std::string(mask);
    if (!set.triples.empty()) {
      out.candidates = build_candidate_set(std::span(&set, 1), language).labels;
    }
  }
  for (const auto& triple : set.triples) {
    out.records.push_back({triple.subject_id, render_prompt(t, triple, language, mode, mask)});
  }
  return out;
}

CandidateSet build_candidate_set(std::span<const BenchmarkSet> sets, std::string_view language) {
  if (sets.empty()) throw InvalidArgument("no benchmark sets given");
  CandidateSet out;
  out.predicate_id = sets.front().predicate_id;
  out.language = std::string(language);
  std::set<std::string> labels;
  for (const auto& set : sets) {
    if (set.predicate_id != out.predicate_id) {
      throw InvalidArgument("candidate set mixes predicates " + out.predicate_id.str() + " and " +
                            set.predicate_id.str());
    }
    for (const auto& t : set.triples) {
      auto it = t.object_labels.find(out.language);
      if (it == t.object_labels.end()) {
        throw InvalidArgument("triple " + t.subject_id.str() + " has no '" + out.language +
                              "' object labels");
      }
      labels.insert(it->second.begin(), it->second.end());
    }
  }
  out.labels.assign(labels.begin(), labels.end());
  return out;
}

LabelUnifier::LabelUnifier(std::map<std::string, std::string> mapping) : mapping_(std::move(mapping)) {
  for (auto it = mapping_.begin(); it != mapping_.end();) {
    if (it->first == it->second) {
      it = mapping_.erase(it);
    } else {
      ++it;
    }
  }
  for (const auto& [surface, canonical] : mapping_) {
    if (auto c = mapping_.find(canonical); c != mapping_.end()) {
      throw ConfigError("label unifier is not idempotent: '" + surface + "' -> '" + canonical +
                        "' but '" + canonical + "' -> '" + c->second + "'");
    }
  }
}

LabelUnifier LabelUnifier::builtin_religions() {
  return LabelUnifier({{"Muslim", "Islam"}, {"Christian", "Christianity"}, {"Hindu", "Hinduism"}});
}

LabelUnifier LabelUnifier::from_tsv(std::string_view text) {
  std::map<std::string, std::string> mapping;
  int line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw ParseError("expected `surface<TAB>canonical`", line_no);
    }
    auto [it, inserted] = mapping.emplace(cols[0], cols[1]);
    if (!inserted && it->second != cols[1]) {
      throw ParseError("conflicting mapping for '" + cols[0] + "'", line_no);
    }
  }
  return LabelUnifier(std::move(mapping));
}

LabelUnifier LabelUnifier::merged(const LabelUnifier& other) const {
  std::map<std::string, std::string> m = mapping_;
  for (const auto& [k, v] : other.mapping_) m[k] = v;
  return LabelUnifier(std::move(m));
}

const std::string& LabelUnifier::unify(const std::string& label) const {
  auto it = mapping_.find(label);
  return it == mapping_.end() ? label : it->second;
}

std::vector<EntityId> representative_objects(std::span<const FactTriple> triples,
                                             const EvalOptions& options) {
  std::map<EntityId, int64_t> frequency;
  for (const auto& t : triples) {
    for (const auto& o : t.object_ids) ++frequency[o];
  }
  std::vector<EntityId> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    if (t.object_ids.empty()) throw InvalidArgument("triple " + t.subject_id.str() + " has no objects");
    size_t best = 0;
    for (size_t i = 1; i < t.object_ids.size(); ++i) {
      const int64_t fi = frequency[t.object_ids[i]];
      const int64_t fb = frequency[t.object_ids[best]];
      if (fi != fb) {
        if (fi > fb) best = i;
        continue;
      }
      const std::string li = tie_label(t, i, options);
      const std::string lb = tie_label(t, best, options);
      if (li < lb || (li == lb && t.object_ids[i] < t.object_ids[best])) best = i;
    }
    out.push_back(t.object_ids[best]);
  }
  return out;
}

double compute_entropy(std::span<const FactTriple> triples, const EvalOptions& options) {
  if (triples.empty()) throw InvalidArgument("entropy of an empty set is undefined");
  const std::vector<EntityId> reps = representative_objects(triples, options);
  std::map<std::string, int64_t> counts;
  for (size_t i = 0; i < triples.size(); ++i) {
    const FactTriple& t = triples[i];
    const size_t index = static_cast<size_t>(
        std::find(t.object_ids.begin(), t.object_ids.end(), reps[i]) - t.object_ids.begin());
    ++counts[tie_label(t, index, options)];
  }
  if (counts.size() == 1) return 0.0;
  const double n = static_cast<double>(triples.size());
  double h = 0.0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double compute_entropy(const BenchmarkSet& set, const EvalOptions& options) {
  return compute_entropy(std::span<const FactTriple>(set.triples), options);
}

std::string normalize_for_qa(std::string_view text, const QaOptions& options) {
  std::string out = collapse_whitespace(nfc(text));
  if (options.ignore_case) out = nfc(case_fold(out));
  return out;
}

bool score_qa_response(std::string_view response, std::span<const std::string> gold_labels,
                       const QaOptions& options) {
  const std::string haystack = normalize_for_qa(response, options);
  for (const auto& gold : gold_labels) {
    const std::string needle = normalize_for_qa(gold, options);
    if (!needle.empty() && haystack.find(needle) != std::string::npos) return true;
  }
  return false;
}

EvalReport compute_p_at_1(const PredictionFile& predictions, std::span<const BenchmarkSet> gold,
                          const EvalOptions& options) {
  static const LabelUnifier kIdentity;
  const LabelUnifier& unifier = options.unifier ? *options.unifier : kIdentity;
  const std::string& lang = predictions.prompt_language;

  std::map<TripleRef, std::vector<const FactTriple*>> index;
  std::map<PropertyId, std::vector<FactTriple>> by_predicate;
  int64_t n_gold = 0;
  for (const auto& set : gold) {
    for (const auto& t : set.triples) {
      index[{t.predicate_id, t.subject_id}].push_back(&t);
      by_predicate[t.predicate_id].push_back(t);
      ++n_gold;
    }
  }

  EvalReport report;
  report.model_id = predictions.model_id;
  report.prompt_language = lang;
  for (const auto& [p, triples] : by_predicate) {
    PredicateStats& stats = report.per_predicate[p];
    stats.entropy = compute_entropy(std::span<const FactTriple>(triples), options);
  }

  std::vector<std::string> orphans;
  std::map<PropertyId, std::map<std::string, std::pair<int64_t, int64_t>>> dist;
  int64_t matched = 0;
  for (const auto& r : predictions.records) {
    auto it = index.find(r.triple_ref);
    if (it == index.end()) {
      orphans.push_back(r.triple_ref.predicate_id.str() + "/" + r.triple_ref.subject_id.str());
      continue;
    }
    for (const FactTriple* t : it->second) {
      auto labels = t->object_labels.find(lang);
      if (labels == t->object_labels.end()) {
        throw InvalidArgument("gold triple " + t->subject_id.str() + " has no '" + lang +
                              "' object labels");
      }
      bool hit = false;
      std::string predicted;
      if (r.free_text) {
        hit = score_qa_response(*r.free_text, labels->second, options.qa);
        predicted = normalize_for_qa(*r.free_text, options.qa);
      } else {
        predicted = unifier.unify(r.ranked_candidates.front());
        hit = std::any_of(labels->second.begin(), labels->second.end(),
                          [&](const std::string& g) { return unifier.unify(g) == predicted; });
      }
      ++matched;
      PredicateStats& ps = report.per_predicate[t->predicate_id];
      RegionStats& rs = report.per_region[t->region_name];
      ++ps.n;
      ++rs.n;
      ++report.n_triples;
      if (hit) {
        ++ps.hits;
        ++rs.hits;
        ++report.n_hits;
      }
      auto& cell = dist[t->predicate_id][predicted];
      (hit ? cell.first : cell.second)++;
    }
  }
  if (!orphans.empty()) {
    std::string what = std::to_string(orphans.size()) + " prediction record(s) have no gold triple:";
    for (size_t i = 0; i < orphans.size() && i < 20; ++i) what += " " + orphans[i];
    if (orphans.size() > 20) what += " ...";
    throw InvalidArgument(what);
  }
  report.n_unpredicted = n_gold - matched;
  if (report.n_unpredicted < 0) report.n_unpredicted = 0;
  report.p_at_1 = percent(report.n_hits, report.n_triples);
  for (auto& [_, ps] : report.per_predicate) ps.p_at_1 = percent(ps.hits, ps.n);
  for (auto& [_, rs] : report.per_region) rs.p_at_1 = percent(rs.hits, rs.n);
  for (auto& [p, labels] : dist) {
    auto& entries = report.distribution[p];
    for (const auto& [label, cw] : labels) entries.push_back({label, cw.first, cw.second});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const DistributionEntry& a, const DistributionEntry& b) {
                       return a.correct + a.wrong > b.correct + b.wrong;
                     });
  }
  return report;
}

std::string serialize_eval_report(const EvalReport& report) {
  ordered_json j;
  j["dlama_schema"] = kSchemaVersion;
  j["kind"] = "eval_report";
  j["model_id"] = report.model_id;
  j["prompt_language"] = report.prompt_language;
  j["p_at_1"] = report.p_at_1;
  j["n_triples"] = report.n_triples;
  j["n_hits"] = report.n_hits;
  j["n_unpredicted"] = report.n_unpredicted;
  ordered_json per_predicate = ordered_json::object();
  for (const auto& [p, s] : report.per_predicate) {
    ordered_json e;
    e["p_at_1"] = s.p_at_1;
    e["n"] = s.n;
    e["hits"] = s.hits;
    e["entropy"] = s.entropy ? ordered_json(*s.entropy) : ordered_json(nullptr);
    per_predicate[p.str()] = std::move(e);
  }
  j["per_predicate"] = std::move(per_predicate);
  ordered_json per_region = ordered_json::object();
  for (const auto& [r, s] : report.per_region) {
    ordered_json e;
    e["p_at_1"] = s.p_at_1;
    e["n"] = s.n;
    e["hits"] = s.hits;
    per_region[r] = std::move(e);
  }
  j["per_region"] = std::move(per_region);
  ordered_json distribution = ordered_json::object();
  for (const auto& [p, entries] : report.distribution) {
    ordered_json list = ordered_json::array();
    for (const auto& d : entries) {
      ordered_json e;
      e["label"] = d.label;
      e["correct"] = d.correct;
      e["wrong"] = d.wrong;
      list.push_back(std::move(e));
    }
    distribution[p.str()] = std::move(list);
  }
  j["distribution"] = std::move(distribution);
  return j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

EvalReport parse_eval_report(std::string_view text) {
  EvalReport r;
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ParseError("eval report must be a JSON object");
    const json& version = j.at("dlama_schema");
    if (!version.is_number_integer() || version.get<int64_t>() != kSchemaVersion) {
      throw SchemaError("unsupported dlama_schema " + version.dump());
    }
    if (j.at("kind") != "eval_report") throw SchemaError("not an eval_report document");
    r.model_id = j.at("model_id").get<std::string>();
    r.prompt_language = j.at("prompt_language").get<std::string>();
    r.p_at_1 = json_number(j, "p_at_1");
    r.n_triples = json_count(j, "n_triples");
    r.n_hits = json_count(j, "n_hits");
    r.n_unpredicted = json_count(j, "n_unpredicted");
    for (const auto& [key, e] : j.at("per_predicate").items()) {
      PredicateStats s;
      s.p_at_1 = json_number(e, "p_at_1");
      s.n = json_count(e, "n");
      s.hits = json_count(e, "hits");
      if (!e.at("entropy").is_null()) s.entropy = json_number(e, "entropy");
      r.per_predicate[PropertyId::parse(key)] = s;
    }
    for (const auto& [key, e] : j.at("per_region").items()) {
      RegionStats s;
      s.p_at_1 = json_number(e, "p_at_1");
      s.n = json_count(e, "n");
      s.hits = json_count(e, "hits");
      r.per_region[key] = s;
    }
    for (const auto& [key, list] : j.at("distribution").items()) {
      auto& entries = r.distribution[PropertyId::parse(key)];
      for (const auto& e : list) {
        entries.push_back({e.at("label").get<std::string>(), json_count(e, "correct"),
                           json_count(e, "wrong")});
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed eval report: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("malformed eval report: ") + e.what());
  }
  return r;
}

EvalReport read_eval_report(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_eval_report(text);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string(), e);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

std::string format_eval_table(const EvalReport& report) {
  std::string out = fmt::format("model: {}  language: {}\n", report.model_id, report.prompt_language);
  out += fmt::format("{:<10} {:>7} {:>7} {:>7} {:>8}\n", "predicate", "n", "hits", "P@1", "entropy");
  for (const auto& [p, s] : report.per_predicate) {
    out += fmt::format("{:<10} {:>7} {:>7} {:>7.1f} {:>8}\n", p.str(), s.n, s.hits, s.p_at_1,
                       s.entropy ? fmt::format("{:.1f}", *s.entropy) : std::string("-"));
  }
  for (const auto& [r, s] : report.per_region) {
    out += fmt::format("{:<10} {:>7} {:>7} {:>7.1f}\n", r, s.n, s.hits, s.p_at_1);
  }
  out += fmt::format("{:<10} {:>7} {:>7} {:>7.1f}\n", "overall", report.n_triples, report.n_hits,
                     report.p_at_1);
  if (report.n_unpredicted > 0) {
    out += fmt::format("{} gold triple(s) had no prediction\n", report.n_unpredicted);
  }
  return out;
}

std::string distribution_csv(const EvalReport& report) {
  std::string out = "predicate_id,label,correct_count,wrong_count\n";
  for (const auto& [p, entries] : report.distribution) {
    for (const auto& e : entries) {
      out += p.str() + "," + csv_field(e.label) + "," + std::to_string(e.correct) + "," +
             std::to_string(e.wrong) + "\n";
    }
  }
  return out;
}

void read_triple_dump(std::istream& in, const std::function<void(const DumpTriple&)>& sink) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::string s, p, o;
    if (body.front() == '{') {
      try {
        json j = json::parse(body);
        auto pick = [&](std::initializer_list<const char*> keys) -> std::string {
          for (const char* k : keys) {
            if (auto it = j.find(k); it != j.end() && it->is_string()) return it->get<std::string>();
          }
          return {};
        };
        s = pick({"sub_uri", "subject_id"});
        p = pick({"predicate_id"});
        o = pick({"obj_uri", "object_id"});
      } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
      }
    } else {
      auto cols = split(body, '\t');
      if (cols.size() != 3) throw ParseError("expected 3 tab-separated columns", line_no);
      s = trim(cols[0]);
      p = trim(cols[1]);
      o = trim(cols[2]);
    }
    auto subject = EntityId::from_uri(s);
    auto object = EntityId::from_uri(o);
    if (p.starts_with(kEntityUriPrefix)) p.erase(0, kEntityUriPrefix.size());
    auto predicate = PropertyId::try_parse(p);
    if (!subject) throw ParseError("invalid subject '" + s + "'", line_no);
    if (!predicate) throw ParseError("invalid predicate '" + p + "'", line_no);
    if (!object) throw ParseError("invalid object '" + o + "'", line_no);
    sink({*subject, *predicate, *object});
  }
}

std::vector<DumpTriple> read_triple_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<DumpTriple> out;
  try {
    read_triple_dump(in, [&](const DumpTriple& t) { out.push_back(t); });
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
  return out;
}

TableCountryResolver::TableCountryResolver(std::map<EntityId, std::vector<EntityId>> table)
    : table_(std::move(table)) {}

TableCountryResolver TableCountryResolver::from_tsv(std::string_view text) {
  std::map<EntityId, std::vector<EntityId>> table;
  int line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 2) throw ParseError("expected `entity<TAB>country[,country...]`", line_no);
    auto entity = EntityId::from_uri(trim(cols[0]));
    if (!entity) throw ParseError("invalid entity '" + cols[0] + "'", line_no);
    auto& countries = table[*entity];
    for (const auto& c : split(cols[1], ',')) {
      if (trim(c).empty()) continue;
      auto country = EntityId::from_uri(trim(c));
      if (!country) throw ParseError("invalid country '" + c + "'", line_no);
      countries.push_back(*country);
    }
  }
  return TableCountryResolver(std::move(table));
}

std::map<EntityId, std::vector<EntityId>> TableCountryResolver::resolve(
    std::span<const EntityId> ids) {
  std::map<EntityId, std::vector<EntityId>> out;
  for (const auto& id : ids) {
    auto it = table_.find(id);
    if (it != table_.end() && !it->second.empty()) out[id] = it->second;
  }
  return out;
}

ClientCountryResolver::ClientCountryResolver(HarvestClient& client, int page_size)
    : client_(client), page_size_(page_size) {}

std::map<EntityId, std::vector<EntityId>> ClientCountryResolver::resolve(
    std::span<const EntityId> ids) {
  std::vector<EntityId> pending;
  for (const auto& id : ids) {
    if (!queried_.contains(id)) pending.push_back(id);
  }
  std::sort(pending.begin(), pending.end());
  pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
  static const PropertyId kCitizenship = PropertyId::parse("P27");
  static const PropertyId kCountry = PropertyId::parse("P17");
  for (size_t start = 0; start < pending.size(); start += kIdChunkSize) {
    std::span<const EntityId> chunk(pending.data() + start,
                                    std::min(kIdChunkSize, pending.size() - start));
    for (const PropertyId* p : {&kCitizenship, &kCountry}) {
      RowSet rows = client_.run_paged(
          [&](Page page) { return build_all_objects_query(chunk, *p, page); }, page_size_);
      for (const auto& row : rows.rows) {
        auto s = row.find("subject");
        auto o = row.find("object");
        if (s == row.end() || o == row.end()) continue;
        auto sid = EntityId::from_uri(s->second.value);
        auto oid = EntityId::from_uri(o->second.value);
        if (sid && oid) memo_[*sid].push_back(*oid);
      }
    }
    queried_.insert(chunk.begin(), chunk.end());
  }
  std::map<EntityId, std::vector<EntityId>> out;
  for (const auto& id : ids) {
    auto it = memo_.find(id);
    if (it != memo_.end() && !it->second.empty()) out[id] = it->second;
  }
  return out;
}

double BiasCounts::western_pct() const { return percent(western, total()); }
double BiasCounts::rest_pct() const { return percent(rest, total()); }
double BiasCounts::unknown_pct() const { return percent(unknown, total()); }

BiasReport bias_audit(std::span<const DumpTriple> triples, const Region& western,
                      CountryResolver& resolver) {
  std::set<EntityId> west;
  for (const auto& c : western.countries) west.insert(c.wikidata_id);
  std::vector<EntityId> ids;
  for (const auto& t : triples) {
    ids.push_back(t.subject_id);
    ids.push_back(t.object_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const auto resolved = resolver.resolve(ids);

  enum class Side { kWestern, kRest, kUnknown };
  auto classify = [&](const EntityId& id) {
    if (west.contains(id)) return Side::kWestern;
    auto it = resolved.find(id);
    if (it == resolved.end()) return Side::kUnknown;
    for (const auto& c : it->second) {
      if (west.contains(c)) return Side::kWestern;
    }
    return Side::kRest;
  };

  BiasReport report;
  for (const auto& t : triples) {
    const Side s = classify(t.subject_id);
    const Side o = classify(t.object_id);
    BiasCounts& counts = report.per_predicate[t.predicate_id];
    if (s == Side::kWestern || o == Side::kWestern) {
      ++counts.western;
      ++report.total.western;
    } else if (s == Side::kRest || o == Side::kRest) {
      ++counts.rest;
      ++report.total.rest;
    } else {
      ++counts.unknown;
      ++report.total.unknown;
    }
  }
  return report;
}

std::string serialize_bias_report(const BiasReport& report) {
  auto entry = [](const BiasCounts& c) {
    ordered_json e;
    e["western_count"] = c.western;
    e["rest_count"] = c.rest;
    e["unknown_count"] = c.unknown;
    e["western_pct"] = c.western_pct();
    e["rest_pct"] = c.rest_pct();
    e["unknown_pct"] = c.unknown_pct();
    return e;
  };
  ordered_json j;
  j["dlama_schema"] = kSchemaVersion;
  j["kind"] = "bias_report";
  ordered_json per = ordered_json::object();
  for (const auto& [p, c] : report.per_predicate) per[p.str()] = entry(c);
  j["per_predicate"] = std::move(per);
  j["total"] = entry(report.total);
  return j.dump(2) + "\n";
}

std::string format_bias_table(const BiasReport& report) {
  std::string out = fmt::format("{:<10} {:>9} {:>9} {:>9} {:>8} {:>8} {:>8}\n", "predicate",
                                "western", "rest", "unknown", "west%", "rest%", "unk%");
  auto row = [&](const std::string& name, const BiasCounts& c) {
    out += fmt::format("{:<10} {:>9} {:>9} {:>9} {:>8.1f} {:>8.1f} {:>8.1f}\n", name, c.western,
                       c.rest, c.unknown, c.western_pct(), c.rest_pct(), c.unknown_pct());
  };
  for (const auto& [p, c] : report.per_predicate) row(p.str(), c);
  row("total", report.total);
  return out;
}

OverlapReport overlap_with_dump(std::span<const BenchmarkSet> sets,
                                std::span<const DumpTriple> dump) {
  std::set<std::tuple<uint64_t, uint64_t, uint64_t>> facts;
  for (const auto& d : dump) {
    facts.emplace(d.subject_id.number(), d.predicate_id.number(), d.object_id.number());
  }
  OverlapReport report;
  for (const auto& set : sets) {
    OverlapCounts& counts = report.per_set[benchmark_file_name(set)];
    for (const auto& t : set.triples) {
      ++counts.n;
      ++report.total.n;
      const bool found = std::any_of(t.object_ids.begin(), t.object_ids.end(), [&](const EntityId& o) {
        return facts.contains({t.subject_id.number(), t.predicate_id.number(), o.number()});
      });
      if (found) {
        ++counts.found;
        ++report.total.found;
      }
    }
  }
  return report;
}

std::string serialize_overlap_report(const OverlapReport& report) {
  auto entry = [](const OverlapCounts& c) {
    ordered_json e;
    e["n"] = c.n;
    e["found"] = c.found;
    e["pct"] = c.pct();
    return e;
  };
  ordered_json j;
  j["dlama_schema"] = kSchemaVersion;
  j["kind"] = "overlap_report";
  ordered_json per = ordered_json::object();
  for (const auto& [name, c] : report.per_set) per[name] = entry(c);
  j["per_set"] = std::move(per);
  j["total"] = entry(report.total);
  return j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

bool Comparison::any_flagged() const {
  return std::any_of(cells.begin(), cells.end(), [](const ComparisonCell& c) { return c.flagged; });
}

Comparison compare_raw_vs_augmented(const EvalReport& raw, const EvalReport& augmented) {
  Comparison c;
  auto add = [&](std::string scope, std::string key, double r, double a) {
    c.cells.push_back({std::move(scope), std::move(key), r, a, a - r, a < r});
  };
  add("overall", "all", raw.p_at_1, augmented.p_at_1);
  for (const auto& [p, s] : raw.per_predicate) {
    auto it = augmented.per_predicate.find(p);
    if (it != augmented.per_predicate.end()) add("predicate", p.str(), s.p_at_1, it->second.p_at_1);
  }
  for (const auto& [r, s] : raw.per_region) {
    auto it = augmented.per_region.find(r);
    if (it != augmented.per_region.end()) add("region", r, s.p_at_1, it->second.p_at_1);
  }
  return c;
}

std::string serialize_comparison(const Comparison& c) {
  ordered_json j;
  j["dlama_schema"] = kSchemaVersion;
  j["kind"] = "comparison";
  ordered_json cells = ordered_json::array();
  for (const auto& cell : c.cells) {
    ordered_json e;
    e["scope"] = cell.scope;
    e["key"] = cell.key;
    e["raw"] = cell.raw;
    e["augmented"] = cell.augmented;
    e["delta"] = cell.delta;
    e["flagged"] = cell.flagged;
    cells.push_back(std::move(e));
  }
  j["cells"] = std::move(cells);
  j["any_flagged"] = c.any_flagged();
  return j.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

std::string format_comparison_table(const Comparison& c) {
  std::string out = fmt::format("{:<10} {:<16} {:>7} {:>9} {:>7}\n", "scope", "key", "raw",
                                "augmented", "delta");
  for (const auto& cell : c.cells) {
    out += fmt::format("{:<10} {:<16} {:>7.1f} {:>9.1f} {:>+7.1f}{}\n", cell.scope, cell.key,
                       cell.raw, cell.augmented, cell.delta, cell.flagged ? "  augmented < raw" : "");
  }
  return out;
}

}  // namespace dlama
