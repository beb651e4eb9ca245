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

#include "core/store.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/errors.h"
#include "core/fileio.h"
#include "core/text.h"
#include "json.hpp"

namespace dlama {
namespace embedded {
extern const char kSchemaText[];
}  // namespace embedded

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string dump(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

// Strict view over one JSON object: every key must be consumed exactly once
// and unknown keys are errors.
class Fields {
 public:
  Fields(const json& j, int line, std::string_view what) : j_(j), line_(line) {
    if (!j.is_object()) fail(std::string(what) + " must be a JSON object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) fail("missing field '" + key + "'");
    used_.insert(key);
    return *it;
  }

  std::string str(const std::string& key, bool allow_empty = false) {
    const json& v = raw(key);
    if (!v.is_string()) fail("field '" + key + "' must be a string");
    std::string s = v.get<std::string>();
    if (!allow_empty && s.empty()) fail("field '" + key + "' must not be empty");
    return s;
  }

  bool boolean(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_boolean()) fail("field '" + key + "' must be a boolean");
    return v.get<bool>();
  }

  int64_t integer(const std::string& key, int64_t min = 0) {
    const json& v = raw(key);
    if (!v.is_number_integer()) fail("field '" + key + "' must be an integer");
    const int64_t n = v.is_number_unsigned() && v.get<uint64_t>() > INT64_MAX
                          ? INT64_MAX
                          : v.get<int64_t>();
    if (n < min) fail("field '" + key + "' must be >= " + std::to_string(min));
    return n;
  }

  std::optional<int64_t> nullable_integer(const std::string& key) {
    if (raw(key).is_null()) return std::nullopt;
    return integer(key);
  }

  std::vector<std::string> strings(const std::string& key, bool allow_empty_items = false) {
    const json& v = raw(key);
    if (!v.is_array()) fail("field '" + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& item : v) {
      if (!item.is_string()) fail("field '" + key + "' must contain only strings");
      out.push_back(item.get<std::string>());
      if (!allow_empty_items && out.back().empty()) fail("field '" + key + "' has an empty entry");
    }
    return out;
  }

  template <typename Id>
  Id id(const std::string& key) {
    std::string s = str(key);
    auto parsed = Id::try_parse(s);
    if (!parsed) fail("field '" + key + "' is not a valid identifier: '" + s + "'");
    return *parsed;
  }

  const json& object(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_object()) fail("field '" + key + "' must be an object");
    return v;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!used_.contains(key)) fail("unknown field '" + key + "'");
    }
  }

  int line() const { return line_; }

 private:
  const json& j_;
  int line_;
  std::set<std::string> used_;
};

struct Line {
  int number;
  json value;
};

// Splits into non-terminal lines and parses each as JSON.
std::vector<Line> parse_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++number;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) throw ParseError("blank line", number);
    if (!is_valid_utf8(line)) throw ParseError("invalid UTF-8", number);
    try {
      out.push_back({number, json::parse(line)});
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), number);
    }
  }
  if (out.empty()) throw ParseError("empty file: missing header line", 1);
  return out;
}

void check_schema(Fields& f, std::string_view kind) {
  const json& version = f.raw("dlama_schema");
  if (!version.is_number_integer() || version.get<int64_t>() != kSchemaVersion) {
    throw SchemaError("unsupported dlama_schema " + version.dump() + " (this build reads " +
                          std::to_string(kSchemaVersion) + ")",
                      f.line());
  }
  const std::string k = f.str("kind");
  if (k != kind) {
    throw SchemaError("expected a '" + std::string(kind) + "' file, found kind '" + k + "'",
                      f.line());
  }
}

void check_language_code(const Fields& f, const std::string& lang) {
  if (lang.empty() || !std::all_of(lang.begin(), lang.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
      })) {
    f.fail("invalid language code '" + lang + "'");
  }
}

ordered_json triple_json(const FactTriple& t) {
  ordered_json j;
  j["subject_id"] = t.subject_id.str();
  ordered_json subject_labels = ordered_json::object();
  for (const auto& [lang, label] : t.subject_labels) subject_labels[lang] = label;
  j["subject_labels"] = std::move(subject_labels);
  ordered_json ids = ordered_json::array();
  for (const auto& id : t.object_ids) ids.push_back(id.str());
  j["object_ids"] = std::move(ids);
  ordered_json object_labels = ordered_json::object();
  for (const auto& [lang, labels] : t.object_labels) object_labels[lang] = labels;
  j["object_labels"] = std::move(object_labels);
  j["region"] = t.region_name;
  j["predicate_id"] = t.predicate_id.str();
  j["rank_value"] = t.rank_value ? ordered_json(*t.rank_value) : ordered_json(nullptr);
  j["rank_source"] = to_string(t.rank_source);
  return j;
}

FactTriple parse_triple(const Line& line, const std::vector<std::string>& languages) {
  Fields f(line.value, line.number, "triple");
  FactTriple t;
  t.subject_id = f.id<EntityId>("subject_id");
  for (const auto& [lang, label] : f.object("subject_labels").items()) {
    if (!label.is_string()) f.fail("subject label for '" + lang + "' must be a string");
    t.subject_labels[lang] = label.get<std::string>();
  }
  for (const auto& s : f.strings("object_ids")) {
    auto id = EntityId::try_parse(s);
    if (!id) f.fail("object_ids has an invalid identifier: '" + s + "'");
    t.object_ids.push_back(*id);
  }
  for (const auto& [lang, labels] : f.object("object_labels").items()) {
    if (!labels.is_array()) f.fail("object labels for '" + lang + "' must be an array");
    auto& list = t.object_labels[lang];
    for (const auto& l : labels) {
      if (!l.is_string()) f.fail("object labels for '" + lang + "' must be strings");
      list.push_back(l.get<std::string>());
    }
  }
  t.region_name = f.str("region");
  t.predicate_id = f.id<PropertyId>("predicate_id");
  t.rank_value = f.nullable_integer("rank_value");
  const std::string source = f.str("rank_source");
  auto key = parse_sort_key(source);
  if (!key) f.fail("unknown rank_source '" + source + "'");
  t.rank_source = *key;
  f.finish();

  for (const auto& [lang, _] : t.subject_labels) {
    if (std::find(languages.begin(), languages.end(), lang) == languages.end()) {
      f.fail("subject label language '" + lang + "' not declared in header");
    }
  }
  for (const auto& [lang, _] : t.object_labels) {
    if (std::find(languages.begin(), languages.end(), lang) == languages.end()) {
      f.fail("object label language '" + lang + "' not declared in header");
    }
  }
  if (auto problems = validate_fact_triple(t, languages); !problems.empty()) {
    f.fail(problems.front());
  }
  return t;
}

}  // namespace

std::vector<std::string> benchmark_languages(const BenchmarkSet& set) {
  std::set<std::string> langs;
  for (const auto& t : set.triples) {
    for (const auto& [lang, _] : t.subject_labels) langs.insert(lang);
  }
  return {langs.begin(), langs.end()};
}

std::string serialize_benchmark(const BenchmarkSet& set) {
  ordered_json header;
  header["dlama_schema"] = kSchemaVersion;
  header["kind"] = "benchmark";
  header["pair"] = set.pair;
  header["region"] = set.region;
  header["predicate_id"] = set.predicate_id.str();
  header["augmented"] = set.augmented;
  header["languages"] = benchmark_languages(set);
  header["n_triples"] = set.triples.size();
  header["empty"] = set.triples.empty();
  ordered_json prov;
  prov["created_at"] = set.provenance.created_at;
  prov["cache_digest"] = set.provenance.cache_digest;
  prov["tool_version"] = set.provenance.tool_version;
  header["provenance"] = std::move(prov);
  std::string out = dump(header) + "\n";
  for (const auto& t : set.triples) out += dump(triple_json(t)) + "\n";
  return out;
}

BenchmarkSet parse_benchmark(std::string_view text) {
  std::vector<Line> lines = parse_lines(text);
  BenchmarkSet set;
  Fields h(lines[0].value, lines[0].number, "header");
  check_schema(h, "benchmark");
  set.pair = h.str("pair");
  set.region = h.str("region");
  set.predicate_id = h.id<PropertyId>("predicate_id");
  set.augmented = h.boolean("augmented");
  const std::vector<std::string> languages = h.strings("languages");
  for (const auto& lang : languages) check_language_code(h, lang);
  if (std::set<std::string>(languages.begin(), languages.end()).size() != languages.size()) {
    h.fail("duplicate entry in 'languages'");
  }
  const int64_t n = h.integer("n_triples");
  const bool empty = h.boolean("empty");
  if (empty != (n == 0)) h.fail("'empty' must be true exactly when n_triples is 0");
  if (n > 0 && languages.empty()) h.fail("'languages' must not be empty for a non-empty set");
  Fields prov(h.object("provenance"), lines[0].number, "provenance");
  set.provenance.created_at = prov.str("created_at", true);
  set.provenance.cache_digest = prov.str("cache_digest", true);
  set.provenance.tool_version = prov.str("tool_version", true);
  prov.finish();
  h.finish();

  std::set<EntityId> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    FactTriple t = parse_triple(lines[i], languages);
    if (t.region_name != set.region) {
      throw ParseError("triple region '" + t.region_name + "' differs from header", lines[i].number);
    }
    if (t.predicate_id != set.predicate_id) {
      throw ParseError("triple predicate " + t.predicate_id.str() + " differs from header",
                       lines[i].number);
    }
    if (!seen.insert(t.subject_id).second) {
      throw ParseError("duplicate subject " + t.subject_id.str(), lines[i].number);
    }
    set.triples.push_back(std::move(t));
  }
  if (static_cast<int64_t>(set.triples.size()) != n) {
    throw ParseError("header declares " + std::to_string(n) + " triples, file has " +
                         std::to_string(set.triples.size()),
                     lines.back().number);
  }
  return set;
}

void write_benchmark(const std::filesystem::path& path, const BenchmarkSet& set) {
  write_file_atomic(path, serialize_benchmark(set));
}

BenchmarkSet read_benchmark(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_benchmark(text);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string(), e);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

std::string benchmark_file_name(const BenchmarkSet& set) {
  return set.pair + "." + set.region + "." + set.predicate_id.str() + ".jsonl";
}

std::vector<std::string> validate_prediction_record(const PredictionRecord& r) {
  std::vector<std::string> out;
  const bool ranked = !r.ranked_candidates.empty();
  if (ranked == r.free_text.has_value()) {
    out.push_back("exactly one of ranked_candidates (non-empty) and free_text is required");
  }
  std::set<std::string> labels(r.ranked_candidates.begin(), r.ranked_candidates.end());
  if (labels.size() != r.ranked_candidates.size()) out.push_back("duplicate candidate label");
  if (!r.scores.empty() && r.scores.size() != r.ranked_candidates.size()) {
    out.push_back("scores not aligned with ranked_candidates");
  }
  for (const auto& s : r.scores) {
    if (s && !std::isfinite(*s)) out.push_back("non-finite score");
  }
  if (r.truncated && !ranked) out.push_back("truncated applies to ranked records only");
  return out;
}

std::string serialize_predictions(const PredictionFile& file) {
  ordered_json header;
  header["dlama_schema"] = kSchemaVersion;
  header["kind"] = "predictions";
  header["model_id"] = file.model_id;
  header["prompt_language"] = file.prompt_language;
  header["n_records"] = file.records.size();
  std::string out = dump(header) + "\n";
  for (const auto& r : file.records) {
    ordered_json j;
    j["predicate_id"] = r.triple_ref.predicate_id.str();
    j["subject_id"] = r.triple_ref.subject_id.str();
    if (r.free_text) {
      j["free_text"] = *r.free_text;
    } else {
      j["ranked_candidates"] = r.ranked_candidates;
      if (!r.scores.empty()) {
        ordered_json scores = ordered_json::array();
        for (const auto& s : r.scores) scores.push_back(s ? ordered_json(*s) : ordered_json(nullptr));
        j["scores"] = std::move(scores);
      }
      if (r.truncated) j["truncated"] = true;
    }
    out += dump(j) + "\n";
  }
  return out;
}

PredictionFile parse_predictions(std::string_view text) {
  std::vector<Line> lines = parse_lines(text);
  PredictionFile file;
  Fields h(lines[0].value, lines[0].number, "header");
  check_schema(h, "predictions");
  file.model_id = h.str("model_id");
  file.prompt_language = h.str("prompt_language");
  check_language_code(h, file.prompt_language);
  const int64_t n = h.integer("n_records");
  h.finish();

  std::set<TripleRef> seen;
  for (size_t i = 1; i < lines.size(); ++i) {
    Fields f(lines[i].value, lines[i].number, "record");
    PredictionRecord r;
    r.triple_ref.predicate_id = f.id<PropertyId>("predicate_id");
    r.triple_ref.subject_id = f.id<EntityId>("subject_id");
    const bool has_ranked = f.has("ranked_candidates");
    const bool has_free = f.has("free_text");
    if (has_ranked == has_free) f.fail("exactly one of 'ranked_candidates' and 'free_text' is required");
    if (has_free) {
      r.free_text = f.str("free_text", true);
    } else {
      r.ranked_candidates = f.strings("ranked_candidates", true);
      if (r.ranked_candidates.empty()) f.fail("'ranked_candidates' must not be empty");
      if (f.has("scores")) {
        const json& scores = f.raw("scores");
        if (!scores.is_array()) f.fail("field 'scores' must be an array");
        for (const auto& s : scores) {
          if (s.is_null()) {
            r.scores.push_back(std::nullopt);
          } else if (s.is_number()) {
            r.scores.push_back(s.get<double>());
          } else {
            f.fail("field 'scores' must contain numbers or null");
          }
        }
      }
      if (f.has("truncated")) r.truncated = f.boolean("truncated");
    }
    f.finish();
    if (auto problems = validate_prediction_record(r); !problems.empty()) f.fail(problems.front());
    if (!seen.insert(r.triple_ref).second) {
      f.fail("duplicate record for " + r.triple_ref.predicate_id.str() + "/" +
             r.triple_ref.subject_id.str());
    }
    file.records.push_back(std::move(r));
  }
  if (static_cast<int64_t>(file.records.size()) != n) {
    throw ParseError("header declares " + std::to_string(n) + " records, file has " +
                         std::to_string(file.records.size()),
                     lines.back().number);
  }
  return file;
}

void write_predictions(const std::filesystem::path& path, const PredictionFile& file) {
  write_file_atomic(path, serialize_predictions(file));
}

PredictionFile read_predictions(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_predictions(text);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string(), e);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

std::string serialize_prompts(const PromptFile& file) {
  ordered_json header;
  header["dlama_schema"] = kSchemaVersion;
  header["kind"] = "prompts";
  header["pair"] = file.pair;
  header["region"] = file.region;
  header["predicate_id"] = file.predicate_id.str();
  header["language"] = file.language;
  header["mode"] = file.mode == PromptMode::kCloze ? "cloze" : "question";
  header["mask"] = file.mask;
  header["candidates"] = file.candidates;
  header["n_records"] = file.records.size();
  std::string out = dump(header) + "\n";
  for (const auto& r : file.records) {
    ordered_json j;
    j["subject_id"] = r.subject_id.str();
    j["prompt"] = r.prompt;
    out += dump(j) + "\n";
  }
  return out;
}

PromptFile parse_prompts(std::string_view text) {
  std::vector<Line> lines = parse_lines(text);
  PromptFile file;
  Fields h(lines[0].value, lines[0].number, "header");
  check_schema(h, "prompts");
  file.pair = h.str("pair");
  file.region = h.str("region");
  file.predicate_id = h.id<PropertyId>("predicate_id");
  file.language = h.str("language");
  check_language_code(h, file.language);
  const std::string mode = h.str("mode");
  if (mode == "cloze") {
    file.mode = PromptMode::kCloze;
  } else if (mode == "question") {
    file.mode = PromptMode::kQuestion;
  } else {
    h.fail("unknown mode '" + mode + "'");
  }
  file.mask = h.str("mask", true);
  file.candidates = h.strings("candidates");
  const int64_t n = h.integer("n_records");
  h.finish();
  for (size_t i = 1; i < lines.size(); ++i) {
    Fields f(lines[i].value, lines[i].number, "record");
    PromptRecord r;
    r.subject_id = f.id<EntityId>("subject_id");
    r.prompt = f.str("prompt");
    f.finish();
    file.records.push_back(std::move(r));
  }
  if (static_cast<int64_t>(file.records.size()) != n) {
    throw ParseError("header declares " + std::to_string(n) + " records, file has " +
                         std::to_string(file.records.size()),
                     lines.back().number);
  }
  return file;
}

std::string_view schema_text() { return embedded::kSchemaText; }

}  // namespace dlama
