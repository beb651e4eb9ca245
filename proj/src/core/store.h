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

// Line-delimited file formats: benchmark sets, prediction files, prompt
// files, and evaluation reports.
//
// Every line-delimited file starts with a header object carrying
// `"dlama_schema": 1` and a `kind`, followed by one record per line. Keys are
// written in a fixed order and unknown keys are rejected on read.

#ifndef DLAMA_CORE_STORE_H_
#define DLAMA_CORE_STORE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/ids.h"
#include "core/pipeline.h"

namespace dlama {

inline constexpr int kSchemaVersion = 1;

// Header plus triples. The header's `languages` lists every label language
// carried by the triples.
std::string serialize_benchmark(const BenchmarkSet& set);
BenchmarkSet parse_benchmark(std::string_view text);
void write_benchmark(const std::filesystem::path& path, const BenchmarkSet& set);
BenchmarkSet read_benchmark(const std::filesystem::path& path);

// `<pair>.<region>.<predicate>.jsonl`
std::string benchmark_file_name(const BenchmarkSet& set);

// Languages present in the set's triples, or none for an empty set.
std::vector<std::string> benchmark_languages(const BenchmarkSet& set);

struct TripleRef {
  PropertyId predicate_id;
  EntityId subject_id;

  friend bool operator==(const TripleRef&, const TripleRef&) = default;
  friend auto operator<=>(const TripleRef&, const TripleRef&) = default;
};

struct PredictionRecord {
  TripleRef triple_ref;
  // Exactly one of the two is populated.
  std::vector<std::string> ranked_candidates;
  std::optional<std::string> free_text;
  // Optional per-candidate scores aligned with ranked_candidates; empty
  // entries stand for unscorable candidates.
  std::vector<std::optional<double>> scores;
  bool truncated = false;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct PredictionFile {
  std::string model_id;
  std::string prompt_language;
  std::vector<PredictionRecord> records;

  friend bool operator==(const PredictionFile&, const PredictionFile&) = default;
};

// Invariant violations of one record, empty when valid.
std::vector<std::string> validate_prediction_record(const PredictionRecord& r);

std::string serialize_predictions(const PredictionFile& file);
PredictionFile parse_predictions(std::string_view text);
void write_predictions(const std::filesystem::path& path, const PredictionFile& file);
PredictionFile read_predictions(const std::filesystem::path& path);

enum class PromptMode { kCloze, kQuestion };

struct PromptRecord {
  EntityId subject_id;
  std::string prompt;

  friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

// Input of the external scorer: rendered prompts for one benchmark slice.
struct PromptFile {
  std::string pair;
  std::string region;
  PropertyId predicate_id;
  std::string language;
  PromptMode mode = PromptMode::kCloze;
  std::string mask;
  // Candidate labels to rank (cloze mode only).
  std::vector<std::string> candidates;
  std::vector<PromptRecord> records;

  friend bool operator==(const PromptFile&, const PromptFile&) = default;
};

std::string serialize_prompts(const PromptFile& file);
PromptFile parse_prompts(std::string_view text);

// Documented JSON description of the line formats.
std::string_view schema_text();

}  // namespace dlama

#endif  // DLAMA_CORE_STORE_H_
