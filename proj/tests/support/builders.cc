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

#include "support/builders.h"

#include <algorithm>

namespace dlama::testing {

FactTriple fact(const std::string& subject, const std::vector<ObjectSpec>& objects,
                const std::string& predicate, const std::string& region,
                const std::string& subject_label) {
  std::vector<ObjectSpec> sorted = objects;
  std::sort(sorted.begin(), sorted.end(), [](const ObjectSpec& a, const ObjectSpec& b) {
    return EntityId::parse(a.first) < EntityId::parse(b.first);
  });
  FactTriple t;
  t.subject_id = EntityId::parse(subject);
  t.subject_labels["en"] = subject_label.empty() ? subject : subject_label;
  for (const auto& [id, label] : sorted) {
    t.object_ids.push_back(EntityId::parse(id));
    t.object_labels["en"].push_back(label);
  }
  t.region_name = region;
  t.predicate_id = PropertyId::parse(predicate);
  return t;
}

BenchmarkSet benchmark(std::vector<FactTriple> triples, const std::string& predicate,
                       const std::string& region, bool augmented) {
  BenchmarkSet s;
  s.pair = "arab_west";
  s.region = region;
  s.predicate_id = PropertyId::parse(predicate);
  s.augmented = augmented;
  s.triples = std::move(triples);
  s.provenance = {"2026-01-15T00:00:00Z", std::string(64, '0'), "1.0.0"};
  return s;
}

}  // namespace dlama::testing
