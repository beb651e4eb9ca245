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

#ifndef DLAMA_TESTS_SUPPORT_BUILDERS_H_
#define DLAMA_TESTS_SUPPORT_BUILDERS_H_

#include <string>
#include <utility>
#include <vector>

#include "core/pipeline.h"

namespace dlama::testing {

// (object id, English label)
using ObjectSpec = std::pair<std::string, std::string>;

// A labeled English-only triple; the subject label is `subject_label` or
// the subject id when empty.
FactTriple fact(const std::string& subject, const std::vector<ObjectSpec>& objects,
                const std::string& predicate = "P30", const std::string& region = "arab",
                const std::string& subject_label = "");

BenchmarkSet benchmark(std::vector<FactTriple> triples, const std::string& predicate = "P30",
                       const std::string& region = "arab", bool augmented = true);

}  // namespace dlama::testing

#endif  // DLAMA_TESTS_SUPPORT_BUILDERS_H_
