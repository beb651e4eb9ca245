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

// Unicode helpers over ICU.

#ifndef DLAMA_CORE_TEXT_H_
#define DLAMA_CORE_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace dlama {

// NFC normalization of UTF-8 text. Invalid sequences become U+FFFD.
std::string nfc(std::string_view utf8);

// Collapses runs of Unicode white space into one ASCII space and trims both
// ends.
std::string collapse_whitespace(std::string_view utf8);

// Full Unicode case folding.
std::string case_fold(std::string_view utf8);

bool is_valid_utf8(std::string_view text);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

}  // namespace dlama

#endif  // DLAMA_CORE_TEXT_H_
