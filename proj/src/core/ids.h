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

#ifndef DLAMA_CORE_IDS_H_
#define DLAMA_CORE_IDS_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "core/errors.h"

namespace dlama {

inline constexpr std::string_view kEntityUriPrefix =
    "http://www.wikidata.org/entity/";

// A Wikidata identifier with a one-letter prefix followed by decimal digits
// (`Q42`, `P27`). Ordering is numeric, so Q9 < Q10.
template <char Prefix>
class WikidataId {
 public:
  WikidataId() = default;

  static std::optional<WikidataId> try_parse(std::string_view text) {
    if (text.size() < 2 || text.size() > 20 || text[0] != Prefix) {
      return std::nullopt;
    }
    if (text[1] == '0' && text.size() > 2) return std::nullopt;
    uint64_t number = 0;
    for (char c : text.substr(1)) {
      if (c < '0' || c > '9') return std::nullopt;
      number = number * 10 + static_cast<uint64_t>(c - '0');
    }
    WikidataId id;
    id.number_ = number;
    id.text_ = std::string(text);
    return id;
  }

  static WikidataId parse(std::string_view text) {
    auto id = try_parse(text);
    if (!id) {
      throw InvalidArgument("'" + std::string(text) + "' is not a valid " +
                            std::string(1, Prefix) + "[0-9]+ identifier");
    }
    return *id;
  }

  // Accepts `http://www.wikidata.org/entity/Q42` and the bare id.
  static std::optional<WikidataId> from_uri(std::string_view uri) {
    if (uri.starts_with(kEntityUriPrefix)) uri.remove_prefix(kEntityUriPrefix.size());
    return try_parse(uri);
  }

  const std::string& str() const { return text_; }
  uint64_t number() const { return number_; }
  bool empty() const { return text_.empty(); }

  friend bool operator==(const WikidataId& a, const WikidataId& b) {
    return a.text_ == b.text_;
  }
  friend std::strong_ordering operator<=>(const WikidataId& a,
                                          const WikidataId& b) {
    // Empty ids sort first; parsed ids are canonical (no leading zeros).
    if (auto c = !a.text_.empty() <=> !b.text_.empty(); c != 0) return c;
    return a.number_ <=> b.number_;
  }

 private:
  uint64_t number_ = 0;
  std::string text_;
};

using EntityId = WikidataId<'Q'>;
using PropertyId = WikidataId<'P'>;

}  // namespace dlama

template <char Prefix>
struct std::hash<dlama::WikidataId<Prefix>> {
  size_t operator()(const dlama::WikidataId<Prefix>& id) const noexcept {
    return std::hash<uint64_t>{}(id.number());
  }
};

#endif  // DLAMA_CORE_IDS_H_
