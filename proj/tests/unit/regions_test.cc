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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "core/errors.h"
#include "core/ids.h"
#include "core/regions.h"

namespace dlama {
namespace {

TEST(Ids, ParsesCanonicalForms) {
  EXPECT_EQ(EntityId::parse("Q42").number(), 42u);
  EXPECT_EQ(PropertyId::parse("P1412").str(), "P1412");
  EXPECT_EQ(EntityId::from_uri("http://www.wikidata.org/entity/Q79")->str(), "Q79");
}

TEST(Ids, RejectsMalformed) {
  for (const char* bad : {"", "Q", "P42", "Q0042", "q42", "Q4a2", "Q-1", "Q 1"}) {
    EXPECT_FALSE(EntityId::try_parse(bad).has_value()) << bad;
  }
  EXPECT_THROW(PropertyId::parse("Q36"), InvalidArgument);
  EXPECT_FALSE(PropertyId::try_parse("P").has_value());
}

TEST(Ids, OrderingIsNumeric) {
  EXPECT_LT(EntityId::parse("Q9"), EntityId::parse("Q10"));
  EXPECT_LT(EntityId::parse("Q79"), EntityId::parse("Q262"));
}

TEST(Ids, OrderingMatchesNumbersOnRandomIds) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<uint64_t> dist(1, 100000000);
  for (int i = 0; i < 1000; ++i) {
    const uint64_t a = dist(rng), b = dist(rng);
    const auto ia = EntityId::parse("Q" + std::to_string(a));
    const auto ib = EntityId::parse("Q" + std::to_string(b));
    EXPECT_EQ(ia < ib, a < b);
    EXPECT_EQ(ia == ib, a == b);
  }
}

TEST(Regions, BuiltinArabWest) {
  const PairConfig c = load_builtin_config("arab_west");
  EXPECT_EQ(c.region_a.name, "arab");
  EXPECT_EQ(c.region_a.countries.size(), 22u);
  EXPECT_EQ(c.region_b.name, "west");
  EXPECT_EQ(c.region_b.countries.size(), 21u);
  EXPECT_EQ(c.languages, (std::vector<std::string>{"ar", "en"}));
  EXPECT_EQ(c.predicates.size(), 20u);
  for (const auto& p : c.predicates) EXPECT_EQ(p.max_triples, 1000);
}

TEST(Regions, BuiltinAsiaAndSouthAmerica) {
  const PairConfig asia = load_builtin_config("asia_west");
  EXPECT_EQ(asia.region_a.countries.size(), 13u);
  EXPECT_EQ(asia.languages, (std::vector<std::string>{"ko", "en"}));
  const PairConfig sa = load_builtin_config("south_america_west");
  EXPECT_EQ(sa.languages, (std::vector<std::string>{"es", "en"}));
  EXPECT_EQ(sa.region_b.countries.size(), 21u);
}

TEST(Regions, UnknownPairListsValidNames) {
  try {
    load_builtin_config("nordic_west");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* name : {"arab_west", "asia_west", "south_america_west"}) {
      EXPECT_NE(msg.find(name), std::string::npos) << msg;
    }
  }
}

TEST(Regions, BuiltinNamesAreTheThreePairs) {
  EXPECT_EQ(builtin_pair_names(),
            (std::vector<std::string>{"arab_west", "asia_west", "south_america_west"}));
}

TEST(Regions, ValidateTemplate) {
  PromptTemplate t{PropertyId::parse("P17"), "en", "[X] is located in [Y] .", std::nullopt};
  EXPECT_TRUE(validate_template(t).empty());
  t.pattern = "[X] is located in [X]";
  EXPECT_EQ(validate_template(t), (std::vector<std::string>{"duplicate `[X]`", "missing `[Y]`"}));
  t.pattern = "";
  EXPECT_EQ(validate_template(t), (std::vector<std::string>{"missing `[X]`", "missing `[Y]`"}));
  t.pattern = "[X] [Y]";
  t.question_pattern = "Where is [Y]?";
  EXPECT_EQ(validate_template(t),
            (std::vector<std::string>{"question: missing `[X]`", "question: unexpected `[Y]`"}));
}

class BuiltinPair : public ::testing::TestWithParam<std::string> {};

TEST_P(BuiltinPair, RoundTripsThroughSerialization) {
  const PairConfig c = load_builtin_config(GetParam());
  const PairConfig back = parse_pair_config(serialize_pair_config(c), "roundtrip");
  EXPECT_EQ(back, c);
}

TEST_P(BuiltinPair, RegionsAreDisjoint) {
  const PairConfig c = load_builtin_config(GetParam());
  std::set<EntityId> a;
  for (const auto& country : c.region_a.countries) a.insert(country.wikidata_id);
  for (const auto& country : c.region_b.countries) {
    EXPECT_FALSE(a.contains(country.wikidata_id)) << country.wikidata_id.str();
  }
}

TEST_P(BuiltinPair, EveryPredicateHasTemplatesInEveryLanguage) {
  const PairConfig c = load_builtin_config(GetParam());
  for (const auto& p : c.predicates) {
    for (const auto& lang : c.languages) {
      const PromptTemplate* t = c.find_template(p.predicate_id, lang);
      ASSERT_NE(t, nullptr) << p.predicate_id.str() << "/" << lang;
      EXPECT_TRUE(validate_template(*t).empty());
    }
  }
}

TEST_P(BuiltinPair, ValidatesAndCoversSupportedPredicates) {
  const PairConfig c = load_builtin_config(GetParam());
  EXPECT_TRUE(validate_pair_config(c).empty());
  std::vector<PropertyId> ids;
  for (const auto& p : c.predicates) ids.push_back(p.predicate_id);
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, supported_predicates());
}

TEST_P(BuiltinPair, EnglishSiteForEveryCountry) {
  const PairConfig c = load_builtin_config(GetParam());
  for (const Region* r : {&c.region_a, &c.region_b}) {
    for (const auto& country : r->countries) {
      const auto& sites = r->wikipedia_sites.at(country.wikidata_id);
      EXPECT_NE(std::find(sites.begin(), sites.end(), "en"), sites.end());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Pairs, BuiltinPair,
                         ::testing::Values("arab_west", "asia_west", "south_america_west"));

TEST(Regions, ParseRejectsOverlappingRegions) {
  PairConfig c = load_builtin_config("arab_west");
  c.region_b.countries.push_back(c.region_a.countries.front());
  c.region_b.wikipedia_sites[c.region_a.countries.front().wikidata_id] = {"en"};
  EXPECT_THROW(parse_pair_config(serialize_pair_config(c), "test"), ConfigError);
}

TEST(Regions, ParseRejectsUnknownClass) {
  std::string text = serialize_pair_config(load_builtin_config("arab_west"));
  const std::string from = "\"Continent\"";
  text.replace(text.find(from), from.size(), "\"Planet\"");
  EXPECT_THROW(parse_pair_config(text, "test"), ConfigError);
}

TEST(Regions, ParseRejectsMalformedJson) {
  EXPECT_THROW(parse_pair_config("{", "test"), ConfigError);
  EXPECT_THROW(parse_pair_config("[]", "test"), ConfigError);
}

TEST(Regions, ClassAndModeNamesRoundTrip) {
  for (const char* name : {"City", "Continent", "Country", "Genre", "Instrument", "Language",
                           "Occupation", "Original Network", "Person", "Piece of Work", "Place",
                           "Record Label"}) {
    auto c = parse_entity_class(name);
    ASSERT_TRUE(c.has_value()) << name;
    EXPECT_EQ(to_string(*c), name);
  }
  EXPECT_FALSE(parse_entity_class("Planet").has_value());
  EXPECT_EQ(parse_region_filter_mode("subject_citizenship"), RegionFilterMode::kSubjectCitizenship);
  EXPECT_EQ(parse_sort_key("edit_count"), SortKey::kEditCount);
}

}  // namespace
}  // namespace dlama
