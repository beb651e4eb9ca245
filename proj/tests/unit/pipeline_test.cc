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
#include "core/pipeline.h"
#include "core/regions.h"
#include "core/sparql.h"
#include "support/builders.h"
#include "support/fixture_world.h"
#include "support/graph_fixture.h"
#include "support/test_util.h"

namespace dlama {
namespace {

using testing::fixture_endpoint;
using testing::FixtureWorld;
using testing::make_fixture_client;

const PairConfig& arab_west() {
  static const PairConfig c = load_builtin_config("arab_west");
  return c;
}

PredicateSpec spec(const char* p) {
  PredicateSpec s = *arab_west().find_predicate(PropertyId::parse(p));
  s.languages = arab_west().languages;
  return s;
}

EntityId Q(const char* id) { return EntityId::parse(id); }

std::vector<EntityId> Qs(std::initializer_list<const char*> ids) {
  std::vector<EntityId> out;
  for (const char* s : ids) out.push_back(EntityId::parse(s));
  return out;
}

struct Harness {
  testing::FixtureClient fixture;
  FetchLog log;
  std::vector<std::string> progress;
  StageContext ctx;

  explicit Harness(FixtureWorld world = FixtureWorld::standard(), int page_size = kDefaultPageSize)
      : fixture(make_fixture_client(fixture_endpoint(), std::move(world))) {
    ctx = {fixture.client.get(), &log, page_size, [this](const std::string& s) { progress.push_back(s); }};
  }
};

// Fails every SPARQL request whose query text contains `needle`.
class FailingTransport : public Transport {
 public:
  FailingTransport(std::shared_ptr<Transport> inner, std::string needle)
      : inner_(std::move(inner)), needle_(std::move(needle)) {}
  HttpResponse send(const HttpRequest& r) override {
    if (r.method == "POST" && url_decode(r.body.substr(6)).find(needle_) != std::string::npos) {
      return {400, "bad", "", std::nullopt};
    }
    return inner_->send(r);
  }

 private:
  std::shared_ptr<Transport> inner_;
  std::string needle_;
};

TEST(Harvest, CapitalsOfArabRegion) {
  Harness h;
  const auto raw = harvest(spec("P36"), arab_west().region_a, h.ctx);
  ASSERT_EQ(raw.size(), 22u);
  std::set<EntityId> subjects;
  for (const auto& t : raw) {
    subjects.insert(t.subject_id);
    EXPECT_TRUE(arab_west().region_a.contains(t.subject_id));
    EXPECT_EQ(t.object_ids.size(), 1u);
    EXPECT_TRUE(std::is_sorted(t.sitelinks.begin(), t.sitelinks.end()));
  }
  EXPECT_EQ(subjects.size(), 22u);
  EXPECT_EQ(harvest(spec("P36"), arab_west().region_a, h.ctx), raw);
}

TEST(Harvest, FabricatedCountryYieldsNothing) {
  Harness h;
  Region r;
  r.name = "nowhere";
  r.countries = {{Q("Q999999999"), "Nowhere"}};
  r.wikipedia_sites[Q("Q999999999")] = {"en"};
  EXPECT_TRUE(harvest(spec("P36"), r, h.ctx).empty());
}

TEST(Harvest, PagingMatchesSinglePage) {
  Harness big;
  Harness small(FixtureWorld::standard(), 7);
  const auto a = harvest(spec("P36"), arab_west().region_a, big.ctx);
  const auto b = harvest(spec("P36"), arab_west().region_a, small.ctx);
  EXPECT_EQ(a, b);
  // 22 countries with three sites each, one dangling: 66 rows in pages of 7.
  EXPECT_EQ(small.fixture.transport->calls(), 10u);
  EXPECT_EQ(big.fixture.transport->calls(), 1u);
}

TEST(Harvest, GroupsRowsBySubject) {
  RowSet rows;
  rows.vars = {"subject", "object", "article"};
  auto uri = [](const std::string& v) { return RdfTerm{"uri", v, ""}; };
  const std::string e = "http://www.wikidata.org/entity/";
  rows.rows.push_back({{"subject", uri(e + "Q79")}, {"object", uri(e + "Q48")}, {"article", uri("https://en.wikipedia.org/wiki/Egypt")}});
  rows.rows.push_back({{"subject", uri(e + "Q79")}, {"object", uri(e + "Q15")}, {"article", uri("https://ar.wikipedia.org/wiki/x")}});
  rows.rows.push_back({{"subject", uri(e + "Q79")}, {"object", uri(e + "Q15")}, {"article", uri("https://en.wikipedia.org/wiki/Egypt")}});
  rows.rows.push_back({{"subject", uri(e + "Q262")}, {"object", uri(e + "Q15")}});
  rows.rows.push_back({{"subject", {"literal", "junk", ""}}, {"object", uri(e + "Q15")}});
  const auto g = group_harvest_rows(rows);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].subject_id, Q("Q79"));
  EXPECT_EQ(g[0].object_ids, Qs({"Q15", "Q48"}));
  EXPECT_EQ(g[0].sitelinks, (std::vector<std::string>{"https://ar.wikipedia.org/wiki/x",
                                                     "https://en.wikipedia.org/wiki/Egypt"}));
  EXPECT_EQ(g[1].subject_id, Q("Q262"));
  EXPECT_TRUE(g[1].sitelinks.empty());
}

RawTriple raw(const char* subject, std::vector<std::string> links) {
  RawTriple t;
  t.subject_id = Q(subject);
  t.object_ids = {Q("Q1")};
  t.sitelinks = std::move(links);
  return t;
}

TEST(RankAndSelect, LargestArticleWins) {
  ArticleStats stats;
  stats.value = {{"a1", 500}, {"a2", 900}, {"b1", 700}};
  const auto out = rank_and_select({raw("Q2", {"b1"}), raw("Q1", {"a1", "a2"})}, stats, 10);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].subject_id, Q("Q1"));
  EXPECT_EQ(out[0].rank_value, 900);
  EXPECT_EQ(out[1].rank_value, 700);
}

TEST(RankAndSelect, CapKeepsTopRanked) {
  ArticleStats stats;
  std::vector<RawTriple> in;
  for (int i = 1; i <= 5; ++i) {
    const std::string link = "l" + std::to_string(i);
    stats.value[link] = i * 100;
    in.push_back(raw(("Q" + std::to_string(i)).c_str(), {link}));
  }
  const auto out = rank_and_select(in, stats, 3);
  EXPECT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].subject_id, Q("Q5"));
  EXPECT_EQ(out[2].subject_id, Q("Q3"));
}

TEST(RankAndSelect, NoArticleRanksLastAndMissingStatsIgnored) {
  ArticleStats stats;
  stats.value = {{"x", 0}};
  const auto out =
      rank_and_select({raw("Q3", {}), raw("Q4", {"gone"}), raw("Q9", {"x"})}, stats, 10);
  EXPECT_EQ(out[0].subject_id, Q("Q9"));
  EXPECT_EQ(out[0].rank_value, 0);  // size 0 is an article, unlike no article
  EXPECT_FALSE(out[1].rank_value);
  EXPECT_EQ(out[1].subject_id, Q("Q3"));
  EXPECT_EQ(out[2].subject_id, Q("Q4"));
}

TEST(RankAndSelect, MatchesFullSortOracle) {
  std::mt19937 rng(2024);
  for (int round = 0; round < 200; ++round) {
    ArticleStats stats;
    std::vector<RawTriple> in;
    const int n = 1 + static_cast<int>(rng() % 40);
    std::set<int> used;
    for (int i = 0; i < n; ++i) {
      int id;
      do id = 1 + static_cast<int>(rng() % 500); while (!used.insert(id).second);
      std::vector<std::string> links;
      const int k = static_cast<int>(rng() % 4);
      for (int j = 0; j < k; ++j) {
        const std::string link = "u" + std::to_string(id) + "_" + std::to_string(j);
        if (rng() % 5) stats.value[link] = static_cast<int64_t>(rng() % 8);  // many ties
        links.push_back(link);
      }
      in.push_back(raw(("Q" + std::to_string(id)).c_str(), links));
    }
    const int cap = 1 + static_cast<int>(rng() % 45);
    // Oracle: key (-max size or +inf, numeric id), sorted, truncated.
    std::vector<std::tuple<int, int64_t, uint64_t>> keys;
    for (const auto& t : in) {
      std::optional<int64_t> best;
      for (const auto& l : t.sitelinks) {
        if (stats.value.contains(l)) best = std::max(best.value_or(INT64_MIN), stats.value.at(l));
      }
      keys.emplace_back(best ? 0 : 1, best ? -*best : 0, t.subject_id.number());
    }
    std::sort(keys.begin(), keys.end());
    keys.resize(std::min<size_t>(keys.size(), static_cast<size_t>(cap)));
    const auto out = rank_and_select(in, stats, cap);
    ASSERT_EQ(out.size(), keys.size());
    for (size_t i = 0; i < out.size(); ++i) {
      EXPECT_EQ(out[i].subject_id.number(), std::get<2>(keys[i]));
    }
  }
}

TEST(ExpandObjects, AddsNonRegionCitizenship) {
  Harness h;
  auto harvested = harvest(spec("P27"), arab_west().region_a, h.ctx);
  ASSERT_EQ(harvested.size(), 1u);
  EXPECT_EQ(harvested[0].object_ids, Qs({"Q142", "Q822"}));
  const auto out = expand_objects(harvested, spec("P27"), h.ctx);
  EXPECT_EQ(out[0].object_ids, Qs({"Q142", "Q822", "Q1129977"}));
}

TEST(ExpandObjects, CompleteTriplesUnchanged) {
  Harness h;
  const auto harvested = harvest(spec("P36"), arab_west().region_a, h.ctx);
  EXPECT_EQ(expand_objects(harvested, spec("P36"), h.ctx), harvested);
}

TEST(ExpandObjects, EqualsBruteForceReplay) {
  const FixtureWorld world = FixtureWorld::standard();
  Harness h;
  for (const char* p : {"P27", "P30", "P37", "P36", "P19"}) {
    for (const Region* r : {&arab_west().region_a, &arab_west().region_b}) {
      const auto harvested = harvest(spec(p), *r, h.ctx);
      const auto out = expand_objects(harvested, spec(p), h.ctx);
      ASSERT_EQ(out.size(), harvested.size());
      for (size_t i = 0; i < out.size(); ++i) {
        std::set<EntityId> expected(harvested[i].object_ids.begin(), harvested[i].object_ids.end());
        const auto& claims = world.entities().at(out[i].subject_id).claims;
        if (auto c = claims.find(p); c != claims.end()) expected.insert(c->second.begin(), c->second.end());
        EXPECT_EQ(out[i].object_ids, std::vector<EntityId>(expected.begin(), expected.end()));
      }
    }
  }
}

TEST(ExpandObjects, ChunksLargeSubjectLists) {
  FixtureWorld w;
  std::vector<RawTriple> in;
  for (int i = 1; i <= 1100; ++i) {
    const std::string id = "Q" + std::to_string(i);
    w.claim(id, "P27", "Q30");
    RawTriple t;
    t.subject_id = EntityId::parse(id);
    in.push_back(t);
  }
  Harness h(w);
  const auto out = expand_objects(in, spec("P27"), h.ctx);
  EXPECT_EQ(h.fixture.transport->calls(), 3u);  // 500 + 500 + 100
  for (const auto& t : out) EXPECT_EQ(t.object_ids, Qs({"Q30"}));
}

TEST(Labels, SmallestLabelWinsOnDuplicates) {
  Harness h;
  h.fixture.transport->script({200, R"({"head":{"vars":["entity","language","label"]},"results":{"bindings":[
    {"entity":{"type":"uri","value":"http://www.wikidata.org/entity/Q85"},"language":{"type":"literal","value":"en"},"label":{"type":"literal","xml:lang":"en","value":"Cairo City"}},
    {"entity":{"type":"uri","value":"http://www.wikidata.org/entity/Q85"},"language":{"type":"literal","value":"en"},"label":{"type":"literal","xml:lang":"en","value":"Cairo"}}]}})",
                               "", std::nullopt});
  const std::vector<std::string> langs = {"en"};
  const auto ids = Qs({"Q85"});
  EXPECT_EQ(fetch_labels(ids, langs, h.ctx).at(Q("Q85")).at("en"), "Cairo");
}

TEST(JoinLabels, Rules) {
  const std::vector<std::string> langs = {"ko", "en"};
  LabelTable labels;
  labels[Q("Q1")] = {{"ko", "일"}, {"en", "One"}};
  labels[Q("Q2")] = {{"en", "Two"}};  // no Korean label
  labels[Q("Q10")] = {{"ko", "십"}, {"en", "Ten"}};
  labels[Q("Q11")] = {{"en", "Eleven"}};
  labels[Q("Q12")] = {{"ko", "십이"}, {"en", "Twelve"}};

  RawTriple keep;  // one of two objects loses its Korean label
  keep.subject_id = Q("Q1");
  keep.object_ids = Qs({"Q10", "Q11"});
  RawTriple unlabeled_subject;
  unlabeled_subject.subject_id = Q("Q2");
  unlabeled_subject.object_ids = Qs({"Q10"});
  RawTriple no_objects_left;
  no_objects_left.subject_id = Q("Q1");
  no_objects_left.object_ids = Qs({"Q11"});
  RawTriple complete;
  complete.subject_id = Q("Q1");
  complete.object_ids = Qs({"Q10", "Q12"});
  complete.rank_value = 42;

  PredicateSpec s = spec("P37");
  const std::vector<RawTriple> in = {keep, unlabeled_subject, no_objects_left, complete};
  const auto out = join_labels(in, langs, labels, s, "asia");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].object_ids, Qs({"Q10"}));
  EXPECT_EQ(out[0].object_labels.at("ko"), (std::vector<std::string>{"십"}));
  EXPECT_EQ(out[1].object_ids, Qs({"Q10", "Q12"}));
  EXPECT_EQ(out[1].object_labels.at("en"), (std::vector<std::string>{"Ten", "Twelve"}));
  EXPECT_EQ(out[1].subject_labels.at("ko"), "일");
  EXPECT_EQ(out[1].rank_value, 42);
  EXPECT_EQ(out[1].region_name, "asia");
  for (const auto& t : out) EXPECT_TRUE(validate_fact_triple(t, langs).empty());
}

TEST(SubclassGraph, AmericanEnglishEdge) {
  Harness h;
  const auto g = build_subclass_graph(Qs({"Q7976"}), h.ctx);
  EXPECT_TRUE(g.edges().contains({Q("Q7976"), Q("Q1860")}));
  EXPECT_EQ(g.ancestors(Q("Q7976")), Qs({"Q1860", "Q1346342"}));
}

TEST(SubclassGraph, DisjointObjectsGiveNoEdges) {
  Harness h;
  const auto g = build_subclass_graph(Qs({"Q13955", "Q150", "Q188"}), h.ctx);
  EXPECT_TRUE(g.edges().empty());
  EXPECT_EQ(g.nodes().size(), 3u);
}

TEST(SubclassGraph, CycleTerminatesAndIsFound) {
  const auto& f = testing::graph_fixture();
  EXPECT_GE(f.graph.nodes().size(), 20u);
  const auto cycle = f.graph.find_cycle();
  ASSERT_TRUE(cycle);
  std::set<EntityId> on_cycle(cycle->begin(), cycle->end());
  EXPECT_EQ(on_cycle, (std::set<EntityId>{Q("Q121"), Q("Q124")}));
  const auto anc = f.graph.ancestors(Q("Q122"));
  EXPECT_EQ(anc, Qs({"Q100", "Q101", "Q119", "Q120", "Q121", "Q124"}));
  EXPECT_EQ(f.graph.ancestors(Q("Q121")), Qs({"Q100", "Q101", "Q119", "Q120", "Q124"}));
}

TEST(SubclassGraph, FetchedCycleIsReported) {
  FixtureWorld w = FixtureWorld::standard();
  w.claim("Q1860", "P279", "Q7976");
  Harness h(w);
  const auto harvested = harvest(spec("P37"), arab_west().region_b, h.ctx);
  auto expanded = expand_objects(harvested, spec("P37"), h.ctx);
  std::vector<EntityId> ids;
  for (const auto& t : expanded) {
    ids.push_back(t.subject_id);
    ids.insert(ids.end(), t.object_ids.begin(), t.object_ids.end());
  }
  const auto langs = arab_west().languages;
  const auto labels = fetch_labels(ids, langs, h.ctx);
  const auto facts = join_labels(expanded, langs, labels, spec("P37"), "west");
  const auto out = augment_set(facts, PropertyId::parse("P37"), langs, h.ctx);
  EXPECT_EQ(out.size(), facts.size());
  EXPECT_TRUE(std::any_of(h.progress.begin(), h.progress.end(), [](const std::string& s) {
    return s.find("subclass cycle in P37") != std::string::npos;
  }));
}

TEST(SubclassGraph, SelfEdgesDropped) {
  SubclassGraph g;
  g.add_edge(Q("Q1"), Q("Q1"));
  EXPECT_TRUE(g.edges().empty());
  EXPECT_FALSE(g.find_cycle());
  EXPECT_TRUE(g.ancestors(Q("Q1")).empty());
}

FactTriple labeled(const char* subject, std::vector<EntityId> objects, const LabelTable& labels) {
  FactTriple t;
  t.subject_id = Q(subject);
  t.subject_labels = {{"ar", "س"}, {"en", "S"}};
  t.object_ids = std::move(objects);
  for (const auto& o : t.object_ids) {
    for (const char* lang : {"ar", "en"}) t.object_labels[lang].push_back(labels.at(o).at(lang));
  }
  t.region_name = "west";
  t.predicate_id = PropertyId::parse("P37");
  return t;
}

TEST(Augment, AmericanEnglishGainsEnglish) {
  Harness h;
  const auto graph = build_subclass_graph(Qs({"Q7976"}), h.ctx);
  const std::vector<std::string> langs = {"ar", "en"};
  const auto labels = fetch_labels(Qs({"Q7976", "Q1860", "Q1346342"}), langs, h.ctx);
  const FactTriple t = labeled("Q30", Qs({"Q7976"}), labels);
  const FactTriple a = augment_objects(t, graph, labels);
  // The Anglic family is skipped: it has no Arabic label.
  EXPECT_EQ(a.object_ids, Qs({"Q1860", "Q7976"}));
  EXPECT_EQ(a.object_labels.at("en"), (std::vector<std::string>{"English", "American English"}));
  EXPECT_EQ(augment_objects(a, graph, labels), a);
}

TEST(Augment, NoAncestorsUnchanged) {
  const auto& f = testing::graph_fixture();
  const FactTriple t = labeled("Q1", Qs({"Q100"}), f.labels);
  EXPECT_EQ(augment_objects(t, f.graph, f.labels), t);
}

TEST(Augment, ClosureAndIdempotenceOnFixtureGraph) {
  const auto& f = testing::graph_fixture();
  for (const auto& node : f.graph.nodes()) {
    if (!f.labels.at(node).contains("ar")) continue;
    const FactTriple t = labeled("Q1", {node}, f.labels);
    const FactTriple a = augment_objects(t, f.graph, f.labels);
    std::set<EntityId> set(a.object_ids.begin(), a.object_ids.end());
    EXPECT_TRUE(set.contains(node));
    for (const auto& anc : f.graph.ancestors(node)) {
      EXPECT_EQ(set.contains(anc), f.labels.at(anc).contains("ar")) << node.str() << " " << anc.str();
    }
    EXPECT_EQ(augment_objects(a, f.graph, f.labels), a);
    EXPECT_TRUE(validate_fact_triple(a, std::vector<std::string>{"ar", "en"}).empty());
  }
}

TEST(Territory, ParisHiltonChain) {
  Harness h;
  const auto g = build_territory_graph(Qs({"Q60"}), h.ctx);
  EXPECT_EQ(g.ancestors(Q("Q60")), Qs({"Q30", "Q1384"}));
}

TEST(Territory, JamaicaHospitalFiveElementChain) {
  Harness h;
  const std::vector<std::string> langs = {"ar", "en"};
  const auto g = build_territory_graph(Qs({"Q6129741"}), h.ctx);
  const auto labels = fetch_labels(Qs({"Q6129741", "Q18424", "Q60", "Q1384", "Q30"}), langs, h.ctx);
  FactTriple t = labeled("Q22686", Qs({"Q6129741"}), labels);
  t.predicate_id = PropertyId::parse("P19");
  const FactTriple a = augment_objects(t, g, labels);
  EXPECT_EQ(a.object_ids, Qs({"Q30", "Q60", "Q1384", "Q18424", "Q6129741"}));
  EXPECT_EQ(a.object_labels.at("en"),
            (std::vector<std::string>{"United States of America", "New York City", "New York",
                                      "Queens", "Jamaica Hospital Medical Center"}));
}

TEST(Territory, CountryLevelObjectUnchanged) {
  Harness h;
  EXPECT_TRUE(build_territory_graph(Qs({"Q30"}), h.ctx).edges().empty());
}

TEST(Territory, OnlyBirthAndDeathPlaces) {
  EXPECT_TRUE(uses_territory_expansion(PropertyId::parse("P19")));
  EXPECT_TRUE(uses_territory_expansion(PropertyId::parse("P20")));
  EXPECT_FALSE(uses_territory_expansion(PropertyId::parse("P17")));
  EXPECT_FALSE(uses_territory_expansion(PropertyId::parse("P131")));
}

PipelineOptions options(bool augment, std::vector<const char*> predicates = {}) {
  PipelineOptions o;
  o.augment = augment;
  for (const char* p : predicates) o.predicates.push_back(PropertyId::parse(p));
  return o;
}

TEST(RunPair, AllPredicatesBothRegions) {
  auto f = make_fixture_client(fixture_endpoint());
  const PairResult r = run_pair(arab_west(), *f.client, options(true));
  EXPECT_EQ(r.sets.size(), 40u);
  EXPECT_TRUE(r.failures.empty());
  for (const auto& [key, set] : r.sets) {
    EXPECT_EQ(set.region, key.first);
    EXPECT_EQ(set.predicate_id, key.second);
    EXPECT_EQ(set.provenance.tool_version, "1.0.0");
    EXPECT_LE(set.triples.size(), 1000u);
  }
}

TEST(RunPair, OfficialLanguageOfArabCountries) {
  auto f = make_fixture_client(fixture_endpoint());
  const PairResult r = run_pair(arab_west(), *f.client, options(true, {"P37"}));
  const auto& set = r.sets.at({"arab", PropertyId::parse("P37")});
  ASSERT_EQ(set.triples.size(), 22u);
  for (const auto& t : set.triples) {
    EXPECT_NE(std::find(t.object_ids.begin(), t.object_ids.end(), Q("Q13955")), t.object_ids.end());
  }
}

TEST(RunPair, RawIsSubsetOfAugmented) {
  auto f = make_fixture_client(fixture_endpoint());
  const auto preds = std::vector<const char*>{"P19", "P27", "P30", "P36", "P37"};
  const PairResult raw_run = run_pair(arab_west(), *f.client, options(false, preds));
  const PairResult aug_run = run_pair(arab_west(), *f.client, options(true, preds));
  bool grew = false;
  for (const auto& [key, raw_set] : raw_run.sets) {
    const auto& aug_set = aug_run.sets.at(key);
    EXPECT_FALSE(raw_set.augmented);
    ASSERT_EQ(raw_set.triples.size(), aug_set.triples.size());
    for (size_t i = 0; i < raw_set.triples.size(); ++i) {
      const auto& a = aug_set.triples[i].object_ids;
      const auto& b = raw_set.triples[i].object_ids;
      EXPECT_TRUE(std::includes(a.begin(), a.end(), b.begin(), b.end()));
      grew = grew || a.size() > b.size();
    }
  }
  EXPECT_TRUE(grew);
}

TEST(RunPair, RegionPurityAndLabelCompleteness) {
  auto f = make_fixture_client(fixture_endpoint());
  const FixtureWorld world = FixtureWorld::standard();
  const PairResult r = run_pair(arab_west(), *f.client, options(true, {"P19", "P27", "P30", "P36"}));
  for (const auto& [key, set] : r.sets) {
    const Region& region = *arab_west().find_region(key.first);
    const PredicateSpec& s = *arab_west().find_predicate(key.second);
    for (const auto& t : set.triples) {
      EXPECT_TRUE(validate_fact_triple(t, arab_west().languages).empty());
      const auto& claims = world.entities().at(t.subject_id).claims;
      bool inside = region.contains(t.subject_id);
      if (s.region_filter_mode == RegionFilterMode::kSubjectCitizenship) {
        for (const auto& c : claims.at("P27")) inside = inside || region.contains(c);
      }
      EXPECT_TRUE(inside) << t.subject_id.str();
    }
  }
}

TEST(RunPair, MaxTriplesOverride) {
  auto f = make_fixture_client(fixture_endpoint());
  PipelineOptions o = options(false, {"P36"});
  o.max_triples = 5;
  o.regions = {"arab"};
  const PairResult r = run_pair(arab_west(), *f.client, o);
  ASSERT_EQ(r.sets.size(), 1u);
  const auto& triples = r.sets.begin()->second.triples;
  EXPECT_EQ(triples.size(), 5u);
  for (size_t i = 1; i < triples.size(); ++i) EXPECT_GE(*triples[i - 1].rank_value, *triples[i].rank_value);
}

TEST(RunPair, EditCountSort) {
  auto f = make_fixture_client(fixture_endpoint());
  PipelineOptions o = options(false, {"P36"});
  o.sort_key = SortKey::kEditCount;
  o.regions = {"west"};
  const PairResult r = run_pair(arab_west(), *f.client, o);
  const auto& set = r.sets.begin()->second;
  ASSERT_EQ(set.triples.size(), 20u);
  for (const auto& t : set.triples) EXPECT_EQ(t.rank_source, SortKey::kEditCount);
  for (size_t i = 1; i < set.triples.size(); ++i) {
    EXPECT_GE(*set.triples[i - 1].rank_value, *set.triples[i].rank_value);
  }
}

TEST(RunPair, ProvenanceIsDeterministic) {
  auto a = make_fixture_client(fixture_endpoint());
  auto b = make_fixture_client(fixture_endpoint());
  const auto ra = run_pair(arab_west(), *a.client, options(true, {"P36"}));
  const auto rb = run_pair(arab_west(), *b.client, options(true, {"P36"}));
  for (const auto& [key, set] : ra.sets) {
    EXPECT_EQ(set, rb.sets.at(key));
    EXPECT_EQ(set.provenance.created_at, "2026-01-15T00:00:00Z");
    EXPECT_EQ(set.provenance.cache_digest.size(), 64u);
  }
}

TEST(RunPair, FailuresAreAggregated) {
  auto f = make_fixture_client(fixture_endpoint());
  auto failing = std::make_shared<FailingTransport>(f.transport, "wdt:P30 ?object");
  HarvestClient client(fixture_endpoint(), failing, f.clock);
  try {
    run_pair(arab_west(), client, options(false, {"P30", "P36"}));
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("arab/P30"), std::string::npos) << msg;
    EXPECT_NE(msg.find("west/P30"), std::string::npos) << msg;
  }
  PipelineOptions partial = options(false, {"P30", "P36"});
  partial.allow_partial = true;
  const PairResult r = run_pair(arab_west(), client, partial);
  EXPECT_EQ(r.sets.size(), 2u);
  EXPECT_EQ(r.failures.size(), 2u);
  EXPECT_TRUE(r.failures.contains({"arab", PropertyId::parse("P30")}));
}

TEST(RunPair, RejectsUnknownPredicateAndRegion) {
  auto f = make_fixture_client(fixture_endpoint());
  EXPECT_THROW(run_pair(arab_west(), *f.client, options(true, {"P999"})), InvalidArgument);
  PipelineOptions o;
  o.regions = {"atlantis"};
  EXPECT_THROW(run_pair(arab_west(), *f.client, o), InvalidArgument);
}

TEST(FactTriple, ValidationNamesProblems) {
  FactTriple t = testing::fact("Q1", {{"Q2", "Two"}});
  const std::vector<std::string> en = {"en"};
  EXPECT_TRUE(validate_fact_triple(t, en).empty());
  const std::vector<std::string> ar_en = {"ar", "en"};
  EXPECT_FALSE(validate_fact_triple(t, ar_en).empty());
  FactTriple bad = t;
  bad.object_labels["en"].push_back("extra");
  EXPECT_FALSE(validate_fact_triple(bad, en).empty());
  bad = t;
  bad.rank_value = -1;
  EXPECT_FALSE(validate_fact_triple(bad, en).empty());
  bad = t;
  bad.object_ids.clear();
  bad.object_labels["en"].clear();
  EXPECT_FALSE(validate_fact_triple(bad, en).empty());
}

}  // namespace
}  // namespace dlama
