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

#include "core/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "core/errors.h"
#include "core/sparql.h"

namespace dlama {
namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::optional<EntityId> entity_of(const ResultRow& row, const std::string& var) {
  auto it = row.find(var);
  if (it == row.end() || it->second.type != "uri") return std::nullopt;
  return EntityId::from_uri(it->second.value);
}

void report(const StageContext& ctx, const std::string& line) {
  if (ctx.progress) ctx.progress(line);
}

// Runs `make(chunk, page)` over `ids` in chunks of kIdChunkSize, all pages.
template <typename Make>
std::vector<ResultRow> run_chunked(std::span<const EntityId> ids, const StageContext& ctx,
                                   Make&& make) {
  std::vector<EntityId> sorted(ids.begin(), ids.end());
  sort_unique(sorted);
  std::vector<ResultRow> rows;
  for (size_t start = 0; start < sorted.size(); start += kIdChunkSize) {
    std::span<const EntityId> chunk(sorted.data() + start,
                                    std::min(kIdChunkSize, sorted.size() - start));
    RowSet set = ctx.client->run_paged([&](Page page) { return make(chunk, page); },
                                       ctx.page_size, ctx.log);
    for (auto& r : set.rows) rows.push_back(std::move(r));
  }
  return rows;
}

bool has_all_labels(const LabelTable& labels, const EntityId& id,
                    std::span<const std::string> languages) {
  auto it = labels.find(id);
  if (it == labels.end()) return false;
  for (const auto& lang : languages) {
    if (!it->second.contains(lang)) return false;
  }
  return true;
}

}  // namespace

std::string_view tool_version() { return DLAMA_VERSION_STRING; }

std::vector<std::string> validate_fact_triple(const FactTriple& t,
                                              std::span<const std::string> languages) {
  std::vector<std::string> out;
  if (t.subject_id.empty()) out.push_back("missing subject_id");
  if (t.object_ids.empty()) out.push_back("empty object set");
  if (!std::is_sorted(t.object_ids.begin(), t.object_ids.end()) ||
      std::adjacent_find(t.object_ids.begin(), t.object_ids.end()) != t.object_ids.end()) {
    out.push_back("object_ids not sorted and unique");
  }
  for (const auto& lang : languages) {
    auto s = t.subject_labels.find(lang);
    if (s == t.subject_labels.end() || s->second.empty()) {
      out.push_back("missing subject label for " + lang);
    }
    auto o = t.object_labels.find(lang);
    if (o == t.object_labels.end()) {
      out.push_back("missing object labels for " + lang);
    } else if (o->second.size() != t.object_ids.size()) {
      out.push_back("object labels for " + lang + " not aligned with object_ids");
    } else if (std::any_of(o->second.begin(), o->second.end(),
                           [](const std::string& l) { return l.empty(); })) {
      out.push_back("empty object label for " + lang);
    }
  }
  if (t.rank_value && *t.rank_value < 0) out.push_back("negative rank_value");
  return out;
}

void SubclassGraph::add_node(const EntityId& id) { nodes_.insert(id); }

void SubclassGraph::add_edge(const EntityId& child, const EntityId& parent) {
  nodes_.insert(child);
  nodes_.insert(parent);
  if (child == parent) return;
  if (edges_.emplace(child, parent).second) parents_[child].push_back(parent);
}

std::vector<EntityId> SubclassGraph::parents(const EntityId& id) const {
  auto it = parents_.find(id);
  if (it == parents_.end()) return {};
  std::vector<EntityId> out = it->second;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EntityId> SubclassGraph::ancestors(const EntityId& id) const {
  std::set<EntityId> seen;
  std::vector<EntityId> stack{id};
  while (!stack.empty()) {
    EntityId cur = std::move(stack.back());
    stack.pop_back();
    auto it = parents_.find(cur);
    if (it == parents_.end()) continue;
    for (const auto& p : it->second) {
      if (seen.insert(p).second) stack.push_back(p);
    }
  }
  seen.erase(id);
  return {seen.begin(), seen.end()};
}

std::optional<std::vector<EntityId>> SubclassGraph::find_cycle() const {
  enum class Mark { kNew, kActive, kDone };
  std::map<EntityId, Mark> mark;
  for (const auto& n : nodes_) mark[n] = Mark::kNew;
  for (const auto& root : nodes_) {
    if (mark[root] != Mark::kNew) continue;
    // Iterative DFS keeping the active path.
    std::vector<std::pair<EntityId, size_t>> path{{root, 0}};
    mark[root] = Mark::kActive;
    while (!path.empty()) {
      auto& [node, next] = path.back();
      auto it = parents_.find(node);
      const size_t degree = it == parents_.end() ? 0 : it->second.size();
      if (next == degree) {
        mark[node] = Mark::kDone;
        path.pop_back();
        continue;
      }
      const EntityId parent = it->second[next++];
      if (mark[parent] == Mark::kActive) {
        std::vector<EntityId> cycle;
        auto start = std::find_if(path.begin(), path.end(),
                                  [&](const auto& e) { return e.first == parent; });
        for (; start != path.end(); ++start) cycle.push_back(start->first);
        return cycle;
      }
      if (mark[parent] == Mark::kNew) {
        mark[parent] = Mark::kActive;
        path.emplace_back(parent, 0);
      }
    }
  }
  return std::nullopt;
}

std::vector<RawTriple> group_harvest_rows(const RowSet& rows) {
  std::map<EntityId, RawTriple> by_subject;
  for (const auto& row : rows.rows) {
    auto subject = entity_of(row, "subject");
    if (!subject) continue;
    auto object = entity_of(row, "object");
    if (!object) continue;
    RawTriple& t = by_subject[*subject];
    t.subject_id = *subject;
    t.object_ids.push_back(*object);
    if (auto a = row.find("article"); a != row.end() && a->second.type == "uri") {
      t.sitelinks.push_back(a->second.value);
    }
  }
  std::vector<RawTriple> out;
  out.reserve(by_subject.size());
  for (auto& [_, t] : by_subject) {
    sort_unique(t.object_ids);
    sort_unique(t.sitelinks);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<RawTriple> harvest(const PredicateSpec& spec, const Region& region,
                               const StageContext& ctx) {
  RowSet rows = ctx.client->run_paged(
      [&](Page page) { return build_harvest_query(spec, region, page); }, ctx.page_size, ctx.log);
  return group_harvest_rows(rows);
}

ArticleStats article_stats(const ArticleMetaResult& meta, SortKey key) {
  ArticleStats out;
  for (const auto& [url, m] : meta.found) {
    if (key == SortKey::kEditCount) {
      if (m.revision_count) out.value[url] = *m.revision_count;
    } else {
      out.value[url] = m.size_bytes;
    }
  }
  return out;
}

std::vector<RawTriple> rank_and_select(std::vector<RawTriple> triples, const ArticleStats& stats,
                                       int max_triples) {
  for (auto& t : triples) {
    t.rank_value.reset();
    for (const auto& link : t.sitelinks) {
      auto it = stats.value.find(link);
      if (it == stats.value.end()) continue;
      if (!t.rank_value || it->second > *t.rank_value) t.rank_value = it->second;
    }
  }
  std::sort(triples.begin(), triples.end(), [](const RawTriple& a, const RawTriple& b) {
    if (a.rank_value.has_value() != b.rank_value.has_value()) return a.rank_value.has_value();
    if (a.rank_value && *a.rank_value != *b.rank_value) return *a.rank_value > *b.rank_value;
    return a.subject_id < b.subject_id;
  });
  if (max_triples >= 0 && triples.size() > static_cast<size_t>(max_triples)) {
    triples.resize(static_cast<size_t>(max_triples));
  }
  return triples;
}

std::vector<RawTriple> expand_objects(std::vector<RawTriple> selected, const PredicateSpec& spec,
                                      const StageContext& ctx) {
  if (selected.empty()) return selected;
  std::vector<EntityId> subjects;
  for (const auto& t : selected) subjects.push_back(t.subject_id);
  auto rows = run_chunked(subjects, ctx, [&](std::span<const EntityId> chunk, Page page) {
    return build_all_objects_query(chunk, spec.predicate_id, page);
  });
  std::map<EntityId, std::vector<EntityId>> objects;
  for (const auto& row : rows) {
    auto s = entity_of(row, "subject");
    auto o = entity_of(row, "object");
    if (s && o) objects[*s].push_back(*o);
  }
  for (auto& t : selected) {
    if (auto it = objects.find(t.subject_id); it != objects.end()) {
      t.object_ids.insert(t.object_ids.end(), it->second.begin(), it->second.end());
      sort_unique(t.object_ids);
    }
  }
  return selected;
}

LabelTable fetch_labels(std::span<const EntityId> ids, std::span<const std::string> languages,
                        const StageContext& ctx) {
  LabelTable out;
  if (ids.empty()) return out;
  auto rows = run_chunked(ids, ctx, [&](std::span<const EntityId> chunk, Page page) {
    return build_labels_query(chunk, languages, page);
  });
  for (const auto& row : rows) {
    auto e = entity_of(row, "entity");
    auto lang = row.find("language");
    auto label = row.find("label");
    if (!e || lang == row.end() || label == row.end() || label->second.value.empty()) continue;
    auto& slot = out[*e];
    auto [it, inserted] = slot.emplace(lang->second.value, label->second.value);
    if (!inserted && label->second.value < it->second) it->second = label->second.value;
  }
  return out;
}

std::vector<FactTriple> join_labels(std::span<const RawTriple> triples,
                                    std::span<const std::string> languages,
                                    const LabelTable& labels, const PredicateSpec& spec,
                                    const std::string& region_name) {
  std::vector<FactTriple> out;
  for (const auto& raw : triples) {
    if (!has_all_labels(labels, raw.subject_id, languages)) continue;
    FactTriple t;
    t.subject_id = raw.subject_id;
    t.region_name = region_name;
    t.predicate_id = spec.predicate_id;
    t.rank_value = raw.rank_value;
    t.rank_source = spec.sort_key;
    const auto& subject_labels = labels.at(raw.subject_id);
    for (const auto& lang : languages) t.subject_labels[lang] = subject_labels.at(lang);
    for (const auto& lang : languages) t.object_labels[lang];
    for (const auto& o : raw.object_ids) {
      if (!has_all_labels(labels, o, languages)) continue;
      t.object_ids.push_back(o);
      for (const auto& lang : languages) t.object_labels[lang].push_back(labels.at(o).at(lang));
    }
    if (t.object_ids.empty()) continue;
    out.push_back(std::move(t));
  }
  return out;
}

SubclassGraph build_subclass_graph(std::span<const EntityId> object_ids, const StageContext& ctx) {
  SubclassGraph g;
  for (const auto& id : object_ids) g.add_node(id);
  if (object_ids.empty()) return g;
  auto rows = run_chunked(object_ids, ctx, [](std::span<const EntityId> chunk, Page page) {
    return build_subclass_edges_query(chunk, page);
  });
  for (const auto& row : rows) {
    auto c = entity_of(row, "child");
    auto p = entity_of(row, "parent");
    if (c && p) g.add_edge(*c, *p);
  }
  return g;
}

SubclassGraph build_territory_graph(std::span<const EntityId> place_ids, const StageContext& ctx) {
  SubclassGraph g;
  for (const auto& id : place_ids) g.add_node(id);
  if (place_ids.empty()) return g;
  auto rows = run_chunked(place_ids, ctx, [](std::span<const EntityId> chunk, Page page) {
    return build_territory_chain_query(chunk, page);
  });
  for (const auto& row : rows) {
    auto c = entity_of(row, "place");
    auto p = entity_of(row, "ancestor");
    if (c && p) g.add_edge(*c, *p);
  }
  return g;
}

FactTriple augment_objects(const FactTriple& triple, const SubclassGraph& graph,
                           const LabelTable& labels) {
  std::vector<std::string> languages;
  for (const auto& [lang, _] : triple.object_labels) languages.push_back(lang);

  std::map<EntityId, std::map<std::string, std::string>> merged;
  for (size_t i = 0; i < triple.object_ids.size(); ++i) {
    auto& slot = merged[triple.object_ids[i]];
    for (const auto& lang : languages) slot[lang] = triple.object_labels.at(lang).at(i);
  }
  for (const auto& o : triple.object_ids) {
    for (const auto& a : graph.ancestors(o)) {
      if (merged.contains(a) || !has_all_labels(labels, a, languages)) continue;
      auto& slot = merged[a];
      for (const auto& lang : languages) slot[lang] = labels.at(a).at(lang);
    }
  }
  FactTriple out = triple;
  out.object_ids.clear();
  for (auto& [lang, list] : out.object_labels) list.clear();
  for (const auto& [id, by_lang] : merged) {
    out.object_ids.push_back(id);
    for (const auto& lang : languages) out.object_labels[lang].push_back(by_lang.at(lang));
  }
  return out;
}

std::vector<FactTriple> augment_set(std::vector<FactTriple> triples, const PropertyId& predicate,
                                    std::span<const std::string> languages,
                                    const StageContext& ctx) {
  if (triples.empty()) return triples;
  std::vector<EntityId> objects;
  LabelTable known;
  for (const auto& t : triples) {
    for (size_t i = 0; i < t.object_ids.size(); ++i) {
      objects.push_back(t.object_ids[i]);
      for (const auto& [lang, list] : t.object_labels) known[t.object_ids[i]][lang] = list[i];
    }
  }
  sort_unique(objects);
  SubclassGraph graph = build_subclass_graph(objects, ctx);
  if (uses_territory_expansion(predicate)) {
    SubclassGraph territory = build_territory_graph(objects, ctx);
    for (const auto& [c, p] : territory.edges()) graph.add_edge(c, p);
  }
  if (auto cycle = graph.find_cycle()) {
    std::string path;
    for (const auto& id : *cycle) path += id.str() + " -> ";
    report(ctx, "subclass cycle in " + predicate.str() + " graph: " + path + cycle->front().str());
  }
  std::vector<EntityId> unknown;
  for (const auto& n : graph.nodes()) {
    if (!known.contains(n)) unknown.push_back(n);
  }
  LabelTable fetched = fetch_labels(unknown, languages, ctx);
  known.merge(fetched);
  for (auto& t : triples) t = augment_objects(t, graph, known);
  return triples;
}

BenchmarkSet run_slice(const PairConfig& config, const Region& region, const PredicateSpec& spec,
                       HarvestClient& client, const PipelineOptions& options) {
  PredicateSpec effective = spec;
  if (!options.languages.empty()) {
    effective.languages = options.languages;
  } else if (effective.languages.empty()) {
    effective.languages = config.languages;
  }
  if (options.max_triples) effective.max_triples = *options.max_triples;
  if (options.sort_key) effective.sort_key = *options.sort_key;
  if (effective.languages.empty()) throw InvalidArgument("no languages requested");
  if (effective.max_triples <= 0) throw InvalidArgument("max_triples must be positive");

  FetchLog log;
  StageContext ctx{&client, &log, options.page_size, options.progress};
  const std::string tag = "[" + config.name + "/" + region.name + "/" + spec.predicate_id.str() + "] ";

  std::vector<RawTriple> raw = harvest(effective, region, ctx);
  report(ctx, tag + "harvested " + std::to_string(raw.size()) + " subjects");

  std::vector<std::string> links;
  for (const auto& t : raw) links.insert(links.end(), t.sitelinks.begin(), t.sitelinks.end());
  sort_unique(links);
  ArticleStats stats;
  if (!links.empty()) {
    ArticleMetaResult meta = client.fetch_article_meta(
        links, effective.sort_key == SortKey::kEditCount, &log);
    for (const auto& [url, why] : meta.errors) report(ctx, tag + "skipping link " + url + ": " + why);
    stats = article_stats(meta, effective.sort_key);
  }
  std::vector<RawTriple> selected = rank_and_select(std::move(raw), stats, effective.max_triples);
  std::vector<RawTriple> expanded = expand_objects(std::move(selected), effective, ctx);

  std::vector<EntityId> ids;
  for (const auto& t : expanded) {
    ids.push_back(t.subject_id);
    ids.insert(ids.end(), t.object_ids.begin(), t.object_ids.end());
  }
  sort_unique(ids);
  LabelTable labels = fetch_labels(ids, effective.languages, ctx);
  std::vector<FactTriple> facts =
      join_labels(expanded, effective.languages, labels, effective, region.name);
  report(ctx, tag + std::to_string(facts.size()) + " of " + std::to_string(expanded.size()) +
                  " selected triples fully labeled");
  if (options.augment) facts = augment_set(std::move(facts), spec.predicate_id, effective.languages, ctx);

  BenchmarkSet set;
  set.pair = config.name;
  set.region = region.name;
  set.predicate_id = spec.predicate_id;
  set.augmented = options.augment;
  set.triples = std::move(facts);
  set.provenance.created_at = log.latest_fetched_at();
  set.provenance.cache_digest = log.digest();
  set.provenance.tool_version = std::string(tool_version());
  return set;
}

PairResult run_pair(const PairConfig& config, HarvestClient& client,
                    const PipelineOptions& options) {
  std::vector<const Region*> regions;
  for (const Region* r : {&config.region_a, &config.region_b}) {
    if (options.regions.empty() ||
        std::find(options.regions.begin(), options.regions.end(), r->name) != options.regions.end()) {
      regions.push_back(r);
    }
  }
  for (const auto& wanted : options.regions) {
    if (!config.find_region(wanted)) {
      throw InvalidArgument("pair " + config.name + " has no region '" + wanted + "'");
    }
  }
  std::vector<const PredicateSpec*> specs;
  if (options.predicates.empty()) {
    for (const auto& p : config.predicates) specs.push_back(&p);
  } else {
    for (const auto& id : options.predicates) {
      const PredicateSpec* p = config.find_predicate(id);
      if (!p) throw InvalidArgument("pair " + config.name + " has no predicate " + id.str());
      if (std::find(specs.begin(), specs.end(), p) == specs.end()) specs.push_back(p);
    }
  }

  struct Job {
    const Region* region;
    const PredicateSpec* spec;
    std::optional<BenchmarkSet> set;
    std::string failure;
  };
  std::vector<Job> jobs;
  for (const auto* p : specs) {
    for (const auto* r : regions) jobs.push_back({r, p, std::nullopt, {}});
  }

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      Job& job = jobs[i];
      try {
        job.set = run_slice(config, *job.region, *job.spec, client, options);
      } catch (const std::exception& e) {
        job.failure = e.what();
        if (options.progress) {
          options.progress("[" + config.name + "/" + job.region->name + "/" +
                           job.spec->predicate_id.str() + "] failed: " + job.failure);
        }
      }
    }
  };
  const size_t n_threads = std::clamp<size_t>(static_cast<size_t>(std::max(1, options.concurrency)),
                                              1, std::max<size_t>(1, jobs.size()));
  std::vector<std::thread> threads;
  for (size_t i = 1; i < n_threads; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  PairResult result;
  for (auto& job : jobs) {
    SliceKey key{job.region->name, job.spec->predicate_id};
    if (job.set) {
      result.sets.emplace(key, std::move(*job.set));
    } else {
      result.failures.emplace(key, job.failure);
    }
  }
  if (!result.failures.empty() && !options.allow_partial) {
    std::string what = std::to_string(result.failures.size()) + " of " +
                       std::to_string(jobs.size()) + " slices failed:";
    for (const auto& [key, why] : result.failures) {
      what += "\n  " + key.first + "/" + key.second.str() + ": " + why;
    }
    throw PipelineError(what);
  }
  return result;
}

}  // namespace dlama
