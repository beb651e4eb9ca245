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

#include "core/harvest_client.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <future>
#include <set>
#include <thread>

#include "core/errors.h"
#include "core/hash.h"
#include "json.hpp"

namespace dlama {
namespace {

using nlohmann::json;

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : std::string();
}

bool truthy(std::string_view value) {
  return value == "1" || value == "true" || value == "yes" || value == "on";
}

bool retryable(int status) { return status == 0 || status == 429 || status >= 500; }

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  for (size_t pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

std::string title_key(std::string_view title) {
  std::string out(title);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace

EndpointConfig EndpointConfig::from_env(EndpointConfig base) {
  if (auto v = env_or_empty("DLAMA_SPARQL_ENDPOINT"); !v.empty()) base.sparql_url = v;
  if (auto v = env_or_empty("DLAMA_CACHE_DIR"); !v.empty()) base.cache_dir = v;
  if (auto v = env_or_empty("DLAMA_OFFLINE"); !v.empty()) base.offline = truthy(v);
  if (auto v = env_or_empty("DLAMA_USER_AGENT"); !v.empty()) base.user_agent = v;
  return base;
}

std::vector<std::string> EndpointConfig::validate() const {
  std::vector<std::string> out;
  if (user_agent.empty()) out.push_back("user_agent must not be empty");
  if (min_request_interval.count() < 0) out.push_back("min_request_interval must be >= 0");
  if (initial_backoff.count() < 0) out.push_back("initial_backoff must be >= 0");
  if (max_retries < 0) out.push_back("max_retries must be >= 0");
  if (article_parallelism < 1) out.push_back("article_parallelism must be >= 1");
  if (!parse_url(sparql_url)) out.push_back("sparql_url is not an http(s) URL: " + sparql_url);
  for (const auto* pattern : {&wikipedia_api_url_pattern, &wikipedia_rest_url_pattern}) {
    if (pattern->find("{site}") == std::string::npos ||
        !parse_url(replace_all(*pattern, "{site}", "en"))) {
      out.push_back("wikipedia URL pattern must be an http(s) URL containing {site}: " + *pattern);
    }
  }
  return out;
}

RowSet parse_sparql_json(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed SPARQL results document: ") + e.what());
  }
  RowSet out;
  try {
    if (!doc.is_object()) throw ParseError("SPARQL results document is not an object");
    const auto& vars = doc.at("head").at("vars");
    for (const auto& v : vars) out.vars.push_back(v.get<std::string>());
    const auto& bindings = doc.at("results").at("bindings");
    if (!bindings.is_array()) throw ParseError("results.bindings is not an array");
    out.rows.reserve(bindings.size());
    for (const auto& b : bindings) {
      if (!b.is_object()) throw ParseError("binding is not an object");
      ResultRow row;
      for (const auto& [name, term] : b.items()) {
        RdfTerm t;
        t.type = term.at("type").get<std::string>();
        t.value = term.at("value").get<std::string>();
        if (auto it = term.find("xml:lang"); it != term.end()) t.lang = it->get<std::string>();
        row.emplace(name, std::move(t));
      }
      out.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("unexpected SPARQL results structure: ") + e.what());
  }
  return out;
}

std::optional<ArticleRef> parse_article_url(std::string_view url) {
  auto parsed = parse_url(url);
  if (!parsed) return std::nullopt;
  static constexpr std::string_view kSuffix = ".wikipedia.org";
  const std::string& host = parsed->host;
  if (host.size() <= kSuffix.size() ||
      host.compare(host.size() - kSuffix.size(), kSuffix.size(), kSuffix) != 0) {
    return std::nullopt;
  }
  std::string site = host.substr(0, host.size() - kSuffix.size());
  if (site.empty() || site.find('.') != std::string::npos) return std::nullopt;
  static constexpr std::string_view kPrefix = "/wiki/";
  std::string_view target = parsed->target;
  if (target.substr(0, kPrefix.size()) != kPrefix) return std::nullopt;
  target.remove_prefix(kPrefix.size());
  target = target.substr(0, target.find_first_of("?#"));
  std::string title = title_key(url_decode(target));
  if (title.empty()) return std::nullopt;
  return ArticleRef{std::move(site), std::move(title)};
}

void FetchLog::record(const std::string& key, const std::string& fetched_at) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_[key] = fetched_at;
}

std::string FetchLog::digest() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (entries_.empty()) return {};
  std::string material;
  for (const auto& [key, at] : entries_) material += key + " " + at + "\n";
  return sha256_hex(material);
}

std::string FetchLog::latest_fetched_at() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::string latest;
  for (const auto& [_, at] : entries_) latest = std::max(latest, at);
  return latest;
}

size_t FetchLog::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return entries_.size();
}

HarvestClient::HarvestClient(EndpointConfig config, std::shared_ptr<Transport> transport,
                             std::shared_ptr<Clock> clock)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      limiter_(clock_, config_.min_request_interval) {
  if (auto problems = config_.validate(); !problems.empty()) {
    throw ConfigError("invalid endpoint configuration: " + problems.front());
  }
  if (!config_.cache_dir.empty()) cache_.emplace(config_.cache_dir);
}

size_t HarvestClient::network_requests() const {
  std::lock_guard<std::mutex> lock(stats_mutex_);
  return network_requests_;
}

HarvestClient::Fetched HarvestClient::fetch(const HttpRequest& request,
                                            const std::string& cache_material,
                                            std::initializer_list<int> accepted, FetchLog* log) {
  const std::string key = ResponseCache::key_for(cache_material);
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      if (log) log->record(key, hit->fetched_at);
      return {hit->status, std::move(hit->body)};
    }
  }
  if (config_.offline) {
    throw CacheMiss("offline mode: no cached response for " + request.url + " (key " + key + ")");
  }
  const auto url = parse_url(request.url);
  if (!url) throw InvalidArgument("not an http(s) URL: " + request.url);

  auto is_accepted = [&](int status) {
    return status == 200 || std::find(accepted.begin(), accepted.end(), status) != accepted.end();
  };

  HttpRequest req = request;
  req.headers.emplace_back("User-Agent", config_.user_agent);
  HttpResponse response;
  for (int attempt = 0;; ++attempt) {
    limiter_.acquire(url->host);
    {
      std::lock_guard<std::mutex> lock(stats_mutex_);
      ++network_requests_;
    }
    response = transport_->send(req);
    if (is_accepted(response.status)) break;
    if (!retryable(response.status) || attempt >= config_.max_retries) {
      std::string what = response.status == 0
                             ? "request failed: " + response.error
                             : "HTTP " + std::to_string(response.status);
      if (attempt > 0) what += " after " + std::to_string(attempt + 1) + " attempts";
      throw TransportError(what + " (" + request.url + ")", response.status);
    }
    auto wait = config_.initial_backoff * (int64_t{1} << std::min(attempt, 16));
    if (response.retry_after_seconds) {
      wait = std::max<std::chrono::milliseconds>(
          wait, std::chrono::seconds(*response.retry_after_seconds));
    }
    clock_->sleep_for(wait);
  }
  CachedResponse entry{response.status, std::move(response.body), clock_->utc_timestamp()};
  if (cache_) cache_->put(key, cache_material, entry);
  if (log) log->record(key, entry.fetched_at);
  return {entry.status, std::move(entry.body)};
}

RowSet HarvestClient::run_query(const SparqlQuery& query, FetchLog* log) {
  if (auto problems = validate_query(query); !problems.empty()) {
    throw InvalidArgument("refusing to send invalid query: " + problems.front());
  }
  HttpRequest req;
  req.method = "POST";
  req.url = config_.sparql_url;
  req.headers.emplace_back("Accept", "application/sparql-results+json");
  req.content_type = "application/x-www-form-urlencoded";
  req.body = "query=" + url_encode(query.text);
  Fetched f = fetch(req, query.text, {}, log);
  return parse_sparql_json(f.body);
}

std::string HarvestClient::site_url(const std::string& pattern, const std::string& site) const {
  return replace_all(pattern, "{site}", site);
}

ArticleMetaResult HarvestClient::fetch_article_meta(std::span<const std::string> urls,
                                                    bool with_revisions, FetchLog* log) {
  ArticleMetaResult result;
  // site -> title -> input URLs naming it
  std::map<std::string, std::map<std::string, std::vector<std::string>>> wanted;
  for (const auto& url : urls) {
    auto ref = parse_article_url(url);
    if (!ref) {
      result.errors[url] = "not a Wikipedia article URL";
      continue;
    }
    auto& sinks = wanted[ref->site][ref->title];
    if (std::find(sinks.begin(), sinks.end(), url) == sinks.end()) sinks.push_back(url);
  }

  struct Batch {
    std::string site;
    std::vector<std::string> titles;
  };
  std::vector<Batch> batches;
  for (const auto& [site, titles] : wanted) {
    for (const auto& [title, _] : titles) {
      if (batches.empty() || batches.back().site != site ||
          batches.back().titles.size() >= kMaxTitlesPerRequest) {
        batches.push_back({site, {}});
      }
      batches.back().titles.push_back(title);
    }
  }

  // Each batch yields canonical title -> meta for the titles it asked for.
  auto run_batch = [&](const Batch& batch) {
    std::map<std::string, ArticleMeta> found;
    std::string titles;
    for (const auto& t : batch.titles) {
      if (!titles.empty()) titles += "|";
      titles += t;
    }
    HttpRequest req;
    req.url = site_url(config_.wikipedia_api_url_pattern, batch.site) +
              "?action=query&format=json&formatversion=2&prop=info&titles=" + url_encode(titles);
    Fetched f = fetch(req, req.url, {}, log);
    json doc;
    try {
      doc = json::parse(f.body);
    } catch (const json::parse_error& e) {
      throw ParseError("malformed Wikipedia API response for " + batch.site + ": " + e.what());
    }
    try {
      std::map<std::string, std::string> alias;  // requested -> normalized
      const auto& query = doc.at("query");
      if (auto it = query.find("normalized"); it != query.end()) {
        for (const auto& n : *it) alias[n.at("from").get<std::string>()] = n.at("to").get<std::string>();
      }
      std::map<std::string, const json*> pages;
      if (auto it = query.find("pages"); it != query.end()) {
        for (const auto& p : *it) {
          if (p.contains("missing") || p.contains("invalid") || !p.contains("length")) continue;
          pages[p.at("title").get<std::string>()] = &p;
        }
      }
      for (const auto& requested : batch.titles) {
        std::string canonical = requested;
        if (auto a = alias.find(requested); a != alias.end()) canonical = a->second;
        auto p = pages.find(canonical);
        if (p == pages.end()) continue;
        ArticleMeta meta;
        meta.site = batch.site;
        meta.title = canonical;
        meta.size_bytes = p->second->at("length").get<int64_t>();
        if (meta.size_bytes < 0) throw ParseError("negative page length for " + canonical);
        found.emplace(requested, std::move(meta));
      }
    } catch (const json::exception& e) {
      throw ParseError("unexpected Wikipedia API structure for " + batch.site + ": " + e.what());
    }
    if (with_revisions) {
      for (auto& [requested, meta] : found) {
        HttpRequest rev;
        std::string path_title = meta.title;
        std::replace(path_title.begin(), path_title.end(), ' ', '_');
        rev.url = site_url(config_.wikipedia_rest_url_pattern, batch.site) + "/v1/page/" +
                  url_encode(path_title) + "/history/counts/edits";
        Fetched r = fetch(rev, rev.url, {404}, log);
        if (r.status == 404) {
          meta.revision_count.reset();
          continue;
        }
        try {
          meta.revision_count = json::parse(r.body).at("count").get<int64_t>();
        } catch (const json::exception& e) {
          throw ParseError("unexpected edit-count response for " + meta.title + ": " + e.what());
        }
      }
      // An article whose history is gone no longer exists.
      std::erase_if(found, [](const auto& kv) { return !kv.second.revision_count; });
    }
    return found;
  };

  std::vector<std::map<std::string, ArticleMeta>> outputs(batches.size());
  std::vector<std::exception_ptr> failures(batches.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < batches.size(); i = next++) {
      try {
        outputs[i] = run_batch(batches[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const size_t n_threads =
      std::min<size_t>(batches.size(), static_cast<size_t>(config_.article_parallelism));
  std::vector<std::thread> threads;
  for (size_t i = 1; i < n_threads; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  for (size_t i = 0; i < batches.size(); ++i) {
    const auto& titles = wanted.at(batches[i].site);
    for (const auto& [requested, meta] : outputs[i]) {
      for (const auto& url : titles.at(requested)) result.found[url] = meta;
    }
  }
  return result;
}

std::shared_ptr<HarvestClient> make_harvest_client(const EndpointConfig& config) {
  return std::make_shared<HarvestClient>(
      config, std::shared_ptr<Transport>(make_http_transport(config.request_timeout)),
      std::make_shared<SystemClock>());
}

}  // namespace dlama
