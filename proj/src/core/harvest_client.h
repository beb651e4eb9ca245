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

// Wikidata SPARQL and Wikipedia metadata access with caching, retry and rate
// limiting.

#ifndef DLAMA_CORE_HARVEST_CLIENT_H_
#define DLAMA_CORE_HARVEST_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/cache.h"
#include "core/http.h"
#include "core/sparql.h"

namespace dlama {

inline constexpr std::string_view kDefaultSparqlUrl = "https://query.wikidata.org/sparql";
inline constexpr std::string_view kDefaultWikipediaApiPattern =
    "https://{site}.wikipedia.org/w/api.php";
inline constexpr std::string_view kDefaultWikipediaRestPattern =
    "https://{site}.wikipedia.org/w/rest.php";

// Maximum titles per `prop=info` request.
inline constexpr size_t kMaxTitlesPerRequest = 50;

struct EndpointConfig {
  std::string sparql_url{kDefaultSparqlUrl};
  // `{site}` is replaced by the Wikipedia site code.
  std::string wikipedia_api_url_pattern{kDefaultWikipediaApiPattern};
  std::string wikipedia_rest_url_pattern{kDefaultWikipediaRestPattern};
  std::string user_agent = "dlama/1.0 (https://github.com/dlama-cpp; factual-probing curation)";
  int max_retries = 4;
  std::chrono::milliseconds min_request_interval{500};
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds request_timeout{120};
  std::filesystem::path cache_dir;
  // Fail with CacheMiss instead of fetching when a response is not cached.
  bool offline = false;
  int article_parallelism = 4;

  // Applies DLAMA_SPARQL_ENDPOINT, DLAMA_CACHE_DIR, DLAMA_OFFLINE and
  // DLAMA_USER_AGENT on top of `base`.
  static EndpointConfig from_env(EndpointConfig base);

  std::vector<std::string> validate() const;
};

struct RdfTerm {
  std::string type;  // "uri", "literal", "bnode"
  std::string value;
  std::string lang;
};

using ResultRow = std::map<std::string, RdfTerm>;

struct RowSet {
  std::vector<std::string> vars;
  std::vector<ResultRow> rows;
};

// Parses a SPARQL 1.1 JSON results document. Throws ParseError.
RowSet parse_sparql_json(std::string_view document);

struct ArticleMeta {
  std::string site;
  std::string title;
  int64_t size_bytes = 0;
  // Only filled when revisions were requested.
  std::optional<int64_t> revision_count;

  friend bool operator==(const ArticleMeta&, const ArticleMeta&) = default;
};

struct ArticleRef {
  std::string site;
  std::string title;  // decoded, spaces instead of underscores
};

// `https://<site>.wikipedia.org/wiki/<Title>` -> (site, title).
std::optional<ArticleRef> parse_article_url(std::string_view url);

struct ArticleMetaResult {
  // Keyed by the input URL. Missing articles have no entry.
  std::map<std::string, ArticleMeta> found;
  // Per-URL errors, e.g. URLs that do not name a Wikipedia article.
  std::map<std::string, std::string> errors;
};

// Records which cached responses a computation consumed, for provenance.
class FetchLog {
 public:
  void record(const std::string& key, const std::string& fetched_at);
  // SHA-256 over the sorted consumed keys and their fetch times; empty when
  // nothing was recorded.
  std::string digest() const;
  // Latest fetch timestamp among consumed responses.
  std::string latest_fetched_at() const;
  size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
};

// Shareable across threads.
class HarvestClient {
 public:
  HarvestClient(EndpointConfig config, std::shared_ptr<Transport> transport,
                std::shared_ptr<Clock> clock);

  // Throws TransportError, ParseError or CacheMiss.
  RowSet run_query(const SparqlQuery& query, FetchLog* log = nullptr);

  // Runs consecutive pages of a query built by `make_page` until a page comes
  // back shorter than its page size.
  template <typename MakePage>
  RowSet run_paged(MakePage&& make_page, int page_size, FetchLog* log = nullptr) {
    RowSet all;
    for (int number = 1;; ++number) {
      SparqlQuery q = make_page(Page{number, page_size});
      RowSet page = run_query(q, log);
      if (number == 1) all.vars = page.vars;
      const size_t n = page.rows.size();
      for (auto& row : page.rows) all.rows.push_back(std::move(row));
      if (n < static_cast<size_t>(q.page_size)) break;
    }
    return all;
  }

  // Byte length (and optionally edit count) of the given articles, batched
  // per site, duplicates fetched once.
  ArticleMetaResult fetch_article_meta(std::span<const std::string> urls,
                                       bool with_revisions = false, FetchLog* log = nullptr);

  const EndpointConfig& config() const { return config_; }
  Clock& clock() { return *clock_; }

  // Requests that actually went to the transport (cache hits excluded).
  size_t network_requests() const;

 private:
  struct Fetched {
    int status = 0;
    std::string body;
  };

  // Cache lookup, then rate-limited transport with retry. Statuses listed in
  // `accepted` (besides 200) are returned and cached instead of retried.
  Fetched fetch(const HttpRequest& request, const std::string& cache_material,
                std::initializer_list<int> accepted, FetchLog* log);

  std::string site_url(const std::string& pattern, const std::string& site) const;

  EndpointConfig config_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<Clock> clock_;
  std::optional<ResponseCache> cache_;
  RateLimiter limiter_;
  mutable std::mutex stats_mutex_;
  size_t network_requests_ = 0;
};

// Client over the real HTTP transport and system clock.
std::shared_ptr<HarvestClient> make_harvest_client(const EndpointConfig& config);

}  // namespace dlama

#endif  // DLAMA_CORE_HARVEST_CLIENT_H_
