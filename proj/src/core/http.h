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

// HTTP plumbing: a transport seam for tests, an injectable clock, and the
// per-host request gate.

#ifndef DLAMA_CORE_HTTP_H_
#define DLAMA_CORE_HTTP_H_

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlama {

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string content_type;
};

struct HttpResponse {
  // 0 when no response was received; `error` then says why.
  int status = 0;
  std::string body;
  std::string error;
  std::optional<int> retry_after_seconds;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// cpp-httplib backed transport (HTTP and HTTPS).
std::unique_ptr<Transport> make_http_transport(std::chrono::seconds timeout);

class Clock {
 public:
  using TimePoint = std::chrono::steady_clock::time_point;
  virtual ~Clock() = default;
  virtual TimePoint now() = 0;
  virtual void sleep_for(std::chrono::milliseconds duration) = 0;
  // ISO-8601 UTC wall-clock time, e.g. 2026-01-15T00:00:00Z.
  virtual std::string utc_timestamp() = 0;
};

class SystemClock : public Clock {
 public:
  TimePoint now() override;
  void sleep_for(std::chrono::milliseconds duration) override;
  std::string utc_timestamp() override;
};

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string target;  // path plus query string
};

std::optional<ParsedUrl> parse_url(std::string_view url);

// RFC 3986 percent-encoding of everything outside the unreserved set.
std::string url_encode(std::string_view text);
std::string url_decode(std::string_view text);

// Serializes requests per host and keeps consecutive request starts at least
// `min_interval` apart. Shareable across threads.
class RateLimiter {
 public:
  RateLimiter(std::shared_ptr<Clock> clock, std::chrono::milliseconds min_interval);

  // Blocks until a request to `host` may start, then records the start.
  void acquire(const std::string& host);

 private:
  struct HostGate {
    std::mutex mutex;
    std::optional<Clock::TimePoint> last_start;
  };

  std::shared_ptr<Clock> clock_;
  std::chrono::milliseconds min_interval_;
  std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<HostGate>> gates_;
};

}  // namespace dlama

#endif  // DLAMA_CORE_HTTP_H_
