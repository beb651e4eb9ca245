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

#include <httplib.h>

#include "core/http.h"

namespace dlama {

namespace {

class HttplibTransport : public Transport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse send(const HttpRequest& request) override {
    HttpResponse response;
    auto url = parse_url(request.url);
    if (!url) {
      response.error = "unsupported URL: " + request.url;
      return response;
    }
    const std::string origin = url->scheme + "://" + url->host + ":" + std::to_string(url->port);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    client.set_follow_location(true);

    httplib::Headers headers;
    for (const auto& [name, value] : request.headers) headers.emplace(name, value);

    httplib::Result result =
        request.method == "POST"
            ? client.Post(url->target, headers, request.body,
                          request.content_type.empty() ? "application/octet-stream"
                                                       : request.content_type)
            : client.Get(url->target, headers);
    if (!result) {
      response.error = httplib::to_string(result.error());
      return response;
    }
    response.status = result->status;
    response.body = std::move(result->body);
    if (result->has_header("Retry-After")) {
      try {
        response.retry_after_seconds = std::stoi(result->get_header_value("Retry-After"));
      } catch (const std::exception&) {
        // HTTP-date form; fall back to the computed backoff.
      }
    }
    return response;
  }

 private:
  std::chrono::seconds timeout_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(std::chrono::seconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

}  // namespace dlama
