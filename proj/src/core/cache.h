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

#ifndef DLAMA_CORE_CACHE_H_
#define DLAMA_CORE_CACHE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace dlama {

struct CachedResponse {
  int status = 200;
  std::string body;
  std::string fetched_at;
};

// Content-addressed response store: one `<key>.body` file holding the raw
// response bytes and one `<key>.meta.json` with the request, status and
// fetch time. Keys are SHA-256 hex of the request material (query text or
// URL). Safe for concurrent use; entries are written atomically.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  static std::string key_for(std::string_view request_material);

  std::optional<CachedResponse> get(const std::string& key) const;
  void put(const std::string& key, std::string_view request_material,
           const CachedResponse& response) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace dlama

#endif  // DLAMA_CORE_CACHE_H_
