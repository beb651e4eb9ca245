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

#include "core/cache.h"

#include <system_error>

#include "core/errors.h"
#include "core/fileio.h"
#include "core/hash.h"
#include "json.hpp"

namespace dlama {

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ResponseCache::key_for(std::string_view request_material) {
  return sha256_hex(request_material);
}

std::optional<CachedResponse> ResponseCache::get(const std::string& key) const {
  const auto body_path = dir_ / (key + ".body");
  const auto meta_path = dir_ / (key + ".meta.json");
  std::error_code ec;
  if (!std::filesystem::exists(body_path, ec) || !std::filesystem::exists(meta_path, ec)) {
    return std::nullopt;
  }
  CachedResponse out;
  out.body = read_file(body_path);
  try {
    auto meta = nlohmann::json::parse(read_file(meta_path));
    out.status = meta.at("status").get<int>();
    out.fetched_at = meta.at("fetched_at").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("corrupt cache metadata " + meta_path.string() + ": " + e.what());
  }
  return out;
}

void ResponseCache::put(const std::string& key, std::string_view request_material,
                        const CachedResponse& response) const {
  nlohmann::ordered_json meta;
  meta["request"] = request_material;
  meta["status"] = response.status;
  meta["fetched_at"] = response.fetched_at;
  // Body first: an entry only counts as present once its metadata exists.
  write_file_replace(dir_ / (key + ".body"), response.body);
  write_file_replace(dir_ / (key + ".meta.json"), meta.dump(2) + "\n");
}

}  // namespace dlama
