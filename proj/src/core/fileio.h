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

#ifndef DLAMA_CORE_FILEIO_H_
#define DLAMA_CORE_FILEIO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace dlama {

// Reads a whole file as bytes. Throws IoError.
std::string read_file(const std::filesystem::path& path);

// Writes `content` to a sibling temporary file and renames it over `path`
// while holding an exclusive advisory lock on a per-path lock file under the
// system temporary directory. Concurrent writers of the same path serialize;
// readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Same temp-file-and-rename write without the lock file; for stores whose
// entries are immutable once written.
void write_file_replace(const std::filesystem::path& path, std::string_view content);

}  // namespace dlama

#endif  // DLAMA_CORE_FILEIO_H_
