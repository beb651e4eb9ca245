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

#include "support/test_util.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>

#include "core/fileio.h"

namespace dlama::testing {

std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(DLAMA_TEST_DATA_DIR) / relative;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("dlama-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
           std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

EndpointConfig fixture_endpoint(const std::filesystem::path& cache_dir, bool offline) {
  EndpointConfig c;
  c.cache_dir = cache_dir;
  c.offline = offline;
  c.user_agent = "dlama-tests/1.0 (fixture)";
  return c;
}

FixtureClient make_fixture_client(const EndpointConfig& config, FixtureWorld world,
                                  const std::string& timestamp) {
  FixtureClient f;
  f.clock = std::make_shared<FakeClock>(timestamp);
  f.transport = std::make_shared<FixtureTransport>(std::move(world), f.clock.get());
  f.client = std::make_unique<HarvestClient>(config, f.transport, f.clock);
  return f;
}

CommandResult run_command(const std::vector<std::string>& argv,
                          const std::vector<std::string>& env) {
  TempDir scratch;
  const auto out_path = scratch / "stdout";
  const auto err_path = scratch / "stderr";
  std::fflush(nullptr);
  const pid_t pid = ::fork();
  if (pid == 0) {
    FILE* out = std::freopen(out_path.c_str(), "w", stdout);
    FILE* err = std::freopen(err_path.c_str(), "w", stderr);
    if (!out || !err) ::_exit(127);
    for (const auto& kv : env) ::putenv(const_cast<char*>(kv.c_str()));
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execv(args[0], args.data());
    ::_exit(127);
  }
  CommandResult r;
  int status = 0;
  ::waitpid(pid, &status, 0);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

std::string golden(const std::string& name, const std::string& actual) {
  const auto path = data_path("golden") / name;
  if (std::getenv("DLAMA_UPDATE_GOLDEN")) write_file_atomic(path, actual);
  return read_file(path);
}

std::vector<std::pair<std::string, std::string>> snapshot_tree(const std::filesystem::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!std::filesystem::exists(dir)) return out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    out.emplace_back(std::filesystem::relative(e.path(), dir).generic_string(), read_file(e.path()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dlama::testing
