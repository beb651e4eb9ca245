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

#ifndef DLAMA_CORE_ERRORS_H_
#define DLAMA_CORE_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace dlama {

// Base class of every error raised by the library. The C API maps each
// subclass onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Unknown pair name, malformed configuration file, and similar.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input document. `line` is 1-based, 0 when the error is not tied
// to a line (e.g. a SPARQL result document).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  // Prefixes `context` (e.g. a file path) onto `inner`, keeping its line.
  ParseError(const std::string& context, const ParseError& inner)
      : Error(context + ": " + inner.what()), line_(inner.line()) {}
  int line() const { return line_; }

 private:
  int line_;
};

// The file declares a schema version this build does not read.
class SchemaError : public ParseError {
 public:
  using ParseError::ParseError;
};

// HTTP failure after retries were exhausted. `status` is 0 when no HTTP
// response was received at all (connection error, timeout).
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status)
      : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Offline mode and the response is not in the cache.
class CacheMiss : public Error {
 public:
  using Error::Error;
};

// One or more (region, predicate) runs failed and partial results were not
// requested.
class PipelineError : public Error {
 public:
  using Error::Error;
};

}  // namespace dlama

#endif  // DLAMA_CORE_ERRORS_H_
