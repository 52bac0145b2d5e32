/*
 * Copyright 2026 The darank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DARANK_COMMON_ERROR_H_
#define DARANK_COMMON_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace darank {

// Root of every error thrown by the library. The CLI maps subclasses onto
// exit statuses, so new failure modes should derive from the closest kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or vector dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A computation produced or received a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Input data breaks a documented invariant (one click per query, ...).
class ValidationError : public Error {
 public:
  ValidationError(const std::string& query_id, const std::string& what)
      : Error(query_id.empty() ? what : "query " + query_id + ": " + what),
        query_id_(query_id) {}

  const std::string& query_id() const { return query_id_; }

 private:
  std::string query_id_;
};

// Malformed serialized input; line is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(std::int64_t line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

// Invalid configuration. `pointer` is a JSON pointer into the config
// document when the value came from one.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
  ConfigError(const std::string& pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(pointer), message_(what) {}

  // Same error seen from an enclosing document: prefix + pointer.
  ConfigError nested(const std::string& prefix) const {
    return pointer_.empty() && message_.empty() ? ConfigError(prefix, what())
                                                : ConfigError(prefix + pointer_, message_);
  }

  const std::string& pointer() const { return pointer_; }
  const std::string& message() const { return message_; }

 private:
  std::string pointer_;
  std::string message_;
};

// A n-gram id outside [0, vocab_size).
class VocabError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Checkpoint does not fit the model or run it is being loaded into.
class IncompatibleCheckpointError : public Error {
 public:
  using Error::Error;
};

// Bad command-line usage.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace darank

#endif  // DARANK_COMMON_ERROR_H_
