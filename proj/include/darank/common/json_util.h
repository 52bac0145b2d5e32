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

#ifndef DARANK_COMMON_JSON_UTIL_H_
#define DARANK_COMMON_JSON_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "darank/common/error.h"
#include "json.hpp"

namespace darank {

using Json = nlohmann::ordered_json;

// Strict reader for one JSON object of a config document. Fields are
// optional; present fields must have the right type. finish() rejects any
// key that was never read. Errors carry JSON pointers.
class ObjectReader {
 public:
  ObjectReader(const Json& object, std::string pointer);

  template <typename T>
  void read(const std::string& key, T& out) {
    const Json* v = take(key);
    if (v != nullptr) out = convert<T>(*v, pointer_of(key));
  }

  // Marks `key` consumed and returns it, or nullptr when absent.
  const Json* take(const std::string& key);

  std::string pointer_of(const std::string& key) const;
  const std::string& pointer() const { return pointer_; }

  void finish() const;

  template <typename T>
  static T convert(const Json& v, const std::string& pointer);

 private:
  const Json& object_;
  std::string pointer_;
  std::set<std::string> seen_;
};

template <typename T>
T ObjectReader::convert(const Json& v, const std::string& pointer) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(pointer, "expected a boolean");
    return v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(pointer, "expected a string");
    return v.get<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(pointer, "expected a number");
    return v.get<T>();
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(pointer, "expected a non-negative integer");
    }
    return v.get<T>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(pointer, "expected an integer");
    return v.get<T>();
  } else {
    if (!v.is_array()) throw ConfigError(pointer, "expected an array");
    T out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(convert<typename T::value_type>(v[i], pointer + "/" + std::to_string(i)));
    }
    return out;
  }
}

// Parses a whole file; syntax errors become ParseError, missing files IoError.
Json read_json_file(const std::filesystem::path& path);

// Writes `j` with 2-space indentation and a trailing newline.
void write_json_file(const Json& j, const std::filesystem::path& path);

// Writes `text` verbatim; IoError on failure.
void write_text_file(const std::string& text, const std::filesystem::path& path);

// Shortest decimal that round-trips `v`; "nan"/"inf" spelled out.
std::string format_double(double v);

}  // namespace darank

#endif  // DARANK_COMMON_JSON_UTIL_H_
