// Copyright 2026 the nolgat authors
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

#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace nolgat {

/// Malformed or inconsistent experiment configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Unusable input data (bad file, zero feature row, width mismatch, ...).
/// CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite loss or gradient encountered while training. CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void str_append(std::ostringstream&) {}

template <typename T, typename... Rest>
void str_append(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  str_append(os, rest...);
}

// Concatenates the arguments with operator<<; used to format diagnostics.
template <typename... Args>
std::string str(const Args&... args) {
  std::ostringstream os;
  str_append(os, args...);
  return os.str();
}

}  // namespace detail
}  // namespace nolgat
