// Copyright 2026 The phrprobe Authors.
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

#ifndef PHRPROBE_ERROR_H_
#define PHRPROBE_ERROR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace phrprobe {

// Base class for every error raised by the library. `kind()` is a short
// machine-readable tag that the CLI puts into its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Raised while reading or writing an embedding dump. Carries the byte offset
// at which the problem was detected and, when known, the record involved.
class DumpError : public Error {
 public:
  DumpError(std::string kind, const std::string& message,
            std::uint64_t offset,
            std::optional<std::uint64_t> record_id = std::nullopt)
      : Error(std::move(kind), message), offset_(offset),
        record_id_(record_id) {}

  std::uint64_t offset() const noexcept { return offset_; }
  std::optional<std::uint64_t> record_id() const noexcept {
    return record_id_;
  }

 private:
  std::uint64_t offset_;
  std::optional<std::uint64_t> record_id_;
};

// Malformed input row in a dataset file; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error("parse", message + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace phrprobe

#endif  // PHRPROBE_ERROR_H_
