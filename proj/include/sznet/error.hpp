// Copyright 2026 The sznet Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sznet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration, bad arguments, or inputs that violate a documented contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures: unreadable input, unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed binary or text input. Carries the byte offset and field name at
// which parsing failed.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t offset, std::string field, const std::string& what)
      : ValidationError(what + " (field '" + field + "' at byte " +
                        std::to_string(offset) + ")"),
        offset_(offset),
        field_(std::move(field)) {}

  std::size_t offset() const { return offset_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t offset_;
  std::string field_;
};

}  // namespace sznet
