// Copyright 2026 The AMS Strands Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace ams {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raised when a strand's state leaves the finite/bounded regime.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t strand, const std::string& what)
      : Error("divergence in strand " + std::to_string(strand) + ": " + what), strand_(strand) {}
  std::size_t strand() const { return strand_; }

 private:
  std::size_t strand_;
};

class SingularBlockError : public Error {
 public:
  SingularBlockError(std::size_t strand, std::size_t row)
      : Error("singular diagonal block in strand " + std::to_string(strand) + " at row " +
              std::to_string(row)),
        strand_(strand),
        row_(row) {}
  std::size_t strand() const { return strand_; }
  std::size_t row() const { return row_; }

 private:
  std::size_t strand_;
  std::size_t row_;
};

enum class FormatErrorKind { MalformedHeader, TruncatedPayload, VersionMismatch, MalformedBody };

const char* to_string(FormatErrorKind kind);

class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  FormatErrorKind kind() const { return kind_; }

 private:
  FormatErrorKind kind_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ams
