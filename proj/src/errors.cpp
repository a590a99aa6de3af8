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

#include <ams/errors.hpp>

namespace ams {

const char* to_string(FormatErrorKind kind) {
  switch (kind) {
    case FormatErrorKind::MalformedHeader:
      return "malformed header";
    case FormatErrorKind::TruncatedPayload:
      return "truncated payload";
    case FormatErrorKind::VersionMismatch:
      return "version mismatch";
    case FormatErrorKind::MalformedBody:
      return "malformed body";
  }
  return "format error";
}

}  // namespace ams
