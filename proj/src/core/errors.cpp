// Copyright 2026 The lancer Authors
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

#include "core/errors.hpp"

namespace lancer {

void ThrowInvalid(const std::string& what) {
  throw Error(ErrorKind::kInvalidArgument, what);
}
void ThrowConfig(const std::string& what) {
  throw Error(ErrorKind::kConfig, what);
}
void ThrowData(const std::string& what) { throw Error(ErrorKind::kData, what); }
void ThrowNumerical(const std::string& what) {
  throw Error(ErrorKind::kNumerical, what);
}
void ThrowIo(const std::string& what) { throw Error(ErrorKind::kIo, what); }

void CheckDim(const char* what, long actual, long expected) {
  if (actual != expected) {
    ThrowInvalid(std::string(what) + ": dimension mismatch (got " +
                 std::to_string(actual) + ", expected " +
                 std::to_string(expected) + ")");
  }
}

}  // namespace lancer
