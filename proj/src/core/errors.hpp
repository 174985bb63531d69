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

#ifndef LANCER_CORE_ERRORS_HPP_
#define LANCER_CORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lancer {

// Coarse failure classes. The C API and the CLI map these onto status and
// exit codes, so keep the set small and stable.
enum class ErrorKind {
  kInvalidArgument,
  kConfig,
  kData,
  kNumerical,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Shorthands used throughout the core.
[[noreturn]] void ThrowInvalid(const std::string& what);
[[noreturn]] void ThrowConfig(const std::string& what);
[[noreturn]] void ThrowData(const std::string& what);
[[noreturn]] void ThrowNumerical(const std::string& what);
[[noreturn]] void ThrowIo(const std::string& what);

// Throws kInvalidArgument when `actual != expected`.
void CheckDim(const char* what, long actual, long expected);

}  // namespace lancer

#endif  // LANCER_CORE_ERRORS_HPP_
