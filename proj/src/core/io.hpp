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

#ifndef LANCER_CORE_IO_HPP_
#define LANCER_CORE_IO_HPP_

#include <string>

namespace lancer {

// Whole-file helpers; failures throw kIo.
std::string ReadFile(const std::string& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void WriteFileAtomic(const std::string& path, const std::string& contents);

void EnsureDirectory(const std::string& path);

// Shortest round-trip decimal form of a double, e.g. for CSV output.
std::string FormatDouble(double v);

}  // namespace lancer

#endif  // LANCER_CORE_IO_HPP_
