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

#ifndef LANCER_CORE_SERIALIZATION_HPP_
#define LANCER_CORE_SERIALIZATION_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/lancer.hpp"
#include "core/problems.hpp"

namespace lancer {

using Json = nlohmann::json;

inline constexpr int kDatasetSchemaVersion = 1;

// Datasets: {"format": "lancer-dataset", "schema_version": 1, "family": ...,
// "seed": ..., "params": {...}, "instances": [{"y": [...], "z": {...}}]}.
Json DescriptorToJson(const ProblemDescriptor& z);
ProblemDescriptor DescriptorFromJson(FamilyTag family, const Json& j);
Json DatasetToJson(const Dataset& dataset);
Dataset DatasetFromJson(const Json& j);

void SaveDataset(const Dataset& dataset, const std::string& path);
Dataset LoadDataset(const std::string& path);

// Long-format CSV (instance,field,index,value), one row per scalar.
std::string DatasetToCsv(const Dataset& dataset);

Json VecToJson(const Vec& v);
Vec VecFromJson(const Json& j);
Json MatToJson(const Mat& m);  // array of rows
Mat MatFromJson(const Json& j);

Json MlpToJsonValue(const Mlp& model);
Mlp MlpFromJsonValue(const Json& j);
Json SurrogateToJson(const SurrogateModel& surrogate);
SurrogateModel SurrogateFromJson(const Json& j);

// History CSV: a comment line carrying `tag`, then
// iteration,buffer_size,surrogate_mse,mean_decision_loss,solver_calls.
std::string HistoryToCsv(const std::vector<HistoryRow>& history,
                         const std::string& tag);
std::vector<HistoryRow> HistoryFromCsv(const std::string& csv);

// Parses JSON text, mapping syntax errors to the given error kind.
Json ParseJson(const std::string& text, ErrorKind kind, const std::string& what);

}  // namespace lancer

#endif  // LANCER_CORE_SERIALIZATION_HPP_
