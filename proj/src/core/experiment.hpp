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

#ifndef LANCER_CORE_EXPERIMENT_HPP_
#define LANCER_CORE_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/lancer.hpp"
#include "core/problems.hpp"
#include "core/serialization.hpp"

namespace lancer {

inline constexpr int kRunConfigSchemaVersion = 1;

enum class RunMode {
  kTwoStage,
  kLancerPo,
  kLancerZero,
  kLancerPrior,
  kReusedM,
  kOptimal,    // true-cost oracle, for calibrating metrics
  kHeuristic,  // domain heuristic of fully observed families
};

std::string RunModeName(RunMode mode);
RunMode ParseRunMode(const std::string& name);

// Throws kConfig when `mode` cannot run on `family`.
void CheckModeCompatibility(FamilyTag family, RunMode mode);

struct RunConfig {
  FamilyTag family = FamilyTag::kShortestPath;
  RunMode mode = RunMode::kTwoStage;
  std::uint64_t seed = 0;
  int n_train = 0;
  int n_test = 0;
  Json generator = Json::object();  // family-specific, defaults filled in
  LancerConfig lancer;
  int random_draws = 10;
  std::string data_dir;
  std::string run_dir;
  int workers = 1;  // never part of the hash
};

// Parses a run config document. Unknown keys, a missing seed, and invalid
// values are config errors. Missing optional fields take family defaults.
RunConfig RunConfigFromJson(const Json& j);
RunConfig LoadRunConfig(const std::string& path);

// Canonical form with every field present; paths included.
Json RunConfigToJson(const RunConfig& cfg);

// Sets a dotted path ("lancer.lr_w") inside a config document, creating
// intermediate objects as needed.
void SetDotted(Json& doc, const std::string& dotted, const Json& value);

// 16 hex digits of FNV-1a over the canonical config without paths.
std::string ConfigHash(const RunConfig& cfg);

// Exit status for a failure class; 1 is reserved for unexpected errors.
int ExitCodeFor(ErrorKind kind);

// Solver calls a training run of this config must consume.
long ExpectedTrainingCalls(const RunConfig& cfg);

// All n_train + n_test instances from one generator call; train is the
// leading n_train.
Dataset GenerateDataset(const RunConfig& cfg);

// <data_dir>/train.json, test.json and manifest.json from one generator call.
void CmdGenerate(const RunConfig& cfg);

// Trains per mode into run_dir: checkpoint.json (refreshed after every outer
// iteration), history.csv, summary.json, timing.json, plus target.lmlp for
// modes with a target model.
void CmdTrain(const RunConfig& cfg);

// Evaluates a checkpoint on <data_dir>/test.json and writes eval.json and
// eval_instances.csv into run_dir. An empty checkpoint path means
// <run_dir>/checkpoint.json.
void CmdEvaluate(const RunConfig& cfg, const std::string& checkpoint = "");

// Cross product of a grid {"dotted.path": [values...]}; each cell trains and
// evaluates in <run_dir>/cell_<i>. Writes <run_dir>/sweep.csv. Cell failures
// are recorded and do not stop the sweep.
struct SweepCell {
  int index = 0;
  std::vector<std::pair<std::string, Json>> params;
  bool ok = false;
  std::string error;
  double mean_objective = 0.0;
  double normalized_regret = 0.0;  // NaN when there is no oracle
  long solver_calls = 0;
};
std::vector<SweepCell> CmdSweep(const RunConfig& base, const Json& grid);

// Aggregates the histories of finished runs into one trade-off curve CSV and
// their evaluations into a JSON table.
void CmdReport(const std::vector<std::string>& run_dirs,
               const std::string& out_prefix);

}  // namespace lancer

#endif  // LANCER_CORE_EXPERIMENT_HPP_
