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

#include "lancer/lancer.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "core/diffmodels.hpp"
#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/io.hpp"
#include "core/problems.hpp"
#include "core/serialization.hpp"
#include "core/solvers.hpp"

struct lancer_dataset {
  lancer::Dataset data;
};

struct lancer_model {
  lancer::Mlp net;
};

namespace {

thread_local std::string g_last_error;

lancer_status StatusFor(lancer::ErrorKind kind) {
  switch (kind) {
    case lancer::ErrorKind::kInvalidArgument:
      return LANCER_ERR_INVALID_ARGUMENT;
    case lancer::ErrorKind::kConfig:
      return LANCER_ERR_CONFIG;
    case lancer::ErrorKind::kData:
      return LANCER_ERR_DATA;
    case lancer::ErrorKind::kNumerical:
      return LANCER_ERR_NUMERICAL;
    case lancer::ErrorKind::kIo:
      return LANCER_ERR_IO;
  }
  return LANCER_ERR_INTERNAL;
}

lancer_status Fail(lancer_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

// Runs fn, translating exceptions into status codes. Nothing escapes.
template <typename Fn>
lancer_status Guard(Fn&& fn) {
  try {
    fn();
    return LANCER_OK;
  } catch (const lancer::Error& e) {
    return Fail(StatusFor(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(LANCER_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(LANCER_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(LANCER_ERR_INTERNAL, "unknown failure");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) lancer::ThrowInvalid(what);
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lancer::RunConfig ParseConfig(const char* config_json, int workers) {
  Require(config_json != nullptr, "config_json is null");
  Require(workers >= 1, "workers must be >= 1");
  lancer::RunConfig cfg = lancer::RunConfigFromJson(lancer::ParseJson(
      config_json, lancer::ErrorKind::kConfig, "config does not parse"));
  cfg.workers = workers;
  return cfg;
}

const lancer::Instance& At(const lancer_dataset* ds, size_t index) {
  Require(ds != nullptr, "dataset is null");
  Require(index < ds->data.size(), "instance index out of range");
  return ds->data.instances[index];
}

}  // namespace

extern "C" {

const char* lancer_version(void) { return "0.1.0"; }

const char* lancer_last_error(void) { return g_last_error.c_str(); }

const char* lancer_status_name(lancer_status status) {
  switch (status) {
    case LANCER_OK:
      return "ok";
    case LANCER_ERR_INTERNAL:
      return "internal error";
    case LANCER_ERR_CONFIG:
      return "config error";
    case LANCER_ERR_DATA:
      return "data error";
    case LANCER_ERR_NUMERICAL:
      return "numerical error";
    case LANCER_ERR_IO:
      return "I/O error";
    case LANCER_ERR_INVALID_ARGUMENT:
      return "invalid argument";
  }
  return "unknown status";
}

void lancer_string_free(char* s) { std::free(s); }

lancer_status lancer_config_normalize(const char* config_json, char** out_json) {
  return Guard([&] {
    Require(out_json != nullptr, "out_json is null");
    *out_json = Dup(lancer::RunConfigToJson(ParseConfig(config_json, 1)).dump(2));
  });
}

lancer_status lancer_config_hash(const char* config_json, char** out_hash) {
  return Guard([&] {
    Require(out_hash != nullptr, "out_hash is null");
    *out_hash = Dup(lancer::ConfigHash(ParseConfig(config_json, 1)));
  });
}

lancer_status lancer_cmd_generate(const char* config_json, int workers) {
  return Guard([&] { lancer::CmdGenerate(ParseConfig(config_json, workers)); });
}

lancer_status lancer_cmd_train(const char* config_json, int workers) {
  return Guard([&] { lancer::CmdTrain(ParseConfig(config_json, workers)); });
}

lancer_status lancer_cmd_evaluate(const char* config_json,
                                  const char* checkpoint_path, int workers) {
  return Guard([&] {
    lancer::CmdEvaluate(ParseConfig(config_json, workers),
                        checkpoint_path ? checkpoint_path : "");
  });
}

lancer_status lancer_cmd_sweep(const char* config_json, const char* grid_json,
                               int workers, size_t* failed_cells) {
  return Guard([&] {
    Require(grid_json != nullptr, "grid_json is null");
    const lancer::Json grid =
        lancer::ParseJson(grid_json, lancer::ErrorKind::kConfig, "grid does not parse");
    const auto cells = lancer::CmdSweep(ParseConfig(config_json, workers), grid);
    size_t failed = 0;
    for (const auto& c : cells) failed += c.ok ? 0 : 1;
    if (failed_cells) *failed_cells = failed;
  });
}

lancer_status lancer_cmd_report(const char* const* run_dirs, size_t n_run_dirs,
                                const char* out_prefix) {
  return Guard([&] {
    Require(n_run_dirs > 0 && run_dirs != nullptr, "no run directories given");
    Require(out_prefix != nullptr, "out_prefix is null");
    std::vector<std::string> dirs;
    for (size_t i = 0; i < n_run_dirs; ++i) {
      Require(run_dirs[i] != nullptr, "null run directory");
      dirs.emplace_back(run_dirs[i]);
    }
    lancer::CmdReport(dirs, out_prefix);
  });
}

lancer_status lancer_dataset_generate(const char* config_json, lancer_dataset** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = new lancer_dataset{lancer::GenerateDataset(ParseConfig(config_json, 1))};
  });
}

lancer_status lancer_dataset_load(const char* path, lancer_dataset** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new lancer_dataset{lancer::LoadDataset(path)};
  });
}

lancer_status lancer_dataset_save(const lancer_dataset* ds, const char* path) {
  return Guard([&] {
    Require(ds != nullptr && path != nullptr, "null argument");
    lancer::SaveDataset(ds->data, path);
  });
}

lancer_status lancer_dataset_export_csv(const lancer_dataset* ds, const char* path) {
  return Guard([&] {
    Require(ds != nullptr && path != nullptr, "null argument");
    lancer::WriteFileAtomic(path, lancer::DatasetToCsv(ds->data));
  });
}

lancer_status lancer_dataset_size(const lancer_dataset* ds, size_t* out) {
  return Guard([&] {
    Require(ds != nullptr && out != nullptr, "null argument");
    *out = ds->data.size();
  });
}

lancer_status lancer_dataset_cost_dim(const lancer_dataset* ds, size_t* out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = static_cast<size_t>(lancer::SurrogateDim(At(ds, 0).z));
  });
}

lancer_status lancer_dataset_feature_dim(const lancer_dataset* ds, size_t* out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = static_cast<size_t>(At(ds, 0).y.size());
  });
}

lancer_status lancer_dataset_features(const lancer_dataset* ds, size_t index,
                                      double* out, size_t capacity) {
  return Guard([&] {
    const lancer::Vec& y = At(ds, index).y;
    Require(out != nullptr, "out is null");
    Require(capacity >= static_cast<size_t>(y.size()), "feature buffer too small");
    std::copy(y.data(), y.data() + y.size(), out);
  });
}

lancer_status lancer_dataset_solve(const lancer_dataset* ds, size_t index,
                                   const double* c, size_t c_len, double* x_out,
                                   size_t x_capacity, double* objective) {
  return Guard([&] {
    const lancer::Instance& inst = At(ds, index);
    Require(c != nullptr, "cost vector is null");
    lancer::CheckDim("cost vector", static_cast<long>(c_len),
                     lancer::SurrogateDim(inst.z));
    const lancer::Vec cost = Eigen::Map<const lancer::Vec>(c, static_cast<long>(c_len));
    const lancer::Solution s = lancer::SolveFamily(cost, inst.z);
    if (x_capacity > 0) {
      Require(x_out != nullptr, "x_out is null");
      Require(x_capacity >= static_cast<size_t>(s.x.size()), "decision buffer too small");
      std::copy(s.x.data(), s.x.data() + s.x.size(), x_out);
    }
    if (objective) *objective = lancer::EvalObjective(s, inst.z);
  });
}

void lancer_dataset_free(lancer_dataset* ds) { delete ds; }

lancer_status lancer_model_load(const char* path, lancer_model** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    const std::string bytes = lancer::ReadFile(path);
    if (bytes.rfind("LMLP", 0) == 0) {
      *out = new lancer_model{lancer::LoadMlpBinary(path)};
      return;
    }
    const lancer::Json j =
        lancer::ParseJson(bytes, lancer::ErrorKind::kData, "model file does not parse");
    if (!j.contains("target")) lancer::ThrowData("checkpoint carries no target model");
    *out = new lancer_model{lancer::MlpFromJsonValue(j["target"])};
  });
}

lancer_status lancer_model_dims(const lancer_model* m, size_t* input_dim,
                                size_t* output_dim) {
  return Guard([&] {
    Require(m != nullptr, "model is null");
    if (input_dim) *input_dim = static_cast<size_t>(m->net.input_dim());
    if (output_dim) *output_dim = static_cast<size_t>(m->net.output_dim());
  });
}

lancer_status lancer_model_forward(const lancer_model* m, const double* input,
                                   size_t input_len, double* out, size_t out_capacity) {
  return Guard([&] {
    Require(m != nullptr && input != nullptr && out != nullptr, "null argument");
    lancer::CheckDim("model input", static_cast<long>(input_len), m->net.input_dim());
    Require(out_capacity >= static_cast<size_t>(m->net.output_dim()),
            "output buffer too small");
    const lancer::Vec y =
        m->net.Forward(lancer::Vec(Eigen::Map<const lancer::Vec>(input, input_len)));
    std::copy(y.data(), y.data() + y.size(), out);
  });
}

void lancer_model_free(lancer_model* m) { delete m; }

}  // extern "C"
