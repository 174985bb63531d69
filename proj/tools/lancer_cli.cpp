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

// Command-line driver: generate, train, evaluate, sweep, report.
//
// A run is described by one JSON config file; flags override its fields.
// The worker count comes from LANCER_WORKERS and never affects outputs.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lancer/lancer.h"

namespace {

using nlohmann::json;

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 5;

int ExitCode(lancer_status s) {
  switch (s) {
    case LANCER_OK:
      return 0;
    case LANCER_ERR_CONFIG:
    case LANCER_ERR_INVALID_ARGUMENT:
      return kExitConfig;
    case LANCER_ERR_DATA:
      return 3;
    case LANCER_ERR_NUMERICAL:
      return 4;
    case LANCER_ERR_IO:
      return kExitIo;
    case LANCER_ERR_INTERNAL:
      break;
  }
  return kExitInternal;
}

struct UsageError {
  int code;
  std::string what;
};

int Workers() {
  const char* env = std::getenv("LANCER_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long w = std::strtol(env, &end, 10);
  if (*end != '\0' || w < 1 || w > 1024) {
    throw UsageError{kExitConfig, "LANCER_WORKERS must be an integer in [1, 1024]"};
  }
  return static_cast<int>(w);
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{kExitIo, "cannot read '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json ParseOrFail(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError{kExitConfig, what + ": " + e.what()};
  }
}

// Values parse as JSON when they can ("0.01", "[64,64]", "true") and are
// taken as strings otherwise ("loose").
json ParseValue(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

void SetDotted(json& doc, const std::string& dotted, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty() || !node->is_object()) {
      throw UsageError{kExitConfig, "bad override path '" + dotted + "'"};
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string family;
  std::string mode;
  std::string data_dir;
  std::string run_dir;
  std::vector<std::string> sets;
};

void AddRunFlags(CLI::App* cmd, RunFlags& f, bool seed_required) {
  cmd->add_option("-c,--config", f.config, "Run config JSON file");
  auto* seed = cmd->add_option("--seed", f.seed, "Random seed");
  if (seed_required) seed->required();
  cmd->add_option("--family", f.family, "Problem family (overrides the config)");
  cmd->add_option("--mode", f.mode, "Run mode (overrides the config)");
  cmd->add_option("--data-dir", f.data_dir, "Dataset directory");
  cmd->add_option("--run-dir", f.run_dir, "Run output directory");
  cmd->add_option("--set", f.sets, "Override a config field: dotted.path=value")
      ->take_all();
}

std::string BuildConfig(const RunFlags& f) {
  json doc = f.config.empty()
                 ? json::object()
                 : ParseOrFail(Slurp(f.config), "config '" + f.config + "' does not parse");
  if (!doc.is_object()) throw UsageError{kExitConfig, "config must be a JSON object"};
  for (const std::string& s : f.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError{kExitConfig, "--set expects dotted.path=value, got '" + s + "'"};
    }
    SetDotted(doc, s.substr(0, eq), ParseValue(s.substr(eq + 1)));
  }
  if (f.seed) doc["seed"] = *f.seed;
  if (!f.family.empty()) doc["family"] = f.family;
  if (!f.mode.empty()) doc["mode"] = f.mode;
  if (!f.data_dir.empty()) doc["data_dir"] = f.data_dir;
  if (!f.run_dir.empty()) doc["run_dir"] = f.run_dir;
  return doc.dump();
}

int Report(lancer_status s) {
  if (s != LANCER_OK) {
    std::fprintf(stderr, "lancer: %s: %s\n", lancer_status_name(s), lancer_last_error());
  }
  return ExitCode(s);
}

json Normalized(const std::string& config) {
  char* text = nullptr;
  const lancer_status s = lancer_config_normalize(config.c_str(), &text);
  if (s != LANCER_OK) throw UsageError{Report(s), ""};
  json out = json::parse(text);
  lancer_string_free(text);
  return out;
}

int ExportCsv(const std::string& data_dir) {
  for (const char* split : {"train", "test"}) {
    const std::string base = data_dir + "/" + split;
    lancer_dataset* ds = nullptr;
    lancer_status s = lancer_dataset_load((base + ".json").c_str(), &ds);
    if (s == LANCER_OK) s = lancer_dataset_export_csv(ds, (base + ".csv").c_str());
    lancer_dataset_free(ds);
    if (s != LANCER_OK) return Report(s);
  }
  return 0;
}

int Run(int argc, char** argv) {
  CLI::App app{"Landscape-surrogate learning for decision-focused optimization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lancer_version()));

  RunFlags gen_flags, train_flags, eval_flags, sweep_flags;
  bool csv = false;
  std::string checkpoint, grid;
  std::vector<std::string> report_dirs;
  std::string report_out = "report";

  auto* gen = app.add_subcommand("generate", "Generate train/test datasets");
  AddRunFlags(gen, gen_flags, true);
  gen->add_flag("--csv", csv, "Also export long-format CSV copies");

  auto* train = app.add_subcommand("train", "Train a model per the run mode");
  AddRunFlags(train, train_flags, true);

  auto* eval = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test split");
  AddRunFlags(eval, eval_flags, false);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint (default: <run-dir>/checkpoint.json)");

  auto* sweep = app.add_subcommand("sweep", "Train and evaluate a hyperparameter grid");
  AddRunFlags(sweep, sweep_flags, false);
  sweep->add_option("--grid", grid, "Grid JSON file or inline JSON object")->required();

  auto* report = app.add_subcommand("report", "Aggregate finished runs");
  report->add_option("runs", report_dirs, "Run or sweep directories")->required();
  report->add_option("-o,--out", report_out, "Output prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const int workers = Workers();
  if (*gen) {
    const std::string cfg = BuildConfig(gen_flags);
    const int rc = Report(lancer_cmd_generate(cfg.c_str(), workers));
    if (rc != 0 || !csv) return rc;
    return ExportCsv(Normalized(cfg).at("data_dir").get<std::string>());
  }
  if (*train) {
    return Report(lancer_cmd_train(BuildConfig(train_flags).c_str(), workers));
  }
  if (*eval) {
    const std::string cfg = BuildConfig(eval_flags);
    return Report(lancer_cmd_evaluate(cfg.c_str(),
                                      checkpoint.empty() ? nullptr : checkpoint.c_str(),
                                      workers));
  }
  if (*sweep) {
    const std::string trimmed = grid.substr(grid.find_first_not_of(" \t\n"));
    const std::string grid_text = trimmed.rfind("{", 0) == 0 ? grid : Slurp(grid);
    size_t failed = 0;
    const int rc = Report(lancer_cmd_sweep(BuildConfig(sweep_flags).c_str(),
                                           grid_text.c_str(), workers, &failed));
    if (rc == 0 && failed > 0) {
      std::fprintf(stderr, "lancer: %zu sweep cell(s) failed; see sweep.csv\n", failed);
    }
    return rc;
  }
  std::vector<const char*> dirs;
  for (const std::string& d : report_dirs) dirs.push_back(d.c_str());
  return Report(lancer_cmd_report(dirs.data(), dirs.size(), report_out.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const UsageError& e) {
    if (!e.what.empty()) std::fprintf(stderr, "lancer: %s\n", e.what.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lancer: internal error: %s\n", e.what());
    return kExitInternal;
  }
}
