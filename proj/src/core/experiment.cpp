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

#include "core/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <utility>

#include "core/generators.hpp"
#include "core/io.hpp"
#include "core/metrics.hpp"
#include "core/parallel.hpp"
#include "core/solvers.hpp"

namespace lancer {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

constexpr struct {
  RunMode mode;
  const char* name;
} kModes[] = {
    {RunMode::kTwoStage, "two_stage"},       {RunMode::kLancerPo, "lancer_po"},
    {RunMode::kLancerZero, "lancer_zero"},   {RunMode::kLancerPrior, "lancer_prior"},
    {RunMode::kReusedM, "reused_m"},         {RunMode::kOptimal, "optimal"},
    {RunMode::kHeuristic, "heuristic"},
};

void CheckKeys(const Json& j, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!j.is_object()) ThrowConfig(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) ThrowConfig("unknown key '" + key + "' in " + where);
  }
}

Json GeneratorDefaults(FamilyTag family) {
  switch (family) {
    case FamilyTag::kShortestPath: {
      ShortestPathGenParams p;
      return {{"grid_n", p.grid_n},
              {"feat_dim", p.feat_dim},
              {"poly_deg", p.poly_deg},
              {"noise_halfwidth", p.noise_halfwidth}};
    }
    case FamilyTag::kMultiKnapsack: {
      KnapsackGenParams p;
      return {{"n_items", p.n_items},
              {"dims", p.dims},
              {"capacity", p.capacity},
              {"feat_dim", p.feat_dim},
              {"hidden", p.hidden}};
    }
    case FamilyTag::kStochasticShortestPath: {
      StochasticSpGenParams p;
      return {{"grid_n", p.grid_n}, {"deadline", DeadlineModeName(p.deadline)}};
    }
    case FamilyTag::kPortfolioQp:
    case FamilyTag::kPortfolioMinlp: {
      PortfolioGenParams p;
      Json j{{"k", p.k},
             {"history_len", p.history_len},
             {"feat_dim", p.feat_dim},
             {"alpha", p.alpha}};
      if (family == FamilyTag::kPortfolioMinlp) {
        j["beta"] = p.beta;
        j["gamma"] = p.gamma;
        j["f_min"] = p.f_min;
        j["f_max"] = p.f_max;
        j["min_assets"] = p.min_assets;
        j["max_assets"] = p.max_assets;
      }
      return j;
    }
  }
  ThrowConfig("unknown family");
}

std::pair<int, int> DefaultSplit(FamilyTag family) {
  switch (family) {
    case FamilyTag::kShortestPath:
    case FamilyTag::kMultiKnapsack:
      return {1000, 1000};
    case FamilyTag::kStochasticShortestPath:
      return {50, 25};
    case FamilyTag::kPortfolioQp:
      return {200, 200};
    case FamilyTag::kPortfolioMinlp:
      return {50, 10};
  }
  return {0, 0};
}

Json LancerToJson(const LancerConfig& c) {
  return {{"T", c.T},
          {"w_updates", c.w_updates},
          {"theta_updates", c.theta_updates},
          {"lr_w", c.lr_w},
          {"lr_theta", c.lr_theta},
          {"lambda", c.lambda},
          {"n_perturb", c.n_perturb},
          {"perturb_scale", c.perturb_scale},
          {"surrogate_hidden", c.surrogate_hidden},
          {"target_hidden", c.target_hidden},
          {"batch", c.batch},
          {"buffer_capacity", c.buffer_capacity},
          {"standardize_inputs", c.standardize_inputs},
          {"two_stage_updates", c.two_stage_updates},
          {"two_stage_lr", c.two_stage_lr},
          {"deploy_updates", c.deploy_updates}};
}

LancerConfig LancerFromJson(const Json& j) {
  LancerConfig c;
  const Json defaults = LancerToJson(c);
  std::set<std::string> keys;
  for (const auto& [k, _] : defaults.items()) keys.insert(k);
  CheckKeys(j, keys, "lancer");
  Json m = defaults;
  m.update(j);
  c.T = m["T"].get<int>();
  c.w_updates = m["w_updates"].get<int>();
  c.theta_updates = m["theta_updates"].get<int>();
  c.lr_w = m["lr_w"].get<double>();
  c.lr_theta = m["lr_theta"].get<double>();
  c.lambda = m["lambda"].get<double>();
  c.n_perturb = m["n_perturb"].get<int>();
  c.perturb_scale = m["perturb_scale"].get<double>();
  c.surrogate_hidden = m["surrogate_hidden"].get<std::vector<int>>();
  c.target_hidden = m["target_hidden"].get<std::vector<int>>();
  c.batch = m["batch"].get<int>();
  c.buffer_capacity = m["buffer_capacity"].get<long>();
  c.standardize_inputs = m["standardize_inputs"].get<bool>();
  c.two_stage_updates = m["two_stage_updates"].get<int>();
  c.two_stage_lr = m["two_stage_lr"].get<double>();
  c.deploy_updates = m["deploy_updates"].get<int>();
  c.Validate();
  return c;
}

Json Header(const RunConfig& cfg) {
  return {{"config_hash", ConfigHash(cfg)}, {"seed", cfg.seed}};
}

std::string CsvTag(const RunConfig& cfg) {
  return "config_hash=" + ConfigHash(cfg) + ",seed=" + std::to_string(cfg.seed);
}

std::string Join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void WriteJson(const std::string& path, const Json& j) {
  WriteFileAtomic(path, j.dump(2) + "\n");
}

Json ReadJson(const std::string& path, ErrorKind kind) {
  return ParseJson(ReadFile(path), kind, "'" + path + "' does not parse");
}

Dataset LoadSplit(const RunConfig& cfg, const std::string& split) {
  const std::string path = Join(cfg.data_dir, split + ".json");
  if (!fs::exists(path)) {
    ThrowData("missing dataset '" + path + "'; run generate first");
  }
  Dataset ds = LoadDataset(path);
  if (ds.family != cfg.family) {
    ThrowData("dataset '" + path + "' holds " + std::string(FamilyName(ds.family)) +
              " instances, config expects " + std::string(FamilyName(cfg.family)));
  }
  const int expected = split == "train" ? cfg.n_train : cfg.n_test;
  if (static_cast<int>(ds.size()) != expected) {
    ThrowData("dataset '" + path + "' has " + std::to_string(ds.size()) +
              " instances, config expects " + std::to_string(expected));
  }
  return ds;
}

LancerConfig RunLancerConfig(const RunConfig& cfg) {
  LancerConfig lc = cfg.lancer;
  lc.seed = cfg.seed;
  lc.workers = cfg.workers;
  return lc;
}

Json TargetCheckpoint(const RunConfig& cfg, int iteration, const Mlp& target,
                      const SurrogateModel* surrogate) {
  Json j = Header(cfg);
  j["mode"] = RunModeName(cfg.mode);
  j["kind"] = "target";
  j["iteration"] = iteration;
  j["target"] = MlpToJsonValue(target);
  if (surrogate && surrogate->c_dim() > 0) j["surrogate"] = SurrogateToJson(*surrogate);
  return j;
}

// Per-iteration means over independent per-instance runs. Calls and buffer
// sizes are summed, so the curve reads as one run over the whole split.
std::vector<HistoryRow> MergeHistories(const std::vector<std::vector<HistoryRow>>& all) {
  std::vector<HistoryRow> out;
  if (all.empty()) return out;
  const std::size_t rows = all.front().size();
  for (std::size_t t = 0; t < rows; ++t) {
    HistoryRow r;
    r.iteration = static_cast<int>(t + 1);
    for (const auto& h : all) {
      r.buffer_size += h[t].buffer_size;
      r.solver_calls += h[t].solver_calls;
      r.surrogate_mse += h[t].surrogate_mse;
      r.mean_decision_loss += h[t].mean_decision_loss;
      r.wall_time = std::max(r.wall_time, h[t].wall_time);
    }
    r.surrogate_mse /= static_cast<double>(all.size());
    r.mean_decision_loss /= static_cast<double>(all.size());
    out.push_back(r);
  }
  return out;
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Json NumberOrNull(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

Dataset GenerateDataset(const RunConfig& cfg) {
  const int n = cfg.n_train + cfg.n_test;
  if (n < 1) ThrowConfig("n_train + n_test must be >= 1");
  const Json& g = cfg.generator;
  switch (cfg.family) {
    case FamilyTag::kShortestPath: {
      ShortestPathGenParams p;
      p.grid_n = g.at("grid_n").get<int>();
      p.feat_dim = g.at("feat_dim").get<int>();
      p.poly_deg = g.at("poly_deg").get<int>();
      p.noise_halfwidth = g.at("noise_halfwidth").get<double>();
      p.n_instances = n;
      return GenerateShortestPathDataset(p, cfg.seed);
    }
    case FamilyTag::kMultiKnapsack: {
      KnapsackGenParams p;
      p.n_items = g.at("n_items").get<int>();
      p.dims = g.at("dims").get<int>();
      p.capacity = g.at("capacity").get<double>();
      p.feat_dim = g.at("feat_dim").get<int>();
      p.hidden = g.at("hidden").get<int>();
      p.n_instances = n;
      return GenerateKnapsackDataset(p, cfg.seed);
    }
    case FamilyTag::kStochasticShortestPath: {
      StochasticSpGenParams p;
      p.grid_n = g.at("grid_n").get<int>();
      p.deadline = ParseDeadlineMode(g.at("deadline").get<std::string>());
      p.n_instances = n;
      return GenerateStochasticSpDataset(p, cfg.seed);
    }
    case FamilyTag::kPortfolioQp:
    case FamilyTag::kPortfolioMinlp: {
      PortfolioGenParams p;
      p.k = g.at("k").get<int>();
      p.history_len = g.at("history_len").get<int>();
      p.feat_dim = g.at("feat_dim").get<int>();
      p.alpha = g.at("alpha").get<double>();
      p.with_coskewness = cfg.family == FamilyTag::kPortfolioMinlp;
      if (p.with_coskewness) {
        p.beta = g.at("beta").get<double>();
        p.gamma = g.at("gamma").get<double>();
        p.f_min = g.at("f_min").get<double>();
        p.f_max = g.at("f_max").get<double>();
        p.min_assets = g.at("min_assets").get<int>();
        p.max_assets = g.at("max_assets").get<int>();
      }
      p.n_instances = n;
      return GeneratePortfolioDataset(p, cfg.seed);
    }
  }
  ThrowConfig("unknown family");
}

std::string RunModeName(RunMode mode) {
  for (const auto& m : kModes) {
    if (m.mode == mode) return m.name;
  }
  return "unknown";
}

RunMode ParseRunMode(const std::string& name) {
  for (const auto& m : kModes) {
    if (name == m.name) return m.mode;
  }
  ThrowConfig("unknown mode '" + name + "'");
}

void CheckModeCompatibility(FamilyTag family, RunMode mode) {
  const bool predicted = HasCostDescription(family);
  bool ok = true;
  switch (mode) {
    case RunMode::kTwoStage:
    case RunMode::kLancerPo:
      ok = predicted;
      break;
    case RunMode::kLancerZero:
    case RunMode::kLancerPrior:
    case RunMode::kReusedM:
    case RunMode::kHeuristic:
      ok = !predicted;
      break;
    case RunMode::kOptimal:
      ok = family != FamilyTag::kPortfolioMinlp;
      break;
  }
  if (!ok) {
    ThrowConfig("mode " + RunModeName(mode) + " does not apply to family " +
                std::string(FamilyName(family)));
  }
}

RunConfig RunConfigFromJson(const Json& j) {
  try {
    CheckKeys(j,
              {"schema_version", "family", "mode", "seed", "data", "lancer", "eval",
               "data_dir", "run_dir"},
              "config");
    if (j.contains("schema_version") &&
        j["schema_version"].get<int>() != kRunConfigSchemaVersion) {
      ThrowConfig("unsupported config schema_version");
    }
    RunConfig cfg;
    if (!j.contains("family")) ThrowConfig("config needs a family");
    if (!j.contains("mode")) ThrowConfig("config needs a mode");
    cfg.family = ParseFamily(j["family"].get<std::string>());
    cfg.mode = ParseRunMode(j["mode"].get<std::string>());
    if (!j.contains("seed") || j["seed"].is_null()) ThrowConfig("a seed is required");
    const Json& seed = j["seed"];
    if (!seed.is_number_integer() ||
        (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      ThrowConfig("seed must be a non-negative integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();

    const Json data = j.value("data", Json::object());
    CheckKeys(data, {"n_train", "n_test", "params"}, "data");
    const auto [n_train, n_test] = DefaultSplit(cfg.family);
    cfg.n_train = data.value("n_train", n_train);
    cfg.n_test = data.value("n_test", n_test);
    if (cfg.n_train < 0 || cfg.n_test < 0) ThrowConfig("split sizes must be >= 0");
    cfg.generator = GeneratorDefaults(cfg.family);
    const Json params = data.value("params", Json::object());
    std::set<std::string> known;
    for (const auto& [k, _] : cfg.generator.items()) known.insert(k);
    CheckKeys(params, known, "data.params");
    cfg.generator.update(params);
    if (cfg.generator.contains("deadline")) {
      ParseDeadlineMode(cfg.generator["deadline"].get<std::string>());
    }

    cfg.lancer = LancerFromJson(j.value("lancer", Json::object()));

    const Json eval = j.value("eval", Json::object());
    CheckKeys(eval, {"random_draws"}, "eval");
    cfg.random_draws = eval.value("random_draws", 10);
    if (cfg.random_draws < 1) ThrowConfig("eval.random_draws must be >= 1");

    cfg.data_dir = j.value("data_dir", std::string("data"));
    cfg.run_dir = j.value("run_dir", std::string("run"));
    CheckModeCompatibility(cfg.family, cfg.mode);
    return cfg;
  } catch (const Json::exception& e) {
    ThrowConfig(std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    throw Error(ErrorKind::kConfig, e.what());
  }
}

RunConfig LoadRunConfig(const std::string& path) {
  return RunConfigFromJson(ParseJson(ReadFile(path), ErrorKind::kConfig,
                                     "config '" + path + "' does not parse"));
}

Json RunConfigToJson(const RunConfig& cfg) {
  return {{"schema_version", kRunConfigSchemaVersion},
          {"family", std::string(FamilyName(cfg.family))},
          {"mode", RunModeName(cfg.mode)},
          {"seed", cfg.seed},
          {"data",
           {{"n_train", cfg.n_train}, {"n_test", cfg.n_test}, {"params", cfg.generator}}},
          {"lancer", LancerToJson(cfg.lancer)},
          {"eval", {{"random_draws", cfg.random_draws}}},
          {"data_dir", cfg.data_dir},
          {"run_dir", cfg.run_dir}};
}

void SetDotted(Json& doc, const std::string& dotted, const Json& value) {
  if (dotted.empty()) ThrowConfig("empty parameter path");
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty()) ThrowConfig("malformed parameter path '" + dotted + "'");
    if (!node->is_object()) ThrowConfig("'" + dotted + "' walks through a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

std::string ConfigHash(const RunConfig& cfg) {
  Json j = RunConfigToJson(cfg);
  j.erase("data_dir");
  j.erase("run_dir");
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xf];
  return out;
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidArgument:
      return 2;
    case ErrorKind::kData:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
    case ErrorKind::kIo:
      return 5;
  }
  return 1;
}

long ExpectedTrainingCalls(const RunConfig& cfg) {
  const long T = cfg.lancer.T;
  const long per = cfg.lancer.n_perturb + 1;
  switch (cfg.mode) {
    case RunMode::kLancerPo:
    case RunMode::kLancerPrior:
      return T * cfg.n_train;
    case RunMode::kLancerZero:
      return T * per * cfg.n_test;
    case RunMode::kReusedM:
      return T * per * cfg.n_train;
    default:
      return 0;
  }
}

void CmdGenerate(const RunConfig& cfg) {
  CheckModeCompatibility(cfg.family, cfg.mode);
  const Dataset all = GenerateDataset(cfg);
  Dataset train = all;
  Dataset test = all;
  train.instances.resize(cfg.n_train);
  test.instances.erase(test.instances.begin(), test.instances.begin() + cfg.n_train);

  EnsureDirectory(cfg.data_dir);
  const Json header = Header(cfg);
  for (const auto& [name, ds] : {std::pair<std::string, const Dataset*>{"train", &train},
                                 {"test", &test}}) {
    Json doc = DatasetToJson(*ds);
    doc.update(header);
    WriteFileAtomic(Join(cfg.data_dir, name + ".json"), doc.dump() + "\n");
  }
  Json manifest = header;
  manifest["family"] = std::string(FamilyName(cfg.family));
  manifest["generator"] = ParseJson(all.params_json, ErrorKind::kData, "generator params");
  manifest["n_train"] = cfg.n_train;
  manifest["n_test"] = cfg.n_test;
  manifest["files"] = {"train.json", "test.json"};
  WriteJson(Join(cfg.data_dir, "manifest.json"), manifest);
}

void CmdTrain(const RunConfig& cfg) {
  CheckModeCompatibility(cfg.family, cfg.mode);
  const auto start = Clock::now();
  const LancerConfig lc = RunLancerConfig(cfg);
  lc.Validate();
  EnsureDirectory(cfg.run_dir);
  const std::string checkpoint_path = Join(cfg.run_dir, "checkpoint.json");

  std::vector<HistoryRow> history;
  SolverStats stats;
  Json summary = Header(cfg);
  summary["mode"] = RunModeName(cfg.mode);
  summary["family"] = std::string(FamilyName(cfg.family));
  Json config = RunConfigToJson(cfg);
  config.erase("data_dir");
  config.erase("run_dir");
  summary["config"] = config;

  switch (cfg.mode) {
    case RunMode::kTwoStage:
    case RunMode::kLancerPo:
    case RunMode::kLancerPrior: {
      const Dataset train = LoadSplit(cfg, "train");
      if (train.size() == 0) ThrowConfig("training needs n_train >= 1");
      const IterationCallback on_iteration = [&](const IterationEvent& e) {
        WriteJson(checkpoint_path,
                  TargetCheckpoint(cfg, e.iteration, *e.target, e.surrogate));
      };
      TrainResult r;
      if (cfg.mode == RunMode::kTwoStage) {
        r = TrainTwoStage(train, lc);
      } else if (cfg.mode == RunMode::kLancerPo) {
        r = TrainPredictOptimize(train, lc, on_iteration);
      } else {
        r = TrainPrior(train, lc, on_iteration);
      }
      const int last = r.history.empty() ? 0 : r.history.back().iteration;
      WriteJson(checkpoint_path, TargetCheckpoint(cfg, last, r.target, &r.surrogate));
      SaveMlpBinary(r.target, Join(cfg.run_dir, "target.lmlp"));
      history = std::move(r.history);
      stats = r.stats;
      break;
    }
    case RunMode::kLancerZero: {
      const Dataset test = LoadSplit(cfg, "test");
      const long n = static_cast<long>(test.size());
      std::vector<std::optional<ZeroResult>> results(n);
      std::mutex mu;
      const auto write_checkpoint = [&] {
        Json ck = Header(cfg);
        ck["mode"] = RunModeName(cfg.mode);
        ck["kind"] = "costs";
        ck["n_instances"] = n;
        Json done = Json::array();
        for (long i = 0; i < n; ++i) {
          if (!results[i]) continue;
          done.push_back({{"index", i},
                          {"c", VecToJson(results[i]->c)},
                          {"best_objective", results[i]->best_objective}});
        }
        ck["instances"] = std::move(done);
        WriteJson(checkpoint_path, ck);
      };
      ParallelFor(n, cfg.workers, [&](long i) {
        LancerConfig per = lc;
        per.workers = 1;
        per.seed = InstanceSeed(cfg.seed, static_cast<std::uint64_t>(i));
        ZeroResult r = TrainZero(test.instances[i], per);
        std::lock_guard<std::mutex> lock(mu);
        results[i] = std::move(r);
        write_checkpoint();
      });
      write_checkpoint();
      std::vector<std::vector<HistoryRow>> histories;
      std::vector<double> best, initial;
      for (auto& r : results) {
        histories.push_back(r->history);
        best.push_back(r->best_objective);
        initial.push_back(r->initial_objective);
        stats.Merge(r->stats);
      }
      history = MergeHistories(histories);
      summary["mean_best_objective"] = Mean(best);
      summary["mean_initial_objective"] = Mean(initial);
      break;
    }
    case RunMode::kReusedM: {
      const Dataset train = LoadSplit(cfg, "train");
      if (train.size() == 0) ThrowConfig("pretraining needs n_train >= 1");
      ReusableSurrogate r = PretrainReusableSurrogate(train, lc);
      Json ck = Header(cfg);
      ck["mode"] = RunModeName(cfg.mode);
      ck["kind"] = "surrogate";
      ck["iteration"] = r.history.empty() ? 0 : r.history.back().iteration;
      ck["surrogate"] = SurrogateToJson(r.surrogate);
      WriteJson(checkpoint_path, ck);
      history = std::move(r.history);
      stats = r.stats;
      break;
    }
    case RunMode::kOptimal:
    case RunMode::kHeuristic: {
      Json ck = Header(cfg);
      ck["mode"] = RunModeName(cfg.mode);
      ck["kind"] = "none";
      WriteJson(checkpoint_path, ck);
      break;
    }
  }

  WriteFileAtomic(Join(cfg.run_dir, "history.csv"), HistoryToCsv(history, CsvTag(cfg)));
  summary["iterations"] = history.size();
  summary["solver_calls"] = stats.call_count();
  summary["expected_solver_calls"] = ExpectedTrainingCalls(cfg);
  summary["final_mean_decision_loss"] =
      history.empty() ? Json(nullptr) : Json(history.back().mean_decision_loss);
  WriteJson(Join(cfg.run_dir, "summary.json"), summary);

  Json timing = Header(cfg);
  timing["wall_time"] = Seconds(start);
  timing["solver_wall_time"] = stats.wall_time_total();
  timing["iteration_wall_time"] = Json::array();
  for (const HistoryRow& r : history) timing["iteration_wall_time"].push_back(r.wall_time);
  WriteJson(Join(cfg.run_dir, "timing.json"), timing);
}

void CmdEvaluate(const RunConfig& cfg, const std::string& checkpoint) {
  CheckModeCompatibility(cfg.family, cfg.mode);
  const auto start = Clock::now();
  const Dataset test = LoadSplit(cfg, "test");
  const long n = static_cast<long>(test.size());
  const std::string ck_path =
      checkpoint.empty() ? Join(cfg.run_dir, "checkpoint.json") : checkpoint;
  const Json ck = ReadJson(ck_path, ErrorKind::kData);
  if (ck.value("mode", std::string()) != RunModeName(cfg.mode)) {
    ThrowData("checkpoint '" + ck_path + "' was written by another mode");
  }
  const LancerConfig lc = RunLancerConfig(cfg);

  SolverStats stats;
  std::vector<double> objectives(n);
  std::vector<double> deploy_times;
  try {
    switch (cfg.mode) {
      case RunMode::kTwoStage:
      case RunMode::kLancerPo:
      case RunMode::kLancerPrior: {
        const Mlp target = MlpFromJsonValue(ck.at("target"));
        ParallelFor(n, cfg.workers, [&](long i) {
          objectives[i] = PredictSolve(target, test.instances[i], &stats).objective;
        });
        break;
      }
      case RunMode::kLancerZero: {
        const Json& done = ck.at("instances");
        if (static_cast<long>(done.size()) != n) {
          ThrowData("checkpoint covers " + std::to_string(done.size()) + " of " +
                    std::to_string(n) + " instances");
        }
        std::vector<Vec> costs(n);
        for (const Json& e : done) {
          const long i = e.at("index").get<long>();
          if (i < 0 || i >= n) ThrowData("checkpoint instance index out of range");
          costs[i] = VecFromJson(e.at("c"));
        }
        ParallelFor(n, cfg.workers, [&](long i) {
          const ProblemDescriptor& z = test.instances[i].z;
          objectives[i] = EvalObjective(SolveFamily(costs[i], z, &stats), z);
        });
        break;
      }
      case RunMode::kReusedM: {
        const SurrogateModel surrogate = SurrogateFromJson(ck.at("surrogate"));
        deploy_times.resize(n);
        ParallelFor(n, cfg.workers, [&](long i) {
          const DeployResult d =
              DeployReusedSurrogate(test.instances[i], surrogate, lc, &stats);
          objectives[i] = d.objective;
          deploy_times[i] = d.wall_time;
        });
        break;
      }
      case RunMode::kOptimal: {
        ParallelFor(n, cfg.workers, [&](long i) {
          const ProblemDescriptor& z = test.instances[i].z;
          objectives[i] = HasCostDescription(cfg.family)
                              ? EvalObjective(SolveFamily(CostVector(z), z, &stats), z)
                              : EvalObjective(TrueOptimum(z), z);
        });
        break;
      }
      case RunMode::kHeuristic: {
        ParallelFor(n, cfg.workers, [&](long i) {
          const ProblemDescriptor& z = test.instances[i].z;
          if (const auto* d = std::get_if<StochasticSpDesc>(&z)) {
            double best = -std::numeric_limits<double>::infinity();
            for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
              const Vec c = d->mean + gamma * d->variance;
              best = std::max(best, EvalObjective(SolveFamily(c, z, &stats), z));
            }
            objectives[i] = best;
          } else {
            objectives[i] = EvalObjective(SolveFamily(DefaultInitialCost(z), z, &stats), z);
          }
        });
        break;
      }
    }
  } catch (const Json::exception& e) {
    ThrowData("malformed checkpoint '" + ck_path + "': " + e.what());
  }

  double regret = std::numeric_limits<double>::quiet_NaN();
  double ndl = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> optimal, random;
  if (cfg.family != FamilyTag::kPortfolioMinlp) {
    optimal = OptimalObjectives(test, cfg.workers);
    random = RandomBaselineObjectives(test, cfg.random_draws,
                                      InstanceSeed(cfg.seed, 0x7e57), cfg.workers);
    regret = NormalizedRegret(objectives, optimal, cfg.family);
    try {
      ndl = NormalizedDecisionLoss(objectives, random, optimal, cfg.family);
    } catch (const Error&) {
      // Random and optimal decisions coincide; the ratio is undefined.
    }
  }

  Json report = Header(cfg);
  report["mode"] = RunModeName(cfg.mode);
  report["family"] = std::string(FamilyName(cfg.family));
  report["n_test"] = n;
  report["solver_calls"] = stats.call_count();
  report["mean_objective"] = Mean(objectives);
  report["normalized_regret"] = NumberOrNull(regret);
  report["normalized_decision_loss"] = NumberOrNull(ndl);
  report["mean_optimal_objective"] = optimal.empty() ? Json(nullptr) : Json(Mean(optimal));
  report["mean_random_objective"] = random.empty() ? Json(nullptr) : Json(Mean(random));
  report["checkpoint_iteration"] = ck.value("iteration", 0);
  WriteJson(Join(cfg.run_dir, "eval.json"), report);

  std::string csv = "# " + CsvTag(cfg) + "\ninstance,objective,optimal,random\n";
  for (long i = 0; i < n; ++i) {
    csv += std::to_string(i) + "," + FormatDouble(objectives[i]) + "," +
           (optimal.empty() ? "" : FormatDouble(optimal[i])) + "," +
           (random.empty() ? "" : FormatDouble(random[i])) + "\n";
  }
  WriteFileAtomic(Join(cfg.run_dir, "eval_instances.csv"), csv);

  Json timing = Header(cfg);
  timing["wall_time"] = Seconds(start);
  timing["solver_wall_time"] = stats.wall_time_total();
  if (!deploy_times.empty()) timing["deploy_wall_time"] = deploy_times;
  WriteJson(Join(cfg.run_dir, "eval_timing.json"), timing);
}

std::vector<SweepCell> CmdSweep(const RunConfig& base, const Json& grid) {
  if (!grid.is_object() || grid.empty()) ThrowConfig("sweep grid must be a non-empty object");
  std::vector<std::string> keys;
  std::vector<std::vector<Json>> values;
  bool own_data = false;
  for (const auto& [key, vals] : grid.items()) {
    if (!vals.is_array() || vals.empty()) {
      ThrowConfig("sweep values for '" + key + "' must be a non-empty array");
    }
    if (key == "data_dir" || key == "run_dir") ThrowConfig("paths cannot be swept");
    own_data = own_data || key == "seed" || key == "family" || key.rfind("data.", 0) == 0;
    keys.push_back(key);
    values.emplace_back(vals.begin(), vals.end());
  }
  long total = 1;
  for (const auto& v : values) total *= static_cast<long>(v.size());

  std::vector<SweepCell> cells(total);
  std::vector<std::string> hashes(total);
  const Json base_doc = RunConfigToJson(base);
  EnsureDirectory(base.run_dir);
  ParallelFor(total, base.workers, [&](long idx) {
    SweepCell& cell = cells[idx];
    cell.index = static_cast<int>(idx);
    cell.normalized_regret = std::numeric_limits<double>::quiet_NaN();
    Json doc = base_doc;
    long rest = idx;
    for (long k = static_cast<long>(keys.size()) - 1; k >= 0; --k) {
      const long m = static_cast<long>(values[k].size());
      cell.params.insert(cell.params.begin(), {keys[k], values[k][rest % m]});
      rest /= m;
    }
    try {
      for (const auto& [key, value] : cell.params) SetDotted(doc, key, value);
      doc["run_dir"] = Join(base.run_dir, "cell_" + std::to_string(idx));
      if (own_data) doc["data_dir"] = Join(doc["run_dir"].get<std::string>(), "data");
      RunConfig cfg = RunConfigFromJson(doc);
      cfg.workers = 1;
      hashes[idx] = ConfigHash(cfg);
      if (own_data) CmdGenerate(cfg);
      CmdTrain(cfg);
      CmdEvaluate(cfg);
      const Json report = ReadJson(Join(cfg.run_dir, "eval.json"), ErrorKind::kData);
      cell.mean_objective = report.at("mean_objective").get<double>();
      if (report.at("normalized_regret").is_number()) {
        cell.normalized_regret = report["normalized_regret"].get<double>();
      }
      const Json summary = ReadJson(Join(cfg.run_dir, "summary.json"), ErrorKind::kData);
      cell.solver_calls = summary.at("solver_calls").get<long>();
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.ok = false;
      cell.error = e.what();
    }
  });

  std::string csv = "# " + CsvTag(base) + "\ncell";
  for (const std::string& k : keys) csv += "," + CsvField(k);
  csv += ",status,mean_objective,normalized_regret,solver_calls,config_hash,error\n";
  for (long i = 0; i < total; ++i) {
    const SweepCell& c = cells[i];
    csv += std::to_string(i);
    for (const auto& [_, v] : c.params) csv += "," + CsvField(v.dump());
    csv += c.ok ? ",ok," : ",error,";
    if (c.ok) {
      csv += FormatDouble(c.mean_objective) + "," +
             (std::isfinite(c.normalized_regret) ? FormatDouble(c.normalized_regret) : "") +
             "," + std::to_string(c.solver_calls);
    } else {
      csv += ",,";
    }
    csv += "," + hashes[i] + "," + CsvField(c.error) + "\n";
  }
  WriteFileAtomic(Join(base.run_dir, "sweep.csv"), csv);
  return cells;
}

void CmdReport(const std::vector<std::string>& run_dirs, const std::string& out_prefix) {
  std::vector<std::string> dirs;
  for (const std::string& d : run_dirs) {
    if (fs::exists(Join(d, "summary.json"))) {
      dirs.push_back(d);
      continue;
    }
    // A sweep directory: expand to its cells in index order.
    std::vector<std::pair<long, std::string>> cells;
    if (fs::is_directory(d)) {
      for (const auto& entry : fs::directory_iterator(d)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_directory() && name.rfind("cell_", 0) == 0 &&
            fs::exists(entry.path() / "summary.json")) {
          cells.emplace_back(std::stol(name.substr(5)), entry.path().string());
        }
      }
    }
    if (cells.empty()) ThrowData("'" + d + "' holds no finished run");
    std::sort(cells.begin(), cells.end());
    for (auto& c : cells) dirs.push_back(c.second);
  }

  std::vector<std::pair<std::string, std::vector<HistoryRow>>> histories;
  Json table = Json::array();
  for (const std::string& d : dirs) {
    const Json summary = ReadJson(Join(d, "summary.json"), ErrorKind::kData);
    const std::string label = summary.at("mode").get<std::string>() + "@" +
                              fs::path(d).lexically_normal().filename().string();
    histories.emplace_back(label, HistoryFromCsv(ReadFile(Join(d, "history.csv"))));
    Json row{{"run", label},
             {"config_hash", summary.at("config_hash")},
             {"seed", summary.at("seed")},
             {"mode", summary.at("mode")},
             {"training_solver_calls", summary.at("solver_calls")}};
    if (fs::exists(Join(d, "eval.json"))) {
      const Json ev = ReadJson(Join(d, "eval.json"), ErrorKind::kData);
      for (const char* k : {"mean_objective", "normalized_regret",
                            "normalized_decision_loss", "solver_calls"}) {
        row[std::string("eval_") + k] = ev.at(k);
      }
    }
    table.push_back(std::move(row));
  }
  WriteFileAtomic(out_prefix + "_curve.csv", CurveToCsv(TradeoffCurve(histories)));
  WriteJson(out_prefix + "_table.json", table);
}

}  // namespace lancer
