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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion;
// `--only N` runs a single criterion (one ctest entry each).

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "common/oracles.hpp"
#include "core/diffmodels.hpp"
#include "core/experiment.hpp"
#include "core/generators.hpp"
#include "core/io.hpp"
#include "core/lancer.hpp"
#include "core/metrics.hpp"
#include "core/problems.hpp"
#include "core/solvers.hpp"

namespace fs = std::filesystem;
using namespace lancer;
using lancer::testing::CardinalityLpEnumeration;
using lancer::testing::CentralDifference;
using lancer::testing::KnapsackEnumeration;
using lancer::testing::MinPathCost;
using lancer::testing::RelativeError;
using lancer::testing::TwoAssetIdentityQp;

namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

Vec Gaussian(std::mt19937_64& rng, long n, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Vec v(n);
  for (long i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Vec UniformVec(std::mt19937_64& rng, long n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (long i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path ScratchDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("lancer_acceptance_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------

Outcome SolverExactness() {
  std::mt19937_64 rng(11);
  int sp_bad = 0, ks_bad = 0, milp_bad = 0;
  for (int t = 0; t < 200; ++t) {
    const Vec c = UniformVec(rng, GridEdgeCount(5), -1.0, 2.0);
    const double got = SolveDagShortestPath(5, c).objective_surrogate;
    if (std::abs(got - MinPathCost(5, c)) > 1e-12) ++sp_bad;
  }
  for (int t = 0; t < 100; ++t) {
    const Vec values = UniformVec(rng, 12, 0.0, 10.0);
    Mat weights(3, 12);
    for (int d = 0; d < 3; ++d) weights.row(d) = UniformVec(rng, 12, 0.0, 10.0).transpose();
    const Vec caps = 0.35 * weights.rowwise().sum();
    const Solution s = SolveMultiKnapsack(values, weights, caps);
    const double got = values.dot(s.x);
    const double want = KnapsackEnumeration(values, weights, caps);
    if (std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want))) ++ks_bad;
  }
  for (int t = 0; t < 50; ++t) {
    PortfolioMinlpDesc z;
    z.f_min = 0.01;
    z.f_max = 0.2;
    z.min_assets = 3;
    z.max_assets = 10;
    z.mu = Vec::Zero(10);
    z.cov = Mat::Identity(10, 10);
    z.coskew = Mat::Zero(10, 100);
    z.x0 = Vec::Constant(10, 0.1);
    const Vec c = Gaussian(rng, 10);
    const double got = c.dot(SolvePortfolioMilp(c, z).x);
    const double want = CardinalityLpEnumeration(c, z.f_min, z.f_max, 3, 10);
    if (std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want))) ++milp_bad;
  }
  return {sp_bad + ks_bad + milp_bad == 0,
          "mismatches: shortest path " + std::to_string(sp_bad) + "/200, knapsack " +
              std::to_string(ks_bad) + "/100, cardinality LP " + std::to_string(milp_bad) +
              "/50"};
}

Outcome GradientCorrectness() {
  std::mt19937_64 rng(22);
  double worst = 0.0;
  const int in = 4, out = 3;
  for (int layers : {0, 1, 2}) {
    for (int width : {5, 50, 200}) {
      if (layers == 0 && width != 5) continue;  // no hidden width to vary
      std::vector<int> sizes{in};
      for (int l = 0; l < layers; ++l) sizes.push_back(width);
      sizes.push_back(out);
      Mlp net = Mlp::Glorot(sizes, rng);
      net.params() += Gaussian(rng, net.param_count(), 0.05);  // nonzero biases
      const Vec x = Gaussian(rng, in);
      const Vec up = Gaussian(rng, out);
      const auto f_params = [&](const Vec& p) {
        Mlp m = net;
        m.set_params(p);
        return up.dot(m.Forward(x));
      };
      const auto f_input = [&](const Vec& v) { return up.dot(net.Forward(v)); };
      // Full FD on the parameters of small nets; a fixed random subset of
      // coordinates on the wide ones.
      const Vec gp = net.GradParams(x, up);
      std::vector<long> idx;
      if (net.param_count() <= 3000) {
        for (long i = 0; i < net.param_count(); ++i) idx.push_back(i);
      } else {
        std::uniform_int_distribution<long> pick(0, net.param_count() - 1);
        for (int i = 0; i < 3000; ++i) idx.push_back(pick(rng));
      }
      Vec a(idx.size()), fd(idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) {
        Vec p = net.params();
        const double h = 1e-6;
        p[idx[j]] += h;
        const double upv = f_params(p);
        p[idx[j]] -= 2 * h;
        const double dn = f_params(p);
        fd[j] = (upv - dn) / (2 * h);
        a[j] = gp[idx[j]];
      }
      worst = std::max(worst, RelativeError(a, fd));
      worst = std::max(worst, RelativeError(net.GradInput(x, up), CentralDifference(f_input, x)));
    }
  }
  // Composed theta objective: surrogate over a target model, plus the
  // prediction penalty.
  for (const std::vector<int>& hidden : {std::vector<int>{}, std::vector<int>{8}}) {
    const int n = 6, y_dim = 5, c_dim = 7;
    std::vector<int> sizes{y_dim};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(c_dim);
    Mlp target = Mlp::Glorot(sizes, rng);
    SurrogateModel surrogate(c_dim, c_dim, {16, 16}, 1e-3, rng);
    surrogate.set_standardization(0.3, 1.7);
    surrogate.set_input_standardization(Gaussian(rng, 2 * c_dim, 0.1),
                                        UniformVec(rng, 2 * c_dim, 0.5, 2.0));
    Mat features(y_dim, n), contexts(c_dim, n);
    for (int i = 0; i < n; ++i) {
      features.col(i) = Gaussian(rng, y_dim);
      contexts.col(i) = Gaussian(rng, c_dim);
    }
    Vec grad;
    ThetaObjective(target, surrogate, features, contexts, contexts, 0.3, &grad);
    const auto f = [&](const Vec& p) {
      Mlp m = target;
      m.set_params(p);
      return ThetaObjective(m, surrogate, features, contexts, contexts, 0.3, nullptr);
    };
    worst = std::max(worst, RelativeError(grad, CentralDifference(f, target.params())));
  }
  return {worst <= 1e-5, Fmt("worst relative error %.3g (tolerance 1e-5)", worst)};
}

Outcome QpCorrectness() {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> kdist(2, 50);
  double worst_kkt = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int k = kdist(rng);
    const int rank = std::max(1, k - (t % 4) * k / 4);  // include singular G
    Mat a(rank, k);
    for (int r = 0; r < rank; ++r) a.row(r) = Gaussian(rng, k).transpose();
    const Mat g = a.transpose() * a / static_cast<double>(k);
    const Vec mu = Gaussian(rng, k);
    const double alpha = UniformVec(rng, 1, 0.05, 2.0)[0];
    const Solution s = SolvePortfolioQp(mu, g, alpha);
    worst_kkt = std::max(worst_kkt, QpKktResidual(mu, g, alpha, s.x));
  }
  double worst_closed = 0.0;
  const Mat eye = Mat::Identity(2, 2);
  std::vector<std::pair<Vec, double>> cases;
  cases.push_back({(Vec(2) << 1.0, 0.0).finished(), 1.0});
  cases.push_back({(Vec(2) << 1.0, 0.0).finished(), 0.5});
  for (int t = 0; t < 20; ++t) cases.push_back({Gaussian(rng, 2), UniformVec(rng, 1, 0.1, 3.0)[0]});
  for (const auto& [mu, alpha] : cases) {
    const Solution s = SolvePortfolioQp(mu, eye, alpha);
    worst_closed = std::max(worst_closed, (s.x - TwoAssetIdentityQp(mu, alpha)).cwiseAbs().maxCoeff());
  }
  return {worst_kkt <= 1e-8 && worst_closed <= 1e-8,
          Fmt("worst KKT residual %.3g", worst_kkt) +
              Fmt(", worst 2-asset deviation %.3g (tolerance 1e-8)", worst_closed)};
}

// Settings for the shortest-path predict-then-optimize comparison.
LancerConfig PoConfig(std::uint64_t seed) {
  LancerConfig cfg;
  cfg.T = 10;
  cfg.w_updates = 10;
  cfg.theta_updates = 10;
  cfg.lr_theta = 1e-3;
  cfg.lr_w = 1e-2;
  cfg.lambda = 0.1;
  cfg.two_stage_updates = 1000;
  cfg.two_stage_lr = 1e-2;
  cfg.seed = seed;
  return cfg;
}

Outcome PredictOptimize() {
  int wins = 0;
  int descending = 0;
  std::string ratios;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ShortestPathGenParams p;
    p.n_instances = 400;
    const Dataset all = GenerateShortestPathDataset(p, seed);
    Dataset train = all, test = all;
    train.instances.resize(200);
    test.instances.erase(test.instances.begin(), test.instances.begin() + 200);
    const auto optimal = OptimalObjectives(test);
    const auto regret = [&](const Mlp& m) {
      std::vector<double> obj;
      for (const Instance& inst : test.instances) obj.push_back(PredictSolve(m, inst, nullptr).objective);
      return NormalizedRegret(obj, optimal, test.family);
    };
    const LancerConfig cfg = PoConfig(seed);
    const double base = regret(TrainTwoStage(train, cfg).target);
    const TrainResult r = TrainPredictOptimize(train, cfg);
    const double ours = regret(r.target);
    const double ratio = ours / base;
    wins += ratio <= 0.95;
    descending += r.history.back().mean_decision_loss <= r.history.front().mean_decision_loss;
    ratios += (ratios.empty() ? "" : " ") + Fmt("%.3f", ratio);
  }
  return {wins >= 4, "regret ratio vs two-stage per seed [" + ratios + "], " +
                         std::to_string(wins) + "/5 at <= 0.95 (need 4); training loss " +
                         "non-increasing on " + std::to_string(descending) + "/5"};
}

double BestHeuristic(const Instance& inst) {
  const auto& z = std::get<StochasticSpDesc>(inst.z);
  double best = -1.0;
  for (double gamma : {0.0, 0.5, 1.0, 2.0}) {
    best = std::max(best, EvalObjective(StochasticSpHeuristic(z, gamma), inst.z));
  }
  return best;
}

Outcome ZeroVersusHeuristic() {
  StochasticSpGenParams p;
  p.n_instances = 25;
  p.deadline = DeadlineMode::kTight;
  const Dataset ds = GenerateStochasticSpDataset(p, 5);
  int ok = 0, strict = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    LancerConfig cfg;
    cfg.seed = InstanceSeed(5, i);
    const ZeroResult r = TrainZero(ds.instances[i], cfg);
    const double h = BestHeuristic(ds.instances[i]);
    ok += r.best_objective >= h;
    strict += r.best_objective > h;
  }
  return {ok >= 20, std::to_string(ok) + "/25 instances at or above the best heuristic (" +
                        std::to_string(strict) + " strictly above; need 20)"};
}

Outcome ReusedSurrogate() {
  StochasticSpGenParams p;
  p.n_instances = 75;
  p.deadline = DeadlineMode::kLoose;
  const Dataset all = GenerateStochasticSpDataset(p, 6);
  Dataset train = all, test = all;
  train.instances.resize(50);
  test.instances.erase(test.instances.begin(), test.instances.begin() + 50);
  LancerConfig cfg;
  cfg.seed = 6;
  const ReusableSurrogate reused = PretrainReusableSurrogate(train, cfg);
  int parity = 0;
  bool one_call = true;
  double t_zero = 0.0, t_deploy = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    LancerConfig per = cfg;
    per.seed = InstanceSeed(6, i);
    auto t0 = Clock::now();
    const ZeroResult full = TrainZero(test.instances[i], per);
    t_zero += Since(t0);
    SolverStats stats;
    t0 = Clock::now();
    const DeployResult d = DeployReusedSurrogate(test.instances[i], reused.surrogate, cfg, &stats);
    t_deploy += Since(t0);
    one_call = one_call && stats.call_count() == 1;
    parity += std::abs(d.objective - full.best_objective) <= 0.02 * std::abs(full.best_objective);
  }
  const double speedup = t_zero / t_deploy;
  return {parity >= 20 && one_call && speedup >= 5.0,
          std::to_string(parity) + "/25 within 2% of per-instance search (need 20), " +
              (one_call ? "1 solver call each" : "NOT 1 solver call each") +
              Fmt(", wall-time ratio %.0fx (need 5x)", speedup)};
}

Outcome CallAccounting() {
  std::vector<std::string> bad;
  ShortestPathGenParams sp;
  sp.n_instances = 20;
  const Dataset spd = GenerateShortestPathDataset(sp, 7);
  LancerConfig po;
  po.T = 3;
  po.surrogate_hidden = {16};
  po.two_stage_updates = 50;
  const TrainResult r = TrainPredictOptimize(spd, po);
  if (r.stats.call_count() != 3 * 20) bad.push_back("P+O total");
  for (std::size_t t = 0; t < r.history.size(); ++t) {
    if (r.history[t].solver_calls != static_cast<long>(20 * (t + 1))) bad.push_back("P+O history");
  }
  const TrainResult prior_free = TrainTwoStage(spd, po);
  if (prior_free.stats.call_count() != 0) bad.push_back("two-stage");

  StochasticSpGenParams sp2;
  sp2.n_instances = 4;
  const Dataset ssp = GenerateStochasticSpDataset(sp2, 7);
  LancerConfig zero;
  zero.T = 4;
  zero.n_perturb = 7;
  zero.surrogate_hidden = {16};
  const ZeroResult z = TrainZero(ssp.instances[0], zero);
  if (z.stats.call_count() != 4 * (7 + 1)) bad.push_back("zero");
  const ReusableSurrogate reused = PretrainReusableSurrogate(ssp, zero);
  if (reused.stats.call_count() != 4L * (7 + 1) * 4) bad.push_back("pretraining");
  for (const Instance& inst : ssp.instances) {
    SolverStats stats;
    DeployReusedSurrogate(inst, reused.surrogate, zero, &stats);
    if (stats.call_count() != 1) bad.push_back("deployment");
  }
  std::string detail = bad.empty() ? "T*N, T*(n_perturb+1) and 1-per-deployment counts exact"
                                   : "mismatch in:";
  for (const auto& b : bad) detail += " " + b;
  return {bad.empty(), detail};
}

Outcome StabilitySweep() {
  const fs::path dir = ScratchDir("sweep");
  RunConfig base = RunConfigFromJson(Json{
      {"family", "stochastic_sp"},
      {"mode", "lancer_zero"},
      {"seed", 8},
      {"data", {{"n_train", 0}, {"n_test", 1}, {"params", {{"deadline", "tight"}}}}},
      {"lancer", {{"lr_theta", 0.001}, {"theta_updates", 10}}},
      {"data_dir", (dir / "data").string()},
      {"run_dir", (dir / "sweep").string()}});
  CmdGenerate(base);
  const Json grid{{"lancer.lr_w", {0.0005, 0.001, 0.01}}, {"lancer.w_updates", {5, 10, 20}}};
  const auto cells = CmdSweep(base, grid);
  double lo = 1e300, hi = -1e300, sum = 0.0;
  int failed = 0;
  for (const auto& c : cells) {
    if (!c.ok) {
      ++failed;
      continue;
    }
    lo = std::min(lo, c.mean_objective);
    hi = std::max(hi, c.mean_objective);
    sum += c.mean_objective;
  }
  fs::remove_all(dir);
  if (failed > 0) return {false, std::to_string(failed) + " sweep cells failed"};
  const double mean = sum / static_cast<double>(cells.size());
  const double spread = (hi - lo) / std::abs(mean);
  return {spread <= 0.10, Fmt("objectives in [%.4f, ", lo) + Fmt("%.4f], ", hi) +
                              Fmt("relative spread %.4f (need <= 0.10)", spread)};
}

Outcome DecompositionClosure() {
  std::mt19937_64 rng(9);
  PortfolioGenParams p;
  p.k = 12;
  p.n_instances = 10;
  p.with_coskewness = true;
  const Dataset ds = GeneratePortfolioDataset(p, 9);
  double worst = 0.0;
  std::uniform_int_distribution<int> pick_size(6, 10);
  for (int t = 0; t < 100; ++t) {
    const Instance& inst = ds.instances[t % ds.size()];
    const auto& z = std::get<PortfolioMinlpDesc>(inst.z);
    // Random support of size s >= 6; 1/s leaves room on both sides of the
    // fraction bounds for a zero-sum perturbation.
    const int s = pick_size(rng);
    std::vector<int> idx(z.mu.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::shuffle(idx.begin(), idx.end(), rng);
    const double room = std::min(1.0 / s - z.f_min, z.f_max - 1.0 / s) * 0.9;
    Vec delta = UniformVec(rng, s, -room, room);
    delta.array() -= delta.mean();
    delta *= std::min(1.0, room / std::max(delta.cwiseAbs().maxCoeff(), 1e-300));
    Solution x;
    x.x = Vec::Zero(z.mu.size());
    x.v = Eigen::VectorXi::Zero(z.mu.size());
    for (int j = 0; j < s; ++j) {
      x.x[idx[j]] = 1.0 / s + delta[j];
      x.v[idx[j]] = 1;
    }
    const RiskSkewness rs = RiskSkewnessScores(x.x, z);
    const double rebuilt =
        rs.scores.sum() + z.gamma * (x.x - z.x0).cwiseAbs().sum() - rs.returns.sum();
    worst = std::max(worst, std::abs(rebuilt - EvalObjective(x, inst.z)));
  }
  return {worst <= 1e-9, Fmt("worst reconstruction gap %.3g (tolerance 1e-9)", worst)};
}

std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name == "timing.json" || name == "eval_timing.json") continue;  // wall clock
    files[fs::relative(e.path(), root).string()] = ReadFile(e.path().string());
  }
  return files;
}

Outcome Determinism() {
  const fs::path dir = ScratchDir("determinism");
  const std::vector<Json> configs{
      {{"family", "shortest_path"}, {"mode", "lancer_po"}, {"seed", 10},
       {"data", {{"n_train", 30}, {"n_test", 20}}},
       {"lancer", {{"T", 3}, {"surrogate_hidden", {32}}, {"two_stage_updates", 100}}}},
      {{"family", "knapsack"}, {"mode", "two_stage"}, {"seed", 10},
       {"data", {{"n_train", 20}, {"n_test", 10},
                 {"params", {{"n_items", 20}, {"feat_dim", 16}, {"hidden", 8}}}}},
       {"lancer", {{"two_stage_updates", 50}}}},
      {{"family", "stochastic_sp"}, {"mode", "lancer_zero"}, {"seed", 10},
       {"data", {{"n_train", 0}, {"n_test", 4}}},
       {"lancer", {{"T", 3}, {"n_perturb", 5}, {"surrogate_hidden", {16}}}}},
      {{"family", "stochastic_sp"}, {"mode", "reused_m"}, {"seed", 10},
       {"data", {{"n_train", 6}, {"n_test", 4}}},
       {"lancer", {{"T", 3}, {"n_perturb", 5}, {"surrogate_hidden", {16}}}}},
      {{"family", "portfolio_minlp"}, {"mode", "lancer_prior"}, {"seed", 10},
       {"data", {{"n_train", 6}, {"n_test", 3}, {"params", {{"k", 8}, {"history_len", 20}}}}},
       {"lancer", {{"T", 2}, {"surrogate_hidden", {16}}}}},
  };
  int compared = 0;
  std::vector<std::string> diffs;
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    std::map<std::string, std::string> reference;
    int run = 0;
    for (int workers : {1, 1, 2, 3}) {
      const fs::path root = dir / ("c" + std::to_string(ci)) / ("r" + std::to_string(run++));
      Json doc = configs[ci];
      doc["data_dir"] = (root / "data").string();
      doc["run_dir"] = (root / "run").string();
      RunConfig cfg = RunConfigFromJson(doc);
      cfg.workers = workers;
      CmdGenerate(cfg);
      CmdTrain(cfg);
      CmdEvaluate(cfg);
      const auto snap = Snapshot(root);
      if (reference.empty()) {
        reference = snap;
        continue;
      }
      ++compared;
      if (snap != reference) {
        diffs.push_back(configs[ci]["mode"].get<std::string>() + "@" + std::to_string(workers));
      }
    }
  }
  fs::remove_all(dir);
  std::string detail = std::to_string(compared) + " repeated runs over worker counts {1, 2, 3}";
  if (!diffs.empty()) {
    detail += "; differing:";
    for (const auto& d : diffs) detail += " " + d;
  } else {
    detail += " byte-identical";
  }
  return {diffs.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "solver exactness", SolverExactness},
      {2, "gradient correctness", GradientCorrectness},
      {3, "QP correctness", QpCorrectness},
      {4, "predict-then-optimize vs two-stage", PredictOptimize},
      {5, "per-instance search vs heuristics", ZeroVersusHeuristic},
      {6, "reused surrogate parity and speedup", ReusedSurrogate},
      {7, "solver-call accounting", CallAccounting},
      {8, "stability sweep", StabilitySweep},
      {9, "risk-skewness decomposition closure", DecompositionClosure},
      {10, "determinism", Determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only.insert(std::atoi(argv[++i]));
  }
  int failures = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), Since(t0));
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
