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

#ifndef LANCER_CORE_LANCER_HPP_
#define LANCER_CORE_LANCER_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "core/diffmodels.hpp"
#include "core/problems.hpp"
#include "core/replay_buffer.hpp"
#include "core/solvers.hpp"

namespace lancer {

struct LancerConfig {
  int T = 10;
  int w_updates = 10;
  int theta_updates = 10;
  double lr_w = 1e-3;
  double lr_theta = 1e-3;
  double lambda = 0.0;
  int n_perturb = 30;
  double perturb_scale = 0.1;
  std::vector<int> surrogate_hidden = {200, 200};
  std::vector<int> target_hidden = {};  // empty: linear c(y)
  int batch = 1000;
  long buffer_capacity = 0;  // 0: unbounded
  bool standardize_inputs = true;
  int two_stage_updates = 1000;
  double two_stage_lr = 1e-2;
  // Adam steps on c per deployment of a reused surrogate.
  int deploy_updates = 10;
  std::uint64_t seed = 0;
  int workers = 1;

  void Validate() const;
};

// What the surrogate sees next to c_hat.
enum class ContextKind {
  kNone,         // c_hat only (per-instance zero mode)
  kDescription,  // the cost part of z (predict-then-optimize)
  kFeatures,     // y (prior mode, reusable surrogates)
};

Vec Context(const Instance& inst, ContextKind kind);

// M_w together with the standardization of its regression targets. The
// network regresses (f - target_mean) / target_std from inputs rescaled
// featurewise by the buffer statistics.
class SurrogateModel {
 public:
  SurrogateModel() = default;
  SurrogateModel(int c_dim, int context_dim, const std::vector<int>& hidden,
                 double lr, std::mt19937_64& rng, bool standardize_inputs = true);

  int c_dim() const { return c_dim_; }
  int context_dim() const { return context_dim_; }
  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  double target_mean() const { return target_mean_; }
  double target_std() const { return target_std_; }
  void set_standardization(double mean, double std);
  // Per-feature affine map applied to [c; context] before the network.
  const Vec& input_mean() const { return input_mean_; }
  const Vec& input_scale() const { return input_scale_; }
  void set_input_standardization(const Vec& mean, const Vec& scale);

  // Refreshes the standardization from the whole buffer, then runs `updates`
  // MSE steps. Returns the final mean loss in standardized units.
  double Fit(const ReplayBuffer& buffer, int updates, int batch,
             std::mt19937_64& rng);

  // Standardized prediction.
  double Predict(const Vec& c, const Vec& context) const;
  // Standardized predictions, one column per sample.
  Mat PredictBatch(const Mat& c, const Mat& context) const;
  // Prediction in the units of the recorded losses.
  double PredictLoss(const Vec& c, const Vec& context) const;

  // Columns of the result are d/dc of weight_j * Predict(c_j, context_j).
  Mat GradCost(const Mat& c, const Mat& context, double weight) const;

 private:
  int c_dim_ = 0;
  int context_dim_ = 0;
  Mlp net_;
  AdamState adam_;
  double target_mean_ = 0.0;
  double target_std_ = 1.0;
  bool standardize_inputs_ = true;
  Vec input_mean_;
  Vec input_scale_;

  Mat NetInput(const Mat& c, const Mat& context) const;
};

struct HistoryRow {
  int iteration = 0;
  long buffer_size = 0;
  double surrogate_mse = 0.0;
  double mean_decision_loss = 0.0;  // internal (minimize) sense
  long solver_calls = 0;            // cumulative
  double wall_time = 0.0;           // seconds since the start of training
};

struct IterationEvent {
  int iteration;
  const Mlp* target;  // null in zero mode
  const Vec* c;       // null unless in zero mode
  const SurrogateModel* surrogate;
  const std::vector<HistoryRow>* history;
};
using IterationCallback = std::function<void(const IterationEvent&)>;

struct WStepResult {
  double mean_decision_loss = 0.0;
  double surrogate_mse = 0.0;
};

// Solves every instance under c(y_i), appends to the buffer and refits M.
WStepResult WStep(const Dataset& dataset, const Mlp& target, ContextKind kind,
                  SolverStats& stats, ReplayBuffer& buffer,
                  SurrogateModel& surrogate, const LancerConfig& cfg,
                  std::mt19937_64& rng);

// Value and parameter gradient of
//   mean_i M(c(y_i), ctx_i) + lambda * mean_i ||c(y_i) - z_i||^2
// with features, contexts and costs stacked as columns.
double ThetaObjective(const Mlp& target, const SurrogateModel& surrogate,
                      const Mat& features, const Mat& contexts,
                      const Mat& costs, double lambda, Vec* grad);

// cfg.theta_updates Adam steps on the target against the frozen surrogate.
void ThetaStep(const Dataset& dataset, const SurrogateModel& surrogate,
               Mlp& target, AdamState& adam, ContextKind kind, double lambda,
               const LancerConfig& cfg, std::mt19937_64& rng);

struct TrainResult {
  Mlp target;
  SurrogateModel surrogate;
  std::vector<HistoryRow> history;
  SolverStats stats;
};

// Regression-only baseline; no solver calls and no history rows.
TrainResult TrainTwoStage(const Dataset& dataset, const LancerConfig& cfg);

// Two-stage warm start followed by cfg.T alternations.
TrainResult TrainPredictOptimize(const Dataset& dataset,
                                 const LancerConfig& cfg,
                                 const IterationCallback& on_iteration = {});

// Same loop without the warm start or the prediction penalty; the surrogate
// sees y as its context.
TrainResult TrainPrior(const Dataset& dataset, const LancerConfig& cfg,
                       const IterationCallback& on_iteration = {});

struct ZeroResult {
  Vec c;                       // cost vector that produced `best`
  Solution best;
  double best_objective = 0.0;     // natural sense
  double initial_objective = 0.0;  // natural sense, first evaluation
  std::vector<double> best_so_far;  // natural sense, per outer iteration
  std::vector<HistoryRow> history;
  SolverStats stats;
};

// Heuristic starting point for per-instance search: edge means for the
// stochastic shortest path, -mu for the cubic portfolio, z's cost part
// otherwise.
Vec DefaultInitialCost(const ProblemDescriptor& z);

// Per-instance surrogate-cost search. Each outer iteration evaluates the
// current c and cfg.n_perturb perturbations of it.
ZeroResult TrainZero(const Instance& inst, const LancerConfig& cfg,
                     const Vec* init_c = nullptr,
                     const IterationCallback& on_iteration = {});

struct ReusableSurrogate {
  SurrogateModel surrogate;
  std::vector<HistoryRow> history;
  SolverStats stats;
};

// Runs the zero-mode search jointly over a dataset with one shared
// surrogate M(c, y).
ReusableSurrogate PretrainReusableSurrogate(const Dataset& dataset,
                                            const LancerConfig& cfg);

struct DeployResult {
  Vec c;
  Solution solution;
  double objective = 0.0;  // natural sense
  double wall_time = 0.0;
};

// Optimizes c against a frozen surrogate and solves once.
DeployResult DeployReusedSurrogate(const Instance& inst,
                                   const SurrogateModel& surrogate,
                                   const LancerConfig& cfg,
                                   SolverStats* stats);

struct PredictResult {
  Solution solution;
  double objective = 0.0;  // natural sense
};

PredictResult PredictSolve(const Mlp& target, const Instance& inst,
                           SolverStats* stats);

}  // namespace lancer

#endif  // LANCER_CORE_LANCER_HPP_
