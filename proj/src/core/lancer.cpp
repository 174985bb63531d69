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

#include "core/lancer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace lancer {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Re-raises solver failures with the instance index attached.
template <typename Fn>
void WithInstanceContext(long index, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "instance " + std::to_string(index) + ": " + e.what());
  }
}

double Natural(FamilyTag family, double internal) {
  return ToInternal(family, internal);  // negation is an involution
}

std::vector<int> LayerSizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Mat ContextMatrix(const Dataset& dataset, ContextKind kind) {
  const long n = static_cast<long>(dataset.size());
  const long width = Context(dataset.instances.front(), kind).size();
  Mat out(width, n);
  for (long i = 0; i < n; ++i) out.col(i) = Context(dataset.instances[i], kind);
  return out;
}

}  // namespace

void LancerConfig::Validate() const {
  if (T < 0) ThrowConfig("T must be >= 0");
  if (w_updates < 1 || theta_updates < 1) {
    ThrowConfig("inner update budgets must be >= 1");
  }
  if (!(lr_w > 0) || !(lr_theta > 0) || !(two_stage_lr > 0)) {
    ThrowConfig("learning rates must be > 0");
  }
  if (!(lambda >= 0)) ThrowConfig("lambda must be >= 0");
  if (n_perturb < 0) ThrowConfig("n_perturb must be >= 0");
  if (!(perturb_scale > 0)) ThrowConfig("perturb_scale must be > 0");
  if (batch < 1) ThrowConfig("batch must be >= 1");
  if (buffer_capacity < 0) ThrowConfig("buffer_capacity must be >= 0");
  if (two_stage_updates < 0) ThrowConfig("two_stage_updates must be >= 0");
  if (deploy_updates < 0) ThrowConfig("deploy_updates must be >= 0");
  if (workers < 1) ThrowConfig("workers must be >= 1");
  for (int h : surrogate_hidden) {
    if (h < 1) ThrowConfig("surrogate hidden widths must be >= 1");
  }
  for (int h : target_hidden) {
    if (h < 1) ThrowConfig("target hidden widths must be >= 1");
  }
}

Vec Context(const Instance& inst, ContextKind kind) {
  switch (kind) {
    case ContextKind::kNone:
      return Vec(0);
    case ContextKind::kDescription:
      return CostVector(inst.z);
    case ContextKind::kFeatures:
      return inst.y;
  }
  return Vec(0);
}

// ---------------------------------------------------------------------------
// SurrogateModel

SurrogateModel::SurrogateModel(int c_dim, int context_dim,
                               const std::vector<int>& hidden, double lr,
                               std::mt19937_64& rng, bool standardize_inputs)
    : c_dim_(c_dim),
      context_dim_(context_dim),
      net_(Mlp::Glorot(LayerSizes(c_dim + context_dim, hidden, 1), rng)),
      adam_(net_.param_count(), lr),
      standardize_inputs_(standardize_inputs),
      input_mean_(Vec::Zero(c_dim + context_dim)),
      input_scale_(Vec::Ones(c_dim + context_dim)) {}

void SurrogateModel::set_standardization(double mean, double std) {
  if (!(std > 0) || !std::isfinite(mean)) {
    ThrowInvalid("standardization needs finite mean and positive std");
  }
  target_mean_ = mean;
  target_std_ = std;
}

void SurrogateModel::set_input_standardization(const Vec& mean,
                                               const Vec& scale) {
  CheckDim("input mean", mean.size(), c_dim_ + context_dim_);
  CheckDim("input scale", scale.size(), c_dim_ + context_dim_);
  if (!mean.allFinite() || !(scale.array() > 0).all()) {
    ThrowInvalid("input standardization needs finite means and positive scales");
  }
  input_mean_ = mean;
  input_scale_ = scale;
}

Mat SurrogateModel::NetInput(const Mat& c, const Mat& context) const {
  CheckDim("surrogate cost input", c.rows(), c_dim_);
  CheckDim("surrogate context input", context.rows(), context_dim_);
  CheckDim("surrogate context count", context.cols(), c.cols());
  Mat in(c_dim_ + context_dim_, c.cols());
  in.topRows(c_dim_) = c;
  in.bottomRows(context_dim_) = context;
  in.colwise() -= input_mean_;
  in.array().colwise() /= input_scale_.array();
  return in;
}

double SurrogateModel::Fit(const ReplayBuffer& buffer, int updates, int batch,
                           std::mt19937_64& rng) {
  if (buffer.empty()) ThrowInvalid("cannot fit the surrogate on an empty buffer");
  const Vec f = buffer.Targets();
  const double mean = f.mean();
  double std = 1.0;
  if (f.size() >= 2) {
    const double var = (f.array() - mean).square().mean();
    if (var > 1e-24) std = std::sqrt(var);
  }
  target_mean_ = mean;
  target_std_ = std;
  Mat inputs = buffer.Inputs();
  CheckDim("surrogate input width", inputs.rows(), net_.input_dim());
  if (standardize_inputs_) {
    input_mean_ = inputs.rowwise().mean();
    input_scale_ = ((inputs.colwise() - input_mean_).array().square().rowwise().mean())
                       .sqrt()
                       .max(1e-8)
                       .matrix();
  }
  inputs.colwise() -= input_mean_;
  inputs.array().colwise() /= input_scale_.array();
  const Mat targets = ((f.array() - mean) / std).matrix().transpose();
  return FitMse(net_, inputs, targets, updates, batch, adam_, rng);
}

double SurrogateModel::Predict(const Vec& c, const Vec& context) const {
  return net_.Forward(NetInput(Mat(c), Mat(context)))(0, 0);
}

double SurrogateModel::PredictLoss(const Vec& c, const Vec& context) const {
  return target_mean_ + target_std_ * Predict(c, context);
}

Mat SurrogateModel::PredictBatch(const Mat& c, const Mat& context) const {
  return net_.Forward(NetInput(c, context));
}

Mat SurrogateModel::GradCost(const Mat& c, const Mat& context,
                             double weight) const {
  Mat grad;
  net_.Backward(NetInput(c, context), Mat::Constant(1, c.cols(), weight),
                nullptr, &grad);
  return (grad.topRows(c_dim_).array().colwise() /
          input_scale_.head(c_dim_).array())
      .matrix();
}

// ---------------------------------------------------------------------------
// Alternating steps

WStepResult WStep(const Dataset& dataset, const Mlp& target, ContextKind kind,
                  SolverStats& stats, ReplayBuffer& buffer,
                  SurrogateModel& surrogate, const LancerConfig& cfg,
                  std::mt19937_64& rng) {
  if (dataset.instances.empty()) ThrowData("dataset is empty");
  const long n = static_cast<long>(dataset.size());
  const Mat c_hat = target.Forward(FeatureMatrix(dataset));
  std::vector<double> losses(n);
  ParallelFor(n, cfg.workers, [&](long i) {
    WithInstanceContext(i, [&] {
      const ProblemDescriptor& z = dataset.instances[i].z;
      const Solution sol = SolveFamily(c_hat.col(i), z, &stats);
      losses[i] = InternalLoss(sol, z);
    });
  });
  WStepResult out;
  for (long i = 0; i < n; ++i) {
    buffer.Append(c_hat.col(i), Context(dataset.instances[i], kind), losses[i]);
    out.mean_decision_loss += losses[i];
  }
  out.mean_decision_loss /= static_cast<double>(n);
  out.surrogate_mse = surrogate.Fit(buffer, cfg.w_updates, cfg.batch, rng);
  return out;
}

double ThetaObjective(const Mlp& target, const SurrogateModel& surrogate,
                      const Mat& features, const Mat& contexts,
                      const Mat& costs, double lambda, Vec* grad) {
  const long n = features.cols();
  if (n < 1) ThrowInvalid("empty batch");
  CheckDim("target output", target.output_dim(), surrogate.c_dim());
  const Mat c = target.Forward(features);
  const double inv_n = 1.0 / static_cast<double>(n);
  double value = surrogate.PredictBatch(c, contexts).sum() * inv_n;
  Mat upstream = surrogate.GradCost(c, contexts, inv_n);
  if (lambda > 0) {
    CheckDim("cost targets", costs.rows(), c.rows());
    const Mat diff = c - costs;
    value += lambda * diff.squaredNorm() * inv_n;
    upstream += (2.0 * lambda * inv_n) * diff;
  }
  if (grad) target.Backward(features, upstream, grad, nullptr);
  return value;
}

void ThetaStep(const Dataset& dataset, const SurrogateModel& surrogate,
               Mlp& target, AdamState& adam, ContextKind kind, double lambda,
               const LancerConfig& cfg, std::mt19937_64& rng) {
  const Mat features = FeatureMatrix(dataset);
  const Mat contexts = ContextMatrix(dataset, kind);
  const Mat costs = lambda > 0 ? CostMatrix(dataset) : Mat();
  const long n = features.cols();
  Vec grad;
  if (n <= cfg.batch) {
    for (int u = 0; u < cfg.theta_updates; ++u) {
      ThetaObjective(target, surrogate, features, contexts, costs, lambda, &grad);
      AdamStep(adam, target.params(), grad);
    }
    return;
  }
  std::vector<long> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long cursor = n;
  for (int u = 0; u < cfg.theta_updates; ++u) {
    if (cursor >= n) {
      std::shuffle(perm.begin(), perm.end(), rng);
      cursor = 0;
    }
    const long m = std::min<long>(cfg.batch, n - cursor);
    Mat fb(features.rows(), m), cb(contexts.rows(), m), zb;
    if (lambda > 0) zb.resize(costs.rows(), m);
    for (long j = 0; j < m; ++j) {
      fb.col(j) = features.col(perm[cursor + j]);
      cb.col(j) = contexts.col(perm[cursor + j]);
      if (lambda > 0) zb.col(j) = costs.col(perm[cursor + j]);
    }
    cursor += m;
    ThetaObjective(target, surrogate, fb, cb, zb, lambda, &grad);
    AdamStep(adam, target.params(), grad);
  }
}

// ---------------------------------------------------------------------------
// Training loops

namespace {

TrainResult RunAlternating(const Dataset& dataset, const LancerConfig& cfg,
                           ContextKind kind, bool warm_start, double lambda,
                           const IterationCallback& on_iteration) {
  cfg.Validate();
  ValidateDataset(dataset);
  const auto start = Clock::now();
  std::mt19937_64 rng(cfg.seed);
  const Instance& first = dataset.instances.front();
  const int y_dim = static_cast<int>(first.y.size());
  const int c_dim = SurrogateDim(first.z);

  TrainResult out;
  out.target = Mlp::Glorot(LayerSizes(y_dim, cfg.target_hidden, c_dim), rng);
  if (warm_start && cfg.two_stage_updates > 0) {
    AdamState ts(out.target.param_count(), cfg.two_stage_lr);
    TwoStageFit(out.target, dataset, cfg.two_stage_updates, cfg.batch, ts, rng);
  }
  const int ctx_dim = static_cast<int>(Context(first, kind).size());
  out.surrogate = SurrogateModel(c_dim, ctx_dim, cfg.surrogate_hidden,
                                 cfg.lr_w, rng, cfg.standardize_inputs);
  ReplayBuffer buffer(cfg.buffer_capacity);
  AdamState theta_adam(out.target.param_count(), cfg.lr_theta);
  for (int t = 1; t <= cfg.T; ++t) {
    const WStepResult w = WStep(dataset, out.target, kind, out.stats, buffer,
                                out.surrogate, cfg, rng);
    ThetaStep(dataset, out.surrogate, out.target, theta_adam, kind, lambda,
              cfg, rng);
    HistoryRow row;
    row.iteration = t;
    row.buffer_size = buffer.size();
    row.surrogate_mse = w.surrogate_mse;
    row.mean_decision_loss = w.mean_decision_loss;
    row.solver_calls = out.stats.call_count();
    row.wall_time = Seconds(start);
    out.history.push_back(row);
    if (on_iteration) {
      on_iteration({t, &out.target, nullptr, &out.surrogate, &out.history});
    }
  }
  return out;
}

}  // namespace

TrainResult TrainTwoStage(const Dataset& dataset, const LancerConfig& cfg) {
  cfg.Validate();
  ValidateDataset(dataset);
  if (!HasCostDescription(dataset.family)) {
    ThrowConfig("two-stage training needs a family whose description is a cost vector");
  }
  std::mt19937_64 rng(cfg.seed);
  const Instance& first = dataset.instances.front();
  TrainResult out;
  out.target = Mlp::Glorot(LayerSizes(static_cast<int>(first.y.size()),
                                      cfg.target_hidden, SurrogateDim(first.z)),
                           rng);
  if (cfg.two_stage_updates > 0) {
    AdamState ts(out.target.param_count(), cfg.two_stage_lr);
    TwoStageFit(out.target, dataset, cfg.two_stage_updates, cfg.batch, ts, rng);
  }
  return out;
}

TrainResult TrainPredictOptimize(const Dataset& dataset,
                                 const LancerConfig& cfg,
                                 const IterationCallback& on_iteration) {
  if (!HasCostDescription(dataset.family)) {
    ThrowConfig("predict-then-optimize training needs a family whose description is a cost vector");
  }
  return RunAlternating(dataset, cfg, ContextKind::kDescription,
                        /*warm_start=*/true, cfg.lambda, on_iteration);
}

TrainResult TrainPrior(const Dataset& dataset, const LancerConfig& cfg,
                       const IterationCallback& on_iteration) {
  return RunAlternating(dataset, cfg, ContextKind::kFeatures,
                        /*warm_start=*/false, 0.0, on_iteration);
}

Vec DefaultInitialCost(const ProblemDescriptor& z) {
  if (const auto* d = std::get_if<StochasticSpDesc>(&z)) return d->mean;
  if (const auto* d = std::get_if<PortfolioMinlpDesc>(&z)) return -d->mu;
  return CostVector(z);
}

namespace {

// Draws c + scale * (1 + |c|) * xi for each requested sample.
std::vector<Vec> Perturbations(const Vec& c, int count, double scale,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  const Vec spread = scale * (1.0 + c.array().abs()).matrix();
  for (int j = 0; j < count; ++j) {
    Vec xi(c.size());
    for (long e = 0; e < c.size(); ++e) xi[e] = normal(rng);
    out.push_back(c + spread.cwiseProduct(xi));
  }
  return out;
}

}  // namespace

ZeroResult TrainZero(const Instance& inst, const LancerConfig& cfg,
                     const Vec* init_c, const IterationCallback& on_iteration) {
  cfg.Validate();
  ValidateDescriptor(inst.z);
  const auto start = Clock::now();
  const FamilyTag family = FamilyOf(inst.z);
  std::mt19937_64 rng(cfg.seed);
  Vec c = init_c ? *init_c : DefaultInitialCost(inst.z);
  CheckDim("initial cost vector", c.size(), SurrogateDim(inst.z));

  ZeroResult out;
  SurrogateModel surrogate(static_cast<int>(c.size()), 0, cfg.surrogate_hidden,
                           cfg.lr_w, rng, cfg.standardize_inputs);
  ReplayBuffer buffer(cfg.buffer_capacity);
  AdamState adam(c.size(), cfg.lr_theta);
  double best_internal = 0.0;
  bool have_best = false;
  const Vec no_context(0);
  const Mat no_context_col(0, 1);
  for (int t = 1; t <= cfg.T; ++t) {
    std::vector<Vec> cands{c};
    for (Vec& p : Perturbations(c, cfg.n_perturb, cfg.perturb_scale, rng)) {
      cands.push_back(std::move(p));
    }
    const long m = static_cast<long>(cands.size());
    std::vector<Solution> sols(m);
    std::vector<double> losses(m);
    ParallelFor(m, cfg.workers, [&](long j) {
      sols[j] = SolveFamily(cands[j], inst.z, &out.stats);
      losses[j] = InternalLoss(sols[j], inst.z);
    });
    double round_mean = 0.0;
    for (long j = 0; j < m; ++j) {
      buffer.Append(cands[j], no_context, losses[j]);
      round_mean += losses[j];
      if (!have_best) out.initial_objective = Natural(family, losses[j]);
      if (!have_best || losses[j] < best_internal) {
        have_best = true;
        best_internal = losses[j];
        out.best = sols[j];
        out.c = cands[j];
      }
    }
    const double mse = surrogate.Fit(buffer, cfg.w_updates, cfg.batch, rng);
    for (int u = 0; u < cfg.theta_updates; ++u) {
      const Vec g = surrogate.GradCost(Mat(c), no_context_col, 1.0).col(0);
      AdamStep(adam, c, g);
    }
    out.best_so_far.push_back(Natural(family, best_internal));
    HistoryRow row;
    row.iteration = t;
    row.buffer_size = buffer.size();
    row.surrogate_mse = mse;
    row.mean_decision_loss = round_mean / static_cast<double>(m);
    row.solver_calls = out.stats.call_count();
    row.wall_time = Seconds(start);
    out.history.push_back(row);
    if (on_iteration) on_iteration({t, nullptr, &c, &surrogate, &out.history});
  }
  if (!have_best) {
    // T = 0: report the starting point without spending a solver call on it.
    out.c = c;
  } else {
    out.best_objective = Natural(family, best_internal);
  }
  return out;
}

ReusableSurrogate PretrainReusableSurrogate(const Dataset& dataset,
                                            const LancerConfig& cfg) {
  cfg.Validate();
  ValidateDataset(dataset);
  const auto start = Clock::now();
  std::mt19937_64 rng(cfg.seed);
  const long n = static_cast<long>(dataset.size());
  const Instance& first = dataset.instances.front();
  const int c_dim = SurrogateDim(first.z);
  const int y_dim = static_cast<int>(first.y.size());

  ReusableSurrogate out;
  out.surrogate = SurrogateModel(c_dim, y_dim, cfg.surrogate_hidden, cfg.lr_w,
                                 rng, cfg.standardize_inputs);
  ReplayBuffer buffer(cfg.buffer_capacity);
  Mat c(c_dim, n);
  for (long i = 0; i < n; ++i) c.col(i) = DefaultInitialCost(dataset.instances[i].z);
  const Mat features = FeatureMatrix(dataset);
  // Adam is coordinatewise, so one optimizer over the stacked costs equals
  // one optimizer per instance.
  AdamState adam(c.size(), cfg.lr_theta);
  const long per = cfg.n_perturb + 1;
  for (int t = 1; t <= cfg.T; ++t) {
    std::vector<Vec> cands;
    cands.reserve(n * per);
    for (long i = 0; i < n; ++i) {
      cands.push_back(c.col(i));
      for (Vec& p : Perturbations(c.col(i), cfg.n_perturb, cfg.perturb_scale, rng)) {
        cands.push_back(std::move(p));
      }
    }
    std::vector<double> losses(cands.size());
    ParallelFor(static_cast<long>(cands.size()), cfg.workers, [&](long j) {
      WithInstanceContext(j / per, [&] {
        const ProblemDescriptor& z = dataset.instances[j / per].z;
        losses[j] = InternalLoss(SolveFamily(cands[j], z, &out.stats), z);
      });
    });
    double total = 0.0;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      buffer.Append(cands[j], dataset.instances[j / per].y, losses[j]);
      total += losses[j];
    }
    const double mse = out.surrogate.Fit(buffer, cfg.w_updates, cfg.batch, rng);
    for (int u = 0; u < cfg.theta_updates; ++u) {
      Mat g = out.surrogate.GradCost(c, features, 1.0);
      Eigen::Map<Vec> flat(c.data(), c.size());
      Vec flat_c = flat;
      AdamStep(adam, flat_c, Eigen::Map<const Vec>(g.data(), g.size()));
      flat = flat_c;
    }
    HistoryRow row;
    row.iteration = t;
    row.buffer_size = buffer.size();
    row.surrogate_mse = mse;
    row.mean_decision_loss = total / static_cast<double>(cands.size());
    row.solver_calls = out.stats.call_count();
    row.wall_time = Seconds(start);
    out.history.push_back(row);
  }
  return out;
}

DeployResult DeployReusedSurrogate(const Instance& inst,
                                   const SurrogateModel& surrogate,
                                   const LancerConfig& cfg,
                                   SolverStats* stats) {
  const auto start = Clock::now();
  CheckDim("deployment context width", inst.y.size(), surrogate.context_dim());
  DeployResult out;
  out.c = DefaultInitialCost(inst.z);
  AdamState adam(out.c.size(), cfg.lr_theta);
  const Mat context(inst.y);
  for (int u = 0; u < cfg.deploy_updates; ++u) {
    const Vec g = surrogate.GradCost(Mat(out.c), context, 1.0).col(0);
    AdamStep(adam, out.c, g);
  }
  out.solution = SolveFamily(out.c, inst.z, stats);
  out.objective = EvalObjective(out.solution, inst.z);
  out.wall_time = Seconds(start);
  return out;
}

PredictResult PredictSolve(const Mlp& target, const Instance& inst,
                           SolverStats* stats) {
  PredictResult out;
  out.solution = SolveFamily(target.Forward(inst.y), inst.z, stats);
  out.objective = EvalObjective(out.solution, inst.z);
  return out;
}

}  // namespace lancer
