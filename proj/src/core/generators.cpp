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

#include "core/generators.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/solvers.hpp"

namespace lancer {

using nlohmann::json;

std::uint64_t InstanceSeed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

Vec Normal(std::mt19937_64& rng, long n, double stddev = 1.0) {
  std::normal_distribution<double> dist(0.0, stddev);
  Vec v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

Vec Uniform(std::mt19937_64& rng, long n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(n);
  for (long i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

Mat NormalMatrix(std::mt19937_64& rng, long rows, long cols, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Mat m(rows, cols);
  // Row-major draw order so the layout is easy to reproduce elsewhere.
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

void RequirePositive(const char* what, long value) {
  if (value < 1) ThrowInvalid(std::string(what) + " must be >= 1");
}

}  // namespace

Dataset GenerateShortestPathDataset(const ShortestPathGenParams& p,
                                    std::uint64_t seed) {
  if (p.grid_n < 2) ThrowInvalid("grid_n must be >= 2");
  RequirePositive("feat_dim", p.feat_dim);
  RequirePositive("n_instances", p.n_instances);
  RequirePositive("poly_deg", p.poly_deg);
  if (!(p.noise_halfwidth >= 0 && p.noise_halfwidth < 1)) {
    ThrowInvalid("noise_halfwidth must lie in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  const int n_edges = GridEdgeCount(p.grid_n);
  std::bernoulli_distribution coin(0.5);
  Mat b(n_edges, p.feat_dim);
  for (int r = 0; r < n_edges; ++r) {
    for (int c = 0; c < p.feat_dim; ++c) b(r, c) = coin(rng) ? 1.0 : -1.0;
  }
  const double norm = std::pow(3.5, p.poly_deg);
  const double root_p = std::sqrt(static_cast<double>(p.feat_dim));

  Dataset ds;
  ds.family = FamilyTag::kShortestPath;
  ds.seed = seed;
  ds.params_json = json{{"grid_n", p.grid_n},
                        {"n_instances", p.n_instances},
                        {"feat_dim", p.feat_dim},
                        {"poly_deg", p.poly_deg},
                        {"noise_halfwidth", p.noise_halfwidth}}
                       .dump();
  ds.instances.reserve(p.n_instances);
  for (int i = 0; i < p.n_instances; ++i) {
    Instance inst;
    inst.y = Normal(rng, p.feat_dim);
    const Vec eps =
        Uniform(rng, n_edges, 1.0 - p.noise_halfwidth, 1.0 + p.noise_halfwidth);
    const Vec by = b * inst.y / root_p;
    ShortestPathDesc d;
    d.grid_n = p.grid_n;
    d.costs.resize(n_edges);
    for (int j = 0; j < n_edges; ++j) {
      d.costs[j] = (std::pow(by[j] + 3.0, p.poly_deg) / norm + 1.0) * eps[j];
    }
    inst.z = std::move(d);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

Dataset GenerateKnapsackDataset(const KnapsackGenParams& p,
                                std::uint64_t seed) {
  RequirePositive("n_items", p.n_items);
  RequirePositive("dims", p.dims);
  RequirePositive("feat_dim", p.feat_dim);
  RequirePositive("hidden", p.hidden);
  RequirePositive("n_instances", p.n_instances);
  if (!(p.capacity >= 0)) ThrowInvalid("capacity must be >= 0");
  std::mt19937_64 rng(seed);
  Mat weights(p.dims, p.n_items);
  {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int d = 0; d < p.dims; ++d) {
      for (int i = 0; i < p.n_items; ++i) weights(d, i) = u(rng);
    }
  }
  const Mat w1 = NormalMatrix(rng, p.hidden, p.n_items,
                              1.0 / std::sqrt(static_cast<double>(p.n_items)));
  const Mat w2 = NormalMatrix(rng, p.feat_dim, p.hidden,
                              1.0 / std::sqrt(static_cast<double>(p.hidden)));

  Dataset ds;
  ds.family = FamilyTag::kMultiKnapsack;
  ds.seed = seed;
  ds.params_json = json{{"n_items", p.n_items},
                        {"dims", p.dims},
                        {"capacity", p.capacity},
                        {"feat_dim", p.feat_dim},
                        {"hidden", p.hidden},
                        {"n_instances", p.n_instances}}
                       .dump();
  ds.instances.reserve(p.n_instances);
  for (int i = 0; i < p.n_instances; ++i) {
    KnapsackDesc d;
    d.values = Uniform(rng, p.n_items, 0.0, 5.0);
    d.weights = weights;
    d.capacities = Vec::Constant(p.dims, p.capacity);
    Instance inst;
    inst.y = w2 * (w1 * (d.values.array() - 2.5).matrix()).array().tanh().matrix();
    inst.z = std::move(d);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

DeadlineMode ParseDeadlineMode(const std::string& name) {
  if (name == "tight") return DeadlineMode::kTight;
  if (name == "normal") return DeadlineMode::kNormal;
  if (name == "loose") return DeadlineMode::kLoose;
  ThrowConfig("unknown deadline mode '" + name + "'");
}

std::string DeadlineModeName(DeadlineMode mode) {
  switch (mode) {
    case DeadlineMode::kTight:
      return "tight";
    case DeadlineMode::kNormal:
      return "normal";
    case DeadlineMode::kLoose:
      return "loose";
  }
  return "normal";
}

double DeadlineFactor(DeadlineMode mode) {
  switch (mode) {
    case DeadlineMode::kTight:
      return 0.9;
    case DeadlineMode::kNormal:
      return 1.0;
    case DeadlineMode::kLoose:
      return 1.1;
  }
  return 1.0;
}

Instance GenerateStochasticSpInstance(int grid_n, DeadlineMode mode,
                                      std::uint64_t seed) {
  if (grid_n < 2) ThrowInvalid("grid_n must be >= 2");
  std::mt19937_64 rng(seed);
  const int n_edges = GridEdgeCount(grid_n);
  StochasticSpDesc d;
  d.grid_n = grid_n;
  d.mean = Uniform(rng, n_edges, 0.1, 0.2);
  d.variance = Uniform(rng, n_edges, 0.1, 0.3).cwiseProduct(
      (1.0 - d.mean.array()).matrix());
  const Solution path = SolveDagShortestPath(grid_n, d.mean);
  d.deadline = DeadlineFactor(mode) * path.objective_surrogate;
  Instance inst;
  inst.y.resize(2 * n_edges + 1);
  inst.y << d.mean, d.variance, d.deadline;
  inst.z = std::move(d);
  return inst;
}

Dataset GenerateStochasticSpDataset(const StochasticSpGenParams& p,
                                    std::uint64_t seed) {
  RequirePositive("n_instances", p.n_instances);
  Dataset ds;
  ds.family = FamilyTag::kStochasticShortestPath;
  ds.seed = seed;
  ds.params_json = json{{"grid_n", p.grid_n},
                        {"n_instances", p.n_instances},
                        {"deadline", DeadlineModeName(p.deadline)}}
                       .dump();
  ds.instances.reserve(p.n_instances);
  for (int i = 0; i < p.n_instances; ++i) {
    ds.instances.push_back(
        GenerateStochasticSpInstance(p.grid_n, p.deadline, InstanceSeed(seed, i)));
  }
  return ds;
}

Mat SampleCovariance(const Mat& returns) {
  const double t = static_cast<double>(returns.rows());
  if (t < 1) ThrowInvalid("empty return history");
  const Mat centered = returns.rowwise() - returns.colwise().mean();
  Mat cov = centered.transpose() * centered / t;
  return 0.5 * (cov + cov.transpose());
}

Mat SampleCoskewness(const Mat& returns) {
  const long t = returns.rows();
  const long k = returns.cols();
  if (t < 1) ThrowInvalid("empty return history");
  const Mat d = returns.rowwise() - returns.colwise().mean();
  Mat s = Mat::Zero(k, k * k);
  for (long i = 0; i < k; ++i) {
    for (long j = 0; j < k; ++j) {
      for (long l = j; l < k; ++l) {
        double acc = 0.0;
        for (long r = 0; r < t; ++r) acc += d(r, i) * d(r, j) * d(r, l);
        acc /= static_cast<double>(t);
        s(i, j * k + l) = acc;
        s(i, l * k + j) = acc;
      }
    }
  }
  return s;
}

Dataset GeneratePortfolioDataset(const PortfolioGenParams& p,
                                 std::uint64_t seed) {
  if (p.k < 2) ThrowInvalid("k must be >= 2");
  RequirePositive("n_instances", p.n_instances);
  RequirePositive("feat_dim", p.feat_dim);
  if (p.history_len < 2) ThrowInvalid("history_len must be >= 2");
  if (p.with_coskewness && p.history_len < 3) {
    ThrowInvalid("history_len must be >= 3 for co-skewness");
  }
  if (p.feat_dim > p.history_len) {
    ThrowInvalid("feat_dim (trailing periods) must not exceed history_len");
  }
  constexpr int kFactors = 3;
  constexpr double kPhi = 0.5;
  constexpr double kIdio = 0.05;
  constexpr double kMeanNoise = 0.02;
  std::mt19937_64 rng(seed);
  const Mat loadings = NormalMatrix(rng, p.k, kFactors, 0.1);

  Dataset ds;
  ds.family = p.with_coskewness ? FamilyTag::kPortfolioMinlp
                                : FamilyTag::kPortfolioQp;
  ds.seed = seed;
  json params{{"k", p.k},
              {"n_instances", p.n_instances},
              {"history_len", p.history_len},
              {"feat_dim", p.feat_dim},
              {"with_coskewness", p.with_coskewness},
              {"alpha", p.alpha}};
  if (p.with_coskewness) {
    params["beta"] = p.beta;
    params["gamma"] = p.gamma;
    params["f_min"] = p.f_min;
    params["f_max"] = p.f_max;
    params["min_assets"] = p.min_assets;
    params["max_assets"] = p.max_assets;
  }
  ds.params_json = params.dump();
  ds.instances.reserve(p.n_instances);
  for (int n = 0; n < p.n_instances; ++n) {
    Vec f = Normal(rng, kFactors, 1.0 / std::sqrt(1.0 - kPhi * kPhi));
    Mat returns(p.history_len, p.k);
    for (int t = 0; t < p.history_len; ++t) {
      f = kPhi * f + Normal(rng, kFactors);
      returns.row(t) = (loadings * f + Normal(rng, p.k, kIdio)).transpose();
    }
    const Vec mu = loadings * (kPhi * f) + Normal(rng, p.k, kMeanNoise);
    Vec x0 = Uniform(rng, p.k, 0.0, 1.0);
    x0 /= x0.sum();

    Instance inst;
    inst.y.resize(static_cast<long>(p.feat_dim) * p.k);
    for (int t = 0; t < p.feat_dim; ++t) {
      inst.y.segment(static_cast<long>(t) * p.k, p.k) =
          returns.row(p.history_len - p.feat_dim + t).transpose();
    }
    if (p.with_coskewness) {
      PortfolioMinlpDesc d;
      d.mu = mu;
      d.cov = SampleCovariance(returns);
      d.coskew = SampleCoskewness(returns);
      d.x0 = x0;
      d.alpha = p.alpha;
      d.beta = p.beta;
      d.gamma = p.gamma;
      d.f_min = p.f_min;
      d.f_max = p.f_max;
      d.min_assets = p.min_assets;
      d.max_assets = std::min(p.max_assets, p.k);
      inst.z = std::move(d);
    } else {
      PortfolioQpDesc d;
      d.mu = mu;
      d.cov = SampleCovariance(returns);
      d.alpha = p.alpha;
      inst.z = std::move(d);
    }
    if (n == 0) ValidateDescriptor(inst.z);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

}  // namespace lancer
