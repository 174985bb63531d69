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

#ifndef LANCER_CORE_GENERATORS_HPP_
#define LANCER_CORE_GENERATORS_HPP_

#include <cstdint>
#include <string>

#include "core/problems.hpp"

namespace lancer {

// Synthetic benchmark generators. Every generator is a pure function of its
// parameters and seed.

struct ShortestPathGenParams {
  int grid_n = 5;
  int n_instances = 1000;
  int feat_dim = 5;
  int poly_deg = 6;
  double noise_halfwidth = 0.5;
};

// z_j = [((B y)_j / sqrt(p) + 3)^deg / 3.5^deg + 1] * eps_j with a fixed +-1
// matrix B, y ~ N(0, I_p) and eps_j ~ U(1 - h, 1 + h).
Dataset GenerateShortestPathDataset(const ShortestPathGenParams& params,
                                    std::uint64_t seed);

struct KnapsackGenParams {
  int n_items = 100;
  int dims = 5;
  double capacity = 40.0;
  int feat_dim = 256;
  int hidden = 500;
  int n_instances = 1000;
};

// Values U(0,5) per instance; weights U(0,1) shared by the dataset; features
// are a fixed random one-hidden-layer tanh network applied to the values.
Dataset GenerateKnapsackDataset(const KnapsackGenParams& params,
                                std::uint64_t seed);

enum class DeadlineMode { kTight, kNormal, kLoose };

DeadlineMode ParseDeadlineMode(const std::string& name);
std::string DeadlineModeName(DeadlineMode mode);
double DeadlineFactor(DeadlineMode mode);

// mu_e ~ U(0.1, 0.2), sigma_e ~ U(0.1, 0.3) * (1 - mu_e), W = kappa * (the
// mu-shortest path length). Fully observed: y = [mu; sigma; W].
Instance GenerateStochasticSpInstance(int grid_n, DeadlineMode mode,
                                      std::uint64_t seed);

struct StochasticSpGenParams {
  int grid_n = 5;
  int n_instances = 25;
  DeadlineMode deadline = DeadlineMode::kNormal;
};

// Instance i is GenerateStochasticSpInstance(..., InstanceSeed(seed, i)).
Dataset GenerateStochasticSpDataset(const StochasticSpGenParams& params,
                                    std::uint64_t seed);

struct PortfolioGenParams {
  int k = 50;
  int n_instances = 200;
  int history_len = 60;
  int feat_dim = 5;  // trailing periods exposed as features
  bool with_coskewness = false;
  double alpha = 0.1;
  double beta = 0.5;
  double gamma = 0.01;
  double f_min = 0.01;
  double f_max = 0.2;
  int min_assets = 3;
  int max_assets = 10;  // clipped to k
};

// Three-factor market with AR(1) factors; G and S are sample moments of the
// return history, mu is the conditional next-period mean plus noise.
Dataset GeneratePortfolioDataset(const PortfolioGenParams& params,
                                 std::uint64_t seed);

// Sample covariance and co-skewness (population normalization, 1/T) of the
// rows of `returns` (T x k). Co-skewness is laid out as k x k^2.
Mat SampleCovariance(const Mat& returns);
Mat SampleCoskewness(const Mat& returns);

// Derives an independent per-instance seed.
std::uint64_t InstanceSeed(std::uint64_t seed, std::uint64_t index);

}  // namespace lancer

#endif  // LANCER_CORE_GENERATORS_HPP_
