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

#ifndef LANCER_CORE_DIFFMODELS_HPP_
#define LANCER_CORE_DIFFMODELS_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "core/problems.hpp"
#include "core/types.hpp"

namespace lancer {

// Dense network with tanh hidden layers and an identity output layer. All
// parameters live in one flat vector; layer l contributes its weight matrix
// (out x in, row-major) followed by its bias.
//
// Batched entry points take one sample per column.
class Mlp {
 public:
  Mlp() = default;
  // Zero-initialized parameters.
  explicit Mlp(std::vector<int> layer_sizes);

  // Glorot-uniform weights, zero biases.
  static Mlp Glorot(std::vector<int> layer_sizes, std::mt19937_64& rng);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  long param_count() const { return params_.size(); }

  Vec& params() { return params_; }
  const Vec& params() const { return params_; }
  void set_params(const Vec& p);

  Vec Forward(const Vec& x) const;
  Mat Forward(const Mat& x) const;

  // Gradients of sum_samples upstream^T forward(x). Either output may be null.
  void Backward(const Mat& x, const Mat& upstream, Vec* grad_params,
                Mat* grad_input) const;

  Vec GradParams(const Vec& x, const Vec& upstream) const;
  Vec GradInput(const Vec& x, const Vec& upstream) const;

  // Offset of layer l's weights inside params().
  long WeightOffset(int layer) const { return offsets_[layer]; }

 private:
  void Check() const;
  void Activations(const Mat& x, std::vector<Mat>* acts) const;

  std::vector<int> sizes_;
  std::vector<long> offsets_;
  Vec params_;
};

struct AdamState {
  long step_count = 0;
  Vec m;
  Vec v;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  AdamState(long n, double lr) : m(Vec::Zero(n)), v(Vec::Zero(n)), learning_rate(lr) {}
};

// One bias-corrected Adam update of `params` in place.
void AdamStep(AdamState& state, Vec& params, const Vec& grads);

// Mean squared error over all samples and outputs.
double MeanSquaredError(const Mlp& model, const Mat& inputs,
                        const Mat& targets);

// Exactly `n_updates` Adam steps on the MSE. The whole data set forms one
// batch when it has at most `batch` samples; otherwise shuffled minibatches
// are drawn from `rng`. Returns the mean minibatch loss of the last epoch.
double FitMse(Mlp& model, const Mat& inputs, const Mat& targets, int n_updates,
              int batch, AdamState& state, std::mt19937_64& rng);

// Regresses c(y) onto the cost part of each description (two-stage
// training).
double TwoStageFit(Mlp& target, const Dataset& dataset, int n_updates,
                   int batch, AdamState& state, std::mt19937_64& rng);

// Stacks instance features / cost vectors as columns.
Mat FeatureMatrix(const Dataset& dataset);
Mat CostMatrix(const Dataset& dataset);

// Checkpoints. The binary form is bit-exact; the JSON form writes shortest
// round-trip decimals.
void SaveMlpBinary(const Mlp& model, const std::string& path);
Mlp LoadMlpBinary(const std::string& path);
std::string MlpToJson(const Mlp& model);
Mlp MlpFromJson(const std::string& text);

}  // namespace lancer

#endif  // LANCER_CORE_DIFFMODELS_HPP_
