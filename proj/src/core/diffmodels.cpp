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

#include "core/diffmodels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/io.hpp"

namespace lancer {

namespace {

using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) ThrowInvalid("an MLP needs input and output sizes");
  long total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 0 || sizes_[l + 1] < 1) ThrowInvalid("invalid layer size");
    offsets_.push_back(total);
    total += static_cast<long>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_ = Vec::Zero(total);
}

Mlp Mlp::Glorot(std::vector<int> layer_sizes, std::mt19937_64& rng) {
  Mlp m(std::move(layer_sizes));
  for (int l = 0; l < m.num_layers(); ++l) {
    const int in = m.sizes_[l];
    const int out = m.sizes_[l + 1];
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-a, a);
    double* w = m.params_.data() + m.offsets_[l];
    for (long i = 0; i < static_cast<long>(in) * out; ++i) w[i] = u(rng);
  }
  return m;
}

void Mlp::set_params(const Vec& p) {
  CheckDim("parameter vector", p.size(), params_.size());
  params_ = p;
}

void Mlp::Check() const {
  if (sizes_.empty()) ThrowInvalid("model is not initialized");
}

void Mlp::Activations(const Mat& x, std::vector<Mat>* acts) const {
  Check();
  CheckDim("model input", x.rows(), input_dim());
  acts->resize(num_layers() + 1);
  (*acts)[0] = x;
  for (int l = 0; l < num_layers(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const ConstRowMap w(params_.data() + offsets_[l], out, in);
    const Eigen::Map<const Vec> b(params_.data() + offsets_[l] + long(out) * in,
                                  out);
    Mat z = w * (*acts)[l];
    z.colwise() += b;
    if (l + 1 < num_layers()) z = z.array().tanh().matrix();
    (*acts)[l + 1] = std::move(z);
  }
}

Mat Mlp::Forward(const Mat& x) const {
  std::vector<Mat> acts;
  Activations(x, &acts);
  return std::move(acts.back());
}

Vec Mlp::Forward(const Vec& x) const {
  const Mat out = Forward(Mat(x));
  return out.col(0);
}

void Mlp::Backward(const Mat& x, const Mat& upstream, Vec* grad_params,
                   Mat* grad_input) const {
  std::vector<Mat> acts;
  Activations(x, &acts);
  CheckDim("upstream rows", upstream.rows(), output_dim());
  CheckDim("upstream cols", upstream.cols(), x.cols());
  if (grad_params) *grad_params = Vec::Zero(params_.size());
  Mat delta = upstream;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    if (grad_params) {
      RowMap gw(grad_params->data() + offsets_[l], out, in);
      gw.noalias() = delta * acts[l].transpose();
      Eigen::Map<Vec>(grad_params->data() + offsets_[l] + long(out) * in, out) =
          delta.rowwise().sum();
    }
    if (l == 0 && !grad_input) break;
    const ConstRowMap w(params_.data() + offsets_[l], out, in);
    Mat prev = w.transpose() * delta;
    if (l > 0) {
      prev.array() *= 1.0 - acts[l].array().square();
    }
    delta = std::move(prev);
  }
  if (grad_input) *grad_input = std::move(delta);
}

Vec Mlp::GradParams(const Vec& x, const Vec& upstream) const {
  Vec g;
  Backward(Mat(x), Mat(upstream), &g, nullptr);
  return g;
}

Vec Mlp::GradInput(const Vec& x, const Vec& upstream) const {
  Mat g;
  Backward(Mat(x), Mat(upstream), nullptr, &g);
  return g.col(0);
}

void AdamStep(AdamState& s, Vec& params, const Vec& grads) {
  CheckDim("gradient", grads.size(), params.size());
  CheckDim("Adam first moment", s.m.size(), params.size());
  CheckDim("Adam second moment", s.v.size(), params.size());
  ++s.step_count;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grads;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step_count));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step_count));
  params.array() -= s.learning_rate * (s.m.array() / c1) /
                    ((s.v.array() / c2).sqrt() + s.epsilon);
}

double MeanSquaredError(const Mlp& model, const Mat& inputs,
                        const Mat& targets) {
  const Mat pred = model.Forward(inputs);
  CheckDim("target rows", targets.rows(), pred.rows());
  CheckDim("target cols", targets.cols(), pred.cols());
  return (pred - targets).squaredNorm() / static_cast<double>(pred.size());
}

double FitMse(Mlp& model, const Mat& inputs, const Mat& targets, int n_updates,
              int batch, AdamState& state, std::mt19937_64& rng) {
  const long n = inputs.cols();
  if (n < 1) ThrowInvalid("cannot fit on an empty data set");
  if (n_updates < 1) ThrowInvalid("n_updates must be >= 1");
  if (batch < 1) ThrowInvalid("batch must be >= 1");
  CheckDim("target count", targets.cols(), n);
  CheckDim("target rows", targets.rows(), model.output_dim());
  if (state.m.size() != model.param_count()) {
    state = AdamState(model.param_count(), state.learning_rate);
  }
  Vec grad;
  if (n <= batch) {
    double loss = 0.0;
    for (int it = 0; it < n_updates; ++it) {
      const Mat diff = model.Forward(inputs) - targets;
      loss = diff.squaredNorm() / static_cast<double>(diff.size());
      model.Backward(inputs, diff * (2.0 / static_cast<double>(diff.size())),
                     &grad, nullptr);
      AdamStep(state, model.params(), grad);
    }
    return loss;
  }

  std::vector<long> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long cursor = n;  // forces a shuffle on the first step
  const long steps_per_epoch = (n + batch - 1) / batch;
  double epoch_sum = 0.0;
  long epoch_steps = 0;
  double last_epoch_mean = 0.0;
  Mat xb, yb;
  for (int it = 0; it < n_updates; ++it) {
    if (cursor >= n) {
      std::shuffle(perm.begin(), perm.end(), rng);
      cursor = 0;
    }
    const long m = std::min<long>(batch, n - cursor);
    xb.resize(inputs.rows(), m);
    yb.resize(targets.rows(), m);
    for (long j = 0; j < m; ++j) {
      xb.col(j) = inputs.col(perm[cursor + j]);
      yb.col(j) = targets.col(perm[cursor + j]);
    }
    cursor += m;
    const Mat diff = model.Forward(xb) - yb;
    const double loss = diff.squaredNorm() / static_cast<double>(diff.size());
    model.Backward(xb, diff * (2.0 / static_cast<double>(diff.size())), &grad,
                   nullptr);
    AdamStep(state, model.params(), grad);
    epoch_sum += loss;
    ++epoch_steps;
    if (epoch_steps == steps_per_epoch || it + 1 == n_updates) {
      last_epoch_mean = epoch_sum / static_cast<double>(epoch_steps);
      epoch_sum = 0.0;
      epoch_steps = 0;
    }
  }
  return last_epoch_mean;
}

Mat FeatureMatrix(const Dataset& dataset) {
  if (dataset.instances.empty()) ThrowData("dataset is empty");
  Mat y(dataset.instances.front().y.size(), dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    y.col(i) = dataset.instances[i].y;
  }
  return y;
}

Mat CostMatrix(const Dataset& dataset) {
  if (dataset.instances.empty()) ThrowData("dataset is empty");
  Mat z(SurrogateDim(dataset.instances.front().z), dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    z.col(i) = CostVector(dataset.instances[i].z);
  }
  return z;
}

double TwoStageFit(Mlp& target, const Dataset& dataset, int n_updates,
                   int batch, AdamState& state, std::mt19937_64& rng) {
  return FitMse(target, FeatureMatrix(dataset), CostMatrix(dataset), n_updates,
                batch, state, rng);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[4] = {'L', 'M', 'L', 'P'};
constexpr std::uint32_t kBinaryVersion = 1;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::string& data, const std::string& path)
      : data_(data), path_(path) {}
  std::uint64_t Get(int bytes) {
    if (pos_ + bytes > data_.size()) ThrowIo("truncated model file '" + path_ + "'");
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += bytes;
    return v;
  }
  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  const std::string& data_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

}  // namespace

void SaveMlpBinary(const Mlp& model, const std::string& path) {
  std::string out(kMagic, 4);
  PutU32(out, kBinaryVersion);
  PutU32(out, static_cast<std::uint32_t>(model.layer_sizes().size()));
  for (int s : model.layer_sizes()) PutU32(out, static_cast<std::uint32_t>(s));
  PutU64(out, static_cast<std::uint64_t>(model.param_count()));
  for (long i = 0; i < model.param_count(); ++i) {
    PutU64(out, std::bit_cast<std::uint64_t>(model.params()[i]));
  }
  WriteFileAtomic(path, out);
}

Mlp LoadMlpBinary(const std::string& path) {
  const std::string data = ReadFile(path);
  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0) {
    ThrowIo("'" + path + "' is not a model checkpoint");
  }
  Reader r(data, path);
  r.Get(4);
  if (r.Get(4) != kBinaryVersion) ThrowIo("unsupported checkpoint version");
  const std::uint64_t n_sizes = r.Get(4);
  if (n_sizes < 2 || n_sizes > 64) ThrowIo("corrupt checkpoint layer table");
  std::vector<int> sizes(n_sizes);
  for (auto& s : sizes) s = static_cast<int>(r.Get(4));
  Mlp model(sizes);
  if (r.Get(8) != static_cast<std::uint64_t>(model.param_count())) {
    ThrowIo("checkpoint parameter count does not match its layers");
  }
  for (long i = 0; i < model.param_count(); ++i) {
    model.params()[i] = std::bit_cast<double>(r.Get(8));
  }
  if (!r.AtEnd()) ThrowIo("trailing bytes in checkpoint '" + path + "'");
  return model;
}

std::string MlpToJson(const Mlp& model) {
  nlohmann::json j;
  j["format"] = "lancer-mlp";
  j["version"] = 1;
  j["layer_sizes"] = model.layer_sizes();
  j["activation"] = "tanh";
  j["params"] = std::vector<double>(model.params().data(),
                                    model.params().data() + model.param_count());
  return j.dump();
}

Mlp MlpFromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    ThrowIo(std::string("model JSON does not parse: ") + e.what());
  }
  try {
    if (j.at("format") != "lancer-mlp") ThrowIo("not a model JSON document");
    Mlp model(j.at("layer_sizes").get<std::vector<int>>());
    const auto p = j.at("params").get<std::vector<double>>();
    CheckDim("model JSON params", static_cast<long>(p.size()), model.param_count());
    model.set_params(Eigen::Map<const Vec>(p.data(), static_cast<long>(p.size())));
    return model;
  } catch (const nlohmann::json::exception& e) {
    ThrowIo(std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace lancer
