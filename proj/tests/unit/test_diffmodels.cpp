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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "common/oracles.hpp"
#include "core/diffmodels.hpp"
#include "core/errors.hpp"
#include "core/generators.hpp"

namespace lancer {
namespace {

using testing::CentralDifference;
using testing::RelativeError;

Vec Normal(long n, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  return Vec::NullaryExpr(n, [&] { return n01(rng); });
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lancer_unit_" + name)).string();
}

TEST_SUITE("diffmodels") {
  TEST_CASE("zero model outputs zeros") {
    const Mlp m({4, 7, 3});
    CHECK(m.param_count() == 4 * 7 + 7 + 7 * 3 + 3);
    CHECK(m.Forward(Vec(Vec::Ones(4))).norm() == 0.0);
  }

  TEST_CASE("linear model is W x + b") {
    std::mt19937_64 rng(1);
    Mlp m({3, 2});
    m.set_params(Normal(m.param_count(), rng));
    Eigen::Map<const RowMat> w(m.params().data(), 2, 3);
    const Vec b = m.params().tail(2);
    const Vec x = Normal(3, rng);
    CHECK((m.Forward(x) - (w * x + b)).norm() <= 1e-15);
    const Vec up = Normal(2, rng);
    const Vec gp = m.GradParams(x, up);
    const RowMat outer = up * x.transpose();
    CHECK((gp.head(6) - Eigen::Map<const Vec>(outer.data(), 6)).norm() <= 1e-15);
    CHECK((gp.tail(2) - up).norm() <= 1e-15);
    CHECK((m.GradInput(x, up) - w.transpose() * up).norm() <= 1e-15);
    CHECK(m.GradParams(x, Vec::Zero(2)).norm() == 0.0);
  }

  TEST_CASE("forward matches an extended-precision recomputation") {
    std::mt19937_64 rng(2);
    const std::vector<int> sizes = {6, 9, 5, 3};
    const Mlp m = Mlp::Glorot(sizes, rng);
    Mlp biased = m;
    biased.params() += 0.1 * Normal(m.param_count(), rng);
    const Vec x = Normal(6, rng);
    const Vec got = biased.Forward(x);
    const auto want = testing::MlpForwardExtended(sizes, biased.params(), x);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - static_cast<double>(want[i])) <= 1e-14);
  }

  TEST_CASE("gradients agree with finite differences") {
    std::mt19937_64 rng(3);
    for (const std::vector<int>& sizes :
         {std::vector<int>{4, 3}, std::vector<int>{4, 8, 3}, std::vector<int>{5, 6, 7, 2}}) {
      Mlp m = Mlp::Glorot(sizes, rng);
      m.params() += 0.1 * Normal(m.param_count(), rng);
      const Vec x = Normal(sizes.front(), rng);
      const Vec up = Normal(sizes.back(), rng);
      const auto by_params = [&](const Vec& p) {
        Mlp q = m;
        q.set_params(p);
        return up.dot(q.Forward(x));
      };
      const auto by_input = [&](const Vec& xi) { return up.dot(m.Forward(xi)); };
      CHECK(RelativeError(m.GradParams(x, up), CentralDifference(by_params, m.params())) <= 1e-5);
      CHECK(RelativeError(m.GradInput(x, up), CentralDifference(by_input, x)) <= 1e-5);
    }
  }

  TEST_CASE("batched backward sums per-sample gradients") {
    std::mt19937_64 rng(4);
    const Mlp m = Mlp::Glorot({3, 5, 2}, rng);
    const Mat x = Mat::NullaryExpr(3, 4, [&] { return Normal(1, rng)[0]; });
    const Mat up = Mat::NullaryExpr(2, 4, [&] { return Normal(1, rng)[0]; });
    Vec gp;
    Mat gi;
    m.Backward(x, up, &gp, &gi);
    Vec sum = Vec::Zero(m.param_count());
    for (int j = 0; j < 4; ++j) {
      sum += m.GradParams(x.col(j), up.col(j));
      CHECK((gi.col(j) - m.GradInput(x.col(j), up.col(j))).norm() <= 1e-14);
    }
    CHECK((gp - sum).norm() <= 1e-13);
  }

  TEST_CASE("chain rule through two networks") {
    std::mt19937_64 rng(5);
    const Mlp target = Mlp::Glorot({3, 4}, rng);
    const Mlp outer = Mlp::Glorot({4, 6, 1}, rng);
    const Vec y = Normal(3, rng);
    const Vec dm_dc = outer.GradInput(target.Forward(y), Vec::Ones(1));
    const Vec assembled = target.GradParams(y, dm_dc);
    const auto end_to_end = [&](const Vec& p) {
      Mlp t = target;
      t.set_params(p);
      return outer.Forward(t.Forward(y))[0];
    };
    CHECK(RelativeError(assembled, CentralDifference(end_to_end, target.params())) <= 1e-5);
  }

  TEST_CASE("Adam scalar step by hand") {
    AdamState s(1, 0.01);
    Vec p = Vec::Constant(1, 2.0);
    const double g = 0.3;
    AdamStep(s, p, Vec::Constant(1, g));
    // m = 0.1 g, v = 0.001 g^2; corrected m_hat = g, v_hat = g^2.
    const double m_hat = (0.1 * g) / (1 - 0.9);
    const double v_hat = (0.001 * g * g) / (1 - 0.999);
    CHECK(p[0] == doctest::Approx(2.0 - 0.01 * m_hat / (std::sqrt(v_hat) + 1e-8)).epsilon(1e-15));
    CHECK(s.step_count == 1);
    AdamStep(s, p, Vec::Constant(1, -0.1));
    const double m2 = 0.9 * 0.1 * g + 0.1 * -0.1;
    const double v2 = 0.999 * 0.001 * g * g + 0.001 * 0.01;
    const double step2 = 0.01 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
    CHECK(p[0] == doctest::Approx(2.0 - 0.01 * m_hat / (std::sqrt(v_hat) + 1e-8) - step2)
                      .epsilon(1e-14));
  }

  TEST_CASE("Adam with zero gradient and degenerate betas") {
    AdamState s(3, 0.1);
    Vec p = Vec::Ones(3);
    AdamStep(s, p, Vec::Zero(3));
    CHECK(p == Vec::Ones(3));
    CHECK(s.step_count == 1);
    AdamState sign(3, 0.1);
    sign.beta1 = 0.0;
    sign.beta2 = 0.0;
    Vec q = Vec::Zero(3);
    AdamStep(sign, q, (Vec(3) << 2.0, -0.5, 1e-3).finished());
    CHECK(q[0] == doctest::Approx(-0.1));
    CHECK(q[1] == doctest::Approx(0.1));
    CHECK(q[2] == doctest::Approx(-0.1).epsilon(1e-4));
    Vec wrong = Vec::Zero(2);
    CHECK_THROWS_AS(AdamStep(s, wrong, Vec::Zero(2)), Error);
  }

  TEST_CASE("fitting a realizable target mostly decreases the loss") {
    int decreasing = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::mt19937_64 rng(seed);
      const Mlp teacher = Mlp::Glorot({3, 8, 1}, rng);
      Mlp student = Mlp::Glorot({3, 8, 1}, rng);
      const Mat x = Mat::NullaryExpr(3, 64, [&] { return Normal(1, rng)[0]; });
      const Mat t = teacher.Forward(x);
      AdamState adam(student.param_count(), 1e-3);
      double prev = MeanSquaredError(student, x, t);
      for (int step = 0; step < 40; ++step) {
        FitMse(student, x, t, 1, 64, adam, rng);
        const double now = MeanSquaredError(student, x, t);
        decreasing += now < prev;
        ++total;
        prev = now;
      }
    }
    CHECK(decreasing >= 0.9 * total);
  }

  TEST_CASE("constant targets converge to their value") {
    std::mt19937_64 rng(6);
    Mlp m = Mlp::Glorot({2, 1}, rng);
    const Mat x = Mat::NullaryExpr(2, 50, [&] { return Normal(1, rng)[0]; });
    const Mat t = Mat::Constant(1, 50, 1.7);
    AdamState adam(m.param_count(), 0.05);
    FitMse(m, x, t, 3000, 50, adam, rng);
    CHECK(MeanSquaredError(m, x, t) <= 1e-12);
    CHECK(std::abs(m.Forward(Vec(Vec::Zero(2)))[0] - 1.7) <= 1e-6);
    CHECK_THROWS_AS(FitMse(m, x, t, 0, 50, adam, rng), Error);
    CHECK_THROWS_AS(FitMse(m, Mat(2, 0), Mat(1, 0), 1, 50, adam, rng), Error);
  }

  TEST_CASE("minibatch fitting runs exactly the requested steps") {
    std::mt19937_64 rng(7);
    Mlp m = Mlp::Glorot({2, 1}, rng);
    const Mat x = Mat::NullaryExpr(2, 30, [&] { return Normal(1, rng)[0]; });
    AdamState adam(m.param_count(), 1e-3);
    FitMse(m, x, Mat::Zero(1, 30), 17, 8, adam, rng);
    CHECK(adam.step_count == 17);
  }

  TEST_CASE("fits are deterministic for a seed") {
    const auto run = [] {
      std::mt19937_64 rng(8);
      Mlp m = Mlp::Glorot({3, 6, 2}, rng);
      const Mat x = Mat::NullaryExpr(3, 40, [&] { return Normal(1, rng)[0]; });
      AdamState adam(m.param_count(), 1e-2);
      FitMse(m, x, x.topRows(2), 25, 16, adam, rng);
      return m.params();
    };
    CHECK(run() == run());
  }

  TEST_CASE("two-stage fit recovers an identity map") {
    ShortestPathGenParams p;
    p.grid_n = 2;
    p.feat_dim = 4;
    p.n_instances = 200;
    Dataset d = GenerateShortestPathDataset(p, 9);
    for (Instance& inst : d.instances) inst.y = std::get<ShortestPathDesc>(inst.z).costs;
    Dataset train = d, held = d;
    train.instances.resize(150);
    held.instances.erase(held.instances.begin(), held.instances.begin() + 150);
    std::mt19937_64 rng(9);
    Mlp target = Mlp::Glorot({4, 4}, rng);
    AdamState adam(target.param_count(), 1e-2);
    TwoStageFit(target, train, 4000, 1000, adam, rng);
    CHECK(MeanSquaredError(target, FeatureMatrix(held), CostMatrix(held)) <= 1e-4);
  }

  TEST_CASE("Glorot init keeps the output scale") {
    std::mt19937_64 rng(10);
    const Mlp m = Mlp::Glorot({50, 50, 50}, rng);
    const Mat x = Mat::NullaryExpr(50, 400, [&] { return Normal(1, rng)[0]; });
    const Mat y = m.Forward(x);
    const double in_var = x.squaredNorm() / x.size();
    const double out_var = y.squaredNorm() / y.size();
    CHECK(out_var >= in_var / 4);
    CHECK(out_var <= in_var * 4);
    const Vec w = m.params().segment(m.WeightOffset(0), 50 * 50);
    const double sd = std::sqrt(w.squaredNorm() / w.size());
    CHECK(sd == doctest::Approx(std::sqrt(2.0 / 100.0)).epsilon(0.05));
  }

  TEST_CASE("checkpoints round-trip") {
    std::mt19937_64 rng(11);
    Mlp m = Mlp::Glorot({3, 5, 2}, rng);
    m.params() += Normal(m.param_count(), rng) * 1e-3;
    const std::string path = TempPath("mlp.lmlp");
    SaveMlpBinary(m, path);
    const Mlp b = LoadMlpBinary(path);
    CHECK(b.layer_sizes() == m.layer_sizes());
    CHECK(b.params() == m.params());
    const Mlp j = MlpFromJson(MlpToJson(m));
    CHECK(j.params() == m.params());
    std::remove(path.c_str());
    CHECK_THROWS_AS(LoadMlpBinary(path), Error);
    CHECK_THROWS_AS(MlpFromJson("{\"layer_sizes\": [2, 1], \"params\": [1]}"), Error);
  }

  TEST_CASE("dimension mismatches throw") {
    const Mlp m({3, 2});
    CHECK_THROWS_AS(m.Forward(Vec(Vec::Zero(4))), Error);
    CHECK_THROWS_AS(m.GradParams(Vec::Zero(3), Vec::Zero(3)), Error);
  }
}

}  // namespace
}  // namespace lancer
