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
#include <random>

#include "common/oracles.hpp"
#include "core/errors.hpp"
#include "core/problems.hpp"

namespace lancer {
namespace {

using testing::MinlpObjectiveExpanded;
using testing::NormalCdfByQuadrature;

// The right-then-down path of an n x n grid.
Vec BorderPath(int n) {
  Vec x = Vec::Zero(GridEdgeCount(n));
  for (int c = 0; c + 1 < n; ++c) x[HorizontalEdge(n, 0, c)] = 1.0;
  for (int r = 0; r + 1 < n; ++r) x[VerticalEdge(n, r, n - 1)] = 1.0;
  return x;
}

Solution Sol(const Vec& x) {
  Solution s;
  s.x = x;
  return s;
}

PortfolioMinlpDesc RandomMinlp(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01;
  PortfolioMinlpDesc z;
  z.mu = Vec::NullaryExpr(k, [&] { return 0.1 * n01(rng); });
  const Mat a = Mat::NullaryExpr(k, k, [&] { return n01(rng); });
  z.cov = a * a.transpose() / k;
  z.coskew = Mat::Zero(k, k * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int l = j; l < k; ++l) {
        const double v = 0.05 * n01(rng);
        z.coskew(i, j * k + l) = v;
        z.coskew(i, l * k + j) = v;
      }
    }
  }
  z.x0 = Vec::NullaryExpr(k, [&] { return u01(rng); });
  z.x0 /= z.x0.sum();
  z.max_assets = k;
  return z;
}

TEST_SUITE("problems") {
  TEST_CASE("gaussian cdf matches quadrature and symmetry") {
    CHECK(GaussianCdf(0.0) == 0.5);
    CHECK(std::abs(GaussianCdf(1.96) - NormalCdfByQuadrature(1.96)) <= 1e-9);
    CHECK(std::abs(GaussianCdf(1.96) - 0.9750021) <= 1e-7);
    double prev = 0.0;
    for (double t = -8.0; t <= 8.0; t += 0.37) {
      CHECK(std::abs(GaussianCdf(t) - NormalCdfByQuadrature(t)) <= 1e-9);
      CHECK(std::abs(GaussianCdf(t) + GaussianCdf(-t) - 1.0) <= 1e-12);
      CHECK(GaussianCdf(t) >= prev);
      prev = GaussianCdf(t);
    }
  }

  TEST_CASE("grid edges follow the documented order") {
    CHECK(GridEdgeCount(5) == 40);
    const auto edges = GridEdges(3);
    REQUIRE(edges.size() == 12u);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (c + 1 < 3) {
          const auto& e = edges[HorizontalEdge(3, r, c)];
          CHECK(e.from == r * 3 + c);
          CHECK(e.to == r * 3 + c + 1);
        }
        if (r + 1 < 3) {
          const auto& e = edges[VerticalEdge(3, r, c)];
          CHECK(e.from == r * 3 + c);
          CHECK(e.to == (r + 1) * 3 + c);
        }
      }
    }
    CHECK(GridSizeFromEdgeCount(40) == 5);
    CHECK_THROWS_AS(GridSizeFromEdgeCount(41), Error);
  }

  TEST_CASE("stochastic path at its deadline scores one half") {
    StochasticSpDesc z{3, Vec::Constant(12, 0.25), Vec::Constant(12, 0.04), 1.0};
    // Four edges of mean 0.25 each: the mean path length equals W.
    CHECK(EvalObjective(Sol(BorderPath(3)), z) == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("stochastic objective increases with the deadline") {
    StochasticSpDesc z{3, Vec::Constant(12, 0.15), Vec::Constant(12, 0.02), 0.3};
    double prev = -1.0;
    for (double w = 0.3; w < 1.0; w += 0.05) {
      z.deadline = w;
      const double f = EvalObjective(Sol(BorderPath(3)), z);
      CHECK(f > prev);
      prev = f;
    }
  }

  TEST_CASE("zero-variance path falls back to the indicator") {
    StochasticSpDesc z{2, Vec::Constant(4, 0.5), Vec::Zero(4), 1.0};
    CHECK(EvalObjective(Sol(BorderPath(2)), z) == 1.0);
    z.deadline = 0.9;
    CHECK(EvalObjective(Sol(BorderPath(2)), z) == 0.0);
  }

  TEST_CASE("QP objective with zero covariance is the negated return") {
    PortfolioQpDesc z{Vec::LinSpaced(4, 0.3, 0.6), Mat::Zero(4, 4), 0.1};
    CHECK(EvalObjective(Sol(Vec::Unit(4, 0)), z) == doctest::Approx(-0.3));
    CHECK(FamilySense(FamilyTag::kPortfolioQp) == Sense::kMinimize);
  }

  TEST_CASE("MINLP objective matches the term-by-term expansion") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const PortfolioMinlpDesc z = RandomMinlp(6, seed);
      Vec x(6);
      x << 0.15, 0.2, 0.15, 0.2, 0.1, 0.2;
      const double got = EvalObjective(Sol(x), z);
      CHECK(std::abs(got - MinlpObjectiveExpanded(z, x)) <= 1e-12);
    }
  }

  TEST_CASE("MINLP with beta and gamma zero equals the QP objective") {
    PortfolioMinlpDesc z = RandomMinlp(6, 9);
    z.beta = 0.0;
    z.gamma = 0.0;
    const PortfolioQpDesc q{z.mu, z.cov, z.alpha};
    Vec x(6);
    x << 0.2, 0.2, 0.2, 0.2, 0.0, 0.2;
    CHECK(EvalObjective(Sol(x), z) == doctest::Approx(EvalObjective(Sol(x), q)).epsilon(1e-14));
  }

  TEST_CASE("MINLP feasibility") {
    PortfolioMinlpDesc z = RandomMinlp(8, 4);
    z.max_assets = 8;
    Vec five = Vec::Zero(8);
    five.head(5) << 0.2, 0.2, 0.2, 0.2, 0.2;
    CHECK(IsFeasible(Sol(five), z));
    Vec four = Vec::Zero(8);
    four.head(4) << 0.2, 0.2, 0.2, 0.2;  // sums to 0.8
    CHECK_FALSE(IsFeasible(Sol(four), z));
    Vec too_big = Vec::Zero(8);
    too_big.head(4) << 0.25, 0.25, 0.25, 0.25;
    CHECK_FALSE(IsFeasible(Sol(too_big), z));
    Vec too_small = five;
    too_small[0] = 0.005;
    too_small[5] = 0.195;
    CHECK_FALSE(IsFeasible(Sol(too_small), z));
  }

  TEST_CASE("knapsack over capacity in one dimension is infeasible") {
    KnapsackDesc z;
    z.values = Vec::Ones(4);
    z.weights = Mat::Constant(3, 4, 0.2);
    z.weights(2, 1) = 0.9;
    z.capacities = Vec::Constant(3, 1.2);
    CHECK_FALSE(IsFeasible(Sol(Vec::Ones(4)), z));  // dimension 3 carries 1.5
    CHECK_THROWS_AS(EvalObjective(Sol(Vec::Ones(4)), z), Error);
    Vec pick = Vec::Ones(4);
    pick[1] = 0.0;
    CHECK(IsFeasible(Sol(pick), z));
  }

  TEST_CASE("knapsack objective is invariant under item permutation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    KnapsackDesc z;
    z.values = Vec::NullaryExpr(6, [&] { return 5 * u(rng); });
    z.weights = Mat::NullaryExpr(2, 6, [&] { return u(rng); });
    z.capacities = Vec::Constant(2, 10.0);
    Vec x(6);
    x << 1, 0, 1, 1, 0, 1;
    Eigen::PermutationMatrix<Eigen::Dynamic> p(6);
    p.indices() << 3, 5, 0, 1, 4, 2;
    KnapsackDesc zp = z;
    zp.values = p * z.values;
    zp.weights = z.weights * p.transpose();
    CHECK(EvalObjective(Sol(p * x), zp) == doctest::Approx(EvalObjective(Sol(x), z)));
  }

  TEST_CASE("dimension mismatches and bad paths are rejected") {
    ShortestPathDesc z{3, Vec::Ones(12)};
    CHECK_THROWS_AS(EvalObjective(Sol(Vec::Ones(5)), z), Error);
    Vec broken = BorderPath(3);
    broken[HorizontalEdge(3, 0, 0)] = 0.0;
    CHECK_FALSE(IsFeasible(Sol(broken), z));
    CHECK_THROWS_AS(EvalObjective(Sol(broken), z), Error);
  }

  TEST_CASE("family names round-trip") {
    for (FamilyTag f : {FamilyTag::kShortestPath, FamilyTag::kMultiKnapsack,
                        FamilyTag::kStochasticShortestPath, FamilyTag::kPortfolioQp,
                        FamilyTag::kPortfolioMinlp}) {
      CHECK(ParseFamily(FamilyName(f)) == f);
    }
    CHECK_THROWS_AS(ParseFamily("tsp"), Error);
    CHECK(ToInternal(FamilyTag::kMultiKnapsack, 3.0) == -3.0);
    CHECK(ToInternal(FamilyTag::kShortestPath, 3.0) == 3.0);
  }
}

}  // namespace
}  // namespace lancer
