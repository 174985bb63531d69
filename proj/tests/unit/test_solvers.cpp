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

#include <random>
#include <variant>

#include "common/oracles.hpp"
#include "core/errors.hpp"
#include "core/generators.hpp"
#include "core/solvers.hpp"

namespace lancer {
namespace {

using testing::CardinalityLpEnumeration;
using testing::KnapsackEnumeration;
using testing::MinPathCost;

Vec Uniform(long n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vec::NullaryExpr(n, [&] { return u(rng); });
}

PortfolioMinlpDesc MilpDesc(int k) {
  PortfolioMinlpDesc z;
  z.mu = Vec::Zero(k);
  z.cov = Mat::Identity(k, k);
  z.coskew = Mat::Zero(k, k * k);
  z.x0 = Vec::Constant(k, 1.0 / k);
  z.max_assets = std::min(k, 10);
  return z;
}

TEST_SUITE("solvers") {
  TEST_CASE("shortest path on small grids") {
    CHECK(SolveDagShortestPath(2, Vec::Ones(4)).objective_surrogate == 2.0);
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      const Vec c = Uniform(40, -1.0, 1.0, rng);
      const Solution s = SolveDagShortestPath(5, c);
      CHECK(s.objective_surrogate == doctest::Approx(MinPathCost(5, c)).epsilon(1e-14));
      CHECK(c.dot(s.x) == doctest::Approx(s.objective_surrogate).epsilon(1e-14));
      CHECK(IsFeasible(s, ShortestPathDesc{5, c}));
    }
    CHECK_THROWS_AS(SolveDagShortestPath(3, Vec::Ones(5)), Error);
  }

  TEST_CASE("a dominant negative edge is always used") {
    Vec c = Vec::Ones(40);
    const int e = testing::EdgeBetween(5, 2 * 5 + 2, 2 * 5 + 3);
    c[e] = -10.0;
    CHECK(SolveDagShortestPath(5, c).x[e] == 1.0);
  }

  TEST_CASE("shortest path agrees with brute force on 3x3 grids") {
    std::mt19937_64 rng(2);
    for (int seed = 0; seed < 200; ++seed) {
      const Vec c = Uniform(12, -2.0, 2.0, rng);
      const ShortestPathDesc z{3, c};
      const Solution a = SolveFamily(c, z);
      const Solution b = BruteForceOracle(z, c);
      CHECK(a.objective_surrogate == doctest::Approx(b.objective_surrogate).epsilon(1e-14));
    }
  }

  TEST_CASE("knapsack trivial cases") {
    const Mat w = Mat::Constant(2, 5, 0.5);
    const Solution none = SolveMultiKnapsack(Vec::Constant(5, -1.0), w, Vec::Ones(2));
    CHECK(none.x.sum() == 0.0);
    CHECK(none.objective_surrogate == 0.0);
    const Solution all = SolveMultiKnapsack(Vec::LinSpaced(5, 1, 5), w, Vec::Constant(2, 2.5));
    CHECK(all.x.sum() == 5.0);
    const Solution one = SolveMultiKnapsack(Vec::Constant(1, 2.0), Mat::Constant(1, 1, 0.3),
                                            Vec::Constant(1, 1.0));
    CHECK(one.x[0] == 1.0);
  }

  TEST_CASE("knapsack matches enumeration on random 12-item instances") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(seed);
      const Vec values = Uniform(12, -0.5, 5.0, rng);
      const Mat weights = Mat::NullaryExpr(3, 12, [&] {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      });
      const Vec caps = Uniform(3, 1.0, 4.0, rng);
      KnapsackCertificate cert;
      const Solution s = SolveMultiKnapsack(values, weights, caps, &cert);
      const double want = KnapsackEnumeration(values, weights, caps);
      CHECK(s.objective_surrogate == doctest::Approx(want).epsilon(1e-12));
      CHECK(cert.max_pruned_bound <= s.objective_surrogate + 1e-9);
      for (long i = 0; i < 12; ++i) {
        if (values[i] <= 0) CHECK(s.x[i] == 0.0);
      }
      const KnapsackDesc z{values, weights, caps};
      CHECK(IsFeasible(s, z));
      CHECK(BruteForceOracle(z, values).objective_surrogate ==
            doctest::Approx(want).epsilon(1e-12));
    }
  }

  TEST_CASE("simplex projection") {
    const Vec p = ProjectSimplex((Vec(3) << 0.2, 0.3, 0.5).finished());
    CHECK((p - (Vec(3) << 0.2, 0.3, 0.5).finished()).norm() <= 1e-15);
    const Vec q = ProjectSimplex((Vec(3) << 2.0, 0.0, -1.0).finished());
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(q.sum() == doctest::Approx(1.0));
  }

  TEST_CASE("QP closed forms") {
    const Solution lin = SolvePortfolioQp((Vec(4) << 0.1, 0.4, 0.4, 0.2).finished(),
                                          Mat::Zero(4, 4), 0.1);
    CHECK(lin.x[1] == doctest::Approx(1.0));  // ties go to the lower index
    // x1 = 1/2 + (mu1 - mu2) / (4 alpha): (0.75, 0.25) needs alpha = 1, while
    // alpha = 0.5 already pushes all mass onto the first asset.
    const Vec mu10 = (Vec(2) << 1.0, 0.0).finished();
    const Solution two = SolvePortfolioQp(mu10, Mat::Identity(2, 2), 1.0);
    CHECK(two.x[0] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(two.x[1] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(SolvePortfolioQp(mu10, Mat::Identity(2, 2), 0.5).x[0] == doctest::Approx(1.0));
    const Vec mu = (Vec(2) << 0.3, 0.1).finished();
    const Vec want = testing::TwoAssetIdentityQp(mu, 0.1);
    CHECK((SolvePortfolioQp(mu, Mat::Identity(2, 2), 0.1).x - want).norm() <= 1e-9);
  }

  TEST_CASE("QP residual and errors") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 30; ++trial) {
      const Mat a = Mat::NullaryExpr(8, 8, [&] { return n01(rng); });
      const Mat g = a * a.transpose() / 8.0;
      const Vec mu = Vec::NullaryExpr(8, [&] { return n01(rng); });
      const Solution s = SolvePortfolioQp(mu, g, 0.5);
      CHECK(QpKktResidual(mu, g, 0.5, s.x) <= 1e-8);
      CHECK(IsFeasible(s, PortfolioQpDesc{mu, g, 0.5}));
    }
    Mat bad = Mat::Identity(3, 3);
    bad(2, 2) = -1.0;
    CHECK_THROWS_AS(SolvePortfolioQp(Vec::Zero(3), bad, 0.1), Error);
    const Mat a = Mat::NullaryExpr(30, 30, [&] { return n01(rng); });
    const Vec mu = Vec::NullaryExpr(30, [&] { return n01(rng); });
    QpOptions tight;
    tight.max_iter = 1;
    tight.tol = 1e-15;
    bool raised = false;
    try {
      SolvePortfolioQp(mu, a * a.transpose(), 1.0, tight);
    } catch (const QpNotConverged& e) {
      raised = true;
      CHECK(e.kind() == ErrorKind::kNumerical);
      CHECK(e.best().x.size() == 30);
      CHECK(e.residual() > 0.0);
    }
    CHECK(raised);
  }

  TEST_CASE("cardinality MILP") {
    const PortfolioMinlpDesc z = MilpDesc(6);
    std::mt19937_64 rng(5);
    const Vec c = Uniform(6, -1.0, 1.0, rng);
    const Solution s = SolvePortfolioMilp(c, z);
    CHECK(s.v.sum() >= 5);  // 1 <= s * 0.2
    CHECK(IsFeasible(s, z));
    // Equal costs: every support is optimal; the smallest one comes first.
    const Solution tie = SolvePortfolioMilp(Vec::Ones(6), z);
    CHECK(tie.objective_surrogate == doctest::Approx(1.0));
    CHECK(tie.v.head(5).sum() == 5);
    CHECK(tie.v[5] == 0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 r(seed);
      const PortfolioMinlpDesc d = MilpDesc(10);
      const Vec cc = Uniform(10, -1.0, 1.0, r);
      const double want = CardinalityLpEnumeration(cc, d.f_min, d.f_max, d.min_assets,
                                                   d.max_assets);
      CHECK(SolvePortfolioMilp(cc, d).objective_surrogate == doctest::Approx(want).epsilon(1e-12));
    }
    PortfolioMinlpDesc impossible = MilpDesc(6);
    impossible.max_assets = 4;  // 4 * 0.2 < 1
    CHECK_THROWS_AS(SolvePortfolioMilp(c, impossible), Error);
  }

  TEST_CASE("positive scaling keeps the decision") {
    std::mt19937_64 rng(6);
    const Instance ssp = GenerateStochasticSpInstance(4, DeadlineMode::kNormal, 1);
    const KnapsackDesc ks{Uniform(10, 0, 5, rng), Mat::NullaryExpr(2, 10, [&] {
                            return std::uniform_real_distribution<double>(0, 1)(rng);
                          }), Vec::Constant(2, 2.0)};
    const std::vector<ProblemDescriptor> zs = {ShortestPathDesc{4, Uniform(24, -1, 1, rng)},
                                               ssp.z, ks, MilpDesc(8)};
    for (const ProblemDescriptor& z : zs) {
      const Vec c = Uniform(SurrogateDim(z), -1.0, 1.0, rng);
      const Solution base = SolveFamily(c, z);
      for (double lambda : {1e-3, 0.5, 7.0, 1e4}) {
        CHECK((SolveFamily(lambda * c, z).x - base.x).norm() == 0.0);
      }
      CHECK(IsFeasible(base, z, 1e-9));
    }
  }

  TEST_CASE("dispatch uses the mean path for the stochastic family") {
    const Instance inst = GenerateStochasticSpInstance(5, DeadlineMode::kNormal, 9);
    const auto& z = std::get<StochasticSpDesc>(inst.z);
    const Solution s = SolveFamily(z.mean, inst.z);
    CHECK(z.mean.dot(s.x) == doctest::Approx(z.deadline).epsilon(1e-14));
    const PortfolioQpDesc q{(Vec(2) << 1.0, 0.0).finished(), Mat::Identity(2, 2), 1.0};
    CHECK(SolveFamily(q.mu, q).x[0] == doctest::Approx(0.75).epsilon(1e-9));
  }

  TEST_CASE("stats count family solves only") {
    SolverStats stats;
    const ShortestPathDesc z{3, Vec::Ones(12)};
    for (int i = 0; i < 7; ++i) {
      const long before = stats.call_count();
      SolveFamily(z.costs, z, &stats);
      CHECK(stats.call_count() == before + 1);
    }
    BruteForceOracle(z, z.costs);
    TrueOptimum(z);
    CHECK(stats.call_count() == 7);
    CHECK(stats.per_call_times().size() == 7u);
    CHECK(stats.wall_time_total() >= 0.0);
    SolverStats other;
    other.Merge(stats);
    other.Merge(stats);
    CHECK(other.call_count() == 14);
    other.Reset();
    CHECK(other.call_count() == 0);
  }

  TEST_CASE("oracle refuses large instances and MINLP truth") {
    CHECK_THROWS_AS(BruteForceOracle(ShortestPathDesc{15, Vec::Ones(420)}, Vec::Ones(420)),
                    Error);
    CHECK_THROWS_AS(TrueOptimum(MilpDesc(6)), Error);
  }

  TEST_CASE("stochastic heuristic weights the variance") {
    const Instance inst = GenerateStochasticSpInstance(5, DeadlineMode::kTight, 3);
    const auto& z = std::get<StochasticSpDesc>(inst.z);
    CHECK((StochasticSpHeuristic(z, 0.0).x - SolveDagShortestPath(5, z.mean).x).norm() == 0.0);
    const Vec w = z.mean + 2.0 * z.variance;
    CHECK((StochasticSpHeuristic(z, 2.0).x - SolveDagShortestPath(5, w).x).norm() == 0.0);
  }
}

}  // namespace
}  // namespace lancer
