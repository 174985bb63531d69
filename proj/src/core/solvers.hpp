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

#ifndef LANCER_CORE_SOLVERS_HPP_
#define LANCER_CORE_SOLVERS_HPP_

#include <chrono>
#include <mutex>
#include <vector>

#include "core/errors.hpp"
#include "core/problems.hpp"
#include "core/types.hpp"

namespace lancer {

// Counts solver invocations. Thread-safe; shared by all workers of a run.
class SolverStats {
 public:
  SolverStats() = default;
  SolverStats(const SolverStats& other);
  SolverStats& operator=(const SolverStats& other);

  void Record(std::chrono::nanoseconds elapsed);
  void Merge(const SolverStats& other);
  void Reset();

  long call_count() const;
  double wall_time_total() const;  // seconds
  std::vector<double> per_call_times() const;

 private:
  mutable std::mutex mu_;
  long call_count_ = 0;
  double wall_time_total_ = 0.0;
  std::vector<double> per_call_times_;
};

// Minimum-cost source-to-sink path on the directed grid; costs may be
// negative. On ties the lowest-index incoming edge wins at every node.
Solution SolveDagShortestPath(int grid_n, const Vec& c);

// Diagnostics from the knapsack branch and bound.
struct KnapsackCertificate {
  long nodes = 0;
  // Largest relaxation bound among pruned nodes; never exceeds the incumbent
  // value by more than round-off when the search is exact.
  double max_pruned_bound = -1e300;
};

// max values^T v  s.t.  weights v <= capacities, v binary.
Solution SolveMultiKnapsack(const Vec& values, const Mat& weights,
                            const Vec& capacities,
                            KnapsackCertificate* cert = nullptr);

struct QpOptions {
  double tol = 1e-8;
  int max_iter = 50000;
};

// Raised when the QP iteration budget runs out; carries the best iterate.
class QpNotConverged : public Error {
 public:
  QpNotConverged(const std::string& what, Solution best, double residual)
      : Error(ErrorKind::kNumerical, what),
        best_(std::move(best)),
        residual_(residual) {}
  const Solution& best() const { return best_; }
  double residual() const { return residual_; }

 private:
  Solution best_;
  double residual_;
};

// Projection onto the probability simplex.
Vec ProjectSimplex(const Vec& v);

// ||x - P(x - grad f(x))||_inf for f = alpha x'Gx - mu'x over the simplex.
double QpKktResidual(const Vec& mu_hat, const Mat& cov, double alpha,
                     const Vec& x);

// min alpha x'Gx - mu_hat'x over the simplex.
Solution SolvePortfolioQp(const Vec& mu_hat, const Mat& cov, double alpha,
                          const QpOptions& options = {});

// min c'x over the cardinality-constrained allocation set of `z`.
Solution SolvePortfolioMilp(const Vec& c, const PortfolioMinlpDesc& z);

// g(c): the exact surrogate solve for the family of `z`. Records one call in
// `stats` when given.
Solution SolveFamily(const Vec& c, const ProblemDescriptor& z,
                     SolverStats* stats = nullptr);

// Exhaustive search over the feasible set for the same surrogate problem as
// SolveFamily. Refuses instances with more than 2^20 candidates.
Solution BruteForceOracle(const ProblemDescriptor& z, const Vec& c);

// Optimal decision under the true objective, used as f* by the metrics.
// Stochastic shortest path is solved by path enumeration; the cubic
// portfolio problem has no exact oracle and throws.
Solution TrueOptimum(const ProblemDescriptor& z);

// Shortest path under w = mu + gamma * sigma.
Solution StochasticSpHeuristic(const StochasticSpDesc& z, double gamma);

}  // namespace lancer

#endif  // LANCER_CORE_SOLVERS_HPP_
