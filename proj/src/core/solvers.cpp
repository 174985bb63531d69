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

#include "core/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace lancer {

// ---------------------------------------------------------------------------
// SolverStats

SolverStats::SolverStats(const SolverStats& other) {
  std::lock_guard<std::mutex> lock(other.mu_);
  call_count_ = other.call_count_;
  wall_time_total_ = other.wall_time_total_;
  per_call_times_ = other.per_call_times_;
}

SolverStats& SolverStats::operator=(const SolverStats& other) {
  if (this == &other) return *this;
  SolverStats copy(other);
  std::lock_guard<std::mutex> lock(mu_);
  call_count_ = copy.call_count_;
  wall_time_total_ = copy.wall_time_total_;
  per_call_times_ = std::move(copy.per_call_times_);
  return *this;
}

void SolverStats::Record(std::chrono::nanoseconds elapsed) {
  const double seconds = std::chrono::duration<double>(elapsed).count();
  std::lock_guard<std::mutex> lock(mu_);
  ++call_count_;
  wall_time_total_ += seconds;
  per_call_times_.push_back(seconds);
}

void SolverStats::Merge(const SolverStats& other) {
  SolverStats copy(other);
  std::lock_guard<std::mutex> lock(mu_);
  call_count_ += copy.call_count_;
  wall_time_total_ += copy.wall_time_total_;
  per_call_times_.insert(per_call_times_.end(), copy.per_call_times_.begin(),
                         copy.per_call_times_.end());
}

void SolverStats::Reset() {
  std::lock_guard<std::mutex> lock(mu_);
  call_count_ = 0;
  wall_time_total_ = 0.0;
  per_call_times_.clear();
}

long SolverStats::call_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return call_count_;
}

double SolverStats::wall_time_total() const {
  std::lock_guard<std::mutex> lock(mu_);
  return wall_time_total_;
}

std::vector<double> SolverStats::per_call_times() const {
  std::lock_guard<std::mutex> lock(mu_);
  return per_call_times_;
}

// ---------------------------------------------------------------------------
// Shortest path

Solution SolveDagShortestPath(int grid_n, const Vec& c) {
  if (grid_n < 2) ThrowInvalid("grid size must be at least 2");
  CheckDim("edge cost vector", c.size(), GridEdgeCount(grid_n));
  const int n = grid_n;
  std::vector<double> dist(n * n, 0.0);
  std::vector<int> via(n * n, -1);
  for (int r = 0; r < n; ++r) {
    for (int col = 0; col < n; ++col) {
      const int v = r * n + col;
      if (v == 0) continue;
      double best = std::numeric_limits<double>::infinity();
      // The edge from above always has the lower index, so it is tried first
      // and kept on ties.
      if (r > 0) {
        const int e = VerticalEdge(n, r - 1, col);
        best = dist[v - n] + c[e];
        via[v] = e;
      }
      if (col > 0) {
        const int e = HorizontalEdge(n, r, col - 1);
        const double cand = dist[v - 1] + c[e];
        if (cand < best) {
          best = cand;
          via[v] = e;
        }
      }
      dist[v] = best;
    }
  }
  Solution sol;
  sol.x = Vec::Zero(c.size());
  int v = n * n - 1;
  while (v != 0) {
    const int e = via[v];
    sol.x[e] = 1.0;
    v = (e % (2 * n - 1) < n - 1) ? v - 1 : v - n;
  }
  sol.objective_surrogate = c.dot(sol.x);
  return sol;
}

namespace {

double Binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr double kEnumerationLimit = 1048576.0;  // 2^20

// Calls `visit` with the edge indicator of every source-to-sink path, in
// lexicographic order of the move sequence (down before right).
void EnumeratePaths(int n, const std::function<void(const Vec&)>& visit) {
  if (Binomial(2 * n - 2, n - 1) > kEnumerationLimit) {
    ThrowInvalid("grid too large for exhaustive path enumeration");
  }
  Vec x = Vec::Zero(GridEdgeCount(n));
  std::function<void(int, int)> walk = [&](int r, int col) {
    if (r == n - 1 && col == n - 1) {
      visit(x);
      return;
    }
    if (r + 1 < n) {
      const int e = VerticalEdge(n, r, col);
      x[e] = 1.0;
      walk(r + 1, col);
      x[e] = 0.0;
    }
    if (col + 1 < n) {
      const int e = HorizontalEdge(n, r, col);
      x[e] = 1.0;
      walk(r, col + 1);
      x[e] = 0.0;
    }
  };
  walk(0, 0);
}

Solution BruteForcePath(int grid_n, const Vec& c) {
  CheckDim("edge cost vector", c.size(), GridEdgeCount(grid_n));
  Solution best;
  best.objective_surrogate = std::numeric_limits<double>::infinity();
  EnumeratePaths(grid_n, [&](const Vec& x) {
    const double v = c.dot(x);
    if (v < best.objective_surrogate) {
      best.x = x;
      best.objective_surrogate = v;
    }
  });
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Multidimensional knapsack

namespace {

class KnapsackSearch {
 public:
  KnapsackSearch(const Vec& values, const Mat& weights, const Vec& capacities,
                 std::vector<int> items)
      : values_(values), weights_(weights), caps_(capacities) {
    const int dims = static_cast<int>(capacities.size());
    // Mean-aggregated surrogate weights. Dimensions with zero capacity carry
    // only zero-weight items after preprocessing and are skipped.
    std::vector<double> agg(values.size(), 0.0);
    active_dims_ = 0;
    for (int d = 0; d < dims; ++d) active_dims_ += caps_[d] > 0 ? 1 : 0;
    for (int i : items) {
      for (int d = 0; d < dims; ++d) {
        if (caps_[d] > 0) agg[i] += weights_(d, i) / caps_[d];
      }
      agg[i] /= std::max(1, active_dims_);
    }
    agg_ = agg;
    // Branching order: best surrogate ratio first, ties by index.
    std::stable_sort(items.begin(), items.end(), [&](int a, int b) {
      return values_[a] * agg_[b] > values_[b] * agg_[a];
    });
    order_ = items;
    pos_.assign(values.size(), -1);
    for (int p = 0; p < static_cast<int>(order_.size()); ++p) {
      pos_[order_[p]] = p;
    }
    dim_order_.resize(dims);
    for (int d = 0; d < dims; ++d) {
      dim_order_[d] = order_;
      std::stable_sort(dim_order_[d].begin(), dim_order_[d].end(),
                       [&](int a, int b) {
                         return values_[a] * weights_(d, b) >
                                values_[b] * weights_(d, a);
                       });
    }
    taken_.assign(values.size(), 0);
    best_taken_ = taken_;
  }

  void Run(double node_limit) {
    node_limit_ = node_limit;
    // Greedy incumbent in branching order.
    Vec rem = caps_;
    double val = 0.0;
    for (int i : order_) {
      if (Fits(i, rem)) {
        Take(i, rem, +1);
        val += values_[i];
        best_taken_[i] = 1;
      }
    }
    best_value_ = val;
    rem = caps_;
    Dfs(0, rem, 0.0);
  }

  const std::vector<int>& best_taken() const { return best_taken_; }
  double best_value() const { return best_value_; }
  long nodes() const { return nodes_; }
  double max_pruned_bound() const { return max_pruned_bound_; }

 private:
  bool Fits(int i, const Vec& rem) const {
    for (int d = 0; d < rem.size(); ++d) {
      if (weights_(d, i) > rem[d] + 1e-12) return false;
    }
    return true;
  }

  void Take(int i, Vec& rem, int sign) const {
    for (int d = 0; d < rem.size(); ++d) rem[d] -= sign * weights_(d, i);
  }

  double Bound(int depth, const Vec& rem) const {
    double bound = std::numeric_limits<double>::infinity();
    // Surrogate constraint: sum_i agg_i v_i <= mean_d rem_d / cap_d.
    {
      double cap = 0.0;
      for (int d = 0; d < rem.size(); ++d) {
        if (caps_[d] > 0) cap += std::max(0.0, rem[d]) / caps_[d];
      }
      cap /= std::max(1, active_dims_);
      double b = 0.0;
      for (std::size_t p = depth; p < order_.size(); ++p) {
        const int i = order_[p];
        if (!Fits(i, rem)) continue;
        if (agg_[i] <= cap) {
          cap -= agg_[i];
          b += values_[i];
        } else {
          b += values_[i] * cap / agg_[i];
          break;
        }
      }
      bound = std::min(bound, b);
    }
    for (int d = 0; d < rem.size(); ++d) {
      double cap = std::max(0.0, rem[d]);
      double b = 0.0;
      for (int i : dim_order_[d]) {
        if (pos_[i] < depth || !Fits(i, rem)) continue;
        const double w = weights_(d, i);
        if (w <= cap) {
          cap -= w;
          b += values_[i];
        } else {
          b += values_[i] * cap / w;
          break;
        }
      }
      bound = std::min(bound, b);
    }
    return bound;
  }

  void Dfs(int depth, Vec& rem, double value) {
    if (++nodes_ > node_limit_) {
      ThrowNumerical("knapsack branch and bound exceeded its node limit");
    }
    if (depth == static_cast<int>(order_.size())) {
      if (value > best_value_) {
        best_value_ = value;
        best_taken_ = taken_;
      }
      return;
    }
    const double bound = value + Bound(depth, rem);
    if (bound <= best_value_) {
      max_pruned_bound_ = std::max(max_pruned_bound_, bound);
      return;
    }
    const int i = order_[depth];
    if (Fits(i, rem)) {
      Take(i, rem, +1);
      taken_[i] = 1;
      Dfs(depth + 1, rem, value + values_[i]);
      taken_[i] = 0;
      Take(i, rem, -1);
    }
    Dfs(depth + 1, rem, value);
  }

  const Vec& values_;
  const Mat& weights_;
  const Vec& caps_;
  int active_dims_ = 0;
  std::vector<double> agg_;
  std::vector<int> order_;
  std::vector<int> pos_;
  std::vector<std::vector<int>> dim_order_;
  std::vector<int> taken_;
  std::vector<int> best_taken_;
  double best_value_ = 0.0;
  double max_pruned_bound_ = -1e300;
  long nodes_ = 0;
  double node_limit_ = 0;
};

}  // namespace

Solution SolveMultiKnapsack(const Vec& values, const Mat& weights,
                            const Vec& capacities, KnapsackCertificate* cert) {
  const long k = values.size();
  CheckDim("knapsack weight columns", weights.cols(), k);
  CheckDim("knapsack weight rows", weights.rows(), capacities.size());
  if ((capacities.array() < 0).any()) ThrowInvalid("capacities must be >= 0");
  if ((weights.array() < 0).any()) ThrowInvalid("weights must be >= 0");

  // Items with non-positive value never help; items that alone exceed a
  // capacity can never be packed. Weightless items are always packed.
  std::vector<int> items;
  Solution sol;
  sol.x = Vec::Zero(k);
  double fixed_value = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(values[i] > 0)) continue;
    if (((weights.col(i) - capacities).array() > 0).any()) continue;
    if ((weights.col(i).array() == 0).all()) {
      sol.x[i] = 1.0;
      fixed_value += values[i];
      continue;
    }
    items.push_back(i);
  }
  KnapsackSearch search(values, weights, capacities, items);
  search.Run(5e7);
  for (int i : items) sol.x[i] = search.best_taken()[i];
  sol.v = sol.x.cast<int>();
  sol.objective_surrogate = values.dot(sol.x);
  if (cert) {
    cert->nodes = search.nodes();
    cert->max_pruned_bound = search.max_pruned_bound() + fixed_value;
  }
  return sol;
}

namespace {

Solution BruteForceKnapsack(const Vec& values, const Mat& weights,
                            const Vec& capacities) {
  const long k = values.size();
  CheckDim("knapsack weight columns", weights.cols(), k);
  if (k > 20) ThrowInvalid("too many items for exhaustive enumeration");
  Solution best;
  best.x = Vec::Zero(k);
  best.objective_surrogate = 0.0;
  Vec x(k);
  for (long mask = 1; mask < (1L << k); ++mask) {
    for (long i = 0; i < k; ++i) x[i] = (mask >> i) & 1L;
    if (((weights * x - capacities).array() > 1e-12).any()) continue;
    const double v = values.dot(x);
    if (v > best.objective_surrogate) {
      best.objective_surrogate = v;
      best.x = x;
    }
  }
  best.v = best.x.cast<int>();
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Simplex-constrained QP

Vec ProjectSimplex(const Vec& v) {
  const long k = v.size();
  std::vector<double> u(v.data(), v.data() + k);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (long j = 0; j < k; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

double QpKktResidual(const Vec& mu_hat, const Mat& cov, double alpha,
                     const Vec& x) {
  const Vec grad = 2.0 * alpha * (cov * x) - mu_hat;
  return (x - ProjectSimplex(x - grad)).lpNorm<Eigen::Infinity>();
}

namespace {

double QpObjective(const Vec& mu, const Mat& cov, double alpha, const Vec& x) {
  return alpha * x.dot(cov * x) - mu.dot(x);
}

// Stationary point of the QP restricted to the affine hull of the face
// {x_i = 0 for i outside `support`}; empty when it leaves the simplex.
bool SolveOnFace(const Vec& mu, const Mat& cov, double alpha,
                 const std::vector<int>& support, Vec* out) {
  const int s = static_cast<int>(support.size());
  Mat kkt = Mat::Zero(s + 1, s + 1);
  Vec rhs(s + 1);
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) {
      kkt(a, b) = 2.0 * alpha * cov(support[a], support[b]);
    }
    kkt(a, s) = 1.0;
    kkt(s, a) = 1.0;
    rhs[a] = mu[support[a]];
  }
  rhs[s] = 1.0;
  const Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  if (!sol.allFinite()) return false;
  Vec x = Vec::Zero(mu.size());
  for (int a = 0; a < s; ++a) {
    if (sol[a] < -1e-12) return false;
    x[support[a]] = std::max(0.0, sol[a]);
  }
  const double total = x.sum();
  if (!(total > 0)) return false;
  *out = x / total;
  return true;
}

}  // namespace

Solution SolvePortfolioQp(const Vec& mu_hat, const Mat& cov, double alpha,
                          const QpOptions& options) {
  const long k = mu_hat.size();
  if (k < 1) ThrowInvalid("portfolio needs at least one asset");
  CheckDim("covariance rows", cov.rows(), k);
  CheckDim("covariance cols", cov.cols(), k);
  if (!(alpha >= 0)) ThrowInvalid("risk weight alpha must be >= 0");
  if (!mu_hat.allFinite() || !cov.allFinite()) {
    ThrowInvalid("portfolio inputs must be finite");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Mat> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8 * scale) {
    ThrowInvalid("covariance is not positive semidefinite");
  }
  const double lipschitz = 2.0 * alpha * std::max(0.0, eig.eigenvalues().maxCoeff());

  Solution sol;
  if (lipschitz <= 1e-14 * (1.0 + mu_hat.cwiseAbs().maxCoeff())) {
    long j = 0;
    for (long i = 1; i < k; ++i) {
      if (mu_hat[i] > mu_hat[j]) j = i;
    }
    sol.x = Vec::Zero(k);
    sol.x[j] = 1.0;
    sol.objective_surrogate = QpObjective(mu_hat, cov, alpha, sol.x);
    return sol;
  }

  Vec x = Vec::Constant(k, 1.0 / static_cast<double>(k));
  Vec best_x = x;
  double best_res = QpKktResidual(mu_hat, cov, alpha, x);
  std::vector<int> last_support;
  for (int it = 1; it <= options.max_iter && best_res > options.tol; ++it) {
    const Vec grad = 2.0 * alpha * (cov * x) - mu_hat;
    x = ProjectSimplex(x - grad / lipschitz);
    double res = QpKktResidual(mu_hat, cov, alpha, x);
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
    if (res <= options.tol) {
      // Converged; the face solve usually removes the remaining round-off.
      std::vector<int> support;
      for (long i = 0; i < k; ++i) {
        if (x[i] > 0) support.push_back(static_cast<int>(i));
      }
      Vec polished;
      if (SolveOnFace(mu_hat, cov, alpha, support, &polished)) {
        const double pres = QpKktResidual(mu_hat, cov, alpha, polished);
        if (pres < best_res) {
          best_res = pres;
          best_x = polished;
        }
      }
      break;
    }
    // Once the support settles, jump to the stationary point of its face.
    if (it % 20 == 0) {
      std::vector<int> support;
      for (long i = 0; i < k; ++i) {
        if (x[i] > 0) support.push_back(static_cast<int>(i));
      }
      if (support == last_support) {
        Vec polished;
        if (SolveOnFace(mu_hat, cov, alpha, support, &polished)) {
          const double pres = QpKktResidual(mu_hat, cov, alpha, polished);
          if (pres < best_res) {
            best_res = pres;
            best_x = polished;
            if (pres <= options.tol) break;
          }
        }
      }
      last_support = std::move(support);
    }
  }
  sol.x = best_x;
  sol.objective_surrogate = QpObjective(mu_hat, cov, alpha, sol.x);
  if (best_res > options.tol) {
    throw QpNotConverged("portfolio QP did not reach KKT residual " +
                             std::to_string(options.tol) + " (best " +
                             std::to_string(best_res) + ")",
                         sol, best_res);
  }
  return sol;
}

namespace {

Solution BruteForceQp(const Vec& mu, const Mat& cov, double alpha) {
  const long k = mu.size();
  if (k > 20) ThrowInvalid("too many assets for exhaustive support search");
  Solution best;
  best.objective_surrogate = std::numeric_limits<double>::infinity();
  for (long mask = 1; mask < (1L << k); ++mask) {
    std::vector<int> support;
    for (long i = 0; i < k; ++i) {
      if ((mask >> i) & 1L) support.push_back(static_cast<int>(i));
    }
    Vec x;
    if (!SolveOnFace(mu, cov, alpha, support, &x)) continue;
    const double v = QpObjective(mu, cov, alpha, x);
    if (v < best.objective_surrogate) {
      best.objective_surrogate = v;
      best.x = x;
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Cardinality-constrained allocation with a linear objective

namespace {

struct SizeRange {
  int lo;
  int hi;
};

SizeRange FeasibleSizes(const PortfolioMinlpDesc& z) {
  const int k = static_cast<int>(z.mu.size());
  const int lo = std::max(z.min_assets,
                          static_cast<int>(std::ceil(1.0 / z.f_max - 1e-9)));
  const int hi = std::min({z.max_assets, k,
                           static_cast<int>(std::floor(1.0 / z.f_min + 1e-9))});
  if (lo > hi) {
    ThrowData("no feasible number of assets for the given f_min, f_max, m, M");
  }
  return {lo, hi};
}

bool LexLess(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool Improves(double v, double best, const std::vector<int>& support,
              const std::vector<int>& best_support) {
  const double tie = 1e-12 * (1.0 + std::abs(best));
  if (v < best - tie) return true;
  return v <= best + tie && LexLess(support, best_support);
}

}  // namespace

Solution SolvePortfolioMilp(const Vec& c, const PortfolioMinlpDesc& z) {
  const int k = static_cast<int>(z.mu.size());
  CheckDim("surrogate cost vector", c.size(), k);
  const SizeRange sizes = FeasibleSizes(z);
  std::vector<int> by_cost(k);
  std::iota(by_cost.begin(), by_cost.end(), 0);
  std::stable_sort(by_cost.begin(), by_cost.end(),
                   [&](int a, int b) { return c[a] < c[b]; });

  // For a fixed size the s cheapest assets are optimal: swapping a selected
  // asset for a cheaper unselected one never raises the cost.
  Solution best;
  best.objective_surrogate = std::numeric_limits<double>::infinity();
  std::vector<int> best_support;
  for (int s = sizes.lo; s <= sizes.hi; ++s) {
    Vec x = Vec::Zero(k);
    double residual = 1.0 - s * z.f_min;
    for (int a = 0; a < s; ++a) {
      const int i = by_cost[a];
      const double extra = std::min(z.f_max - z.f_min, std::max(0.0, residual));
      x[i] = z.f_min + extra;
      residual -= extra;
    }
    std::vector<int> support(by_cost.begin(), by_cost.begin() + s);
    std::sort(support.begin(), support.end());
    const double v = c.dot(x);
    if (best_support.empty() || Improves(v, best.objective_surrogate, support,
                                         best_support)) {
      best.x = x;
      best.objective_surrogate = v;
      best_support = std::move(support);
    }
  }
  best.v = Eigen::VectorXi::Zero(k);
  for (int i : best_support) best.v[i] = 1;
  return best;
}

namespace {

// Enumerates every support of feasible size and every vertex of its inner LP
// (all but one selected asset at a bound, the remaining one fixed by the
// budget).
Solution BruteForceMilp(const Vec& c, const PortfolioMinlpDesc& z) {
  const int k = static_cast<int>(z.mu.size());
  CheckDim("surrogate cost vector", c.size(), k);
  if (k > 30) ThrowInvalid("too many assets for exhaustive support search");
  const SizeRange sizes = FeasibleSizes(z);
  double work = 0.0;
  for (int s = sizes.lo; s <= sizes.hi; ++s) {
    work += Binomial(k, s) * s * std::ldexp(1.0, s - 1);
  }
  if (work > kEnumerationLimit) {
    ThrowInvalid("instance too large for exhaustive support enumeration");
  }
  Solution best;
  best.objective_surrogate = std::numeric_limits<double>::infinity();
  std::vector<int> best_support;
  for (long mask = 1; mask < (1L << k); ++mask) {
    const int s = __builtin_popcountl(static_cast<unsigned long>(mask));
    if (s < sizes.lo || s > sizes.hi) continue;
    std::vector<int> support;
    for (int i = 0; i < k; ++i) {
      if ((mask >> i) & 1L) support.push_back(i);
    }
    for (int free_pos = 0; free_pos < s; ++free_pos) {
      for (long bits = 0; bits < (1L << (s - 1)); ++bits) {
        Vec x = Vec::Zero(k);
        double used = 0.0;
        int b = 0;
        for (int a = 0; a < s; ++a) {
          if (a == free_pos) continue;
          x[support[a]] = ((bits >> b) & 1L) ? z.f_max : z.f_min;
          used += x[support[a]];
          ++b;
        }
        const double rest = 1.0 - used;
        if (rest < z.f_min - 1e-12 || rest > z.f_max + 1e-12) continue;
        x[support[free_pos]] = rest;
        const double v = c.dot(x);
        if (best_support.empty() ||
            Improves(v, best.objective_surrogate, support, best_support)) {
          best.x = x;
          best.objective_surrogate = v;
          best_support = support;
        }
      }
    }
  }
  best.v = Eigen::VectorXi::Zero(k);
  for (int i : best_support) best.v[i] = 1;
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dispatch and oracles

Solution SolveFamily(const Vec& c, const ProblemDescriptor& z,
                     SolverStats* stats) {
  CheckDim("surrogate cost vector", c.size(), SurrogateDim(z));
  if (!c.allFinite()) ThrowNumerical("surrogate cost vector is not finite");
  const auto start = std::chrono::steady_clock::now();
  struct Visitor {
    const Vec& c;
    Solution operator()(const ShortestPathDesc& d) const {
      return SolveDagShortestPath(d.grid_n, c);
    }
    Solution operator()(const StochasticSpDesc& d) const {
      return SolveDagShortestPath(d.grid_n, c);
    }
    Solution operator()(const KnapsackDesc& d) const {
      return SolveMultiKnapsack(c, d.weights, d.capacities);
    }
    Solution operator()(const PortfolioQpDesc& d) const {
      return SolvePortfolioQp(c, d.cov, d.alpha);
    }
    Solution operator()(const PortfolioMinlpDesc& d) const {
      return SolvePortfolioMilp(c, d);
    }
  };
  Solution sol = std::visit(Visitor{c}, z);
  if (stats) stats->Record(std::chrono::steady_clock::now() - start);
  return sol;
}

Solution BruteForceOracle(const ProblemDescriptor& z, const Vec& c) {
  CheckDim("surrogate cost vector", c.size(), SurrogateDim(z));
  struct Visitor {
    const Vec& c;
    Solution operator()(const ShortestPathDesc& d) const {
      return BruteForcePath(d.grid_n, c);
    }
    Solution operator()(const StochasticSpDesc& d) const {
      return BruteForcePath(d.grid_n, c);
    }
    Solution operator()(const KnapsackDesc& d) const {
      return BruteForceKnapsack(c, d.weights, d.capacities);
    }
    Solution operator()(const PortfolioQpDesc& d) const {
      return BruteForceQp(c, d.cov, d.alpha);
    }
    Solution operator()(const PortfolioMinlpDesc& d) const {
      return BruteForceMilp(c, d);
    }
  };
  return std::visit(Visitor{c}, z);
}

Solution TrueOptimum(const ProblemDescriptor& z) {
  struct Visitor {
    Solution operator()(const ShortestPathDesc& d) const {
      return SolveDagShortestPath(d.grid_n, d.costs);
    }
    Solution operator()(const KnapsackDesc& d) const {
      return SolveMultiKnapsack(d.values, d.weights, d.capacities);
    }
    Solution operator()(const PortfolioQpDesc& d) const {
      return SolvePortfolioQp(d.mu, d.cov, d.alpha);
    }
    Solution operator()(const StochasticSpDesc& d) const {
      Solution best;
      double best_value = -1.0;
      const ProblemDescriptor self = d;
      EnumeratePaths(d.grid_n, [&](const Vec& x) {
        Solution cand;
        cand.x = x;
        const double v = EvalObjective(cand, self);
        if (v > best_value) {
          best_value = v;
          best = cand;
        }
      });
      best.objective_surrogate = d.mean.dot(best.x);
      return best;
    }
    Solution operator()(const PortfolioMinlpDesc&) const {
      ThrowInvalid("no exact oracle for the cubic portfolio objective");
    }
  };
  return std::visit(Visitor{}, z);
}

Solution StochasticSpHeuristic(const StochasticSpDesc& z, double gamma) {
  return SolveDagShortestPath(z.grid_n, z.mean + gamma * z.variance);
}

}  // namespace lancer
