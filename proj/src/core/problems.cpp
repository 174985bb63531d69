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

#include "core/problems.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace lancer {

Sense FamilySense(FamilyTag family) {
  switch (family) {
    case FamilyTag::kMultiKnapsack:
    case FamilyTag::kStochasticShortestPath:
      return Sense::kMaximize;
    default:
      return Sense::kMinimize;
  }
}

std::string_view FamilyName(FamilyTag family) {
  switch (family) {
    case FamilyTag::kShortestPath:
      return "shortest_path";
    case FamilyTag::kMultiKnapsack:
      return "knapsack";
    case FamilyTag::kStochasticShortestPath:
      return "stochastic_sp";
    case FamilyTag::kPortfolioQp:
      return "portfolio_qp";
    case FamilyTag::kPortfolioMinlp:
      return "portfolio_minlp";
  }
  return "unknown";
}

FamilyTag ParseFamily(std::string_view name) {
  for (FamilyTag f :
       {FamilyTag::kShortestPath, FamilyTag::kMultiKnapsack,
        FamilyTag::kStochasticShortestPath, FamilyTag::kPortfolioQp,
        FamilyTag::kPortfolioMinlp}) {
    if (FamilyName(f) == name) return f;
  }
  ThrowConfig("unknown problem family '" + std::string(name) + "'");
}

bool HasCostDescription(FamilyTag family) {
  return family == FamilyTag::kShortestPath ||
         family == FamilyTag::kMultiKnapsack ||
         family == FamilyTag::kPortfolioQp;
}

int GridEdgeCount(int grid_n) { return 2 * grid_n * (grid_n - 1); }

int HorizontalEdge(int grid_n, int row, int col) {
  return row * (2 * grid_n - 1) + col;
}

int VerticalEdge(int grid_n, int row, int col) {
  return row * (2 * grid_n - 1) + (grid_n - 1) + col;
}

std::vector<GridEdge> GridEdges(int grid_n) {
  std::vector<GridEdge> edges(GridEdgeCount(grid_n));
  for (int r = 0; r < grid_n; ++r) {
    for (int c = 0; c + 1 < grid_n; ++c) {
      edges[HorizontalEdge(grid_n, r, c)] = {r * grid_n + c,
                                             r * grid_n + c + 1};
    }
    if (r + 1 == grid_n) continue;
    for (int c = 0; c < grid_n; ++c) {
      edges[VerticalEdge(grid_n, r, c)] = {r * grid_n + c,
                                           (r + 1) * grid_n + c};
    }
  }
  return edges;
}

int GridSizeFromEdgeCount(long edge_count) {
  for (int n = 2; GridEdgeCount(n) <= edge_count; ++n) {
    if (GridEdgeCount(n) == edge_count) return n;
  }
  ThrowInvalid("edge count " + std::to_string(edge_count) +
               " does not match any n x n grid");
}

FamilyTag FamilyOf(const ProblemDescriptor& z) {
  return static_cast<FamilyTag>(z.index());
}

int SurrogateDim(const ProblemDescriptor& z) {
  return static_cast<int>(CostVector(z).size());
}

Vec CostVector(const ProblemDescriptor& z) {
  struct Visitor {
    Vec operator()(const ShortestPathDesc& d) const { return d.costs; }
    Vec operator()(const KnapsackDesc& d) const { return d.values; }
    Vec operator()(const StochasticSpDesc& d) const { return d.mean; }
    Vec operator()(const PortfolioQpDesc& d) const { return d.mu; }
    Vec operator()(const PortfolioMinlpDesc& d) const { return d.mu; }
  };
  return std::visit(Visitor{}, z);
}

namespace {

bool AllFinite(const Vec& v) { return v.allFinite(); }

void CheckSymmetricPsd(const Mat& g, const char* what) {
  if (g.rows() != g.cols()) ThrowData(std::string(what) + " is not square");
  if (!g.allFinite()) ThrowData(std::string(what) + " has non-finite entries");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    ThrowData(std::string(what) + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(g, Eigen::EigenvaluesOnly);
  if (g.rows() > 0 && eig.eigenvalues().minCoeff() < -1e-8 * scale) {
    ThrowData(std::string(what) + " is not positive semidefinite");
  }
}

void ValidateGridDesc(int grid_n, long n_edges) {
  if (grid_n < 2) ThrowData("grid size must be at least 2");
  if (n_edges != GridEdgeCount(grid_n)) {
    ThrowData("edge vector length does not match the grid size");
  }
}

}  // namespace

void ValidateDescriptor(const ProblemDescriptor& z) {
  struct Visitor {
    void operator()(const ShortestPathDesc& d) const {
      ValidateGridDesc(d.grid_n, d.costs.size());
      if (!AllFinite(d.costs)) ThrowData("edge costs must be finite");
    }
    void operator()(const KnapsackDesc& d) const {
      if (d.values.size() < 1) ThrowData("knapsack needs at least one item");
      if (d.weights.cols() != d.values.size() ||
          d.weights.rows() != d.capacities.size() || d.capacities.size() < 1) {
        ThrowData("knapsack weight matrix shape is inconsistent");
      }
      if ((d.weights.array() < 0).any()) ThrowData("knapsack weights must be >= 0");
      if ((d.capacities.array() < 0).any()) ThrowData("capacities must be >= 0");
    }
    void operator()(const StochasticSpDesc& d) const {
      ValidateGridDesc(d.grid_n, d.mean.size());
      if (d.variance.size() != d.mean.size()) {
        ThrowData("edge mean and variance vectors differ in length");
      }
      if ((d.variance.array() < 0).any()) ThrowData("edge variances must be >= 0");
      if (!std::isfinite(d.deadline)) ThrowData("deadline must be finite");
    }
    void operator()(const PortfolioQpDesc& d) const {
      if (d.mu.size() < 1 || d.cov.rows() != d.mu.size()) {
        ThrowData("portfolio covariance shape does not match returns");
      }
      if (d.alpha < 0) ThrowData("risk weight alpha must be >= 0");
      CheckSymmetricPsd(d.cov, "covariance");
    }
    void operator()(const PortfolioMinlpDesc& d) const {
      const long k = d.mu.size();
      if (k < 1 || d.cov.rows() != k || d.coskew.rows() != k ||
          d.coskew.cols() != k * k || d.x0.size() != k) {
        ThrowData("portfolio descriptor shapes are inconsistent");
      }
      CheckSymmetricPsd(d.cov, "covariance");
      for (long i = 0; i < k; ++i) {
        for (long j = 0; j < k; ++j) {
          for (long l = j + 1; l < k; ++l) {
            if (std::abs(d.coskew(i, j * k + l) - d.coskew(i, l * k + j)) >
                1e-12 * std::max(1.0, std::abs(d.coskew(i, j * k + l)))) {
              ThrowData("co-skewness is not symmetric in its last two indices");
            }
          }
        }
      }
      if ((d.x0.array() < 0).any() || std::abs(d.x0.sum() - 1.0) > 1e-9) {
        ThrowData("initial allocation must be non-negative and sum to 1");
      }
      if (!(d.f_min > 0 && d.f_min < d.f_max && d.f_max <= 1)) {
        ThrowData("need 0 < f_min < f_max <= 1");
      }
      if (!(1 <= d.min_assets && d.min_assets <= d.max_assets &&
            d.max_assets <= k)) {
        ThrowData("need 1 <= m <= M <= k");
      }
      if (d.min_assets * d.f_min > 1.0 + 1e-12 ||
          d.max_assets * d.f_max < 1.0 - 1e-12) {
        ThrowData("need m * f_min <= 1 <= M * f_max");
      }
    }
  };
  std::visit(Visitor{}, z);
}

void ValidateDataset(const Dataset& dataset) {
  if (dataset.instances.empty()) ThrowData("dataset is empty");
  const Instance& first = dataset.instances.front();
  const long y_dim = first.y.size();
  const int c_dim = SurrogateDim(first.z);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Instance& inst = dataset.instances[i];
    if (FamilyOf(inst.z) != dataset.family) {
      ThrowData("instance " + std::to_string(i) + " has the wrong family");
    }
    if (inst.y.size() != y_dim || SurrogateDim(inst.z) != c_dim) {
      ThrowData("instance " + std::to_string(i) +
                " has inconsistent dimensions");
    }
    ValidateDescriptor(inst.z);
  }
}

double GaussianCdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

namespace {

bool NearBinary(double v, double tol) {
  return std::abs(v) <= tol || std::abs(v - 1.0) <= tol;
}

bool IsUnitPath(int grid_n, const Vec& x, double tol) {
  if (x.size() != GridEdgeCount(grid_n)) return false;
  const int n_nodes = grid_n * grid_n;
  std::vector<double> balance(n_nodes, 0.0);  // out - in
  const auto edges = GridEdges(grid_n);
  for (int e = 0; e < x.size(); ++e) {
    if (!NearBinary(x[e], tol)) return false;
    balance[edges[e].from] += x[e];
    balance[edges[e].to] -= x[e];
  }
  for (int v = 0; v < n_nodes; ++v) {
    double want = 0.0;
    if (v == 0) want = 1.0;
    if (v == n_nodes - 1) want = -1.0;
    if (std::abs(balance[v] - want) > tol * 4) return false;
  }
  return true;
}

Eigen::VectorXi BinaryPart(const Solution& s, long k, double tol) {
  if (s.v.size() == k) return s.v;
  Eigen::VectorXi v(k);
  for (long i = 0; i < k; ++i) v[i] = s.x[i] > tol ? 1 : 0;
  return v;
}

void CheckDecisionDim(const Solution& s, long expected) {
  CheckDim("decision vector", s.x.size(), expected);
  if (s.v.size() != 0) CheckDim("binary decision vector", s.v.size(), expected);
}

}  // namespace

bool IsFeasible(const Solution& s, const ProblemDescriptor& z, double tol) {
  struct Visitor {
    const Solution& s;
    double tol;
    bool operator()(const ShortestPathDesc& d) const {
      return IsUnitPath(d.grid_n, s.x, tol);
    }
    bool operator()(const StochasticSpDesc& d) const {
      return IsUnitPath(d.grid_n, s.x, tol);
    }
    bool operator()(const KnapsackDesc& d) const {
      const long k = d.values.size();
      if (s.x.size() != k) return false;
      for (long i = 0; i < k; ++i) {
        if (!NearBinary(s.x[i], tol)) return false;
        if (s.v.size() == k && std::abs(s.v[i] - s.x[i]) > tol) return false;
      }
      const Vec load = d.weights * s.x;
      return ((load - d.capacities).array() <= tol).all();
    }
    bool operator()(const PortfolioQpDesc& d) const {
      if (s.x.size() != d.mu.size()) return false;
      return (s.x.array() >= -tol).all() && std::abs(s.x.sum() - 1.0) <= tol;
    }
    bool operator()(const PortfolioMinlpDesc& d) const {
      const long k = d.mu.size();
      if (s.x.size() != k || (s.v.size() != 0 && s.v.size() != k)) return false;
      const Eigen::VectorXi v = BinaryPart(s, k, tol);
      if (std::abs(s.x.sum() - 1.0) > tol) return false;
      int selected = 0;
      for (long i = 0; i < k; ++i) {
        if (v[i] != 0 && v[i] != 1) return false;
        if (s.x[i] < -tol) return false;
        if (s.x[i] < d.f_min * v[i] - tol) return false;
        if (s.x[i] > d.f_max * v[i] + tol) return false;
        selected += v[i];
      }
      return d.min_assets <= selected && selected <= d.max_assets;
    }
  };
  return std::visit(Visitor{s, tol}, z);
}

double PortfolioQuadraticTerm(const PortfolioMinlpDesc& z, const Vec& x) {
  return x.dot(z.cov * x);
}

double PortfolioCubicTerm(const PortfolioMinlpDesc& z, const Vec& x) {
  const long k = x.size();
  Vec xx(k * k);
  for (long j = 0; j < k; ++j) {
    for (long l = 0; l < k; ++l) xx[j * k + l] = x[j] * x[l];
  }
  return x.dot(z.coskew * xx);
}

double EvalObjective(const Solution& s, const ProblemDescriptor& z) {
  CheckDecisionDim(s, SurrogateDim(z));
  constexpr double kFeasTol = 1e-7;
  if (!IsFeasible(s, z, kFeasTol)) {
    ThrowData(std::string("decision is infeasible for ") +
              std::string(FamilyName(FamilyOf(z))));
  }
  struct Visitor {
    const Vec& x;
    double operator()(const ShortestPathDesc& d) const {
      return d.costs.dot(x);
    }
    double operator()(const KnapsackDesc& d) const { return d.values.dot(x); }
    double operator()(const StochasticSpDesc& d) const {
      const double mean = d.mean.dot(x);
      const double var = d.variance.dot(x);
      if (var <= 0.0) return mean <= d.deadline ? 1.0 : 0.0;
      return GaussianCdf((d.deadline - mean) / std::sqrt(var));
    }
    double operator()(const PortfolioQpDesc& d) const {
      return d.alpha * x.dot(d.cov * x) - d.mu.dot(x);
    }
    double operator()(const PortfolioMinlpDesc& d) const {
      return d.alpha * PortfolioQuadraticTerm(d, x) +
             d.gamma * (x - d.x0).lpNorm<1>() - d.mu.dot(x) -
             d.beta * PortfolioCubicTerm(d, x);
    }
  };
  return std::visit(Visitor{s.x}, z);
}

double ToInternal(FamilyTag family, double natural) {
  return FamilySense(family) == Sense::kMaximize ? -natural : natural;
}

double InternalLoss(const Solution& s, const ProblemDescriptor& z) {
  return ToInternal(FamilyOf(z), EvalObjective(s, z));
}

}  // namespace lancer
