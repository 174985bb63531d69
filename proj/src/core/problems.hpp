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

#ifndef LANCER_CORE_PROBLEMS_HPP_
#define LANCER_CORE_PROBLEMS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "core/types.hpp"

namespace lancer {

enum class FamilyTag {
  kShortestPath,
  kMultiKnapsack,
  kStochasticShortestPath,
  kPortfolioQp,
  kPortfolioMinlp,
};

enum class Sense { kMinimize, kMaximize };

Sense FamilySense(FamilyTag family);
std::string_view FamilyName(FamilyTag family);
FamilyTag ParseFamily(std::string_view name);

// Families whose description `z` is itself a cost vector that a target model
// can regress onto (the predict-then-optimize setting).
bool HasCostDescription(FamilyTag family);

// ---------------------------------------------------------------------------
// Directed grid graph. Nodes are (row, col) with id row * n + col; edges go
// right and down. Edge order: for each row, its horizontal edges left to right,
// then the vertical edges leaving that row.

int GridEdgeCount(int grid_n);
int HorizontalEdge(int grid_n, int row, int col);  // (row,col) -> (row,col+1)
int VerticalEdge(int grid_n, int row, int col);    // (row,col) -> (row+1,col)

struct GridEdge {
  int from;
  int to;
};
std::vector<GridEdge> GridEdges(int grid_n);

// Infers n from an edge count of 2n(n-1); throws when no such n exists.
int GridSizeFromEdgeCount(long edge_count);

// ---------------------------------------------------------------------------
// Problem descriptors.

struct ShortestPathDesc {
  int grid_n = 0;
  Vec costs;
};

struct KnapsackDesc {
  Vec values;      // k
  Mat weights;     // d x k
  Vec capacities;  // d
};

struct StochasticSpDesc {
  int grid_n = 0;
  Vec mean;
  Vec variance;
  double deadline = 0.0;
};

struct PortfolioQpDesc {
  Vec mu;
  Mat cov;
  double alpha = 0.1;
};

struct PortfolioMinlpDesc {
  Vec mu;
  Mat cov;
  Mat coskew;  // k x k^2, entry (i, j*k + l) = S_ijl
  Vec x0;
  double alpha = 0.1;
  double beta = 0.5;
  double gamma = 0.01;
  double f_min = 0.01;
  double f_max = 0.2;
  int min_assets = 3;
  int max_assets = 10;
};

using ProblemDescriptor = std::variant<ShortestPathDesc, KnapsackDesc,
                                       StochasticSpDesc, PortfolioQpDesc,
                                       PortfolioMinlpDesc>;

FamilyTag FamilyOf(const ProblemDescriptor& z);

// Length of the linear surrogate cost vector the solver for `z` consumes.
int SurrogateDim(const ProblemDescriptor& z);

// The part of `z` that plays the role of a cost vector: edge costs, item
// values, expected returns (or edge means for the stochastic family).
Vec CostVector(const ProblemDescriptor& z);

// Validates the structural invariants of a descriptor; throws kData.
void ValidateDescriptor(const ProblemDescriptor& z);

struct Instance {
  Vec y;
  ProblemDescriptor z;
};

struct Dataset {
  FamilyTag family = FamilyTag::kShortestPath;
  std::uint64_t seed = 0;
  std::string params_json = "{}";  // generator parameters, echoed to disk
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
};

// Non-empty, single family, consistent dimensions; throws kData.
void ValidateDataset(const Dataset& dataset);

// ---------------------------------------------------------------------------
// Objectives.

// Standard normal CDF.
double GaussianCdf(double t);

// True objective f(x; z) in the family's natural sense. Throws kInvalidArgument
// on dimension mismatch and kData when `x` is infeasible.
double EvalObjective(const Solution& x, const ProblemDescriptor& z);

// Same value, negated for maximization families so smaller is always better.
double InternalLoss(const Solution& x, const ProblemDescriptor& z);
double ToInternal(FamilyTag family, double natural);

bool IsFeasible(const Solution& x, const ProblemDescriptor& z,
                double tol = 1e-9);

// Objective pieces of the third-order portfolio problem.
double PortfolioQuadraticTerm(const PortfolioMinlpDesc& z, const Vec& x);
double PortfolioCubicTerm(const PortfolioMinlpDesc& z, const Vec& x);

}  // namespace lancer

#endif  // LANCER_CORE_PROBLEMS_HPP_
