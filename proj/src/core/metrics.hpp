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

#ifndef LANCER_CORE_METRICS_HPP_
#define LANCER_CORE_METRICS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/lancer.hpp"
#include "core/problems.hpp"

namespace lancer {

inline constexpr double kRegretEpsilon = 1e-7;

// sum_i gap_i / (sum_i |f*_i| + 1e-7), where gap_i is the sense-adjusted
// shortfall of objective_i against optimal_i (clamped at zero). Inputs are
// natural-sense objective values.
double NormalizedRegret(const std::vector<double>& objectives,
                        const std::vector<double>& optimal, FamilyTag family);

// (DL - DL_opt) / (DL_random - DL_opt) on mean internal losses; 0 for the
// optimal decisions and exactly 1 for the random baseline. Throws when the
// two anchors coincide.
double NormalizedDecisionLoss(double loss, double random_loss,
                              double optimal_loss);

// Same, from per-instance natural-sense objectives.
double NormalizedDecisionLoss(const std::vector<double>& objectives,
                              const std::vector<double>& random_objectives,
                              const std::vector<double>& optimal_objectives,
                              FamilyTag family);

// Per-instance mean objective of decisions induced by N(0, 1) surrogate
// costs, averaged over `draws` draws.
std::vector<double> RandomBaselineObjectives(const Dataset& dataset, int draws,
                                             std::uint64_t seed,
                                             int workers = 1);

// Per-instance f*(z).
std::vector<double> OptimalObjectives(const Dataset& dataset, int workers = 1);

struct CurvePoint {
  std::string method;
  int epoch = 0;
  long solver_calls = 0;
  double metric = 0.0;
};

// One point per history row: cumulative solver calls vs mean decision loss.
std::vector<CurvePoint> TradeoffCurve(
    const std::vector<std::pair<std::string, std::vector<HistoryRow>>>&
        histories);

// CSV with header method,epoch,solver_calls,metric.
std::string CurveToCsv(const std::vector<CurvePoint>& curve);
std::vector<CurvePoint> CurveFromCsv(const std::string& csv);

struct RiskSkewness {
  Vec scores;   // alpha x.(Gx) - beta x.(S (x kron x))
  Vec returns;  // mu . x
};

RiskSkewness RiskSkewnessScores(const Vec& x, const PortfolioMinlpDesc& z);

}  // namespace lancer

#endif  // LANCER_CORE_METRICS_HPP_
