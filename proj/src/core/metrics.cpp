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

#include "core/metrics.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "core/errors.hpp"
#include "core/generators.hpp"
#include "core/io.hpp"
#include "core/parallel.hpp"
#include "core/solvers.hpp"

namespace lancer {

double NormalizedRegret(const std::vector<double>& objectives,
                        const std::vector<double>& optimal, FamilyTag family) {
  CheckDim("optimal objectives", static_cast<long>(optimal.size()),
           static_cast<long>(objectives.size()));
  double gap = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    const double d = ToInternal(family, objectives[i]) -
                     ToInternal(family, optimal[i]);
    gap += std::max(0.0, d);
    norm += std::abs(optimal[i]);
  }
  return gap / (norm + kRegretEpsilon);
}

double NormalizedDecisionLoss(double loss, double random_loss,
                              double optimal_loss) {
  const double span = random_loss - optimal_loss;
  if (!(std::abs(span) > 1e-15 * std::max(1.0, std::abs(optimal_loss)))) {
    ThrowNumerical("random baseline and optimum coincide; decision loss is undefined");
  }
  return (loss - optimal_loss) / span;
}

namespace {

double MeanInternal(const std::vector<double>& v, FamilyTag family) {
  if (v.empty()) ThrowInvalid("no objectives");
  double s = 0.0;
  for (double x : v) s += ToInternal(family, x);
  return s / static_cast<double>(v.size());
}

}  // namespace

double NormalizedDecisionLoss(const std::vector<double>& objectives,
                              const std::vector<double>& random_objectives,
                              const std::vector<double>& optimal_objectives,
                              FamilyTag family) {
  CheckDim("random objectives", static_cast<long>(random_objectives.size()),
           static_cast<long>(objectives.size()));
  CheckDim("optimal objectives", static_cast<long>(optimal_objectives.size()),
           static_cast<long>(objectives.size()));
  return NormalizedDecisionLoss(MeanInternal(objectives, family),
                                MeanInternal(random_objectives, family),
                                MeanInternal(optimal_objectives, family));
}

std::vector<double> RandomBaselineObjectives(const Dataset& dataset, int draws,
                                             std::uint64_t seed, int workers) {
  if (draws < 1) ThrowInvalid("draws must be >= 1");
  const long n = static_cast<long>(dataset.size());
  std::vector<double> out(n);
  ParallelFor(n, workers, [&](long i) {
    const ProblemDescriptor& z = dataset.instances[i].z;
    std::mt19937_64 rng(InstanceSeed(seed, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> normal(0.0, 1.0);
    double acc = 0.0;
    for (int d = 0; d < draws; ++d) {
      Vec c(SurrogateDim(z));
      for (long e = 0; e < c.size(); ++e) c[e] = normal(rng);
      acc += EvalObjective(SolveFamily(c, z), z);
    }
    out[i] = acc / draws;
  });
  return out;
}

std::vector<double> OptimalObjectives(const Dataset& dataset, int workers) {
  const long n = static_cast<long>(dataset.size());
  std::vector<double> out(n);
  ParallelFor(n, workers, [&](long i) {
    const ProblemDescriptor& z = dataset.instances[i].z;
    out[i] = EvalObjective(TrueOptimum(z), z);
  });
  return out;
}

std::vector<CurvePoint> TradeoffCurve(
    const std::vector<std::pair<std::string, std::vector<HistoryRow>>>&
        histories) {
  std::vector<CurvePoint> out;
  for (const auto& [method, rows] : histories) {
    for (const HistoryRow& r : rows) {
      out.push_back({method, r.iteration, r.solver_calls, r.mean_decision_loss});
    }
  }
  return out;
}

std::string CurveToCsv(const std::vector<CurvePoint>& curve) {
  std::string out = "method,epoch,solver_calls,metric\n";
  for (const CurvePoint& p : curve) {
    if (p.method.find_first_of(",\n\"") != std::string::npos) {
      ThrowInvalid("method names must not contain commas, quotes or newlines");
    }
    out += p.method + "," + std::to_string(p.epoch) + "," +
           std::to_string(p.solver_calls) + "," + FormatDouble(p.metric) + "\n";
  }
  return out;
}

std::vector<CurvePoint> CurveFromCsv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "method,epoch,solver_calls,metric") {
    ThrowData("curve CSV has an unexpected header");
  }
  std::vector<CurvePoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string method, epoch, calls, metric;
    if (!std::getline(row, method, ',') || !std::getline(row, epoch, ',') ||
        !std::getline(row, calls, ',') || !std::getline(row, metric)) {
      ThrowData("malformed curve CSV row: " + line);
    }
    try {
      out.push_back({method, std::stoi(epoch), std::stol(calls), std::stod(metric)});
    } catch (const std::exception&) {
      ThrowData("malformed curve CSV row: " + line);
    }
  }
  return out;
}

RiskSkewness RiskSkewnessScores(const Vec& x, const PortfolioMinlpDesc& z) {
  const long k = z.mu.size();
  CheckDim("allocation", x.size(), k);
  Vec xx(k * k);
  for (long j = 0; j < k; ++j) {
    for (long l = 0; l < k; ++l) xx[j * k + l] = x[j] * x[l];
  }
  RiskSkewness out;
  out.scores = z.alpha * x.cwiseProduct(z.cov * x) -
               z.beta * x.cwiseProduct(z.coskew * xx);
  out.returns = z.mu.cwiseProduct(x);
  return out;
}

}  // namespace lancer
