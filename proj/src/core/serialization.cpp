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

#include "core/serialization.hpp"

#include <sstream>

#include "core/io.hpp"

namespace lancer {

Json ParseJson(const std::string& text, ErrorKind kind, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(kind, what + ": " + e.what());
  }
}

Json VecToJson(const Vec& v) {
  if (!v.allFinite()) ThrowNumerical("refusing to serialize non-finite values");
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vec VecFromJson(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<long>(v.size()));
}

Json MatToJson(const Mat& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) rows.push_back(VecToJson(m.row(r).transpose()));
  return rows;
}

Mat MatFromJson(const Json& j) {
  if (!j.is_array()) ThrowData("matrix must be an array of rows");
  if (j.empty()) return Mat();
  const long rows = static_cast<long>(j.size());
  const long cols = static_cast<long>(j.front().size());
  Mat m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    const Vec row = VecFromJson(j[r]);
    if (row.size() != cols) ThrowData("ragged matrix rows");
    m.row(r) = row.transpose();
  }
  return m;
}

Json DescriptorToJson(const ProblemDescriptor& z) {
  struct Visitor {
    Json operator()(const ShortestPathDesc& d) const {
      return {{"grid_n", d.grid_n}, {"costs", VecToJson(d.costs)}};
    }
    Json operator()(const KnapsackDesc& d) const {
      return {{"values", VecToJson(d.values)},
              {"weights", MatToJson(d.weights)},
              {"capacities", VecToJson(d.capacities)}};
    }
    Json operator()(const StochasticSpDesc& d) const {
      return {{"grid_n", d.grid_n},
              {"mean", VecToJson(d.mean)},
              {"variance", VecToJson(d.variance)},
              {"deadline", d.deadline}};
    }
    Json operator()(const PortfolioQpDesc& d) const {
      return {{"mu", VecToJson(d.mu)}, {"cov", MatToJson(d.cov)}, {"alpha", d.alpha}};
    }
    Json operator()(const PortfolioMinlpDesc& d) const {
      return {{"mu", VecToJson(d.mu)},
              {"cov", MatToJson(d.cov)},
              {"coskew", MatToJson(d.coskew)},
              {"x0", VecToJson(d.x0)},
              {"alpha", d.alpha},
              {"beta", d.beta},
              {"gamma", d.gamma},
              {"f_min", d.f_min},
              {"f_max", d.f_max},
              {"min_assets", d.min_assets},
              {"max_assets", d.max_assets}};
    }
  };
  return std::visit(Visitor{}, z);
}

ProblemDescriptor DescriptorFromJson(FamilyTag family, const Json& j) {
  switch (family) {
    case FamilyTag::kShortestPath: {
      ShortestPathDesc d;
      d.grid_n = j.at("grid_n").get<int>();
      d.costs = VecFromJson(j.at("costs"));
      return d;
    }
    case FamilyTag::kMultiKnapsack: {
      KnapsackDesc d;
      d.values = VecFromJson(j.at("values"));
      d.weights = MatFromJson(j.at("weights"));
      d.capacities = VecFromJson(j.at("capacities"));
      return d;
    }
    case FamilyTag::kStochasticShortestPath: {
      StochasticSpDesc d;
      d.grid_n = j.at("grid_n").get<int>();
      d.mean = VecFromJson(j.at("mean"));
      d.variance = VecFromJson(j.at("variance"));
      d.deadline = j.at("deadline").get<double>();
      return d;
    }
    case FamilyTag::kPortfolioQp: {
      PortfolioQpDesc d;
      d.mu = VecFromJson(j.at("mu"));
      d.cov = MatFromJson(j.at("cov"));
      d.alpha = j.at("alpha").get<double>();
      return d;
    }
    case FamilyTag::kPortfolioMinlp: {
      PortfolioMinlpDesc d;
      d.mu = VecFromJson(j.at("mu"));
      d.cov = MatFromJson(j.at("cov"));
      d.coskew = MatFromJson(j.at("coskew"));
      d.x0 = VecFromJson(j.at("x0"));
      d.alpha = j.at("alpha").get<double>();
      d.beta = j.at("beta").get<double>();
      d.gamma = j.at("gamma").get<double>();
      d.f_min = j.at("f_min").get<double>();
      d.f_max = j.at("f_max").get<double>();
      d.min_assets = j.at("min_assets").get<int>();
      d.max_assets = j.at("max_assets").get<int>();
      return d;
    }
  }
  ThrowData("unknown family");
}

Json DatasetToJson(const Dataset& dataset) {
  Json instances = Json::array();
  for (const Instance& inst : dataset.instances) {
    instances.push_back({{"y", VecToJson(inst.y)}, {"z", DescriptorToJson(inst.z)}});
  }
  return {{"format", "lancer-dataset"},
          {"schema_version", kDatasetSchemaVersion},
          {"family", std::string(FamilyName(dataset.family))},
          {"seed", dataset.seed},
          {"params", ParseJson(dataset.params_json, ErrorKind::kData, "generator params")},
          {"instances", std::move(instances)}};
}

Dataset DatasetFromJson(const Json& j) {
  try {
    if (j.at("format") != "lancer-dataset") ThrowData("not a dataset document");
    if (j.at("schema_version").get<int>() != kDatasetSchemaVersion) {
      ThrowData("unsupported dataset schema version");
    }
    Dataset ds;
    ds.family = ParseFamily(j.at("family").get<std::string>());
    ds.seed = j.at("seed").get<std::uint64_t>();
    ds.params_json = j.at("params").dump();
    for (const Json& inst : j.at("instances")) {
      ds.instances.push_back(
          {VecFromJson(inst.at("y")), DescriptorFromJson(ds.family, inst.at("z"))});
    }
    ValidateDataset(ds);
    return ds;
  } catch (const Json::exception& e) {
    ThrowData(std::string("malformed dataset: ") + e.what());
  } catch (const Error& e) {
    // Unknown family names surface as config errors; in a file they are data.
    throw Error(ErrorKind::kData, e.what());
  }
}

void SaveDataset(const Dataset& dataset, const std::string& path) {
  WriteFileAtomic(path, DatasetToJson(dataset).dump() + "\n");
}

Dataset LoadDataset(const std::string& path) {
  return DatasetFromJson(ParseJson(ReadFile(path), ErrorKind::kData,
                                   "dataset '" + path + "' does not parse"));
}

namespace {

void FlattenCsv(std::string& out, std::size_t instance, const std::string& prefix,
                const Json& value) {
  if (value.is_object()) {
    for (const auto& [key, v] : value.items()) {
      FlattenCsv(out, instance, prefix.empty() ? key : prefix + "." + key, v);
    }
  } else if (value.is_array()) {
    // Matrices are flattened row-major into one index range.
    long index = 0;
    for (const Json& v : value) {
      if (v.is_array()) {
        for (const Json& w : v) {
          out += std::to_string(instance) + "," + prefix + "," +
                 std::to_string(index++) + "," + FormatDouble(w.get<double>()) + "\n";
        }
      } else {
        out += std::to_string(instance) + "," + prefix + "," +
               std::to_string(index++) + "," + FormatDouble(v.get<double>()) + "\n";
      }
    }
  } else {
    out += std::to_string(instance) + "," + prefix + ",0," +
           FormatDouble(value.get<double>()) + "\n";
  }
}

}  // namespace

std::string DatasetToCsv(const Dataset& dataset) {
  std::string out = "instance,field,index,value\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    FlattenCsv(out, i, "y", VecToJson(dataset.instances[i].y));
    FlattenCsv(out, i, "", DescriptorToJson(dataset.instances[i].z));
  }
  return out;
}

Json MlpToJsonValue(const Mlp& model) {
  return {{"format", "lancer-mlp"},
          {"version", 1},
          {"layer_sizes", model.layer_sizes()},
          {"activation", "tanh"},
          {"params", VecToJson(model.params())}};
}

Mlp MlpFromJsonValue(const Json& j) { return MlpFromJson(j.dump()); }

Json SurrogateToJson(const SurrogateModel& s) {
  return {{"c_dim", s.c_dim()},
          {"context_dim", s.context_dim()},
          {"target_mean", s.target_mean()},
          {"target_std", s.target_std()},
          {"input_mean", VecToJson(s.input_mean())},
          {"input_scale", VecToJson(s.input_scale())},
          {"net", MlpToJsonValue(s.net())}};
}

SurrogateModel SurrogateFromJson(const Json& j) {
  try {
    const int c_dim = j.at("c_dim").get<int>();
    const int ctx_dim = j.at("context_dim").get<int>();
    Mlp net = MlpFromJsonValue(j.at("net"));
    if (net.input_dim() != c_dim + ctx_dim || net.output_dim() != 1) {
      ThrowData("surrogate network shape does not match its input layout");
    }
    std::vector<int> hidden(net.layer_sizes().begin() + 1,
                            net.layer_sizes().end() - 1);
    std::mt19937_64 rng(0);
    SurrogateModel s(c_dim, ctx_dim, hidden, 1e-3, rng);
    s.net() = std::move(net);
    s.set_standardization(j.at("target_mean").get<double>(),
                          j.at("target_std").get<double>());
    s.set_input_standardization(VecFromJson(j.at("input_mean")),
                                VecFromJson(j.at("input_scale")));
    return s;
  } catch (const Json::exception& e) {
    ThrowData(std::string("malformed surrogate: ") + e.what());
  }
}

std::string HistoryToCsv(const std::vector<HistoryRow>& history,
                         const std::string& tag) {
  std::string out = "# " + tag + "\n";
  out += "iteration,buffer_size,surrogate_mse,mean_decision_loss,solver_calls\n";
  for (const HistoryRow& r : history) {
    out += std::to_string(r.iteration) + "," + std::to_string(r.buffer_size) +
           "," + FormatDouble(r.surrogate_mse) + "," +
           FormatDouble(r.mean_decision_loss) + "," +
           std::to_string(r.solver_calls) + "\n";
  }
  return out;
}

std::vector<HistoryRow> HistoryFromCsv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<HistoryRow> out;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "iteration,buffer_size,surrogate_mse,mean_decision_loss,solver_calls") {
        ThrowData("history CSV has an unexpected header");
      }
      header = true;
      continue;
    }
    HistoryRow r;
    char c1, c2, c3, c4;
    std::istringstream row(line);
    if (!(row >> r.iteration >> c1 >> r.buffer_size >> c2 >> r.surrogate_mse >>
          c3 >> r.mean_decision_loss >> c4 >> r.solver_calls)) {
      ThrowData("malformed history row: " + line);
    }
    out.push_back(r);
  }
  if (!header) ThrowData("history CSV has no header");
  return out;
}

}  // namespace lancer
