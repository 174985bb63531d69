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

#ifndef LANCER_CORE_TYPES_HPP_
#define LANCER_CORE_TYPES_HPP_

#include <Eigen/Dense>

namespace lancer {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Output of a solver call. `x` always carries the decision vector that the
// surrogate cost multiplies (edge indicators, item selections, allocations);
// `v` holds the binary part for families that have one.
struct Solution {
  Vec x;
  Eigen::VectorXi v;
  double objective_surrogate = 0.0;
};

}  // namespace lancer

#endif  // LANCER_CORE_TYPES_HPP_
