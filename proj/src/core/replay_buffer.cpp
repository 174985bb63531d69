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

#include "core/replay_buffer.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace lancer {

void ReplayBuffer::Append(Vec c, Vec context, double f) {
  if (!std::isfinite(f)) ThrowNumerical("replay buffer entries must be finite");
  if (!entries_.empty()) {
    CheckDim("buffer cost width", c.size(), entries_.front().c.size());
    CheckDim("buffer context width", context.size(),
             entries_.front().context.size());
  }
  entries_.push_back({std::move(c), std::move(context), f});
  if (capacity_ > 0 && size() > capacity_) entries_.pop_front();
}

Mat ReplayBuffer::Inputs() const {
  if (entries_.empty()) return Mat();
  const long dc = entries_.front().c.size();
  const long dx = entries_.front().context.size();
  Mat out(dc + dx, size());
  for (long i = 0; i < size(); ++i) {
    out.col(i).head(dc) = entries_[i].c;
    out.col(i).tail(dx) = entries_[i].context;
  }
  return out;
}

Vec ReplayBuffer::Targets() const {
  Vec out(size());
  for (long i = 0; i < size(); ++i) out[i] = entries_[i].f;
  return out;
}

}  // namespace lancer
