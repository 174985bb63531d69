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

#ifndef LANCER_CORE_REPLAY_BUFFER_HPP_
#define LANCER_CORE_REPLAY_BUFFER_HPP_

#include <deque>

#include "core/types.hpp"

namespace lancer {

// Accumulated (c_hat, context, f_hat) evaluations. Entries are immutable once
// appended; a positive capacity turns the buffer into a FIFO.
class ReplayBuffer {
 public:
  struct Entry {
    Vec c;
    Vec context;
    double f;
  };

  explicit ReplayBuffer(long capacity = 0) : capacity_(capacity) {}

  void Append(Vec c, Vec context, double f);

  long size() const { return static_cast<long>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  long capacity() const { return capacity_; }
  const Entry& operator[](long i) const { return entries_[i]; }

  // Columns are [c; context] per entry.
  Mat Inputs() const;
  Vec Targets() const;

 private:
  long capacity_;
  std::deque<Entry> entries_;
};

}  // namespace lancer

#endif  // LANCER_CORE_REPLAY_BUFFER_HPP_
