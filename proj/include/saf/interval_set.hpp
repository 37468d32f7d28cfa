/*
 * Copyright 2026 The saf-emu authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <map>

namespace saf {

/// Coalescing set of half-open byte intervals [start, end). Used to decide
/// when a chunked transfer has full coverage; duplicates and overlaps are
/// absorbed, so retried chunks are idempotent.
class IntervalSet {
 public:
  void add(std::uint64_t start, std::uint64_t end) {
    if (start >= end) return;
    auto it = spans_.upper_bound(start);
    if (it != spans_.begin()) {
      auto prev = std::prev(it);
      if (prev->second >= start) {
        start = prev->first;
        end = std::max(end, prev->second);
        it = spans_.erase(prev);
      }
    }
    while (it != spans_.end() && it->first <= end) {
      end = std::max(end, it->second);
      it = spans_.erase(it);
    }
    spans_.emplace(start, end);
  }

  /// True when [0, total) is fully covered.
  bool covers(std::uint64_t total) const {
    if (total == 0) return true;
    auto it = spans_.find(0);
    return it != spans_.end() && it->second >= total;
  }

  /// Total bytes covered.
  std::uint64_t covered_bytes() const {
    std::uint64_t sum = 0;
    for (const auto& [s, e] : spans_) sum += e - s;
    return sum;
  }

  std::size_t span_count() const { return spans_.size(); }

  bool empty() const { return spans_.empty(); }
  void clear() { spans_.clear(); }

 private:
  std::map<std::uint64_t, std::uint64_t> spans_;
};

}  // namespace saf
