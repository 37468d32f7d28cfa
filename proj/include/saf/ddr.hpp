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

#include <array>
#include <cstdint>
#include <map>

#include "saf/errors.hpp"

namespace saf {

/// One DDR burst word: 512 bits as eight 64-bit lanes, lane 0 holding the
/// lowest-addressed 8 bytes.
struct Word512 {
  std::array<std::uint64_t, 8> lane{};

  bool operator==(const Word512&) const = default;
};

inline constexpr std::uint64_t kArgRegionBytes = 64ull << 20;  // 64 MiB per argument
inline constexpr std::uint16_t kMaxArgRegions = 16;
inline constexpr std::uint64_t kWordBytes = sizeof(Word512::lane);  // 64

/// Sparse DDR bank partitioned into fixed 64 MiB argument regions. Addresses
/// are byte offsets relative to a region; all traffic moves 64-bit lanes, so
/// offsets must be 8-byte aligned.
class DdrMemory {
 public:
  /// Packs a byte offset into (word index, lane index) within a region.
  static constexpr std::pair<std::uint64_t, unsigned> locate(std::uint64_t byte_offset) {
    return {byte_offset / kWordBytes, static_cast<unsigned>((byte_offset % kWordBytes) / 8)};
  }

  void write_u64(std::uint16_t arg, std::uint64_t byte_offset, std::uint64_t value) {
    check(arg, byte_offset);
    auto [word, lane] = locate(byte_offset);
    words_[global_word(arg, word)].lane[lane] = value;
  }

  std::uint64_t read_u64(std::uint16_t arg, std::uint64_t byte_offset) const {
    check(arg, byte_offset);
    auto [word, lane] = locate(byte_offset);
    auto it = words_.find(global_word(arg, word));
    return it == words_.end() ? 0 : it->second.lane[lane];
  }

  std::uint64_t words_allocated() const { return words_.size(); }

  void clear() { words_.clear(); }

 private:
  static std::uint64_t global_word(std::uint16_t arg, std::uint64_t word) {
    return static_cast<std::uint64_t>(arg) * (kArgRegionBytes / kWordBytes) + word;
  }

  static void check(std::uint16_t arg, std::uint64_t byte_offset) {
    if (arg >= kMaxArgRegions) throw ConfigError("argument region index out of range");
    if (byte_offset % 8 != 0) throw ConfigError("DDR offset must be 8-byte aligned");
    if (byte_offset >= kArgRegionBytes) throw ConfigError("DDR offset beyond region");
  }

  std::map<std::uint64_t, Word512> words_;
};

}  // namespace saf
