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

#include "saf/bytes.hpp"

namespace saf {

// Ethernet frame check sequence: CRC-32 with the reflected 0xEDB88320
// polynomial, init 0xFFFFFFFF, final xor 0xFFFFFFFF. Under this convention
// fcs32("") == 0x00000000 and fcs32("123456789") == 0xCBF43926. The FCS is
// appended little-endian; re-checking data + FCS yields kFcsResidue.
// Only the raw-socket path ever needs this; simulated frames carry no FCS.

inline constexpr std::uint32_t kFcsResidue = 0x2144DF1C;

namespace detail {
inline const std::array<std::uint32_t, 256>& fcs_table() {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c >> 1) ^ ((c & 1) ? 0xEDB88320u : 0u);
      t[i] = c;
    }
    return t;
  }();
  return table;
}
}  // namespace detail

inline std::uint32_t fcs32(ByteView bytes) {
  const auto& table = detail::fcs_table();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::uint8_t b : bytes) crc = (crc >> 8) ^ table[(crc ^ b) & 0xFF];
  return crc ^ 0xFFFFFFFFu;
}

/// Appends the little-endian FCS, matching the on-wire Ethernet order.
inline void append_fcs(Bytes& bytes) {
  std::uint32_t crc = fcs32(bytes);
  for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
}

/// True when the trailing 4 bytes are a valid FCS for the preceding data.
inline bool check_fcs(ByteView bytes) {
  if (bytes.size() < 4) return false;
  return fcs32(bytes) == kFcsResidue;
}

}  // namespace saf
