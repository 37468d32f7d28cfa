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
#include <optional>
#include <string>

namespace saf {

/// The eight SAF ethertypes. Big-endian 16-bit value on the wire.
enum class SafEtherType : std::uint16_t {
  Discovery = 0x80EF,    ///< device -> host: MAC addresses + vendor/product IDs
  PrChunk = 0x80AA,      ///< host -> device: bitstream data
  PrAck = 0x80AB,        ///< device -> host: reconfiguration acknowledgement
  MemWrite = 0x80DD,     ///< host -> device: kernel argument data for DDR
  MemAck = 0x80DB,       ///< device -> host: input data read acknowledgement
  KernelCmd = 0x80CC,    ///< host -> device: kernel execution command
  OutputChunk = 0x80CB,  ///< device -> host: application kernel output
  HostProbe = 0x80EE,    ///< host -> device: discovery trigger broadcast
};

inline std::optional<SafEtherType> to_saf_ethertype(std::uint16_t value) {
  switch (value) {
    case 0x80EF:
    case 0x80AA:
    case 0x80AB:
    case 0x80DD:
    case 0x80DB:
    case 0x80CC:
    case 0x80CB:
    case 0x80EE:
      return static_cast<SafEtherType>(value);
    default:
      return std::nullopt;
  }
}

inline const char* to_string(SafEtherType t) {
  switch (t) {
    case SafEtherType::Discovery:
      return "discovery";
    case SafEtherType::PrChunk:
      return "pr-chunk";
    case SafEtherType::PrAck:
      return "pr-ack";
    case SafEtherType::MemWrite:
      return "mem-write";
    case SafEtherType::MemAck:
      return "mem-ack";
    case SafEtherType::KernelCmd:
      return "kernel-cmd";
    case SafEtherType::OutputChunk:
      return "output-chunk";
    case SafEtherType::HostProbe:
      return "host-probe";
  }
  return "?";
}

}  // namespace saf
