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

#include <algorithm>
#include <cstdint>
#include <utility>

#include "saf/bytes.hpp"
#include "saf/ethertype.hpp"
#include "saf/mac.hpp"

namespace saf {

inline constexpr std::size_t kFrameHeaderBytes = 14;
inline constexpr std::size_t kMinPayloadBytes = 46;
inline constexpr std::size_t kMaxPayloadBytes = 1500;
inline constexpr std::size_t kMinFrameBytes = kFrameHeaderBytes + kMinPayloadBytes;  // 60
inline constexpr std::size_t kMaxFrameBytes = kFrameHeaderBytes + kMaxPayloadBytes;  // 1514

/// Ethernet II frame: dst(6) | src(6) | ethertype(2, BE) | payload.
/// Simulated frames carry no preamble or FCS; the raw-socket path relies on
/// the NIC appending the FCS.
struct Frame {
  MacAddress dst;
  MacAddress src;
  std::uint16_t ethertype = 0;
  Bytes payload;

  std::optional<SafEtherType> saf_type() const { return to_saf_ethertype(ethertype); }
};

/// Length the frame occupies on the wire (header + payload padded to 46).
inline std::size_t wire_length(const Frame& frame) {
  return kFrameHeaderBytes + std::max(frame.payload.size(), kMinPayloadBytes);
}

inline Bytes encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxPayloadBytes) throw OversizedPayload(frame.payload.size());
  Bytes out;
  out.reserve(wire_length(frame));
  ByteWriter w(out);
  w.raw(frame.dst.octets);
  w.raw(frame.src.octets);
  w.u16(frame.ethertype);
  w.raw(frame.payload);
  if (frame.payload.size() < kMinPayloadBytes) w.zeros(kMinPayloadBytes - frame.payload.size());
  return out;
}

/// Parses the header and returns the payload with pad bytes retained; the
/// typed payload decoders strip padding via their length fields. Accepts any
/// ethertype so the caller can route foreign traffic.
inline Frame decode_frame(ByteView bytes) {
  if (bytes.size() < kMinFrameBytes) throw TruncatedFrame(bytes.size());
  Frame f;
  std::copy_n(bytes.begin(), 6, f.dst.octets.begin());
  std::copy_n(bytes.begin() + 6, 6, f.src.octets.begin());
  f.ethertype = static_cast<std::uint16_t>(bytes[12] << 8 | bytes[13]);
  f.payload.assign(bytes.begin() + kFrameHeaderBytes, bytes.end());
  return f;
}

/// Like decode_frame but rejects non-SAF ethertypes; the exception carries the
/// raw bytes since foreign traffic is reported, not fatal.
inline Frame decode_saf_frame(ByteView bytes) {
  Frame f = decode_frame(bytes);
  if (!f.saf_type()) throw UnknownEtherType(f.ethertype, Bytes(bytes.begin(), bytes.end()));
  return f;
}

}  // namespace saf
