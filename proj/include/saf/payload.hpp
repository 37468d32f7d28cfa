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
#include <variant>
#include <vector>

#include "saf/frame.hpp"

namespace saf {

// Typed payload layouts. All multi-byte integers are big-endian. Variable
// parts carry explicit length fields so decoders can strip frame padding.

/// Announced by a device on its first inbound frame after link-up. mac0 is
/// the channel the device answers on and must equal the frame's source MAC;
/// mac1 is the second MAC channel, carried but unused.
struct DiscoveryPayload {
  MacAddress mac0;
  MacAddress mac1;
  std::uint16_t vendor_id = 0;
  std::uint16_t product_id = 0;

  bool operator==(const DiscoveryPayload&) const = default;
};

/// One slice of a bitstream. Every chunk repeats (offset, total_len) so
/// reassembly is stateless and reorder-tolerant.
struct PrChunkPayload {
  std::uint64_t offset = 0;
  std::uint64_t total_len = 0;
  Bytes data;

  bool operator==(const PrChunkPayload&) const = default;
};

inline constexpr std::size_t kPrChunkMaxData = 1024;

struct PrAckPayload {
  std::uint8_t status = 0;  // 0 = success
  std::array<std::uint8_t, 32> digest{};

  bool operator==(const PrAckPayload&) const = default;
};

/// Kernel argument words bound for DDR. offset is a byte offset into the
/// argument's region and must be 8-aligned.
struct MemWritePayload {
  std::uint16_t arg = 0;
  std::uint64_t offset = 0;
  std::uint64_t total_len = 0;
  std::vector<std::uint64_t> words;

  bool operator==(const MemWritePayload&) const = default;
};

struct MemAckPayload {
  std::uint16_t arg = 0;
  std::uint8_t status = 0;

  bool operator==(const MemAckPayload&) const = default;
};

struct KernelCmdPayload {
  std::uint64_t addr = 0;
  std::uint64_t data = 0;

  bool operator==(const KernelCmdPayload&) const = default;
};

/// Application kernel output. A frame with total_len == 0 is a status frame:
/// words[0] (when present) carries a nonzero kernel fault code.
struct OutputChunkPayload {
  std::uint64_t offset = 0;
  std::uint64_t total_len = 0;
  std::vector<std::uint64_t> words;

  bool operator==(const OutputChunkPayload&) const = default;
};

/// 0x80EE host probe; no payload fields. Any inbound frame arms a device's
/// discovery FSM, the probe just guarantees one exists.
struct HostProbePayload {
  bool operator==(const HostProbePayload&) const = default;
};

using AnyPayload = std::variant<DiscoveryPayload, PrChunkPayload, PrAckPayload, MemWritePayload, MemAckPayload, KernelCmdPayload,
                                OutputChunkPayload, HostProbePayload>;

// ---- encoders ---------------------------------------------------------------

inline Bytes encode_payload(const DiscoveryPayload& p) {
  Bytes out;
  ByteWriter w(out);
  w.raw(p.mac0.octets);
  w.raw(p.mac1.octets);
  w.u16(p.vendor_id);
  w.u16(p.product_id);
  return out;
}

inline Bytes encode_payload(const PrChunkPayload& p) {
  if (p.data.size() > kPrChunkMaxData)
    throw MalformedPayload("data", "chunk exceeds 1024 bytes");
  if (p.offset + p.data.size() > p.total_len)
    throw MalformedPayload("offset", "offset + data length exceeds total_len");
  Bytes out;
  ByteWriter w(out);
  w.u64(p.offset);
  w.u64(p.total_len);
  w.u16(static_cast<std::uint16_t>(p.data.size()));
  w.raw(p.data);
  return out;
}

inline Bytes encode_payload(const PrAckPayload& p) {
  Bytes out;
  ByteWriter w(out);
  w.u8(p.status);
  w.raw(p.digest);
  return out;
}

inline Bytes encode_payload(const MemWritePayload& p) {
  if (p.offset % 8 != 0) throw MalformedPayload("offset", "not a multiple of 8");
  if (p.offset + 8 * p.words.size() > p.total_len)
    throw MalformedPayload("words", "offset + 8*count exceeds total_len");
  Bytes out;
  ByteWriter w(out);
  w.u16(p.arg);
  w.u64(p.offset);
  w.u64(p.total_len);
  w.u16(static_cast<std::uint16_t>(p.words.size()));
  for (auto word : p.words) w.u64(word);
  return out;
}

inline Bytes encode_payload(const MemAckPayload& p) {
  Bytes out;
  ByteWriter w(out);
  w.u16(p.arg);
  w.u8(p.status);
  return out;
}

inline Bytes encode_payload(const KernelCmdPayload& p) {
  Bytes out;
  ByteWriter w(out);
  w.u64(p.addr);
  w.u64(p.data);
  return out;
}

inline Bytes encode_payload(const OutputChunkPayload& p) {
  Bytes out;
  ByteWriter w(out);
  w.u64(p.offset);
  w.u64(p.total_len);
  w.u16(static_cast<std::uint16_t>(p.words.size()));
  for (auto word : p.words) w.u64(word);
  return out;
}

inline Bytes encode_payload(const HostProbePayload&) { return Bytes{}; }

// ---- decoders ---------------------------------------------------------------

inline DiscoveryPayload decode_discovery(ByteView bytes) {
  ByteReader r(bytes);
  DiscoveryPayload p;
  auto m0 = r.raw(6, "mac0");
  auto m1 = r.raw(6, "mac1");
  std::copy_n(m0.begin(), 6, p.mac0.octets.begin());
  std::copy_n(m1.begin(), 6, p.mac1.octets.begin());
  p.vendor_id = r.u16("vendor_id");
  p.product_id = r.u16("product_id");
  return p;
}

inline PrChunkPayload decode_pr_chunk(ByteView bytes) {
  ByteReader r(bytes);
  PrChunkPayload p;
  p.offset = r.u64("offset");
  p.total_len = r.u64("total_len");
  std::uint16_t len = r.u16("data_len");
  if (len > kPrChunkMaxData) throw MalformedPayload("data_len", "chunk exceeds 1024 bytes");
  p.data = r.raw(len, "data");
  if (p.offset + p.data.size() > p.total_len)
    throw MalformedPayload("offset", "offset + data length exceeds total_len");
  return p;
}

inline PrAckPayload decode_pr_ack(ByteView bytes) {
  ByteReader r(bytes);
  PrAckPayload p;
  p.status = r.u8("status");
  auto d = r.raw(32, "digest");
  std::copy_n(d.begin(), 32, p.digest.begin());
  return p;
}

inline MemWritePayload decode_mem_write(ByteView bytes) {
  ByteReader r(bytes);
  MemWritePayload p;
  p.arg = r.u16("arg");
  p.offset = r.u64("offset");
  p.total_len = r.u64("total_len");
  if (p.offset % 8 != 0) throw MalformedPayload("offset", "not a multiple of 8");
  std::uint16_t count = r.u16("word_count");
  p.words.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) p.words.push_back(r.u64("words"));
  if (p.offset + 8 * p.words.size() > p.total_len)
    throw MalformedPayload("words", "offset + 8*count exceeds total_len");
  return p;
}

inline MemAckPayload decode_mem_ack(ByteView bytes) {
  ByteReader r(bytes);
  MemAckPayload p;
  p.arg = r.u16("arg");
  p.status = r.u8("status");
  return p;
}

inline KernelCmdPayload decode_kernel_cmd(ByteView bytes) {
  ByteReader r(bytes);
  KernelCmdPayload p;
  p.addr = r.u64("addr");
  p.data = r.u64("data");
  return p;
}

inline OutputChunkPayload decode_output_chunk(ByteView bytes) {
  ByteReader r(bytes);
  OutputChunkPayload p;
  p.offset = r.u64("offset");
  p.total_len = r.u64("total_len");
  std::uint16_t count = r.u16("word_count");
  p.words.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) p.words.push_back(r.u64("words"));
  return p;
}

/// Exhaustive dispatch over all eight SAF ethertypes.
inline AnyPayload decode_payload(SafEtherType type, ByteView bytes) {
  switch (type) {
    case SafEtherType::Discovery:
      return decode_discovery(bytes);
    case SafEtherType::PrChunk:
      return decode_pr_chunk(bytes);
    case SafEtherType::PrAck:
      return decode_pr_ack(bytes);
    case SafEtherType::MemWrite:
      return decode_mem_write(bytes);
    case SafEtherType::MemAck:
      return decode_mem_ack(bytes);
    case SafEtherType::KernelCmd:
      return decode_kernel_cmd(bytes);
    case SafEtherType::OutputChunk:
      return decode_output_chunk(bytes);
    case SafEtherType::HostProbe:
      return HostProbePayload{};
  }
  throw MalformedPayload("ethertype", "unreachable");
}

template <class Payload>
constexpr SafEtherType ethertype_of() {
  if constexpr (std::is_same_v<Payload, DiscoveryPayload>) return SafEtherType::Discovery;
  if constexpr (std::is_same_v<Payload, PrChunkPayload>) return SafEtherType::PrChunk;
  if constexpr (std::is_same_v<Payload, PrAckPayload>) return SafEtherType::PrAck;
  if constexpr (std::is_same_v<Payload, MemWritePayload>) return SafEtherType::MemWrite;
  if constexpr (std::is_same_v<Payload, MemAckPayload>) return SafEtherType::MemAck;
  if constexpr (std::is_same_v<Payload, KernelCmdPayload>) return SafEtherType::KernelCmd;
  if constexpr (std::is_same_v<Payload, OutputChunkPayload>) return SafEtherType::OutputChunk;
  if constexpr (std::is_same_v<Payload, HostProbePayload>) return SafEtherType::HostProbe;
}

/// Builds a frame around a typed payload.
template <class Payload>
Frame make_frame(const MacAddress& dst, const MacAddress& src, const Payload& payload) {
  Frame f;
  f.dst = dst;
  f.src = src;
  f.ethertype = static_cast<std::uint16_t>(ethertype_of<Payload>());
  f.payload = encode_payload(payload);
  return f;
}

}  // namespace saf
