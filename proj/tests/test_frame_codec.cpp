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

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "golden_frames.hpp"
#include "saf/payload.hpp"

using namespace saf;

namespace {

const MacAddress kHost = MacAddress::parse("02:53:41:46:aa:01");
const MacAddress kDev = MacAddress::parse("02:53:41:46:00:01");
const MacAddress kDevB = MacAddress::parse("02:53:41:46:80:01");

template <std::size_t N>
Bytes golden(const unsigned char (&arr)[N]) {
  return Bytes(arr, arr + N);
}

}  // namespace

// ---- golden wire images -------------------------------------------------------

TEST_CASE("golden: discovery") {
  DiscoveryPayload p{kDev, kDevB, 0x1172, 0x0385};
  REQUIRE(encode_frame(make_frame(MacAddress::broadcast(), kDev, p)) ==
          golden(k_golden_discovery));
}

TEST_CASE("golden: pr chunk") {
  PrChunkPayload p;
  p.offset = 2048;
  p.total_len = 97'400'000;
  for (int i = 0; i < 16; ++i) p.data.push_back(static_cast<std::uint8_t>(i));
  REQUIRE(encode_frame(make_frame(kDev, kHost, p)) == golden(k_golden_pr_chunk));
}

TEST_CASE("golden: pr ack") {
  PrAckPayload p;
  p.status = 0;
  for (int i = 0; i < 32; ++i) p.digest[i] = static_cast<std::uint8_t>(i);
  REQUIRE(encode_frame(make_frame(kHost, kDev, p)) == golden(k_golden_pr_ack));
}

TEST_CASE("golden: mem write") {
  MemWritePayload p;
  p.arg = 1;
  p.offset = 8;
  p.total_len = 32;
  p.words = {0x1122334455667788ull, 0xA0A1A2A3A4A5A6A7ull};
  REQUIRE(encode_frame(make_frame(kDev, kHost, p)) == golden(k_golden_mem_write));
}

TEST_CASE("golden: mem ack") {
  MemAckPayload p{1, 0};
  REQUIRE(encode_frame(make_frame(kHost, kDev, p)) == golden(k_golden_mem_ack));
}

TEST_CASE("golden: kernel cmd") {
  KernelCmdPayload p{0x100, (512ull << 32) | 128};
  REQUIRE(encode_frame(make_frame(kDev, kHost, p)) == golden(k_golden_kernel_cmd));
}

TEST_CASE("golden: output chunk") {
  OutputChunkPayload p;
  p.offset = 16;
  p.total_len = 48;
  p.words = {1, 2};
  REQUIRE(encode_frame(make_frame(kHost, kDev, p)) == golden(k_golden_output_chunk));
}

TEST_CASE("golden: host probe") {
  REQUIRE(encode_frame(make_frame(MacAddress::broadcast(), kHost, HostProbePayload{})) ==
          golden(k_golden_host_probe));
}

TEST_CASE("golden frames decode back to the original payloads") {
  Frame f = decode_saf_frame(golden(k_golden_pr_chunk));
  REQUIRE(f.saf_type() == SafEtherType::PrChunk);
  PrChunkPayload p = decode_pr_chunk(f.payload);
  REQUIRE(p.offset == 2048);
  REQUIRE(p.total_len == 97'400'000);
  REQUIRE(p.data.size() == 16);
  REQUIRE(p.data[15] == 0x0F);

  Frame d = decode_saf_frame(golden(k_golden_discovery));
  DiscoveryPayload dp = decode_discovery(d.payload);
  REQUIRE(dp.mac0 == kDev);
  REQUIRE(dp.mac1 == kDevB);
  REQUIRE(dp.vendor_id == 0x1172);
  REQUIRE(dp.product_id == 0x0385);

  Frame k = decode_saf_frame(golden(k_golden_kernel_cmd));
  KernelCmdPayload kp = decode_kernel_cmd(k.payload);
  REQUIRE(kp.addr == 0x100);
  REQUIRE(kp.data == ((512ull << 32) | 128));
}

// ---- framing rules --------------------------------------------------------------

TEST_CASE("short payloads are zero-padded to the 60-byte minimum") {
  Frame f = make_frame(kHost, kDev, MemAckPayload{3, 1});
  Bytes wire = encode_frame(f);
  REQUIRE(wire.size() == kMinFrameBytes);
  Frame back = decode_frame(wire);
  REQUIRE(back.payload.size() == kMinPayloadBytes);  // padding preserved on raw decode
  MemAckPayload p = decode_mem_ack(back.payload);    // typed decode strips it
  REQUIRE(p.arg == 3);
  REQUIRE(p.status == 1);
}

TEST_CASE("payload size limits") {
  Frame f;
  f.dst = kHost;
  f.src = kDev;
  f.ethertype = 0x80AA;
  f.payload.assign(kMaxPayloadBytes, 0x5A);
  REQUIRE(encode_frame(f).size() == kMaxFrameBytes);
  f.payload.push_back(0);
  REQUIRE_THROWS_AS(encode_frame(f), OversizedPayload);
}

TEST_CASE("truncated frames are rejected") {
  Bytes wire = golden(k_golden_mem_ack);
  wire.resize(kMinFrameBytes - 1);
  REQUIRE_THROWS_AS(decode_frame(wire), TruncatedFrame);
  REQUIRE_THROWS_AS(decode_frame(Bytes{}), TruncatedFrame);
}

TEST_CASE("unknown ethertype keeps the raw bytes") {
  Bytes wire = golden(k_golden_host_probe);
  wire[12] = 0x08;  // 0x0800, not ours
  wire[13] = 0x00;
  REQUIRE_NOTHROW(decode_frame(wire));  // raw decode accepts any ethertype
  try {
    decode_saf_frame(wire);
    FAIL("expected UnknownEtherType");
  } catch (const UnknownEtherType& e) {
    REQUIRE(e.ethertype() == 0x0800);
    REQUIRE(Bytes(e.raw_bytes().begin(), e.raw_bytes().end()) == wire);
  }
}

TEST_CASE("malformed payloads name the offending field") {
  // PrChunk whose declared data length runs past the payload.
  Bytes payload;
  ByteWriter w(payload);
  w.u64(0);
  w.u64(1024);
  w.u16(512);
  w.zeros(4);  // claims 512 data bytes, provides 4
  REQUIRE_THROWS_AS(decode_pr_chunk(payload), MalformedPayload);

  // MemWrite with an unaligned offset.
  Bytes mw;
  ByteWriter w2(mw);
  w2.u16(0);
  w2.u64(4);
  w2.u64(64);
  w2.u16(0);
  REQUIRE_THROWS_AS(decode_mem_write(mw), MalformedPayload);
}

TEST_CASE("encode validates chunk geometry") {
  PrChunkPayload p;
  p.offset = 8;
  p.total_len = 16;
  p.data.assign(16, 0);  // 8 + 16 > 16
  REQUIRE_THROWS_AS(encode_payload(p), MalformedPayload);
  p.data.assign(kPrChunkMaxData + 1, 0);
  p.total_len = 1 << 20;
  REQUIRE_THROWS_AS(encode_payload(p), MalformedPayload);
}

// ---- randomized roundtrips -------------------------------------------------------

namespace {

constexpr int kTrials = 10'000;

MacAddress random_mac(std::mt19937_64& rng) {
  MacAddress m;
  for (auto& o : m.octets) o = static_cast<std::uint8_t>(rng());
  m.octets[0] &= 0xFE;  // keep it unicast so dst/src stay plausible
  return m;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

std::vector<std::uint64_t> random_words(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint64_t> w(n);
  for (auto& x : w) x = rng();
  return w;
}

template <class Payload>
void roundtrip(const Payload& p, std::mt19937_64& rng) {
  Frame f = make_frame(random_mac(rng), random_mac(rng), p);
  Bytes wire = encode_frame(f);
  Frame back = decode_saf_frame(wire);
  REQUIRE(back.dst == f.dst);
  REQUIRE(back.src == f.src);
  REQUIRE(back.ethertype == f.ethertype);
  AnyPayload any = decode_payload(*back.saf_type(), back.payload);
  REQUIRE(std::get<Payload>(any) == p);
}

}  // namespace

TEST_CASE("roundtrip property: discovery") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < kTrials; ++i) {
    DiscoveryPayload p{random_mac(rng), random_mac(rng), static_cast<std::uint16_t>(rng()),
                       static_cast<std::uint16_t>(rng())};
    roundtrip(p, rng);
  }
}

TEST_CASE("roundtrip property: pr chunk") {
  std::mt19937_64 rng(102);
  for (int i = 0; i < kTrials; ++i) {
    PrChunkPayload p;
    p.data = random_bytes(rng, rng() % (kPrChunkMaxData + 1));
    p.offset = rng() % (1ull << 40);
    p.total_len = p.offset + p.data.size() + rng() % (1ull << 30);
    roundtrip(p, rng);
  }
}

TEST_CASE("roundtrip property: pr ack") {
  std::mt19937_64 rng(103);
  for (int i = 0; i < kTrials; ++i) {
    PrAckPayload p;
    p.status = static_cast<std::uint8_t>(rng());
    for (auto& b : p.digest) b = static_cast<std::uint8_t>(rng());
    roundtrip(p, rng);
  }
}

TEST_CASE("roundtrip property: mem write") {
  std::mt19937_64 rng(104);
  for (int i = 0; i < kTrials; ++i) {
    MemWritePayload p;
    p.arg = static_cast<std::uint16_t>(rng() % 16);
    p.words = random_words(rng, rng() % 186);
    p.offset = (rng() % (1ull << 20)) * 8;
    p.total_len = p.offset + 8 * p.words.size() + 8 * (rng() % 1024);
    roundtrip(p, rng);
  }
}

TEST_CASE("roundtrip property: mem ack") {
  std::mt19937_64 rng(105);
  for (int i = 0; i < kTrials; ++i) {
    MemAckPayload p{static_cast<std::uint16_t>(rng()), static_cast<std::uint8_t>(rng())};
    roundtrip(p, rng);
  }
}

TEST_CASE("roundtrip property: kernel cmd") {
  std::mt19937_64 rng(106);
  for (int i = 0; i < kTrials; ++i) {
    KernelCmdPayload p{rng(), rng()};
    roundtrip(p, rng);
  }
}

TEST_CASE("roundtrip property: output chunk") {
  std::mt19937_64 rng(107);
  for (int i = 0; i < kTrials; ++i) {
    OutputChunkPayload p;
    p.words = random_words(rng, rng() % 186);
    p.offset = (rng() % (1ull << 20)) * 8;
    p.total_len = p.offset + 8 * p.words.size() + 8 * (rng() % 1024);
    roundtrip(p, rng);
  }
}

TEST_CASE("roundtrip property: host probe") {
  std::mt19937_64 rng(108);
  for (int i = 0; i < kTrials; ++i) roundtrip(HostProbePayload{}, rng);
}
