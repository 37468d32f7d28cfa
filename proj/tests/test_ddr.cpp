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

#include "saf/ddr.hpp"
#include "saf/host.hpp"

using namespace saf;

TEST_CASE("locate maps byte offsets onto word and lane indices") {
  STATIC_REQUIRE(DdrMemory::locate(0) == std::pair<std::uint64_t, unsigned>{0, 0});
  STATIC_REQUIRE(DdrMemory::locate(8) == std::pair<std::uint64_t, unsigned>{0, 1});
  STATIC_REQUIRE(DdrMemory::locate(56) == std::pair<std::uint64_t, unsigned>{0, 7});
  STATIC_REQUIRE(DdrMemory::locate(64) == std::pair<std::uint64_t, unsigned>{1, 0});
  STATIC_REQUIRE(DdrMemory::locate(200) == std::pair<std::uint64_t, unsigned>{3, 1});
}

TEST_CASE("reads return what was written; unwritten lanes read zero") {
  DdrMemory ddr;
  REQUIRE(ddr.read_u64(0, 0) == 0);
  REQUIRE(ddr.words_allocated() == 0);
  std::mt19937_64 rng(7);
  std::map<std::uint64_t, std::uint64_t> shadow;
  for (int i = 0; i < 5000; ++i) {
    std::uint64_t off = (rng() % (kArgRegionBytes / 8)) * 8;
    std::uint64_t val = rng();
    ddr.write_u64(2, off, val);
    shadow[off] = val;
  }
  for (const auto& [off, val] : shadow) REQUIRE(ddr.read_u64(2, off) == val);
}

TEST_CASE("argument regions are isolated") {
  DdrMemory ddr;
  ddr.write_u64(0, 128, 0xAAAA);
  ddr.write_u64(1, 128, 0xBBBB);
  ddr.write_u64(15, 128, 0xCCCC);
  REQUIRE(ddr.read_u64(0, 128) == 0xAAAA);
  REQUIRE(ddr.read_u64(1, 128) == 0xBBBB);
  REQUIRE(ddr.read_u64(15, 128) == 0xCCCC);
  REQUIRE(ddr.read_u64(3, 128) == 0);
}

TEST_CASE("lanes within one word stay independent") {
  DdrMemory ddr;
  for (std::uint64_t lane = 0; lane < 8; ++lane) ddr.write_u64(0, lane * 8, lane + 100);
  REQUIRE(ddr.words_allocated() == 1);  // all eight lanes share one 512-bit word
  for (std::uint64_t lane = 0; lane < 8; ++lane) REQUIRE(ddr.read_u64(0, lane * 8) == lane + 100);
}

TEST_CASE("bounds and alignment are enforced") {
  DdrMemory ddr;
  REQUIRE_THROWS_AS(ddr.write_u64(kMaxArgRegions, 0, 1), ConfigError);
  REQUIRE_THROWS_AS(ddr.write_u64(0, 4, 1), ConfigError);
  REQUIRE_THROWS_AS(ddr.write_u64(0, kArgRegionBytes, 1), ConfigError);
  REQUIRE_THROWS_AS(ddr.read_u64(0, kArgRegionBytes + 8), ConfigError);
  REQUIRE_NOTHROW(ddr.write_u64(0, kArgRegionBytes - 8, 1));
}

TEST_CASE("clear releases every region") {
  DdrMemory ddr;
  ddr.write_u64(0, 0, 1);
  ddr.write_u64(5, 512, 2);
  ddr.clear();
  REQUIRE(ddr.words_allocated() == 0);
  REQUIRE(ddr.read_u64(0, 0) == 0);
  REQUIRE(ddr.read_u64(5, 512) == 0);
}

TEST_CASE("byte/word packing are exact inverses") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Bytes b((rng() % 64) * 8);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    auto words = words_from_bytes(b);
    REQUIRE(words.size() == b.size() / 8);
    Bytes back(b.size());
    bytes_from_words(words, 0, back);
    REQUIRE(back == b);
  }
  // Big-endian lane order: the first byte is the most significant.
  Bytes one{0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08};
  REQUIRE(words_from_bytes(one) == std::vector<std::uint64_t>{0x0102030405060708ull});
}

TEST_CASE("packing rejects ragged byte counts") {
  Bytes b(12);
  REQUIRE_THROWS_AS(words_from_bytes(b), ConfigError);
}
