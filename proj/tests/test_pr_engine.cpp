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

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "saf/pr_engine.hpp"
#include "saf/sha256.hpp"

using namespace saf;

namespace {

Bytes pattern_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

struct Chunk {
  std::uint64_t offset;
  ByteView data;
};

std::vector<Chunk> split(const Bytes& blob, std::size_t chunk) {
  std::vector<Chunk> out;
  for (std::size_t off = 0; off < blob.size(); off += chunk) {
    std::size_t n = std::min(chunk, blob.size() - off);
    out.push_back({off, ByteView(blob).subspan(off, n)});
  }
  return out;
}

}  // namespace

TEST_CASE("in-order stream hashes to the whole-blob digest") {
  Bytes blob = pattern_bytes(10'000, 1);
  PrEngine eng;
  for (const Chunk& c : split(blob, 1024)) {
    auto r = eng.feed(c.offset, blob.size(), c.data);
    REQUIRE(r == PrEngine::Accept::Consumed);
  }
  REQUIRE(eng.done());
  REQUIRE(eng.hashed_upto() == blob.size());
  REQUIRE(eng.pending_chunks() == 0);
  REQUIRE(*eng.digest() == Sha256::of(blob));
}

TEST_CASE("any chunk permutation completes with the same digest") {
  Bytes blob = pattern_bytes(64 * 257 + 13, 2);  // last chunk is short
  auto chunks = split(blob, 64);
  Digest256 want = Sha256::of(blob);
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(chunks.begin(), chunks.end(), rng);
    PrEngine eng(chunks.size());  // window large enough for a full reversal
    bool completed = false;
    for (const Chunk& c : chunks) {
      REQUIRE_FALSE(completed);  // completion only after the last piece lands
      eng.feed(c.offset, blob.size(), c.data);
      completed = eng.done();
    }
    REQUIRE(completed);
    REQUIRE(*eng.digest() == want);
  }
}

TEST_CASE("duplicates below the frontier are reported and harmless") {
  Bytes blob = pattern_bytes(4096, 3);
  auto chunks = split(blob, 512);
  PrEngine eng;
  eng.feed(chunks[0].offset, blob.size(), chunks[0].data);
  eng.feed(chunks[1].offset, blob.size(), chunks[1].data);
  REQUIRE(eng.feed(chunks[1].offset, blob.size(), chunks[1].data) ==
          PrEngine::Accept::Duplicate);
  for (std::size_t i = 2; i < chunks.size(); ++i)
    eng.feed(chunks[i].offset, blob.size(), chunks[i].data);
  REQUIRE(*eng.digest() == Sha256::of(blob));
}

TEST_CASE("a chunk straddling the frontier is clipped, not double-hashed") {
  Bytes blob = pattern_bytes(300, 4);
  PrEngine eng;
  ByteView v(blob);
  eng.feed(0, blob.size(), v.subspan(0, 200));
  // Overlapping resend covering [100, 300): only [200, 300) is new.
  auto r = eng.feed(100, blob.size(), v.subspan(100, 200));
  REQUIRE(r == PrEngine::Accept::Consumed);
  REQUIRE(eng.done());
  REQUIRE(*eng.digest() == Sha256::of(blob));
}

TEST_CASE("the reorder window is bounded and drops the newest chunk") {
  Bytes blob = pattern_bytes(8 * 64, 5);
  auto chunks = split(blob, 64);
  PrEngine eng(2);
  // Hold back chunk 0 so everything else lands ahead of the frontier.
  REQUIRE(eng.feed(chunks[1].offset, blob.size(), chunks[1].data) ==
          PrEngine::Accept::Buffered);
  REQUIRE(eng.feed(chunks[2].offset, blob.size(), chunks[2].data) ==
          PrEngine::Accept::Buffered);
  REQUIRE(eng.feed(chunks[3].offset, blob.size(), chunks[3].data) ==
          PrEngine::Accept::WindowFull);
  // A re-send of an already-buffered offset is not a new window entry.
  REQUIRE(eng.feed(chunks[2].offset, blob.size(), chunks[2].data) ==
          PrEngine::Accept::Buffered);
  REQUIRE(eng.pending_chunks() == 2);
  // Filling the gap drains the window; the dropped chunk must be re-sent.
  eng.feed(chunks[0].offset, blob.size(), chunks[0].data);
  REQUIRE(eng.hashed_upto() == chunks[3].offset);
  for (std::size_t i = 3; i < chunks.size(); ++i)
    eng.feed(chunks[i].offset, blob.size(), chunks[i].data);
  REQUIRE(*eng.digest() == Sha256::of(blob));
}

TEST_CASE("a nonzero-offset chunk joins a stream implicitly") {
  Bytes blob = pattern_bytes(1024, 6);
  PrEngine eng;
  REQUIRE_FALSE(eng.active());
  auto r = eng.feed(512, blob.size(), ByteView(blob).subspan(512));
  REQUIRE(r == PrEngine::Accept::Buffered);
  REQUIRE(eng.active());
  REQUIRE(eng.hashed_upto() == 0);
  eng.feed(0, blob.size(), ByteView(blob).subspan(0, 512));
  REQUIRE(eng.done());
  REQUIRE(*eng.digest() == Sha256::of(blob));
}

TEST_CASE("a duplicate first chunk does not wipe buffered progress") {
  Bytes blob = pattern_bytes(3 * 100, 7);
  auto chunks = split(blob, 100);
  PrEngine eng;
  eng.feed(chunks[0].offset, blob.size(), chunks[0].data);
  eng.feed(chunks[2].offset, blob.size(), chunks[2].data);
  REQUIRE(eng.pending_chunks() == 1);
  // Retransmitted chunk 0 for the same stream: a duplicate, not a restart.
  REQUIRE(eng.feed(chunks[0].offset, blob.size(), chunks[0].data) ==
          PrEngine::Accept::Duplicate);
  REQUIRE(eng.pending_chunks() == 1);
  REQUIRE(eng.hashed_upto() == 100);
  eng.feed(chunks[1].offset, blob.size(), chunks[1].data);
  REQUIRE(*eng.digest() == Sha256::of(blob));
}

TEST_CASE("a zero-offset chunk with a new total length restarts the stream") {
  Bytes first = pattern_bytes(500, 8);
  Bytes second = pattern_bytes(200, 9);
  PrEngine eng;
  eng.feed(0, first.size(), ByteView(first).subspan(0, 250));
  REQUIRE(eng.active());
  REQUIRE_FALSE(eng.done());
  // New stream: different total length, offset zero.
  eng.feed(0, second.size(), second);
  REQUIRE(eng.done());
  REQUIRE(eng.total_len() == second.size());
  REQUIRE(*eng.digest() == Sha256::of(second));
}

TEST_CASE("reprogramming after completion starts fresh even at the same length") {
  Bytes a = pattern_bytes(128, 10);
  Bytes b = pattern_bytes(128, 11);
  PrEngine eng;
  eng.feed(0, a.size(), a);
  REQUIRE(*eng.digest() == Sha256::of(a));
  // Same total_len, but the previous stream is done, so this is a restart.
  eng.feed(0, b.size(), b);
  REQUIRE(*eng.digest() == Sha256::of(b));
}

TEST_CASE("mid-stream length disagreement is rejected without side effects") {
  Bytes blob = pattern_bytes(400, 12);
  PrEngine eng;
  eng.feed(0, blob.size(), ByteView(blob).subspan(0, 100));
  auto r = eng.feed(100, 9999, ByteView(blob).subspan(100, 100));
  REQUIRE(r == PrEngine::Accept::TotalMismatch);
  REQUIRE(eng.total_len() == blob.size());
  REQUIRE(eng.hashed_upto() == 100);
  for (std::size_t off = 100; off < blob.size(); off += 100)
    eng.feed(off, blob.size(), ByteView(blob).subspan(off, 100));
  REQUIRE(*eng.digest() == Sha256::of(blob));
}

TEST_CASE("empty stream completes immediately") {
  PrEngine eng;
  eng.feed(0, 0, ByteView{});
  REQUIRE(eng.done());
  REQUIRE(*eng.digest() == Sha256::of(ByteView{}));
}
