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
#include <optional>

#include "saf/bytes.hpp"
#include "saf/sha256.hpp"

namespace saf {

/// Reassembles a partial-reconfiguration byte stream from chunks that may
/// arrive out of order or duplicated, hashing incrementally so the bitstream
/// itself is never buffered. A chunk at offset zero begins a new stream.
/// Out-of-order chunks wait in a bounded reorder window; when the window is
/// full the newest chunk is discarded (the sender retries missing ranges).
class PrEngine {
 public:
  enum class Accept {
    Consumed,       ///< hashed now (possibly after clipping a duplicate prefix)
    Buffered,       ///< ahead of the contiguous frontier, held for later
    Duplicate,      ///< fully below the frontier, nothing new
    WindowFull,     ///< reorder window exhausted, chunk discarded
    TotalMismatch,  ///< stream length disagrees with the active stream
  };

  explicit PrEngine(std::size_t max_pending_chunks = 1024)
      : max_pending_(max_pending_chunks) {}

  /// Feeds one chunk. Completion is observable via done()/digest().
  Accept feed(std::uint64_t offset, std::uint64_t total_len, ByteView data) {
    // A zero-offset chunk opens a fresh stream unless one with the same total
    // length is already in flight (then it is a retransmission and must not
    // discard buffered chunks). A nonzero-offset chunk with no stream active
    // opens one implicitly (joining mid-stream), leaving the missing prefix
    // for the sender to retry.
    bool in_flight = active_ && !done_ && total_len == total_len_;
    if (!active_ || (offset == 0 && !in_flight)) restart(total_len);
    if (total_len != total_len_) return Accept::TotalMismatch;

    Accept result = Accept::Duplicate;
    if (offset > hashed_upto_) {
      if (pending_.size() >= max_pending_ && !pending_.count(offset))
        return Accept::WindowFull;
      pending_[offset] = Bytes(data.begin(), data.end());
      result = Accept::Buffered;
    } else if (consume(offset, data)) {
      result = Accept::Consumed;
    }
    drain_pending();
    if (hashed_upto_ == total_len_ && !done_) {
      digest_ = sha_.finish();
      done_ = true;
      pending_.clear();
    }
    return result;
  }

  bool active() const { return active_; }
  bool done() const { return done_; }
  std::uint64_t hashed_upto() const { return hashed_upto_; }
  std::uint64_t total_len() const { return total_len_; }
  std::size_t pending_chunks() const { return pending_.size(); }

  /// Digest of the completed stream; empty until done.
  std::optional<Digest256> digest() const {
    return done_ ? std::optional<Digest256>(digest_) : std::nullopt;
  }

 private:
  void restart(std::uint64_t total_len) {
    sha_.reset();
    pending_.clear();
    hashed_upto_ = 0;
    total_len_ = total_len;
    active_ = true;
    done_ = false;
  }

  /// Hashes the part of [offset, offset+size) at or past the frontier.
  bool consume(std::uint64_t offset, ByteView data) {
    std::uint64_t skip = hashed_upto_ - offset;
    if (skip >= data.size()) return false;
    sha_.update(data.subspan(static_cast<std::size_t>(skip)));
    hashed_upto_ = offset + data.size();
    return true;
  }

  void drain_pending() {
    auto it = pending_.begin();
    while (it != pending_.end() && it->first <= hashed_upto_) {
      consume(it->first, it->second);
      it = pending_.erase(it);
    }
  }

  std::size_t max_pending_;
  Sha256 sha_;
  std::map<std::uint64_t, Bytes> pending_;
  std::uint64_t hashed_upto_ = 0;
  std::uint64_t total_len_ = 0;
  bool active_ = false;
  bool done_ = false;
  Digest256 digest_{};
};

}  // namespace saf
