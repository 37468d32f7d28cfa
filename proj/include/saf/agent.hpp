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
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "saf/ddr.hpp"
#include "saf/fabric.hpp"
#include "saf/interval_set.hpp"
#include "saf/kernels.hpp"
#include "saf/payload.hpp"
#include "saf/pr_engine.hpp"

namespace saf {

/// Reconfiguration ack codes carried in PrAck.status.
enum class PrStatus : std::uint8_t {
  Ok = 0,             ///< stream complete, digest valid
  MuxBusy = 1,        ///< PCIe-side reconfiguration holds the mux
  KernelRunning = 2,  ///< a kernel occupies the fabric
  BadChunk = 3,       ///< chunk disagrees with the active stream
};

/// Memory-write ack codes carried in MemAck.status.
enum class MemStatus : std::uint8_t {
  Ok = 0,
  RegionOverflow = 1,
  NoKernelConfigured = 2,
  BadArgIndex = 3,
  LengthMismatch = 4,
};

struct AgentConfig {
  MacAddress mac0{};                      ///< port used for simulated traffic
  MacAddress mac1{};                      ///< second board port, advertised only
  std::uint16_t vendor_id = 0x1172;
  std::uint16_t product_id = 0x0385;
  std::size_t fifo_capacity = 4096;       ///< per ingress queue
  std::size_t pr_reorder_window = 1024;   ///< chunks held ahead of the frontier
  std::uint16_t output_words_per_frame = 180;
};

/// Plug-in announcement state: exactly one discovery frame is sent per attach
/// epoch, triggered by the first frame that passes the NIC destination filter
/// (whatever its ethertype). Detaching from the switch rearms the machine.
enum class DiscoveryFsm { AwaitFirstFrame, DiscoverySent };

struct AgentCounters {
  std::uint64_t rx_frames = 0;
  std::uint64_t rx_filtered = 0;    ///< destination MAC not ours
  std::uint64_t rx_ignored = 0;     ///< host-bound or non-protocol frames
  std::uint64_t rx_malformed = 0;
  std::uint64_t tx_frames = 0;
  std::uint64_t probes_seen = 0;
  std::uint64_t discovery_frames = 0;
  std::uint64_t pr_chunks = 0;
  std::uint64_t pr_acks = 0;
  std::uint64_t pr_rejects = 0;
  std::uint64_t mem_frames = 0;
  std::uint64_t mem_acks = 0;
  std::uint64_t mem_rejects = 0;
  std::uint64_t cmd_frames = 0;
  std::uint64_t kernel_launches = 0;
  std::uint64_t kernel_ignored_busy = 0;
  std::uint64_t cmd_rejected = 0;
  std::uint64_t fifo_overflow_drops = 0;
  std::uint64_t link_ups = 0;
  std::uint64_t link_downs = 0;
};

/// Software stand-in for the FPGA-resident protocol shell: announces itself
/// once per attach epoch, reassembles and "programs" bitstreams, services
/// memory writes into the DDR model, launches kernels, and streams their
/// output back.
///
/// Ingress is modeled as three bounded FIFOs (reconfiguration, memory,
/// command). Service is instantaneous unless paused via pause_service(),
/// which emulates a stalled consumer clock domain; frames arriving into a
/// full queue are dropped and counted.
class AgentShell : public Endpoint {
 public:
  explicit AgentShell(AgentConfig config) : config_(config), pr_(config.pr_reorder_window) {}

  MacAddress mac() const override { return config_.mac0; }

  void on_link_up(SimTime) override {
    counters_.link_ups++;
    discovery_fsm_ = DiscoveryFsm::AwaitFirstFrame;
    discovery_pending_ = false;
  }

  void on_link_down(SimTime) override {
    counters_.link_downs++;
    discovery_fsm_ = DiscoveryFsm::AwaitFirstFrame;
    discovery_pending_ = false;
  }

  std::vector<Emission> on_frame(const Frame& frame, SimTime now) override {
    counters_.rx_frames++;
    if (!accepts(frame.dst)) {
      counters_.rx_filtered++;
      return {};
    }
    // The announcement trigger is type-agnostic: any frame that clears the
    // destination filter proves the link carries traffic.
    if (discovery_fsm_ == DiscoveryFsm::AwaitFirstFrame) {
      discovery_fsm_ = DiscoveryFsm::DiscoverySent;
      discovery_pending_ = true;
    }
    auto type = frame.saf_type();
    if (!type) {
      counters_.rx_ignored++;
      return flush_discovery({});
    }
    switch (*type) {
      case SafEtherType::HostProbe:
      case SafEtherType::PrChunk:
      case SafEtherType::MemWrite:
      case SafEtherType::KernelCmd:
        break;
      default:
        counters_.rx_ignored++;  // host-bound types are not ours to consume
        return flush_discovery({});
    }
    Fifo& q = fifo_for(*type);
    if (paused_) {
      if (q.size() >= config_.fifo_capacity) {
        counters_.fifo_overflow_drops++;
        return {};
      }
      q.push_back(frame);
      return {};
    }
    return flush_discovery(process(frame, *type, now));
  }

  // ---- ingress service control (test/fault-injection knob) -------------------

  void pause_service() { paused_ = true; }

  /// Drains everything queued while paused; emissions belong to `now`. A
  /// discovery announcement armed while the service loop was stalled goes
  /// out first.
  std::vector<Emission> resume_service(SimTime now) {
    paused_ = false;
    std::vector<Emission> out = flush_discovery({});
    for (Fifo* q : {&pr_fifo_, &mem_fifo_, &cmd_fifo_}) {
      while (!q->empty()) {
        Frame f = std::move(q->front());
        q->pop_front();
        auto em = process(f, *f.saf_type(), now);
        out.insert(out.end(), std::make_move_iterator(em.begin()),
                   std::make_move_iterator(em.end()));
      }
    }
    return out;
  }

  std::size_t queued_frames() const {
    return pr_fifo_.size() + mem_fifo_.size() + cmd_fifo_.size();
  }

  // ---- PCIe-side reconfiguration (mux counterpart to the Ethernet path) ------

  void pcie_begin_programming() {
    if (pr_.active() && !pr_.done())
      throw InvalidState("network reconfiguration in progress, mux unavailable");
    if (kernel_running(last_seen_now_))
      throw InvalidState("kernel running, reconfiguration blocked");
    pcie_active_ = true;
  }

  void pcie_end_programming(const Digest256& digest) {
    if (!pcie_active_) throw InvalidState("no PCIe programming session open");
    pcie_active_ = false;
    configured_ = true;
    bitstream_digest_ = digest;
  }

  bool pcie_programming() const { return pcie_active_; }

  // ---- bitstream contents -----------------------------------------------------

  /// Declares a kernel the (emulated) bitstream provides. Control windows of
  /// kControlStride bytes must not overlap.
  void register_kernel(KernelSlot slot) {
    for (const auto& [base, existing] : kernels_) {
      if (slot.control_base < base + kControlStride && base < slot.control_base + kControlStride)
        throw AddressCollision("kernel control window overlaps " + existing.name);
    }
    kernels_.emplace(slot.control_base, std::move(slot));
  }

  // ---- observers ---------------------------------------------------------------

  bool configured() const { return configured_; }
  std::optional<Digest256> bitstream_digest() const {
    return configured_ ? std::optional<Digest256>(bitstream_digest_) : std::nullopt;
  }
  bool kernel_running(SimTime now) const { return now < busy_until_; }
  SimTime busy_until() const { return busy_until_; }
  DiscoveryFsm discovery_fsm() const { return discovery_fsm_; }
  const AgentCounters& counters() const { return counters_; }
  const AgentConfig& config() const { return config_; }
  const PrEngine& pr_engine() const { return pr_; }
  DdrMemory& ddr() { return ddr_; }
  const DdrMemory& ddr() const { return ddr_; }

 private:
  using Fifo = std::deque<Frame>;

  struct WriteSession {
    std::uint64_t total_len = 0;
    IntervalSet coverage;
    bool complete = false;
  };

  bool accepts(const MacAddress& dst) const {
    return dst.is_broadcast() || dst == config_.mac0 || dst == config_.mac1;
  }

  Fifo& fifo_for(SafEtherType type) {
    switch (type) {
      case SafEtherType::PrChunk:
        return pr_fifo_;
      case SafEtherType::MemWrite:
        return mem_fifo_;
      default:
        return cmd_fifo_;  // KernelCmd and HostProbe share the command queue
    }
  }

  std::vector<Emission> process(const Frame& frame, SafEtherType type, SimTime now) {
    last_seen_now_ = now;
    try {
      switch (type) {
        case SafEtherType::HostProbe:
          return handle_probe(frame);
        case SafEtherType::PrChunk:
          return handle_pr_chunk(frame, now);
        case SafEtherType::MemWrite:
          return handle_mem_write(frame);
        case SafEtherType::KernelCmd:
          return handle_kernel_cmd(frame, now);
        default:
          return {};
      }
    } catch (const CodecError&) {
      counters_.rx_malformed++;
      return {};
    }
  }

  /// Probes carry no payload and need no reply of their own; their only job
  /// is to put a frame on the wire so that freshly attached shells trip the
  /// announcement trigger above.
  std::vector<Emission> handle_probe(const Frame&) {
    counters_.probes_seen++;
    return {};
  }

  /// Prepends the one-per-epoch discovery frame when it is armed and the
  /// service loop is able to transmit.
  std::vector<Emission> flush_discovery(std::vector<Emission> out) {
    if (!discovery_pending_ || paused_) return out;
    discovery_pending_ = false;
    counters_.discovery_frames++;
    counters_.tx_frames++;
    DiscoveryPayload hello{config_.mac0, config_.mac1, config_.vendor_id, config_.product_id};
    out.insert(out.begin(),
               Emission{make_frame(MacAddress::broadcast(), config_.mac0, hello), 0});
    return out;
  }

  std::vector<Emission> handle_pr_chunk(const Frame& frame, SimTime now) {
    counters_.pr_chunks++;
    PrChunkPayload chunk = decode_pr_chunk(frame.payload);
    if (pcie_active_) return pr_reject(frame, PrStatus::MuxBusy);
    if (kernel_running(now)) return pr_reject(frame, PrStatus::KernelRunning);

    auto result = pr_.feed(chunk.offset, chunk.total_len,
                           ByteView(chunk.data.data(), chunk.data.size()));
    if (result == PrEngine::Accept::TotalMismatch) return pr_reject(frame, PrStatus::BadChunk);
    if (!pr_.done()) return {};  // progress chunks are not acknowledged

    // Coverage just completed, or a duplicate landed on a finished stream:
    // (re-)acknowledge idempotently so a lost ack only costs the host a retry.
    if (!configured_ || bitstream_digest_ != *pr_.digest()) {
      configured_ = true;
      bitstream_digest_ = *pr_.digest();
    }
    counters_.pr_acks++;
    return emit(make_frame(frame.src, config_.mac0,
                           PrAckPayload{static_cast<std::uint8_t>(PrStatus::Ok),
                                        bitstream_digest_}));
  }

  std::vector<Emission> pr_reject(const Frame& frame, PrStatus status) {
    counters_.pr_rejects++;
    return emit(make_frame(frame.src, config_.mac0,
                           PrAckPayload{static_cast<std::uint8_t>(status), Digest256{}}));
  }

  std::vector<Emission> handle_mem_write(const Frame& frame) {
    counters_.mem_frames++;
    MemWritePayload w = decode_mem_write(frame.payload);
    if (w.arg >= kMaxArgRegions) return mem_reject(frame, w.arg, MemStatus::BadArgIndex);
    if (!configured_) return mem_reject(frame, w.arg, MemStatus::NoKernelConfigured);
    if (w.total_len > kArgRegionBytes) return mem_reject(frame, w.arg, MemStatus::RegionOverflow);
    std::uint64_t end = w.offset + 8ull * w.words.size();
    if (end > w.total_len) return mem_reject(frame, w.arg, MemStatus::LengthMismatch);

    WriteSession& s = sessions_[w.arg];
    const bool live = !s.complete && !s.coverage.empty();
    if (live && s.total_len != w.total_len)
      return mem_reject(frame, w.arg, MemStatus::LengthMismatch);
    if (!live && (s.coverage.empty() || s.total_len != w.total_len)) {
      // A stale session (never started, or finished with a different geometry)
      // is replaced by whichever frame arrives first -- streams tolerate full
      // reordering. A completed same-geometry session is kept so that late
      // duplicates re-ack idempotently instead of reopening the stream.
      s = WriteSession{};
      s.total_len = w.total_len;
    }

    for (std::size_t i = 0; i < w.words.size(); ++i)
      ddr_.write_u64(w.arg, w.offset + 8 * i, w.words[i]);
    if (!w.words.empty()) s.coverage.add(w.offset, end);

    if (s.coverage.covers(s.total_len)) {
      s.complete = true;  // completion and covered duplicates both (re-)ack
      counters_.mem_acks++;
      return emit(make_frame(frame.src, config_.mac0,
                             MemAckPayload{w.arg, static_cast<std::uint8_t>(MemStatus::Ok)}));
    }
    return {};
  }

  std::vector<Emission> mem_reject(const Frame& frame, std::uint16_t arg, MemStatus status) {
    counters_.mem_rejects++;
    return emit(make_frame(frame.src, config_.mac0,
                           MemAckPayload{arg, static_cast<std::uint8_t>(status)}));
  }

  /// Commands carry no ack; the host recovers from a dropped or rejected
  /// launch by timing out and re-issuing it.
  std::vector<Emission> handle_kernel_cmd(const Frame& frame, SimTime now) {
    counters_.cmd_frames++;
    KernelCmdPayload cmd = decode_kernel_cmd(frame.payload);
    if (!configured_ || pcie_active_) {
      counters_.cmd_rejected++;
      return {};
    }
    auto it = kernels_.upper_bound(cmd.addr);
    if (it == kernels_.begin() || cmd.addr >= std::prev(it)->first + kControlStride) {
      counters_.cmd_rejected++;
      return {};
    }
    if (kernel_running(now)) {
      counters_.kernel_ignored_busy++;
      return {};
    }
    const KernelSlot& slot = std::prev(it)->second;
    KernelResult result;
    try {
      result = slot.run(ddr_, cmd.data);
    } catch (const SafError&) {
      counters_.cmd_rejected++;
      return {};
    }
    counters_.kernel_launches++;
    busy_until_ = now + result.compute_ns;
    sessions_.erase(result.output_arg);  // output region no longer mirrors a host write

    std::vector<Emission> out;
    std::uint64_t total_words = result.output_len / 8;
    for (std::uint64_t base = 0; base < total_words;) {
      std::uint64_t n = std::min<std::uint64_t>(config_.output_words_per_frame,
                                                total_words - base);
      OutputChunkPayload chunk;
      chunk.offset = base * 8;
      chunk.total_len = result.output_len;
      chunk.words.reserve(static_cast<std::size_t>(n));
      for (std::uint64_t i = 0; i < n; ++i)
        chunk.words.push_back(ddr_.read_u64(result.output_arg, (base + i) * 8));
      counters_.tx_frames++;
      out.push_back(Emission{make_frame(frame.src, config_.mac0, chunk), result.compute_ns});
      base += n;
    }
    if (total_words == 0) {  // zero-length result still signals completion
      OutputChunkPayload chunk;
      chunk.offset = 0;
      chunk.total_len = 0;
      counters_.tx_frames++;
      out.push_back(Emission{make_frame(frame.src, config_.mac0, chunk), result.compute_ns});
    }
    return out;
  }

  std::vector<Emission> emit(Frame frame) {
    counters_.tx_frames++;
    return {Emission{std::move(frame), 0}};
  }

  AgentConfig config_;
  PrEngine pr_;
  DdrMemory ddr_;
  std::map<std::uint64_t, KernelSlot> kernels_;  // keyed by control_base
  std::map<std::uint16_t, WriteSession> sessions_;
  AgentCounters counters_;
  Fifo pr_fifo_, mem_fifo_, cmd_fifo_;
  DiscoveryFsm discovery_fsm_ = DiscoveryFsm::AwaitFirstFrame;
  bool discovery_pending_ = false;
  bool paused_ = false;
  bool pcie_active_ = false;
  bool configured_ = false;
  Digest256 bitstream_digest_{};
  SimTime busy_until_ = 0;
  SimTime last_seen_now_ = 0;
};

}  // namespace saf
