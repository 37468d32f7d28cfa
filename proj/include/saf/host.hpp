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
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "saf/agent.hpp"  // PrStatus / MemStatus
#include "saf/fabric.hpp"
#include "saf/interval_set.hpp"
#include "saf/payload.hpp"
#include "saf/sha256.hpp"

namespace saf {

// ---- byte/word packing ------------------------------------------------------
//
// Hosts move argument and result buffers as 64-bit words. A word is the eight
// octets of the buffer in memory order, read as a big-endian integer; packing
// and unpacking are exact inverses, so end-to-end transfers are bit-exact.

inline std::vector<std::uint64_t> words_from_bytes(ByteView data) {
  if (data.size() % 8 != 0) throw ConfigError("buffer length must be a multiple of 8");
  std::vector<std::uint64_t> words(data.size() / 8);
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::uint64_t w = 0;
    for (int b = 0; b < 8; ++b) w = w << 8 | data[i * 8 + b];
    words[i] = w;
  }
  return words;
}

inline void bytes_from_words(const std::vector<std::uint64_t>& words, std::uint64_t byte_offset,
                             Bytes& out) {
  for (std::size_t i = 0; i < words.size(); ++i)
    for (int b = 0; b < 8; ++b)
      out[byte_offset + i * 8 + b] = static_cast<std::uint8_t>(words[i] >> (56 - 8 * b));
}

// ---- transport ----------------------------------------------------------------

/// What the orchestrator needs from the wire: send frames, receive frames via
/// a callback, and block until a condition holds or a deadline (in seconds on
/// the transport's clock) passes.
class HostTransport {
 public:
  virtual ~HostTransport() = default;
  virtual MacAddress mac() const = 0;
  virtual void send(Frame frame) = 0;
  virtual double now_s() const = 0;
  virtual bool pump_until(const std::function<bool()>& pred, double deadline_s) = 0;
  virtual void set_receiver(std::function<void(const Frame&)> rx) = 0;
};

/// Host NIC inside the simulated fabric. Attach it to a switch port like any
/// other endpoint.
class SimHostTransport final : public HostTransport, public Endpoint {
 public:
  SimHostTransport(Fabric& fabric, MacAddress mac) : fabric_(fabric), mac_(mac) {}

  MacAddress mac() const override { return mac_; }
  void send(Frame frame) override { fabric_.send(this, std::move(frame)); }
  double now_s() const override { return sim_to_seconds(fabric_.now()); }
  bool pump_until(const std::function<bool()>& pred, double deadline_s) override {
    return fabric_.pump_until(pred, seconds_to_sim(deadline_s));
  }
  void set_receiver(std::function<void(const Frame&)> rx) override { rx_ = std::move(rx); }

  std::vector<Emission> on_frame(const Frame& frame, SimTime) override {
    if (rx_) rx_(frame);
    return {};
  }

 private:
  Fabric& fabric_;
  MacAddress mac_;
  std::function<void(const Frame&)> rx_;
};

// ---- device registry ----------------------------------------------------------

enum class DeviceState { Discovered, Programmed, ArgsLoaded, Running, Done, Unreachable };

inline const char* to_string(DeviceState s) {
  switch (s) {
    case DeviceState::Discovered: return "Discovered";
    case DeviceState::Programmed: return "Programmed";
    case DeviceState::ArgsLoaded: return "ArgsLoaded";
    case DeviceState::Running: return "Running";
    case DeviceState::Done: return "Done";
    case DeviceState::Unreachable: return "Unreachable";
  }
  return "?";
}

struct DeviceInfo {
  MacAddress mac0{};
  MacAddress mac1{};
  std::uint16_t vendor_id = 0;
  std::uint16_t product_id = 0;
  DeviceState state = DeviceState::Discovered;
  std::optional<Digest256> bitstream_digest;
  double last_seen_s = 0;
};

/// Tracks every device the host has heard from, with a guarded lifecycle:
/// Discovered -> Programmed -> ArgsLoaded -> Running -> Done, Done looping
/// back for re-execution, any state collapsing to Unreachable on exhausted
/// retries, and Unreachable reviving only through a fresh discovery reply.
class DeviceRegistry {
 public:
  /// Discovery reply: inserts new devices, refreshes known ones, revives
  /// Unreachable ones.
  DeviceInfo& saw_device(const DiscoveryPayload& d, double now_s) {
    auto [it, inserted] = devices_.try_emplace(d.mac0);
    DeviceInfo& dev = it->second;
    if (inserted) {
      dev.mac0 = d.mac0;
      dev.state = DeviceState::Discovered;
    } else if (dev.state == DeviceState::Unreachable) {
      dev.state = DeviceState::Discovered;
      dev.bitstream_digest.reset();
    }
    dev.mac1 = d.mac1;
    dev.vendor_id = d.vendor_id;
    dev.product_id = d.product_id;
    dev.last_seen_s = now_s;
    return dev;
  }

  void set_state(const MacAddress& mac, DeviceState next) {
    DeviceInfo& dev = at(mac);
    if (!legal(dev.state, next))
      throw InvalidState(std::string("illegal device transition ") + to_string(dev.state) +
                         " -> " + to_string(next) + " for " + mac.to_string());
    dev.state = next;
  }

  DeviceInfo& at(const MacAddress& mac) {
    auto it = devices_.find(mac);
    if (it == devices_.end()) throw InvalidState("unknown device " + mac.to_string());
    return it->second;
  }
  const DeviceInfo& at(const MacAddress& mac) const {
    return const_cast<DeviceRegistry*>(this)->at(mac);
  }

  bool contains(const MacAddress& mac) const { return devices_.count(mac) > 0; }
  std::size_t size() const { return devices_.size(); }
  const std::map<MacAddress, DeviceInfo>& devices() const { return devices_; }

  std::vector<MacAddress> macs_in_state(DeviceState s) const {
    std::vector<MacAddress> out;
    for (const auto& [mac, dev] : devices_)
      if (dev.state == s) out.push_back(mac);
    return out;
  }

  std::vector<MacAddress> reachable_macs() const {
    std::vector<MacAddress> out;
    for (const auto& [mac, dev] : devices_)
      if (dev.state != DeviceState::Unreachable) out.push_back(mac);
    return out;
  }

  /// Structural soundness, assertable after any orchestration phase: states
  /// and recorded digests must agree.
  bool invariants_hold() const {
    for (const auto& [mac, dev] : devices_) {
      if (mac != dev.mac0) return false;
      bool needs_digest = dev.state == DeviceState::Programmed ||
                          dev.state == DeviceState::ArgsLoaded ||
                          dev.state == DeviceState::Running || dev.state == DeviceState::Done;
      if (needs_digest && !dev.bitstream_digest) return false;
      if (dev.state == DeviceState::Discovered && dev.bitstream_digest) return false;
    }
    return true;
  }

 private:
  static bool legal(DeviceState from, DeviceState to) {
    if (to == DeviceState::Unreachable) return true;
    switch (from) {
      case DeviceState::Discovered:
        return to == DeviceState::Programmed;
      case DeviceState::Programmed:
        return to == DeviceState::Programmed || to == DeviceState::ArgsLoaded;
      case DeviceState::ArgsLoaded:
        return to == DeviceState::ArgsLoaded || to == DeviceState::Running ||
               to == DeviceState::Programmed;
      case DeviceState::Running:
        return to == DeviceState::Done;
      case DeviceState::Done:
        return to == DeviceState::Running || to == DeviceState::ArgsLoaded ||
               to == DeviceState::Programmed;
      case DeviceState::Unreachable:
        return to == DeviceState::Discovered;
    }
    return false;
  }

  std::map<MacAddress, DeviceInfo> devices_;
};

// ---- output reassembly ----------------------------------------------------------

/// Rebuilds one device's result buffer from OutputChunk frames, tolerating
/// duplicates and re-execution replays. The buffer length comes from the
/// first chunk seen.
class Reassembler {
 public:
  /// Returns true once coverage is complete. Chunks for a different total
  /// length are stale traffic and are ignored.
  bool feed(const OutputChunkPayload& chunk) {
    if (!total_) {
      total_ = chunk.total_len;
      buf_.assign(static_cast<std::size_t>(chunk.total_len), 0);
    }
    if (chunk.total_len != *total_) {
      stale_chunks_++;
      return complete();
    }
    std::uint64_t end = chunk.offset + 8ull * chunk.words.size();
    if (end > *total_) {
      stale_chunks_++;
      return complete();
    }
    bytes_from_words(chunk.words, chunk.offset, buf_);
    if (end > chunk.offset) coverage_.add(chunk.offset, end);
    return complete();
  }

  bool complete() const { return total_ && coverage_.covers(*total_); }
  const Bytes& bytes() const { return buf_; }
  std::uint64_t stale_chunks() const { return stale_chunks_; }

  void reset() {
    total_.reset();
    buf_.clear();
    coverage_.clear();
  }

 private:
  std::optional<std::uint64_t> total_;
  Bytes buf_;
  IntervalSet coverage_;
  std::uint64_t stale_chunks_ = 0;
};

// ---- orchestrator ----------------------------------------------------------------

struct HostOptions {
  int probe_rounds = 3;
  double probe_wait_s = 0.02;      ///< listen window after each probe
  int max_retries = 2;             ///< extra attempts per phase after the first
  double timeout_factor = 3.0;     ///< deadline = estimate * factor
  double min_timeout_s = 0.1;
  std::uint16_t chunk_bytes = kPrChunkMaxData;   ///< reconfiguration chunk size
  std::uint16_t write_words_per_frame = 180;     ///< 64-bit words per MemWrite
  LinkParams host_link;            ///< used only for transfer-time estimates
};

struct DeviceOutcome {
  MacAddress mac{};
  bool ok = false;
  int attempts = 0;
  std::string error;
};

struct PhaseReport {
  bool all_ok = false;
  double elapsed_s = 0;
  std::vector<DeviceOutcome> devices;

  const DeviceOutcome* find(const MacAddress& mac) const {
    for (const auto& d : devices)
      if (d.mac == mac) return &d;
    return nullptr;
  }
};

struct CollectResult {
  PhaseReport report;
  std::map<MacAddress, Bytes> outputs;
};

/// Remote-host control plane: discovery, broadcast/unicast reconfiguration,
/// argument staging, kernel launch, and result collection, with bounded
/// retries and Unreachable demotion on exhaustion.
class Orchestrator {
 public:
  Orchestrator(HostTransport& transport, HostOptions options = {})
      : transport_(transport), options_(options) {
    transport_.set_receiver([this](const Frame& f) { on_rx(f); });
  }

  DeviceRegistry& registry() { return registry_; }
  const DeviceRegistry& registry() const { return registry_; }

  // ---- discovery -------------------------------------------------------------

  /// Runs probe rounds (one solicitation per round); stops early once
  /// `expected` devices are reachable. Shells announce themselves once per
  /// attach epoch, so a probe's only job is to put a frame in front of boards
  /// whose trigger has not fired yet. Returns the number of known devices.
  std::size_t discover(std::size_t expected = 0) {
    auto satisfied = [&] {
      return expected > 0 && registry_.reachable_macs().size() >= expected;
    };
    for (int round = 0; round < options_.probe_rounds; ++round) {
      if (satisfied()) break;
      probes_sent_++;
      transport_.send(make_frame(MacAddress::broadcast(), transport_.mac(), HostProbePayload{}));
      transport_.pump_until(satisfied, transport_.now_s() + options_.probe_wait_s);
    }
    return registry_.size();
  }

  // ---- reconfiguration ---------------------------------------------------------

  /// Streams `bitstream` to `targets` (default: every reachable device).
  /// The first attempt is a single broadcast; retries unicast the full stream
  /// to the devices still missing. A device acks by returning the SHA-256 of
  /// the bytes it assembled, which must match ours.
  PhaseReport program(ByteView bitstream, std::vector<MacAddress> targets = {}) {
    if (targets.empty()) targets = registry_.reachable_macs();
    PhaseReport report;
    double t0 = transport_.now_s();
    if (targets.empty()) {
      report.all_ok = true;
      return report;
    }

    pr_expected_ = Sha256::of(bitstream);
    pr_pending_.clear();
    pr_errors_.clear();
    for (const auto& mac : targets) pr_pending_.insert(mac);

    std::map<MacAddress, int> attempts;
    double est = stream_estimate_s(bitstream.size(), options_.chunk_bytes);
    for (int attempt = 0; attempt <= options_.max_retries && !pr_pending_.empty(); ++attempt) {
      if (attempt == 0) {
        for (const auto& mac : pr_pending_) attempts[mac]++;
        send_pr_stream(MacAddress::broadcast(), bitstream);
      } else {
        for (const auto& mac : std::set<MacAddress>(pr_pending_)) {
          attempts[mac]++;
          send_pr_stream(mac, bitstream);
        }
      }
      transport_.pump_until([&] { return pr_pending_.empty(); },
                            transport_.now_s() + deadline_for(est));
    }

    report.all_ok = pr_pending_.empty();
    report.elapsed_s = transport_.now_s() - t0;
    for (const auto& mac : targets) {
      DeviceOutcome out;
      out.mac = mac;
      out.attempts = attempts[mac];
      out.ok = !pr_pending_.count(mac);
      if (!out.ok) {
        auto it = pr_errors_.find(mac);
        if (it != pr_errors_.end()) {
          out.error = it->second;  // the device answered; it is alive but unprogrammed
        } else {
          out.error = "no acknowledgement";
          mark_unreachable(mac);
        }
      }
      report.devices.push_back(std::move(out));
    }
    pr_expected_.reset();
    return report;
  }

  // ---- argument staging ----------------------------------------------------------

  /// Writes one argument buffer per device (buffers may differ), pipelined on
  /// the host link, then waits for every completion ack. Buffers must be
  /// multiples of 8 bytes.
  PhaseReport write_args(const std::vector<std::pair<MacAddress, ByteView>>& writes,
                         std::uint16_t arg) {
    PhaseReport report;
    double t0 = transport_.now_s();
    mem_pending_.clear();
    mem_errors_.clear();
    std::uint64_t total_bytes = 0;
    for (const auto& [mac, data] : writes) {
      if (data.empty()) continue;  // nothing to stage, nothing to ack
      mem_pending_.insert(mac);
      total_bytes += data.size();
    }

    std::map<MacAddress, int> attempts;
    double est = stream_estimate_s(total_bytes, options_.write_words_per_frame * 8u);
    for (int attempt = 0; attempt <= options_.max_retries && !mem_pending_.empty(); ++attempt) {
      for (const auto& [mac, data] : writes) {
        if (!mem_pending_.count(mac)) continue;
        // A permanent-looking reject (bad arg, overflow) is not retried.
        if (attempt > 0 && mem_errors_.count(mac)) continue;
        attempts[mac]++;
        send_write_stream(mac, arg, data);
      }
      transport_.pump_until(
          [&] {
            for (const auto& mac : mem_pending_)
              if (!mem_errors_.count(mac)) return false;
            return true;
          },
          transport_.now_s() + deadline_for(est));
    }

    report.all_ok = mem_pending_.empty();
    report.elapsed_s = transport_.now_s() - t0;
    for (const auto& [mac, data] : writes) {
      DeviceOutcome out;
      out.mac = mac;
      out.attempts = attempts[mac];
      out.ok = !mem_pending_.count(mac);
      if (out.ok) {
        registry_.set_state(mac, DeviceState::ArgsLoaded);
      } else {
        auto it = mem_errors_.find(mac);
        if (it != mem_errors_.end()) {
          out.error = it->second;  // rejected, not silent: the device is alive
        } else {
          out.error = "no acknowledgement";
          mark_unreachable(mac);
        }
      }
      report.devices.push_back(std::move(out));
    }
    return report;
  }

  // ---- execution and collection ---------------------------------------------------

  /// Launches a kernel on each device and gathers the OutputChunk stream each
  /// one returns. There is no launch ack: a device whose output does not
  /// complete in time gets the command again (kernels replay identically),
  /// and exhausting retries marks it Unreachable. `compute_hint_s` sizes the
  /// deadline alongside the estimated output transfer time.
  CollectResult execute_and_collect(
      const std::vector<std::tuple<MacAddress, std::uint64_t, std::uint64_t>>& launches,
      std::uint64_t expected_output_bytes, double compute_hint_s = 0.0) {
    CollectResult result;
    double t0 = transport_.now_s();
    collect_pending_.clear();
    for (const auto& [mac, addr, data] : launches) {
      reassembly_[mac].reset();
      collect_pending_.insert(mac);
      registry_.set_state(mac, DeviceState::Running);
    }

    std::map<MacAddress, int> attempts;
    double est = compute_hint_s +
                 stream_estimate_s(expected_output_bytes * launches.size(),
                                   options_.write_words_per_frame * 8u);
    for (int attempt = 0; attempt <= options_.max_retries && !collect_pending_.empty();
         ++attempt) {
      for (const auto& [mac, addr, data] : launches) {
        if (!collect_pending_.count(mac)) continue;
        attempts[mac]++;
        transport_.send(make_frame(mac, transport_.mac(), KernelCmdPayload{addr, data}));
      }
      transport_.pump_until([&] { return collect_pending_.empty(); },
                            transport_.now_s() + deadline_for(est));
    }

    result.report.all_ok = collect_pending_.empty();
    result.report.elapsed_s = transport_.now_s() - t0;
    for (const auto& [mac, addr, data] : launches) {
      DeviceOutcome out;
      out.mac = mac;
      out.attempts = attempts[mac];
      out.ok = !collect_pending_.count(mac);
      if (out.ok) {
        registry_.set_state(mac, DeviceState::Done);
        result.outputs[mac] = reassembly_[mac].bytes();
      } else {
        out.error = "output incomplete";
        mark_unreachable(mac);
      }
      result.report.devices.push_back(std::move(out));
    }
    return result;
  }

  // ---- statistics -------------------------------------------------------------------

  std::uint64_t probes_sent() const { return probes_sent_; }
  std::uint64_t frames_sent() const { return frames_sent_; }
  std::uint64_t rx_ignored() const { return rx_ignored_; }

 private:
  void on_rx(const Frame& frame) {
    if (!frame.dst.is_broadcast() && frame.dst != transport_.mac()) {
      rx_ignored_++;
      return;
    }
    auto type = frame.saf_type();
    if (!type) {
      rx_ignored_++;
      return;
    }
    try {
      switch (*type) {
        case SafEtherType::Discovery:
          registry_.saw_device(decode_discovery(frame.payload), transport_.now_s());
          break;
        case SafEtherType::PrAck:
          on_pr_ack(frame.src, decode_pr_ack(frame.payload));
          break;
        case SafEtherType::MemAck:
          on_mem_ack(frame.src, decode_mem_ack(frame.payload));
          break;
        case SafEtherType::OutputChunk:
          on_output_chunk(frame.src, decode_output_chunk(frame.payload));
          break;
        default:
          rx_ignored_++;  // agent-bound traffic echoed to us
          break;
      }
    } catch (const CodecError&) {
      rx_ignored_++;
    }
  }

  void on_pr_ack(const MacAddress& src, const PrAckPayload& ack) {
    if (!pr_expected_ || !pr_pending_.count(src)) return;
    if (ack.status != static_cast<std::uint8_t>(PrStatus::Ok)) {
      pr_errors_[src] = "device rejected stream, status " + std::to_string(ack.status);
      return;
    }
    if (ack.digest != *pr_expected_) {
      pr_errors_[src] = "digest mismatch";
      return;
    }
    pr_pending_.erase(src);
    pr_errors_.erase(src);
    DeviceInfo& dev = registry_.at(src);
    registry_.set_state(src, DeviceState::Programmed);
    dev.bitstream_digest = ack.digest;
  }

  void on_mem_ack(const MacAddress& src, const MemAckPayload& ack) {
    if (!mem_pending_.count(src)) return;
    if (ack.status == static_cast<std::uint8_t>(MemStatus::Ok)) {
      mem_pending_.erase(src);
      mem_errors_.erase(src);
    } else {
      mem_errors_[src] = "write rejected, status " + std::to_string(ack.status);
    }
  }

  void on_output_chunk(const MacAddress& src, const OutputChunkPayload& chunk) {
    if (!collect_pending_.count(src)) return;
    if (reassembly_[src].feed(chunk)) collect_pending_.erase(src);
  }

  void send_pr_stream(const MacAddress& dst, ByteView bitstream) {
    std::uint64_t total = bitstream.size();
    for (std::uint64_t off = 0; off < total; off += options_.chunk_bytes) {
      std::uint64_t n = std::min<std::uint64_t>(options_.chunk_bytes, total - off);
      PrChunkPayload chunk;
      chunk.offset = off;
      chunk.total_len = total;
      chunk.data.assign(bitstream.begin() + off, bitstream.begin() + off + n);
      frames_sent_++;
      transport_.send(make_frame(dst, transport_.mac(), chunk));
    }
    if (total == 0) {  // an empty stream still needs its completing chunk
      frames_sent_++;
      transport_.send(make_frame(dst, transport_.mac(), PrChunkPayload{0, 0, {}}));
    }
  }

  void send_write_stream(const MacAddress& dst, std::uint16_t arg, ByteView data) {
    auto words = words_from_bytes(data);
    std::uint64_t total = data.size();
    std::size_t per = options_.write_words_per_frame;
    for (std::size_t base = 0; base < words.size() || (base == 0 && words.empty());
         base += per) {
      std::size_t n = std::min(per, words.size() - base);
      MemWritePayload w;
      w.arg = arg;
      w.offset = base * 8;
      w.total_len = total;
      w.words.assign(words.begin() + base, words.begin() + base + n);
      frames_sent_++;
      transport_.send(make_frame(dst, transport_.mac(), w));
      if (words.empty()) break;
    }
  }

  void mark_unreachable(const MacAddress& mac) {
    if (registry_.contains(mac)) registry_.set_state(mac, DeviceState::Unreachable);
  }

  /// Serialization estimate for a buffer cut into frames of `unit` payload
  /// bytes, paced by the host link.
  double stream_estimate_s(std::uint64_t total_bytes, std::uint32_t unit) const {
    if (total_bytes == 0) return 0.0;
    double n_frames = std::ceil(static_cast<double>(total_bytes) / unit);
    double frame_b = kFrameHeaderBytes + std::max<std::uint32_t>(unit + 20u, kMinPayloadBytes);
    double serial = frame_b * 8.0 / options_.host_link.bandwidth_bps;
    return n_frames * (options_.host_link.per_frame_overhead_s + serial);
  }

  double deadline_for(double estimate_s) const {
    return std::max(estimate_s * options_.timeout_factor, options_.min_timeout_s);
  }

  HostTransport& transport_;
  HostOptions options_;
  DeviceRegistry registry_;

  std::optional<Digest256> pr_expected_;
  std::set<MacAddress> pr_pending_;
  std::map<MacAddress, std::string> pr_errors_;

  std::set<MacAddress> mem_pending_;
  std::map<MacAddress, std::string> mem_errors_;

  std::set<MacAddress> collect_pending_;
  std::map<MacAddress, Reassembler> reassembly_;

  std::uint64_t probes_sent_ = 0;
  std::uint64_t frames_sent_ = 0;
  std::uint64_t rx_ignored_ = 0;
};

}  // namespace saf
