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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "saf/frame.hpp"
#include "saf/sim_time.hpp"

namespace saf {

/// Per-channel timing. per_frame_overhead models the sender's cost to create
/// a frame (the dominant term on the host side); switch egress channels leave
/// it at zero.
struct LinkParams {
  double bandwidth_bps = 10e9;
  double latency_s = 1e-6;
  double per_frame_overhead_s = 0.0;
  double loss_probability = 0.0;
};

/// A frame an endpoint wants the fabric to transmit, optionally after a
/// processing delay (e.g. kernel compute time).
struct Emission {
  Frame frame;
  SimTime delay = 0;
};

/// Anything attachable to a switch port. Handlers are invoked by the event
/// loop, one at a time per endpoint.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual MacAddress mac() const = 0;
  virtual void on_link_up(SimTime /*now*/) {}
  virtual void on_link_down(SimTime /*now*/) {}
  virtual std::vector<Emission> on_frame(const Frame& frame, SimTime now) = 0;
};

/// At quiescence: endpoint_copies == delivered + dropped_no_endpoint + loss_to_endpoint.
struct FabricStats {
  std::uint64_t frames_sent = 0;       ///< endpoint transmissions injected
  std::uint64_t endpoint_copies = 0;   ///< copies committed toward an endpoint port
  std::uint64_t delivered = 0;
  std::uint64_t dropped_no_endpoint = 0;  ///< vacated port or stale MAC entry
  std::uint64_t loss_from_endpoint = 0;   ///< injected loss, endpoint -> switch
  std::uint64_t loss_to_endpoint = 0;     ///< injected loss, switch -> endpoint
  std::uint64_t loss_on_trunk = 0;        ///< injected loss, switch -> switch
  std::uint64_t filtered_same_port = 0;   ///< unicast whose egress equals ingress
  SimTime sim_time = 0;

  std::uint64_t dropped_loss() const {
    return loss_from_endpoint + loss_to_endpoint + loss_on_trunk;
  }
  std::uint64_t dropped() const { return dropped_no_endpoint + dropped_loss(); }
};

/// Discrete-event L2 fabric: MAC-learning switches joined by trunks into a
/// tree, hot-pluggable endpoint ports, per-channel bandwidth/latency/overhead
/// and optional loss injection. Single-threaded; deterministic for a given
/// seed and call sequence (event ties break by insertion order, and the RNG
/// is consulted only on channels with nonzero loss).
class Fabric {
 public:
  explicit Fabric(std::uint64_t seed = 0) : rng_(seed) {}

  // ---- topology -------------------------------------------------------------

  int add_switch(const std::string& name, int port_count) {
    if (switch_ids_.count(name)) throw ConfigError("duplicate switch: " + name);
    int id = static_cast<int>(switches_.size());
    switches_.push_back(Switch{name, std::vector<Attachment*>(port_count, nullptr), {}, {}});
    switch_ids_[name] = id;
    return id;
  }

  /// Trunks must keep the switch graph a tree.
  void add_trunk(const std::string& a, const std::string& b, LinkParams params = {}) {
    int ia = switch_index(a), ib = switch_index(b);
    if (ia == ib) throw ConfigError("trunk endpoints must differ: " + a);
    if (root(ia) == root(ib)) throw ConfigError("trunk would create a loop: " + a + "-" + b);
    union_(ia, ib);
    auto trunk = std::make_unique<Trunk>();
    trunk->sw[0] = ia;
    trunk->sw[1] = ib;
    trunk->channel[0].params = params;  // a -> b
    trunk->channel[1].params = params;  // b -> a
    switches_[ia].trunks.push_back(trunk.get());
    switches_[ib].trunks.push_back(trunk.get());
    trunks_.push_back(std::move(trunk));
  }

  void attach(Endpoint* ep, const std::string& sw_name, int port, LinkParams params = {}) {
    int sw = switch_index(sw_name);
    auto& ports = switches_[sw].ports;
    if (port < 0 || port >= static_cast<int>(ports.size()))
      throw ConfigError("no such port " + std::to_string(port) + " on " + sw_name);
    if (ports[port]) throw PortOccupied(sw_name + " port " + std::to_string(port));
    if (attachments_.count(ep)) throw PortOccupied("endpoint already attached");
    auto att = std::make_unique<Attachment>();
    att->ep = ep;
    att->sw = sw;
    att->port = port;
    att->up.params = params;
    att->down.params = params;
    att->down.params.per_frame_overhead_s = 0;  // switch egress pays no host overhead
    ports[port] = att.get();
    attachments_[ep] = std::move(att);
    ep->on_link_up(clock_);
  }

  void detach(Endpoint* ep) {
    auto it = attachments_.find(ep);
    if (it == attachments_.end()) throw NotAttached("endpoint not attached");
    switches_[it->second->sw].ports[it->second->port] = nullptr;
    attachments_.erase(it);
    ep->on_link_down(clock_);
  }

  bool is_attached(const Endpoint* ep) const {
    return attachments_.count(const_cast<Endpoint*>(ep)) > 0;
  }

  // ---- traffic ---------------------------------------------------------------

  void send(Endpoint* ep, Frame frame) {
    send_shared(ep, std::make_shared<const Frame>(std::move(frame)), clock_);
  }

  /// Runs a callback at a simulated instant; the clock must not have passed it.
  void schedule(SimTime at, std::function<void()> fn) {
    if (at < clock_) throw ConfigError("cannot schedule in the past");
    Event ev;
    ev.time = at;
    ev.seq = next_seq_++;
    ev.kind = Event::Timer;
    ev.timer = std::move(fn);
    queue_.push(std::move(ev));
  }

  // ---- event loop ------------------------------------------------------------

  SimTime now() const { return clock_; }

  /// Processes all events up to and including `until`, then advances the
  /// clock to `until`.
  FabricStats run_until(SimTime until) {
    while (!queue_.empty() && queue_.top().time <= until) step();
    clock_ = std::max(clock_, until);
    return stats();
  }

  /// Processes events until the queue is empty.
  FabricStats run_until_quiescent() {
    while (!queue_.empty()) step();
    return stats();
  }

  /// Processes events until `pred()` holds or the deadline passes; the clock
  /// lands on the deadline if the predicate never fired.
  bool pump_until(const std::function<bool()>& pred, SimTime deadline) {
    if (pred()) return true;
    while (!queue_.empty() && queue_.top().time <= deadline) {
      step();
      if (pred()) return true;
    }
    clock_ = std::max(clock_, deadline);
    return pred();
  }

  bool quiescent() const { return queue_.empty(); }

  FabricStats stats() const {
    FabricStats s = stats_;
    s.sim_time = clock_;
    return s;
  }

  /// Test hook: observes every endpoint delivery in processing order.
  void set_delivery_observer(std::function<void(const Frame&, const Endpoint*, SimTime)> fn) {
    observer_ = std::move(fn);
  }

 private:
  struct Channel {
    LinkParams params;
    SimTime next_free = 0;
  };

  struct Attachment {
    Endpoint* ep = nullptr;
    int sw = -1;
    int port = -1;
    Channel up;    // endpoint -> switch
    Channel down;  // switch -> endpoint
  };

  struct Trunk {
    int sw[2];
    Channel channel[2];  // [0]: sw[0]->sw[1], [1]: sw[1]->sw[0]

    int side_of(int sw_id) const { return sw[0] == sw_id ? 0 : 1; }
  };

  // A switch learns source MACs per ingress; entries point at either a local
  // endpoint port or the trunk leading toward the source.
  struct PortRef {
    enum Kind { None, EndpointPort, TrunkPort } kind = None;
    int port = -1;
    Trunk* trunk = nullptr;

    bool operator==(const PortRef& o) const {
      return kind == o.kind && port == o.port && trunk == o.trunk;
    }
  };

  struct Switch {
    std::string name;
    std::vector<Attachment*> ports;
    std::vector<Trunk*> trunks;
    std::map<MacAddress, PortRef> mac_table;
  };

  struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;
    enum Kind { SwitchIngress, Deliver, Timer } kind = Timer;
    std::shared_ptr<const Frame> frame;
    int sw = -1;
    int port = -1;       // Deliver: destination port; SwitchIngress: ingress endpoint port
    Trunk* via = nullptr;  // SwitchIngress: ingress trunk (exclusive with port)
    std::function<void()> timer;

    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  int switch_index(const std::string& name) const {
    auto it = switch_ids_.find(name);
    if (it == switch_ids_.end()) throw UnknownSwitch("no such switch: " + name);
    return it->second;
  }

  // union-find over switches for the tree invariant
  int root(int i) {
    while (parent_.size() <= static_cast<std::size_t>(i)) parent_.push_back((int)parent_.size());
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void union_(int a, int b) { parent_[root(a)] = root(b); }

  static SimTime occupancy_ns(const Channel& ch, const Frame& frame) {
    double bits = static_cast<double>(wire_length(frame)) * 8.0;
    return seconds_to_sim(ch.params.per_frame_overhead_s + bits / ch.params.bandwidth_bps);
  }

  /// Queues `frame` on `ch` no earlier than `at`; returns the arrival time or
  /// nullopt when the copy was lost. Channel occupancy is consumed either way.
  std::optional<SimTime> transmit(Channel& ch, const Frame& frame, SimTime at) {
    SimTime start = std::max(at, ch.next_free);
    SimTime busy = occupancy_ns(ch, frame);
    ch.next_free = start + busy;
    if (ch.params.loss_probability > 0 &&
        std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < ch.params.loss_probability) {
      return std::nullopt;
    }
    return start + busy + seconds_to_sim(ch.params.latency_s);
  }

  void send_shared(Endpoint* ep, std::shared_ptr<const Frame> frame, SimTime at) {
    auto it = attachments_.find(ep);
    if (it == attachments_.end()) throw NotAttached("send from detached endpoint");
    Attachment& att = *it->second;
    stats_.frames_sent++;
    auto arrive = transmit(att.up, *frame, at);
    if (!arrive) {
      stats_.loss_from_endpoint++;
      return;
    }
    Event ev;
    ev.time = *arrive;
    ev.seq = next_seq_++;
    ev.kind = Event::SwitchIngress;
    ev.frame = std::move(frame);
    ev.sw = att.sw;
    ev.port = att.port;
    queue_.push(std::move(ev));
  }

  void step() {
    Event ev = queue_.top();
    queue_.pop();
    clock_ = std::max(clock_, ev.time);
    switch (ev.kind) {
      case Event::SwitchIngress: {
        PortRef in;
        if (ev.via) {
          in.kind = PortRef::TrunkPort;
          in.trunk = ev.via;
        } else {
          in.kind = PortRef::EndpointPort;
          in.port = ev.port;
        }
        forward(ev.sw, in, ev.frame);
        break;
      }
      case Event::Deliver: {
        Attachment* att = switches_[ev.sw].ports[ev.port];
        if (!att) {
          stats_.dropped_no_endpoint++;
          break;
        }
        stats_.delivered++;
        if (observer_) observer_(*ev.frame, att->ep, clock_);
        auto emissions = att->ep->on_frame(*ev.frame, clock_);
        for (auto& em : emissions) {
          // Re-check attachment: a handler may detach its own endpoint.
          if (attachments_.count(att->ep))
            send_shared(att->ep, std::make_shared<const Frame>(std::move(em.frame)),
                        clock_ + em.delay);
        }
        break;
      }
      case Event::Timer:
        ev.timer();
        break;
    }
  }

  void forward(int sw_id, const PortRef& in, const std::shared_ptr<const Frame>& frame) {
    Switch& sw = switches_[sw_id];
    if (!frame->src.is_broadcast()) sw.mac_table[frame->src] = in;

    if (!frame->dst.is_broadcast()) {
      auto hit = sw.mac_table.find(frame->dst);
      if (hit != sw.mac_table.end()) {
        if (hit->second == in) {
          stats_.filtered_same_port++;
          return;
        }
        if (hit->second.kind == PortRef::EndpointPort) {
          // Stale entries (vacated port) drop the frame and age out.
          if (!sw.ports[hit->second.port]) {
            stats_.endpoint_copies++;
            stats_.dropped_no_endpoint++;
            sw.mac_table.erase(hit);
            return;
          }
          egress_endpoint(sw_id, hit->second.port, frame);
          return;
        }
        egress_trunk(sw_id, hit->second.trunk, frame);
        return;
      }
    }
    // Broadcast or unknown destination: flood everything except the ingress.
    for (int p = 0; p < static_cast<int>(sw.ports.size()); ++p) {
      if (in.kind == PortRef::EndpointPort && in.port == p) continue;
      if (sw.ports[p]) egress_endpoint(sw_id, p, frame);
    }
    for (Trunk* t : sw.trunks) {
      if (in.kind == PortRef::TrunkPort && in.trunk == t) continue;
      egress_trunk(sw_id, t, frame);
    }
  }

  void egress_endpoint(int sw_id, int port, const std::shared_ptr<const Frame>& frame) {
    Attachment* att = switches_[sw_id].ports[port];
    stats_.endpoint_copies++;
    auto arrive = transmit(att->down, *frame, clock_);
    if (!arrive) {
      stats_.loss_to_endpoint++;
      return;
    }
    Event ev;
    ev.time = *arrive;
    ev.seq = next_seq_++;
    ev.kind = Event::Deliver;
    ev.frame = frame;
    ev.sw = sw_id;
    ev.port = port;
    queue_.push(std::move(ev));
  }

  void egress_trunk(int sw_id, Trunk* trunk, const std::shared_ptr<const Frame>& frame) {
    int side = trunk->side_of(sw_id);
    auto arrive = transmit(trunk->channel[side], *frame, clock_);
    if (!arrive) {
      stats_.loss_on_trunk++;
      return;
    }
    Event ev;
    ev.time = *arrive;
    ev.seq = next_seq_++;
    ev.kind = Event::SwitchIngress;
    ev.frame = frame;
    ev.sw = trunk->sw[1 - side];
    ev.via = trunk;
    queue_.push(std::move(ev));
  }

  std::vector<Switch> switches_;
  std::map<std::string, int> switch_ids_;
  std::vector<std::unique_ptr<Trunk>> trunks_;
  std::map<Endpoint*, std::unique_ptr<Attachment>> attachments_;
  std::vector<int> parent_;  // union-find
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_seq_ = 0;
  SimTime clock_ = 0;
  FabricStats stats_;
  std::mt19937_64 rng_;
  std::function<void(const Frame&, const Endpoint*, SimTime)> observer_;
};

}  // namespace saf
