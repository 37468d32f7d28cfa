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

#ifdef __linux__

#include <arpa/inet.h>
#include <linux/if_packet.h>
#include <net/ethernet.h>
#include <net/if.h>
#include <poll.h>
#include <sys/ioctl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <functional>
#include <string>

#include "saf/errors.hpp"
#include "saf/frame.hpp"
#include "saf/host.hpp"

namespace saf {

/// HostTransport over an AF_PACKET raw socket, for driving physical agents on
/// a real segment. Requires CAP_NET_RAW. Frames that fail to decode are
/// dropped silently (foreign traffic shares the wire).
class RawSocketTransport final : public HostTransport {
 public:
  explicit RawSocketTransport(const std::string& interface) {
    fd_ = ::socket(AF_PACKET, SOCK_RAW, htons(ETH_P_ALL));
    if (fd_ < 0) {
      if (errno == EPERM || errno == EACCES)
        throw PermissionDenied("raw sockets need CAP_NET_RAW (run as root or grant the cap)");
      throw FabricError(std::string("socket: ") + std::strerror(errno));
    }
    unsigned ifindex = ::if_nametoindex(interface.c_str());
    if (ifindex == 0) {
      ::close(fd_);
      fd_ = -1;
      throw NoSuchInterface("no such interface: " + interface);
    }
    sockaddr_ll addr{};
    addr.sll_family = AF_PACKET;
    addr.sll_protocol = htons(ETH_P_ALL);
    addr.sll_ifindex = static_cast<int>(ifindex);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
      int err = errno;
      ::close(fd_);
      fd_ = -1;
      throw FabricError(std::string("bind: ") + std::strerror(err));
    }

    ifreq ifr{};
    std::strncpy(ifr.ifr_name, interface.c_str(), IFNAMSIZ - 1);
    if (::ioctl(fd_, SIOCGIFHWADDR, &ifr) == 0)
      std::memcpy(mac_.octets.data(), ifr.ifr_hwaddr.sa_data, 6);
    ifindex_ = static_cast<int>(ifindex);
    epoch_ = std::chrono::steady_clock::now();
  }

  RawSocketTransport(const RawSocketTransport&) = delete;
  RawSocketTransport& operator=(const RawSocketTransport&) = delete;

  ~RawSocketTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  MacAddress mac() const override { return mac_; }

  void send(Frame frame) override {
    Bytes wire = encode_frame(frame);
    sockaddr_ll addr{};
    addr.sll_family = AF_PACKET;
    addr.sll_ifindex = ifindex_;
    addr.sll_halen = 6;
    std::memcpy(addr.sll_addr, frame.dst.octets.data(), 6);
    if (::sendto(fd_, wire.data(), wire.size(), 0, reinterpret_cast<sockaddr*>(&addr),
                 sizeof(addr)) < 0)
      throw FabricError(std::string("sendto: ") + std::strerror(errno));
  }

  double now_s() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_).count();
  }

  bool pump_until(const std::function<bool()>& pred, double deadline_s) override {
    while (!pred()) {
      double remain = deadline_s - now_s();
      if (remain <= 0) return pred();
      pollfd pfd{fd_, POLLIN, 0};
      int timeout_ms = static_cast<int>(std::min(remain * 1000.0, 1000.0)) + 1;
      int rv = ::poll(&pfd, 1, timeout_ms);
      if (rv <= 0) continue;
      std::uint8_t buf[kMaxFrameBytes];
      ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
      if (n <= 0) continue;
      try {
        Frame frame = decode_frame(ByteView(buf, static_cast<std::size_t>(n)));
        if (rx_) rx_(frame);
      } catch (const CodecError&) {
        // not ours
      }
    }
    return true;
  }

  void set_receiver(std::function<void(const Frame&)> rx) override { rx_ = std::move(rx); }

 private:
  int fd_ = -1;
  int ifindex_ = 0;
  MacAddress mac_{};
  std::chrono::steady_clock::time_point epoch_;
  std::function<void(const Frame&)> rx_;
};

}  // namespace saf

#endif  // __linux__
