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

#include <catch2/catch_amalgamated.hpp>

#include "saf/raw_socket.hpp"

#ifdef __linux__

using namespace saf;

namespace {

/// Raw sockets need CAP_NET_RAW; these tests are skipped where we lack it.
bool have_net_raw() {
  try {
    RawSocketTransport probe("definitely-not-an-interface");
    return true;  // unreachable: the interface does not exist
  } catch (const PermissionDenied&) {
    return false;
  } catch (const NoSuchInterface&) {
    return true;  // socket creation succeeded, lookup failed as expected
  }
}

}  // namespace

TEST_CASE("a bogus interface name is rejected") {
  if (!have_net_raw()) SKIP("CAP_NET_RAW unavailable");
  REQUIRE_THROWS_AS(RawSocketTransport("definitely-not-an-interface"), NoSuchInterface);
}

TEST_CASE("loopback sends a frame to ourselves") {
  if (!have_net_raw()) SKIP("CAP_NET_RAW unavailable");
  RawSocketTransport tx("lo");
  // Loopback reports an all-zero MAC; the frame still carries real addresses.
  MacAddress src = MacAddress::parse("02:53:41:46:aa:01");
  MacAddress dst = MacAddress::parse("02:53:41:46:00:01");

  bool seen = false;
  tx.set_receiver([&](const Frame& f) {
    if (f.saf_type() == SafEtherType::HostProbe && f.dst == dst) seen = true;
  });
  tx.send(make_frame(dst, src, HostProbePayload{}));
  tx.pump_until([&] { return seen; }, tx.now_s() + 2.0);
  REQUIRE(seen);
}

TEST_CASE("the transport clock advances") {
  if (!have_net_raw()) SKIP("CAP_NET_RAW unavailable");
  RawSocketTransport t("lo");
  double a = t.now_s();
  REQUIRE(a >= 0.0);
  t.pump_until([] { return false; }, t.now_s() + 0.01);
  REQUIRE(t.now_s() > a);
}

#endif  // __linux__
