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
#include <compare>
#include <cstdint>
#include <string>

#include "saf/errors.hpp"

namespace saf {

struct MacAddress {
  std::array<std::uint8_t, 6> octets{};

  auto operator<=>(const MacAddress&) const = default;

  bool is_broadcast() const {
    for (auto o : octets)
      if (o != 0xFF) return false;
    return true;
  }

  static MacAddress broadcast() {
    MacAddress m;
    m.octets.fill(0xFF);
    return m;
  }

  /// Parses "aa:bb:cc:dd:ee:ff" (case-insensitive).
  static MacAddress parse(const std::string& text) {
    MacAddress m;
    if (text.size() != 17) throw ConfigError("bad MAC address: " + text);
    auto nib = [&](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      throw ConfigError("bad MAC address: " + text);
    };
    for (int i = 0; i < 6; ++i) {
      if (i > 0 && text[i * 3 - 1] != ':') throw ConfigError("bad MAC address: " + text);
      m.octets[i] = static_cast<std::uint8_t>(nib(text[i * 3]) << 4 | nib(text[i * 3 + 1]));
    }
    return m;
  }

  std::string to_string() const {
    static const char* d = "0123456789abcdef";
    std::string s;
    s.reserve(17);
    for (int i = 0; i < 6; ++i) {
      if (i) s.push_back(':');
      s.push_back(d[octets[i] >> 4]);
      s.push_back(d[octets[i] & 0xF]);
    }
    return s;
  }
};

}  // namespace saf
