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
#include <stdexcept>
#include <string>
#include <vector>

namespace saf {

/// Base class for all library errors.
class SafError : public std::runtime_error {
 public:
  explicit SafError(const std::string& what) : std::runtime_error(what) {}
};

// ---- frame / payload codec ------------------------------------------------

class CodecError : public SafError {
 public:
  using SafError::SafError;
};

class OversizedPayload : public CodecError {
 public:
  explicit OversizedPayload(std::size_t size)
      : CodecError("payload exceeds 1500 bytes: " + std::to_string(size)) {}
};

class TruncatedFrame : public CodecError {
 public:
  explicit TruncatedFrame(std::size_t size)
      : CodecError("frame below 60-byte minimum: " + std::to_string(size)) {}
};

/// Non-SAF ethertype seen where a SAF frame was required. Carries the raw
/// bytes so the caller can hand foreign traffic elsewhere.
class UnknownEtherType : public CodecError {
 public:
  UnknownEtherType(std::uint16_t ethertype, std::vector<std::uint8_t> raw)
      : CodecError("unknown ethertype 0x" + hex16(ethertype)),
        ethertype_(ethertype),
        raw_(std::move(raw)) {}

  std::uint16_t ethertype() const { return ethertype_; }
  const std::vector<std::uint8_t>& raw_bytes() const { return raw_; }

 private:
  static std::string hex16(std::uint16_t v) {
    static const char* d = "0123456789abcdef";
    std::string s(4, '0');
    for (int i = 3; i >= 0; --i, v >>= 4) s[i] = d[v & 0xF];
    return s;
  }
  std::uint16_t ethertype_;
  std::vector<std::uint8_t> raw_;
};

class MalformedPayload : public CodecError {
 public:
  MalformedPayload(const std::string& field, const std::string& why)
      : CodecError("malformed payload field '" + field + "': " + why), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// ---- fabric ----------------------------------------------------------------

class FabricError : public SafError {
 public:
  using SafError::SafError;
};

class PortOccupied : public FabricError {
 public:
  using FabricError::FabricError;
};

class UnknownSwitch : public FabricError {
 public:
  using FabricError::FabricError;
};

class NotAttached : public FabricError {
 public:
  using FabricError::FabricError;
};

class NoSuchInterface : public FabricError {
 public:
  using FabricError::FabricError;
};

class PermissionDenied : public FabricError {
 public:
  using FabricError::FabricError;
};

// ---- agent ------------------------------------------------------------------

/// Kernel registration clashed with an occupied control base address.
class AddressCollision : public SafError {
 public:
  using SafError::SafError;
};

// ---- host -------------------------------------------------------------------

/// An operation would advance a device against its lifecycle state machine.
class InvalidState : public SafError {
 public:
  using SafError::SafError;
};

class IndivisiblePartition : public SafError {
 public:
  using SafError::SafError;
};

class ConfigError : public SafError {
 public:
  using SafError::SafError;
};

}  // namespace saf
