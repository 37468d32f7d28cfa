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
#include <string>

#include "saf/ddr.hpp"
#include "saf/errors.hpp"
#include "saf/sim_time.hpp"

namespace saf {

/// Each kernel owns a 256-byte control-register window at
/// kernel_id * kControlStride; a command whose address falls in that window
/// addresses that kernel.
inline constexpr std::uint64_t kControlStride = 0x100;

struct KernelResult {
  std::uint16_t output_arg = 1;   ///< region the kernel wrote its result to
  std::uint64_t output_len = 0;   ///< result size in bytes (8-aligned)
  SimTime compute_ns = 0;
};

/// An accelerator function baked into a bitstream. `run` mutates DDR and
/// reports where the output landed plus the modeled compute latency.
struct KernelSlot {
  std::uint32_t kernel_id = 0;
  std::string name;
  std::uint64_t control_base = 0;
  std::uint16_t arg_count = 2;
  std::function<KernelResult(DdrMemory&, std::uint64_t cmd_data)> run;
};

/// Matrix-transpose kernel. The command word packs the block geometry as
/// (rows << 32) | cols. Input (region 0) is a rows*cols block, row-major;
/// output (region 1) is the cols*rows transpose, row-major. Compute latency
/// is modeled as ns_per_word per input word.
inline KernelSlot make_ptrans_kernel(std::uint32_t kernel_id = 1,
                                     SimTime ns_per_word = 1000) {
  KernelSlot slot;
  slot.kernel_id = kernel_id;
  slot.name = "ptrans";
  slot.control_base = kernel_id * kControlStride;
  slot.arg_count = 2;
  slot.run = [ns_per_word](DdrMemory& ddr, std::uint64_t cmd_data) {
    std::uint64_t rows = cmd_data >> 32;
    std::uint64_t cols = cmd_data & 0xFFFFFFFFull;
    if (rows == 0 || cols == 0) throw ConfigError("ptrans: empty block geometry");
    if (rows * cols * 8 > kArgRegionBytes)
      throw ConfigError("ptrans: block exceeds argument region");
    for (std::uint64_t r = 0; r < rows; ++r)
      for (std::uint64_t c = 0; c < cols; ++c)
        ddr.write_u64(1, (c * rows + r) * 8, ddr.read_u64(0, (r * cols + c) * 8));
    KernelResult res;
    res.output_arg = 1;
    res.output_len = rows * cols * 8;
    res.compute_ns = static_cast<SimTime>(rows * cols) * ns_per_word;
    return res;
  };
  return slot;
}

/// Copies cmd_data 64-bit words from region 0 to region 1. Handy for
/// exercising the command/output path without real math.
inline KernelSlot make_identity_kernel(std::uint32_t kernel_id = 2,
                                       SimTime ns_per_word = 1000) {
  KernelSlot slot;
  slot.kernel_id = kernel_id;
  slot.name = "identity";
  slot.control_base = kernel_id * kControlStride;
  slot.arg_count = 2;
  slot.run = [ns_per_word](DdrMemory& ddr, std::uint64_t cmd_data) {
    if (cmd_data * 8 > kArgRegionBytes)
      throw ConfigError("identity: word count exceeds argument region");
    for (std::uint64_t w = 0; w < cmd_data; ++w)
      ddr.write_u64(1, w * 8, ddr.read_u64(0, w * 8));
    KernelResult res;
    res.output_arg = 1;
    res.output_len = cmd_data * 8;
    res.compute_ns = static_cast<SimTime>(cmd_data) * ns_per_word;
    return res;
  };
  return slot;
}

inline KernelSlot make_kernel_by_name(const std::string& name, std::uint32_t kernel_id,
                                      SimTime ns_per_word) {
  if (name == "ptrans") return make_ptrans_kernel(kernel_id, ns_per_word);
  if (name == "identity") return make_identity_kernel(kernel_id, ns_per_word);
  throw ConfigError("unknown kernel: " + name);
}

}  // namespace saf
