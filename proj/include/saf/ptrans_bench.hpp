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
#include <memory>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "saf/agent.hpp"
#include "saf/host.hpp"
#include "saf/models.hpp"

namespace saf {

/// Distributed matrix transpose over the emulated fabric.
///
/// The global n*n matrix of 64-bit words lives on the host, row-major. It is
/// partitioned by block columns: device d receives columns [d*c, (d+1)*c)
/// as an n*c row-major block (argument 0), transposes it on the accelerator,
/// and streams back the c*n row-major result, which is rows [d*c, (d+1)*c)
/// of the global transpose. Host-side reassembly is plain concatenation in
/// device order.
///
/// The reported speedup covers the execute+collect span only; programming and
/// argument staging are reported separately (the host link serializes them,
/// so they are constant or linear in the problem size regardless of device
/// count).
struct PtransOptions {
  std::uint64_t n = 512;             ///< global dimension (strong scaling)
  int devices = 1;
  SimTime ns_per_word = 2000;        ///< kernel service rate; compute-bound default
  std::uint64_t seed = 1;            ///< matrix fill and fabric RNG
  std::uint64_t bitstream_bytes = 256 * 1024;  ///< synthetic image for the program phase
  int agents_per_switch = 10;
  LinkParams host_link{10e9, 1e-6, derive_sim_defaults().per_frame_overhead_s, 0.0};
  LinkParams agent_link{10e9, 1e-6, 0.0, 0.0};
  LinkParams trunk_link{10e9, 1e-6, 0.0, 0.0};
};

struct PtransRun {
  int devices = 0;
  std::uint64_t n = 0;          ///< global dimension actually used
  bool ok = false;
  std::string error;
  double program_s = 0;
  double write_s = 0;
  double exec_collect_s = 0;
  double total_s = 0;
  Digest256 result_digest{};    ///< SHA-256 of the reassembled transpose
  double speedup = 0;           ///< vs the first run of a sweep (filled there)
};

namespace detail {

inline MacAddress bench_agent_mac(int i, bool second_port) {
  MacAddress m = MacAddress::parse("02:53:41:46:00:00");
  m.octets[4] = second_port ? 0x80 : 0x00;
  m.octets[5] = static_cast<std::uint8_t>(i + 1);
  return m;
}

inline Bytes random_words_buffer(std::uint64_t words, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bytes buf(words * 8);
  for (std::uint64_t i = 0; i < words; ++i) {
    std::uint64_t w = rng();
    for (int b = 0; b < 8; ++b)
      buf[i * 8 + b] = static_cast<std::uint8_t>(w >> (56 - 8 * b));
  }
  return buf;
}

/// Host-side reference: transpose of an n*n row-major word matrix.
inline Bytes reference_transpose(const Bytes& a, std::uint64_t n) {
  Bytes out(a.size());
  for (std::uint64_t r = 0; r < n; ++r)
    for (std::uint64_t c = 0; c < n; ++c)
      for (int b = 0; b < 8; ++b) out[(c * n + r) * 8 + b] = a[(r * n + c) * 8 + b];
  return out;
}

}  // namespace detail

inline PtransRun run_ptrans(const PtransOptions& opt) {
  PtransRun run;
  run.devices = opt.devices;
  run.n = opt.n;
  if (opt.devices < 1) throw ConfigError("device count must be positive");
  if (opt.n % opt.devices != 0)
    throw IndivisiblePartition("matrix dimension " + std::to_string(opt.n) +
                               " not divisible by " + std::to_string(opt.devices) + " devices");
  std::uint64_t cols = opt.n / opt.devices;
  if (opt.n * cols * 8 > kArgRegionBytes)
    throw ConfigError("per-device block exceeds the argument region");

  // Topology: chain of switches, up to agents_per_switch agents each, host on
  // the first switch.
  Fabric fabric(opt.seed);
  int n_switches = std::max(1, (opt.devices + opt.agents_per_switch - 1) / opt.agents_per_switch);
  for (int s = 0; s < n_switches; ++s)
    fabric.add_switch("sw" + std::to_string(s), opt.agents_per_switch + 2);
  for (int s = 0; s + 1 < n_switches; ++s)
    fabric.add_trunk("sw" + std::to_string(s), "sw" + std::to_string(s + 1), opt.trunk_link);

  std::vector<std::unique_ptr<AgentShell>> agents;
  for (int i = 0; i < opt.devices; ++i) {
    AgentConfig cfg;
    cfg.mac0 = detail::bench_agent_mac(i, false);
    cfg.mac1 = detail::bench_agent_mac(i, true);
    auto agent = std::make_unique<AgentShell>(cfg);
    agent->register_kernel(make_ptrans_kernel(1, opt.ns_per_word));
    std::string sw = "sw" + std::to_string(i / opt.agents_per_switch);
    fabric.attach(agent.get(), sw, 1 + i % opt.agents_per_switch, opt.agent_link);
    agents.push_back(std::move(agent));
  }

  SimHostTransport transport(fabric, MacAddress::parse("02:53:41:46:aa:01"));
  fabric.attach(&transport, "sw0", 0, opt.host_link);
  HostOptions hopt;
  hopt.host_link = opt.host_link;
  Orchestrator host(transport, hopt);

  if (host.discover(opt.devices) != static_cast<std::size_t>(opt.devices)) {
    run.error = "discovery incomplete";
    return run;
  }

  Bytes bitstream = detail::random_words_buffer(opt.bitstream_bytes / 8, opt.seed ^ 0xb17);
  PhaseReport prog = host.program(bitstream);
  run.program_s = prog.elapsed_s;
  if (!prog.all_ok) {
    run.error = "programming failed";
    return run;
  }

  Bytes matrix = detail::random_words_buffer(opt.n * opt.n, opt.seed);
  std::vector<Bytes> blocks(opt.devices);
  for (int d = 0; d < opt.devices; ++d) {
    Bytes& blk = blocks[d];
    blk.resize(opt.n * cols * 8);
    for (std::uint64_t r = 0; r < opt.n; ++r)
      std::copy_n(matrix.data() + (r * opt.n + d * cols) * 8, cols * 8,
                  blk.data() + r * cols * 8);
  }
  std::vector<std::pair<MacAddress, ByteView>> writes;
  for (int d = 0; d < opt.devices; ++d)
    writes.emplace_back(agents[d]->mac(), ByteView(blocks[d]));
  PhaseReport wr = host.write_args(writes, 0);
  run.write_s = wr.elapsed_s;
  if (!wr.all_ok) {
    run.error = "argument staging failed";
    return run;
  }

  std::vector<std::tuple<MacAddress, std::uint64_t, std::uint64_t>> launches;
  for (int d = 0; d < opt.devices; ++d)
    launches.emplace_back(agents[d]->mac(), 1 * kControlStride, opt.n << 32 | cols);
  double compute_hint = static_cast<double>(opt.n * cols) * opt.ns_per_word * 1e-9;
  CollectResult coll =
      host.execute_and_collect(launches, opt.n * cols * 8, compute_hint);
  run.exec_collect_s = coll.report.elapsed_s;
  if (!coll.report.all_ok) {
    run.error = "collection failed";
    return run;
  }

  Bytes result;
  result.reserve(matrix.size());
  for (int d = 0; d < opt.devices; ++d) {
    const Bytes& part = coll.outputs.at(agents[d]->mac());
    result.insert(result.end(), part.begin(), part.end());
  }
  if (result != detail::reference_transpose(matrix, opt.n)) {
    run.error = "result mismatch vs host reference";
    return run;
  }
  run.result_digest = Sha256::of(result);
  run.total_s = run.program_s + run.write_s + run.exec_collect_s;
  run.ok = true;
  return run;
}

struct PtransSweep {
  std::vector<PtransRun> runs;
  bool all_ok = false;
  bool bit_exact = false;        ///< every run reassembled identical bytes (strong mode)
  double max_weak_variation = 0; ///< (max-min)/min of exec+collect across runs
};

inline void finish_sweep(PtransSweep& sweep);

/// Strong scaling: fixed global n across the device counts. Speedups are
/// relative to the first (smallest) count.
inline PtransSweep sweep_strong(PtransOptions base, const std::vector<int>& device_counts) {
  PtransSweep sweep;
  for (int k : device_counts) {
    PtransOptions opt = base;
    opt.devices = k;
    sweep.runs.push_back(run_ptrans(opt));
  }
  finish_sweep(sweep);
  return sweep;
}

/// Weak scaling: the per-device block is held at base.n * (base.n / k) words,
/// so the global dimension grows as n0 * sqrt(k); k must be a perfect square
/// (and sqrt(k) must divide n0) to keep the partition exact.
inline PtransSweep sweep_weak(PtransOptions base, const std::vector<int>& device_counts) {
  PtransSweep sweep;
  for (int k : device_counts) {
    int root = static_cast<int>(std::llround(std::sqrt(static_cast<double>(k))));
    if (root * root != k)
      throw IndivisiblePartition("weak scaling needs a perfect-square device count, got " +
                                 std::to_string(k));
    PtransOptions opt = base;
    opt.devices = k;
    opt.n = base.n * root;
    sweep.runs.push_back(run_ptrans(opt));
  }
  finish_sweep(sweep);
  return sweep;
}

inline void finish_sweep(PtransSweep& sweep) {
  sweep.all_ok = !sweep.runs.empty();
  sweep.bit_exact = true;
  double lo = 0, hi = 0;
  bool first = true;
  for (PtransRun& run : sweep.runs) {
    sweep.all_ok = sweep.all_ok && run.ok;
    if (!run.ok) continue;
    run.speedup = sweep.runs.front().exec_collect_s / run.exec_collect_s;
    if (run.result_digest != sweep.runs.front().result_digest) sweep.bit_exact = false;
    if (first || run.exec_collect_s < lo) lo = run.exec_collect_s;
    if (first || run.exec_collect_s > hi) hi = run.exec_collect_s;
    first = false;
  }
  if (!first && lo > 0) sweep.max_weak_variation = (hi - lo) / lo;
}

}  // namespace saf
