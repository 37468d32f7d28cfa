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
#include <string>
#include <vector>

#include "saf/errors.hpp"

namespace saf {

// ---- reconfiguration-time model ------------------------------------------------
//
// Three ways to load a bitstream onto n devices:
//  * Ethernet broadcast: every device in the domain reconfigures in one
//    constant-time pass, regardless of n.
//  * PCIe, same bitstream everywhere: device servers hold two cards, so two
//    loads proceed in parallel; beyond two devices the extra coordination
//    adds a fixed setup cost on top of the two parallel loads.
//  * PCIe, distinct bitstream per device: strictly sequential loads.

struct ReconfigParams {
  double pcie_seconds = 12.3;        ///< one PCIe load
  double eth_seconds = 17.76;        ///< one Ethernet broadcast pass
  double pcie_extra_seconds = 15.67; ///< coordination cost past two PCIe loads
  std::uint64_t bitstream_bytes = 97'400'000;
};

enum class ReconfigMethod { PcieSame, PcieDistinct, Ethernet };

inline const char* to_string(ReconfigMethod m) {
  switch (m) {
    case ReconfigMethod::PcieSame: return "pcie";
    case ReconfigMethod::PcieDistinct: return "pcie-distinct";
    case ReconfigMethod::Ethernet: return "eth";
  }
  return "?";
}

inline double reconfig_time_s(ReconfigMethod method, int n, const ReconfigParams& p = {}) {
  if (n < 1) throw ConfigError("device count must be positive");
  switch (method) {
    case ReconfigMethod::Ethernet:
      return p.eth_seconds;
    case ReconfigMethod::PcieSame:
      return p.pcie_seconds * std::min(n, 2) + (n > 2 ? p.pcie_extra_seconds : 0.0);
    case ReconfigMethod::PcieDistinct:
      return p.pcie_seconds * n;
  }
  throw ConfigError("bad reconfiguration method");
}

/// Best-case gain of the broadcast path: sequential distinct loads over one
/// Ethernet pass.
inline double reconfig_max_speedup(int n, const ReconfigParams& p = {}) {
  return reconfig_time_s(ReconfigMethod::PcieDistinct, n, p) / p.eth_seconds;
}

struct ReconfigRow {
  int devices = 0;
  double pcie_same_s = 0;
  double pcie_distinct_s = 0;
  double eth_s = 0;
  double speedup_same = 0;      ///< pcie_same / eth
  double speedup_distinct = 0;  ///< pcie_distinct / eth
};

inline std::vector<ReconfigRow> reconfig_table(const std::vector<int>& device_counts,
                                               const ReconfigParams& p = {}) {
  std::vector<ReconfigRow> rows;
  for (int n : device_counts) {
    ReconfigRow r;
    r.devices = n;
    r.pcie_same_s = reconfig_time_s(ReconfigMethod::PcieSame, n, p);
    r.pcie_distinct_s = reconfig_time_s(ReconfigMethod::PcieDistinct, n, p);
    r.eth_s = reconfig_time_s(ReconfigMethod::Ethernet, n, p);
    r.speedup_same = r.pcie_same_s / r.eth_s;
    r.speedup_distinct = r.pcie_distinct_s / r.eth_s;
    rows.push_back(r);
  }
  return rows;
}

// ---- acquisition-cost model ------------------------------------------------------
//
// Three cluster shapes for n FPGAs: one host per card, one host per two
// cards, and a single host reaching every card over the switched network.

struct CostParams {
  double host_cost = 1099.99;
  double fpga_cost = 749.99;
};

inline int hosts_one_per_card(int n) { return n; }
inline int hosts_one_per_two_cards(int n) { return (n + 1) / 2; }
inline int hosts_single(int) { return 1; }

inline double setup_cost(int hosts, int fpgas, const CostParams& p = {}) {
  return hosts * p.host_cost + fpgas * p.fpga_cost;
}

struct CostRow {
  int devices = 0;
  int hosts_per_card = 0;
  int hosts_per_two = 0;
  int hosts_network = 1;
  double cost_per_card = 0;
  double cost_per_two = 0;
  double cost_network = 0;
  double savings_pct = 0;  ///< network setup vs the cheaper host-bound setup
};

inline CostRow cost_row(int n, const CostParams& p = {}) {
  CostRow r;
  r.devices = n;
  r.hosts_per_card = hosts_one_per_card(n);
  r.hosts_per_two = hosts_one_per_two_cards(n);
  r.hosts_network = hosts_single(n);
  r.cost_per_card = setup_cost(r.hosts_per_card, n, p);
  r.cost_per_two = setup_cost(r.hosts_per_two, n, p);
  r.cost_network = setup_cost(r.hosts_network, n, p);
  double best_other = std::min(r.cost_per_card, r.cost_per_two);
  r.savings_pct = (best_other - r.cost_network) / best_other * 100.0;
  return r;
}

inline std::vector<CostRow> cost_table(const std::vector<int>& device_counts,
                                       const CostParams& p = {}) {
  std::vector<CostRow> rows;
  for (int n : device_counts) rows.push_back(cost_row(n, p));
  return rows;
}

// ---- mid-job scale-up case study ---------------------------------------------------
//
// A job sized for `job_hours` on `base_cards` FPGAs is `pct` percent done when
// as many again become available. A conventional cluster can only use them by
// restarting the job on the doubled machine (worth it only if that finishes
// sooner); the network-attached setup adopts them in place and finishes the
// remaining work at double speed, paying only a small host idle-wait power
// draw for having watched the queue until the cards arrived.

struct EnergyParams {
  double fpga_power_mw = 68;        ///< draw per card while computing
  double host_wait_power_mw = 10;   ///< network host idling until cards arrive
  double job_hours = 10;
  int base_cards = 4;
  double adopt_speedup = 2;         ///< factor once the extra cards join
};

struct CaseStudyRow {
  double pct_complete = 0;
  double cluster_hours = 0;
  double cluster_kj = 0;
  double saf_hours = 0;
  double saf_kj = 0;
  double time_reduction_pct = 0;
  double energy_reduction_pct = 0;
};

inline double mwh_to_kj(double mwh) { return mwh * 3.6e-3; }

inline CaseStudyRow case_study_row(double pct, const EnergyParams& p = {}) {
  if (pct < 0 || pct > 100) throw ConfigError("completion percentage out of range");
  double t = pct / 100.0 * p.job_hours;  // hours elapsed when the cards show up
  CaseStudyRow r;
  r.pct_complete = pct;

  // Cluster: restart on 2x the cards iff that beats letting the job finish.
  double restart_hours = t + p.job_hours / p.adopt_speedup;
  bool restart = restart_hours < p.job_hours;
  double cards = p.base_cards;
  if (restart) {
    r.cluster_hours = restart_hours;
    r.cluster_kj = mwh_to_kj(p.fpga_power_mw *
                             (cards * t + cards * p.adopt_speedup * (p.job_hours / p.adopt_speedup)));
  } else {
    r.cluster_hours = p.job_hours;
    r.cluster_kj = mwh_to_kj(p.fpga_power_mw * cards * p.job_hours);
  }

  // Network attach: finish the remaining (1 - pct) at double speed. Card
  // energy is invariant (half the cards for twice the time cancels); the
  // only extra is the host's idle wait, which vanishes if the job already
  // finished when the cards arrived.
  r.saf_hours = t + (p.job_hours - t) / p.adopt_speedup;
  r.saf_kj = mwh_to_kj(p.fpga_power_mw * cards * p.job_hours);
  if (pct < 100.0) r.saf_kj += mwh_to_kj(p.host_wait_power_mw * t);

  r.time_reduction_pct = (r.cluster_hours - r.saf_hours) / r.cluster_hours * 100.0;
  r.energy_reduction_pct = (r.cluster_kj - r.saf_kj) / r.cluster_kj * 100.0;
  return r;
}

inline std::vector<CaseStudyRow> case_study_table(const std::vector<double>& pcts,
                                                  const EnergyParams& p = {}) {
  std::vector<CaseStudyRow> rows;
  for (double pct : pcts) rows.push_back(case_study_row(pct, p));
  return rows;
}

// ---- simulator calibration -----------------------------------------------------------
//
// The simulator's host link is calibrated so that one full-bitstream
// broadcast takes the measured Ethernet reconfiguration time: the per-frame
// overhead is that time spread across the chunked stream.

struct SimDefaults {
  std::uint64_t frames = 0;
  double per_frame_overhead_s = 0;
  double eth_throughput_mb_s = 0;   ///< MB = 1e6 bytes
  double pcie_throughput_mb_s = 0;
};

inline SimDefaults derive_sim_defaults(const ReconfigParams& p = {},
                                       std::uint32_t chunk_bytes = 1024) {
  SimDefaults d;
  d.frames = (p.bitstream_bytes + chunk_bytes - 1) / chunk_bytes;
  d.per_frame_overhead_s = p.eth_seconds / static_cast<double>(d.frames);
  d.eth_throughput_mb_s = static_cast<double>(p.bitstream_bytes) / p.eth_seconds / 1e6;
  d.pcie_throughput_mb_s = static_cast<double>(p.bitstream_bytes) / p.pcie_seconds / 1e6;
  return d;
}

}  // namespace saf
