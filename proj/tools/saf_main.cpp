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

// saf: command-line front end for the protocol emulator.
//
//   saf discover            enumerate agents in a simulated scenario
//   saf program             stream a bitstream to agents and verify digests
//   saf bench-ptrans        distributed-transpose scaling benchmark
//   saf model reconfig      reconfiguration-time model
//   saf model cost          acquisition-cost model
//   saf model case-study    mid-job scale-up time/energy model
//   saf model calibration   simulator timing derived from measured constants
//
// Exit codes: 0 success, 1 operation failed, 2 bad usage or configuration,
// 3 environment problem (permissions, missing interface).

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "saf/saf.hpp"

namespace {

using nlohmann::json;

std::string hex_digest(const saf::Digest256& d) {
  return saf::to_hex(saf::ByteView(d.data(), d.size()));
}

saf::Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw saf::ConfigError("cannot open file: " + path);
  saf::Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

/// Scenario selection: --config beats SAF_CONFIG beats the synthetic
/// reference deployment of --agents devices.
saf::ScenarioConfig pick_scenario(const std::string& config_path, int agents,
                                  std::uint64_t seed) {
  if (!config_path.empty()) return saf::load_scenario(config_path);
  if (const char* env = std::getenv("SAF_CONFIG"); env && *env)
    return saf::load_scenario(env);
  return saf::make_reference_scenario(agents, seed);
}

std::vector<saf::MacAddress> parse_macs(const std::vector<std::string>& texts) {
  std::vector<saf::MacAddress> macs;
  for (const auto& t : texts) macs.push_back(saf::MacAddress::parse(t));
  return macs;
}

// ---- discover ------------------------------------------------------------------

int cmd_discover(const std::string& config_path, int agents, std::uint64_t seed,
                 bool as_json) {
  saf::ScenarioConfig cfg = pick_scenario(config_path, agents, seed);
  saf::Scenario sc = saf::build_scenario(cfg);
  std::size_t found = sc.host->discover(cfg.agents.size());

  if (as_json) {
    json out;
    out["expected"] = cfg.agents.size();
    out["found"] = found;
    out["devices"] = json::array();
    for (const auto& [mac, dev] : sc.host->registry().devices()) {
      out["devices"].push_back({{"mac0", dev.mac0.to_string()},
                                {"mac1", dev.mac1.to_string()},
                                {"vendor_id", dev.vendor_id},
                                {"product_id", dev.product_id},
                                {"state", saf::to_string(dev.state)}});
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "discovered " << found << " of " << cfg.agents.size() << " device(s)\n";
    for (const auto& [mac, dev] : sc.host->registry().devices()) {
      std::cout << "  " << dev.mac0.to_string() << "  " << dev.mac1.to_string() << "  vendor "
                << std::hex << std::setw(4) << std::setfill('0') << dev.vendor_id << " product "
                << std::setw(4) << dev.product_id << std::dec << std::setfill(' ') << "  "
                << saf::to_string(dev.state) << "\n";
    }
  }
  return found == cfg.agents.size() ? 0 : 1;
}

// ---- program -------------------------------------------------------------------

int cmd_program(const std::string& config_path, int agents, std::uint64_t seed,
                const std::string& rbf, const std::vector<std::string>& target_texts,
                bool as_json) {
  saf::ScenarioConfig cfg = pick_scenario(config_path, agents, seed);
  saf::Scenario sc = saf::build_scenario(cfg);
  saf::Bytes bitstream = read_file(rbf);

  sc.host->discover(cfg.agents.size());
  saf::PhaseReport report = sc.host->program(bitstream, parse_macs(target_texts));

  saf::Digest256 expected = saf::Sha256::of(bitstream);
  if (as_json) {
    json out;
    out["bitstream_bytes"] = bitstream.size();
    out["sha256"] = hex_digest(expected);
    out["elapsed_s"] = report.elapsed_s;
    out["all_ok"] = report.all_ok;
    out["devices"] = json::array();
    for (const auto& d : report.devices) {
      json jd{{"mac", d.mac.to_string()}, {"ok", d.ok}, {"attempts", d.attempts}};
      if (!d.error.empty()) jd["error"] = d.error;
      out["devices"].push_back(jd);
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "bitstream " << rbf << " (" << bitstream.size() << " bytes)\n"
              << "sha256    " << hex_digest(expected) << "\n"
              << "elapsed   " << std::fixed << std::setprecision(3) << report.elapsed_s
              << " s (simulated)\n";
    for (const auto& d : report.devices) {
      std::cout << "  " << d.mac.to_string() << "  "
                << (d.ok ? "programmed" : "FAILED: " + d.error) << "  attempts " << d.attempts
                << "\n";
    }
  }
  return report.all_ok ? 0 : 1;
}

// ---- bench-ptrans ---------------------------------------------------------------

int cmd_bench(std::uint64_t n, const std::vector<int>& sweep, const std::string& scaling,
              saf::SimTime ns_per_word, std::uint64_t seed, const std::string& csv_path,
              bool as_json) {
  saf::PtransOptions base;
  base.n = n;
  base.ns_per_word = ns_per_word;
  base.seed = seed;

  saf::PtransSweep result = scaling == "weak" ? saf::sweep_weak(base, sweep)
                                              : saf::sweep_strong(base, sweep);

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw saf::ConfigError("cannot write " + csv_path);
    csv << "devices,n,program_s,write_s,exec_collect_s,total_s,speedup,ok,sha256\n";
    for (const auto& r : result.runs)
      csv << r.devices << ',' << r.n << ',' << std::setprecision(9) << r.program_s << ','
          << r.write_s << ',' << r.exec_collect_s << ',' << r.total_s << ',' << r.speedup << ','
          << (r.ok ? 1 : 0) << ',' << hex_digest(r.result_digest) << "\n";
  }

  if (as_json) {
    json out;
    out["scaling"] = scaling;
    out["bit_exact"] = result.bit_exact;
    out["max_weak_variation"] = result.max_weak_variation;
    out["all_ok"] = result.all_ok;
    out["runs"] = json::array();
    for (const auto& r : result.runs) {
      out["runs"].push_back({{"devices", r.devices},
                             {"n", r.n},
                             {"program_s", r.program_s},
                             {"write_s", r.write_s},
                             {"exec_collect_s", r.exec_collect_s},
                             {"total_s", r.total_s},
                             {"speedup", r.speedup},
                             {"ok", r.ok},
                             {"sha256", hex_digest(r.result_digest)},
                             {"error", r.error}});
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << scaling << " scaling, matrix words are 64-bit\n"
              << std::left << std::setw(4) << "k" << std::setw(7) << "n" << std::right
              << std::setw(12) << "program_s" << std::setw(12) << "write_s" << std::setw(14)
              << "exec+coll_s" << std::setw(10) << "speedup" << "  result\n";
    for (const auto& r : result.runs) {
      std::cout << std::left << std::setw(4) << r.devices << std::setw(7) << r.n << std::right
                << std::fixed << std::setprecision(4) << std::setw(12) << r.program_s
                << std::setw(12) << r.write_s << std::setw(14) << r.exec_collect_s
                << std::setprecision(2) << std::setw(10) << r.speedup << "  "
                << (r.ok ? hex_digest(r.result_digest).substr(0, 12) : "FAILED: " + r.error)
                << "\n";
    }
    if (scaling == "weak")
      std::cout << "per-device exec+collect variation: " << std::setprecision(2)
                << result.max_weak_variation * 100 << "%\n";
  }
  bool ok = result.all_ok && (scaling == "weak" || result.bit_exact);
  return ok ? 0 : 1;
}

// ---- models --------------------------------------------------------------------

int cmd_model_reconfig(const std::vector<int>& devices, bool as_json) {
  auto rows = saf::reconfig_table(devices);
  double max_speedup = 0;
  for (const auto& r : rows) max_speedup = std::max(max_speedup, r.speedup_distinct);

  if (as_json) {
    json out;
    out["rows"] = json::array();
    for (const auto& r : rows)
      out["rows"].push_back({{"devices", r.devices},
                             {"pcie_s", r.pcie_same_s},
                             {"pcie_distinct_s", r.pcie_distinct_s},
                             {"eth_s", r.eth_s},
                             {"speedup_same", r.speedup_same},
                             {"speedup_distinct", r.speedup_distinct}});
    out["max_speedup"] = max_speedup;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << std::left << std::setw(6) << "n" << std::right << std::setw(10) << "pcie_s"
              << std::setw(16) << "pcie_dist_s" << std::setw(10) << "eth_s" << std::setw(12)
              << "speedup" << std::setw(14) << "speedup_dist\n";
    for (const auto& r : rows)
      std::cout << std::left << std::setw(6) << r.devices << std::right << std::fixed
                << std::setprecision(2) << std::setw(10) << r.pcie_same_s << std::setw(16)
                << r.pcie_distinct_s << std::setw(10) << r.eth_s << std::setw(11)
                << r.speedup_same << "x" << std::setw(13) << r.speedup_distinct << "x\n";
    std::cout << "max broadcast speedup: " << std::setprecision(2) << max_speedup << "x\n";
  }
  return 0;
}

int cmd_model_cost(const std::vector<int>& devices, bool as_json) {
  auto rows = saf::cost_table(devices);
  if (as_json) {
    json out;
    out["rows"] = json::array();
    for (const auto& r : rows)
      out["rows"].push_back({{"devices", r.devices},
                             {"hosts_per_card", r.hosts_per_card},
                             {"hosts_per_two", r.hosts_per_two},
                             {"hosts_network", r.hosts_network},
                             {"cost_per_card", r.cost_per_card},
                             {"cost_per_two", r.cost_per_two},
                             {"cost_network", r.cost_network},
                             {"savings_pct", r.savings_pct}});
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << std::left << std::setw(6) << "n" << std::right << std::setw(8) << "hosts_a"
              << std::setw(8) << "hosts_b" << std::setw(8) << "hosts_c" << std::setw(13)
              << "cost_a($)" << std::setw(13) << "cost_b($)" << std::setw(13) << "cost_c($)"
              << std::setw(12) << "savings(%)\n";
    for (const auto& r : rows)
      std::cout << std::left << std::setw(6) << r.devices << std::right << std::setw(8)
                << r.hosts_per_card << std::setw(8) << r.hosts_per_two << std::setw(8)
                << r.hosts_network << std::fixed << std::setprecision(2) << std::setw(13)
                << r.cost_per_card << std::setw(13) << r.cost_per_two << std::setw(13)
                << r.cost_network << std::setw(12) << r.savings_pct << "\n";
    std::cout << "a: one host per card   b: one host per two cards   c: single network host\n";
  }
  return 0;
}

int cmd_model_case_study(const std::vector<double>& pcts, bool as_json) {
  auto rows = saf::case_study_table(pcts);
  if (as_json) {
    json out;
    out["rows"] = json::array();
    for (const auto& r : rows)
      out["rows"].push_back({{"pct_complete", r.pct_complete},
                             {"cluster_hours", r.cluster_hours},
                             {"cluster_kj", r.cluster_kj},
                             {"saf_hours", r.saf_hours},
                             {"saf_kj", r.saf_kj},
                             {"time_reduction_pct", r.time_reduction_pct},
                             {"energy_reduction_pct", r.energy_reduction_pct}});
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << std::left << std::setw(7) << "pct" << std::right << std::setw(11) << "clus_h"
              << std::setw(11) << "clus_kJ" << std::setw(11) << "saf_h" << std::setw(11)
              << "saf_kJ" << std::setw(11) << "t_red(%)" << std::setw(11) << "e_red(%)\n";
    for (const auto& r : rows)
      std::cout << std::left << std::setw(7) << std::setprecision(0) << std::fixed
                << r.pct_complete << std::right << std::setprecision(1) << std::setw(11)
                << r.cluster_hours << std::setprecision(2) << std::setw(11) << r.cluster_kj
                << std::setprecision(1) << std::setw(11) << r.saf_hours << std::setprecision(2)
                << std::setw(11) << r.saf_kj << std::setw(11) << r.time_reduction_pct
                << std::setw(11) << r.energy_reduction_pct << "\n";
  }
  return 0;
}

int cmd_model_calibration(bool as_json) {
  saf::SimDefaults d = saf::derive_sim_defaults();
  if (as_json) {
    json out{{"frames", d.frames},
             {"per_frame_overhead_us", d.per_frame_overhead_s * 1e6},
             {"eth_throughput_mb_s", d.eth_throughput_mb_s},
             {"pcie_throughput_mb_s", d.pcie_throughput_mb_s}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << std::fixed << "broadcast stream: " << d.frames << " frames\n"
              << "per-frame host overhead: " << std::setprecision(3)
              << d.per_frame_overhead_s * 1e6 << " us\n"
              << "throughput: " << std::setprecision(2) << d.eth_throughput_mb_s
              << " MB/s broadcast, " << d.pcie_throughput_mb_s << " MB/s point-to-point\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"standalone-accelerator Ethernet protocol emulator"};
  app.set_version_flag("--version", "saf 1.0.0");
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand too

  std::string config_path;
  int agents = 20;
  std::uint64_t seed = 1;
  bool as_json = false;
  app.add_option("--config", config_path, "scenario JSON (default: $SAF_CONFIG)");
  app.add_option("--agents", agents, "agent count for the built-in scenario")
      ->check(CLI::Range(0, 200));
  app.add_option("--seed", seed, "simulation seed");
  app.add_flag("--json", as_json, "machine-readable output");

  std::function<int()> action;

  auto* discover = app.add_subcommand("discover", "enumerate agents");
  discover->callback([&] { action = [&] { return cmd_discover(config_path, agents, seed, as_json); }; });

  auto* program = app.add_subcommand("program", "broadcast a bitstream and verify digests");
  auto rbf = std::make_shared<std::string>();
  auto targets = std::make_shared<std::vector<std::string>>();
  program->add_option("--rbf", *rbf, "bitstream file")->required();
  program->add_option("--targets", *targets, "restrict to these MACs")->delimiter(',');
  program->callback([&, rbf, targets] {
    action = [&, rbf, targets] {
      return cmd_program(config_path, agents, seed, *rbf, *targets, as_json);
    };
  });

  auto* bench = app.add_subcommand("bench-ptrans", "distributed transpose benchmark");
  auto bench_n = std::make_shared<std::uint64_t>(512);
  auto bench_sweep = std::make_shared<std::vector<int>>();
  auto bench_scaling = std::make_shared<std::string>("strong");
  auto bench_npw = std::make_shared<std::int64_t>(2000);
  auto bench_csv = std::make_shared<std::string>();
  bench->add_option("--n", *bench_n, "global matrix dimension (strong) or per-device base (weak)");
  bench->add_option("--devices", *bench_sweep, "device counts to sweep")->delimiter(',');
  bench->add_option("--scaling", *bench_scaling, "strong|weak")
      ->check(CLI::IsMember({"strong", "weak"}));
  bench->add_option("--ns-per-word", *bench_npw, "modeled kernel service time per 64-bit word");
  bench->add_option("--csv", *bench_csv, "write results to CSV");
  bench->callback([&, bench_n, bench_sweep, bench_scaling, bench_npw, bench_csv] {
    action = [&, bench_n, bench_sweep, bench_scaling, bench_npw, bench_csv] {
      std::vector<int> sweep = *bench_sweep;
      if (sweep.empty()) sweep = *bench_scaling == "weak" ? std::vector<int>{1, 4, 16}
                                                          : std::vector<int>{1, 2, 4, 8};
      return cmd_bench(*bench_n, sweep, *bench_scaling, *bench_npw, seed, *bench_csv, as_json);
    };
  });

  auto* model = app.add_subcommand("model", "analytic models");
  model->require_subcommand(1);
  auto model_devices = std::make_shared<std::vector<int>>();
  auto model_pcts = std::make_shared<std::vector<double>>();

  auto* reconfig = model->add_subcommand("reconfig", "reconfiguration time vs device count");
  reconfig->add_option("--devices", *model_devices, "device counts")->delimiter(',');
  reconfig->callback([&, model_devices] {
    action = [&, model_devices] {
      std::vector<int> n = model_devices->empty()
                               ? std::vector<int>{1, 2, 4, 8, 12, 16, 20}
                               : *model_devices;
      return cmd_model_reconfig(n, as_json);
    };
  });

  auto* cost = model->add_subcommand("cost", "acquisition cost vs device count");
  cost->add_option("--devices", *model_devices, "device counts")->delimiter(',');
  cost->callback([&, model_devices] {
    action = [&, model_devices] {
      std::vector<int> n = model_devices->empty()
                               ? std::vector<int>{1, 2, 4, 8, 12, 16, 20}
                               : *model_devices;
      return cmd_model_cost(n, as_json);
    };
  });

  auto* study = model->add_subcommand("case-study", "mid-job scale-up time and energy");
  study->add_option("--pct", *model_pcts, "completion percentages")->delimiter(',');
  study->callback([&, model_pcts] {
    action = [&, model_pcts] {
      std::vector<double> p = *model_pcts;
      if (p.empty())
        for (int i = 0; i <= 100; i += 10) p.push_back(i);
      return cmd_model_case_study(p, as_json);
    };
  });

  auto* calib = model->add_subcommand("calibration", "derived simulator timing defaults");
  calib->callback([&] { action = [&] { return cmd_model_calibration(as_json); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help and --version exit 0
  }

  try {
    return action ? action() : 2;
  } catch (const saf::PermissionDenied& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const saf::NoSuchInterface& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const saf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const saf::SafError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
