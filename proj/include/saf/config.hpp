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
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "saf/agent.hpp"
#include "saf/host.hpp"
#include "saf/kernels.hpp"
#include "saf/models.hpp"

namespace saf {

// Scenario files describe a simulated deployment: switches, trunks, agents
// with their kernels, the host port, and orchestrator options. JSON with //
// comments allowed. All link fields are optional:
//   {"bandwidth_gbps": 10, "latency_us": 1, "per_frame_overhead_us": 0,
//    "loss_probability": 0}

struct KernelSpec {
  std::string name = "ptrans";
  std::uint32_t id = 1;
  SimTime ns_per_word = 2000;
};

struct AgentSpec {
  MacAddress mac0{};
  MacAddress mac1{};
  std::uint16_t vendor_id = 0x1172;
  std::uint16_t product_id = 0x0385;
  std::string switch_name;
  int port = 0;
  LinkParams link;
  std::vector<KernelSpec> kernels;
};

struct SwitchSpec {
  std::string name;
  int ports = 12;
};

struct TrunkSpec {
  std::string a, b;
  LinkParams link;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  MacAddress host_mac = MacAddress::parse("02:53:41:46:aa:01");
  std::string host_switch = "sw0";
  int host_port = 0;
  LinkParams host_link{10e9, 1e-6, derive_sim_defaults().per_frame_overhead_s, 0.0};
  std::vector<SwitchSpec> switches;
  std::vector<TrunkSpec> trunks;
  std::vector<AgentSpec> agents;
  HostOptions host_options;
};

namespace detail {

inline LinkParams parse_link(const nlohmann::json& j, LinkParams base = {}) {
  LinkParams p = base;
  if (j.contains("bandwidth_gbps")) p.bandwidth_bps = j["bandwidth_gbps"].get<double>() * 1e9;
  if (j.contains("latency_us")) p.latency_s = j["latency_us"].get<double>() * 1e-6;
  if (j.contains("per_frame_overhead_us"))
    p.per_frame_overhead_s = j["per_frame_overhead_us"].get<double>() * 1e-6;
  if (j.contains("loss_probability")) p.loss_probability = j["loss_probability"].get<double>();
  return p;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
  ScenarioConfig cfg;
  try {
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("host")) {
      const auto& h = j["host"];
      if (h.contains("mac")) cfg.host_mac = MacAddress::parse(h["mac"].get<std::string>());
      if (h.contains("switch")) cfg.host_switch = h["switch"].get<std::string>();
      if (h.contains("port")) cfg.host_port = h["port"].get<int>();
      if (h.contains("link")) cfg.host_link = detail::parse_link(h["link"], cfg.host_link);
    }
    for (const auto& s : j.value("switches", nlohmann::json::array())) {
      SwitchSpec sw;
      sw.name = s.at("name").get<std::string>();
      sw.ports = s.value("ports", 12);
      cfg.switches.push_back(sw);
    }
    for (const auto& t : j.value("trunks", nlohmann::json::array())) {
      TrunkSpec tr;
      tr.a = t.at("a").get<std::string>();
      tr.b = t.at("b").get<std::string>();
      if (t.contains("link")) tr.link = detail::parse_link(t["link"]);
      cfg.trunks.push_back(tr);
    }
    for (const auto& a : j.value("agents", nlohmann::json::array())) {
      AgentSpec ag;
      ag.mac0 = MacAddress::parse(a.at("mac0").get<std::string>());
      ag.mac1 = a.contains("mac1") ? MacAddress::parse(a["mac1"].get<std::string>()) : ag.mac0;
      ag.vendor_id = a.value("vendor_id", 0x1172);
      ag.product_id = a.value("product_id", 0x0385);
      ag.switch_name = a.at("switch").get<std::string>();
      ag.port = a.at("port").get<int>();
      if (a.contains("link")) ag.link = detail::parse_link(a["link"]);
      for (const auto& k : a.value("kernels", nlohmann::json::array())) {
        KernelSpec ks;
        ks.name = k.value("name", std::string("ptrans"));
        ks.id = k.value("id", 1u);
        ks.ns_per_word = k.value("ns_per_word", static_cast<SimTime>(2000));
        ag.kernels.push_back(ks);
      }
      cfg.agents.push_back(std::move(ag));
    }
    if (j.contains("host_options")) {
      const auto& o = j["host_options"];
      cfg.host_options.probe_rounds = o.value("probe_rounds", cfg.host_options.probe_rounds);
      cfg.host_options.probe_wait_s = o.value("probe_wait_s", cfg.host_options.probe_wait_s);
      cfg.host_options.max_retries = o.value("max_retries", cfg.host_options.max_retries);
      cfg.host_options.timeout_factor =
          o.value("timeout_factor", cfg.host_options.timeout_factor);
      cfg.host_options.min_timeout_s = o.value("min_timeout_s", cfg.host_options.min_timeout_s);
      cfg.host_options.chunk_bytes = o.value("chunk_bytes", cfg.host_options.chunk_bytes);
      cfg.host_options.write_words_per_frame =
          o.value("write_words_per_frame", cfg.host_options.write_words_per_frame);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad scenario: ") + e.what());
  }
  cfg.host_options.host_link = cfg.host_link;
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/true,
                              /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return parse_scenario(j);
}

/// The reference deployment: 12-port switches chained in a line, ten agents
/// per switch, host on the first switch, host link calibrated from the
/// measured broadcast reconfiguration time.
inline ScenarioConfig make_reference_scenario(int n_agents, std::uint64_t seed = 1) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  int per = 10;
  int n_switches = std::max(1, (n_agents + per - 1) / per);
  for (int s = 0; s < n_switches; ++s)
    cfg.switches.push_back(SwitchSpec{"sw" + std::to_string(s), per + 2});
  for (int s = 0; s + 1 < n_switches; ++s)
    cfg.trunks.push_back(TrunkSpec{"sw" + std::to_string(s), "sw" + std::to_string(s + 1), {}});
  for (int i = 0; i < n_agents; ++i) {
    AgentSpec ag;
    ag.mac0 = MacAddress{{0x02, 0x53, 0x41, 0x46, 0x00, static_cast<std::uint8_t>(i + 1)}};
    ag.mac1 = MacAddress{{0x02, 0x53, 0x41, 0x46, 0x80, static_cast<std::uint8_t>(i + 1)}};
    ag.switch_name = "sw" + std::to_string(i / per);
    ag.port = 1 + i % per;
    ag.kernels.push_back(KernelSpec{});
    cfg.agents.push_back(std::move(ag));
  }
  cfg.host_options.host_link = cfg.host_link;
  return cfg;
}

/// A live scenario: fabric, agents, transport, orchestrator, wired together
/// and ready to run. Movable-only bundle; members are destroyed in reverse
/// declaration order, so the fabric outlives everything attached to it.
struct Scenario {
  std::unique_ptr<Fabric> fabric;
  std::vector<std::unique_ptr<AgentShell>> agents;
  std::unique_ptr<SimHostTransport> transport;
  std::unique_ptr<Orchestrator> host;

  AgentShell& agent(std::size_t i) { return *agents.at(i); }
};

inline Scenario build_scenario(const ScenarioConfig& cfg) {
  Scenario sc;
  sc.fabric = std::make_unique<Fabric>(cfg.seed);
  for (const auto& sw : cfg.switches) sc.fabric->add_switch(sw.name, sw.ports);
  for (const auto& tr : cfg.trunks) sc.fabric->add_trunk(tr.a, tr.b, tr.link);
  for (const auto& ag : cfg.agents) {
    AgentConfig acfg;
    acfg.mac0 = ag.mac0;
    acfg.mac1 = ag.mac1;
    acfg.vendor_id = ag.vendor_id;
    acfg.product_id = ag.product_id;
    auto agent = std::make_unique<AgentShell>(acfg);
    for (const auto& k : ag.kernels)
      agent->register_kernel(make_kernel_by_name(k.name, k.id, k.ns_per_word));
    sc.fabric->attach(agent.get(), ag.switch_name, ag.port, ag.link);
    sc.agents.push_back(std::move(agent));
  }
  sc.transport = std::make_unique<SimHostTransport>(*sc.fabric, cfg.host_mac);
  sc.fabric->attach(sc.transport.get(), cfg.host_switch, cfg.host_port, cfg.host_link);
  sc.host = std::make_unique<Orchestrator>(*sc.transport, cfg.host_options);
  return sc;
}

}  // namespace saf
