// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdrp/catalog.hpp"

namespace sdrp {

// Declarative chain description. Two serializations are accepted:
//
// Sectioned key-value text:
//
//   [chain]
//   name = tx-80211g
//   latency_budget_us = 10
//   sample_rate_sps = 80e6
//
//   [unit]
//   name = fft0
//   kind = fft
//   param length = 64
//   prr = prr0            # optional: host in this PRR partition
//   node = 2              # optional: deploy on this device
//   share = fft-pool      # optional: bind to a globally shared instance
//   rate = 40e6           # optional: source rate override
//
//   [link]
//   src = crc0.out0
//   dst = coder0.in0
//   via = direct          # direct | crossbar
//   capacity = 1024
//
// or the same content as a single JSON document with top-level keys
// "chain", "units", "links".

struct PortRef {
    std::string unit;
    uint32_t port = 0;

    bool operator==(const PortRef&) const = default;
};

struct UnitSpec {
    std::string name;
    std::string kind;
    std::map<std::string, uint32_t> params;
    std::optional<std::string> prr;
    std::optional<uint8_t> node;
    std::optional<std::string> share;
    std::optional<double> source_rate_sps;
    double clock_hz = 0; // 0 = platform fabric clock
};

struct LinkSpec {
    PortRef src;
    PortRef dst;
    LinkVia via = LinkVia::direct;
    uint32_t capacity = default_link_capacity;
};

struct ChainSpec {
    std::string name;
    std::optional<double> latency_budget_s;
    double sample_rate_sps = 0;
    std::vector<UnitSpec> units;
    std::vector<LinkSpec> links;
};

// Auto-detects the serialization (a leading '{' selects JSON). Throws
// errc::syntax_error on malformed input.
ChainSpec parse_chain_spec_text(const std::string& text);
std::string chain_spec_to_json(const ChainSpec& spec);
ChainSpec chain_spec_from_json(const std::string& json_text);

// A chain spec resolved against a catalog: kinds and parameters checked,
// link references verified, structure validated (one link per port, direct
// links acyclic, crossbar-only wiring for shared/remote units).
struct ChainGraph {
    ChainSpec spec;
    std::vector<UnitDescriptor> descriptors; // aligned with spec.units

    const UnitSpec* find_unit(const std::string& name) const;
    int unit_index(const std::string& name) const; // -1 when absent
    bool is_source(size_t index) const;
    bool is_remote(size_t index, uint8_t local_device) const;
};

// Throws errc::unknown_kind, errc::dangling_port, errc::param_out_of_range,
// errc::port_occupied, errc::syntax_error, errc::invalid_argument.
ChainGraph resolve_chain(const ChainSpec& spec, const Catalog& catalog, uint8_t local_device = 0);

// Convenience: parse + resolve.
ChainGraph parse_chain_spec(const std::string& text, const Catalog& catalog,
                            uint8_t local_device = 0);

} // namespace sdrp
