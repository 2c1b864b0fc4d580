// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/chainspec.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdrp/errors.hpp"

namespace sdrp {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& text, int line_no) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (!end || *end != '\0')
        raise(errc::syntax_error, "line " + std::to_string(line_no) + ": bad number '" + text + "'");
    return v;
}

uint32_t parse_u32(const std::string& text, int line_no) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(text.c_str(), &end, 0); // accepts 0x...
    if (!end || *end != '\0' || v > 0xffffffffull)
        raise(errc::syntax_error,
              "line " + std::to_string(line_no) + ": bad integer '" + text + "'");
    return uint32_t(v);
}

PortRef parse_port_ref(const std::string& text, int line_no, bool output) {
    const auto dot = text.rfind('.');
    if (dot == std::string::npos)
        raise(errc::syntax_error,
              "line " + std::to_string(line_no) + ": port reference '" + text +
                  "' must look like unit.in0 / unit.out0");
    const std::string unit = text.substr(0, dot);
    const std::string port = text.substr(dot + 1);
    const char* prefix = output ? "out" : "in";
    if (unit.empty() || port.rfind(prefix, 0) != 0)
        raise(errc::syntax_error, "line " + std::to_string(line_no) + ": expected '" +
                                      std::string(prefix) + "N' port in '" + text + "'");
    return PortRef{unit, parse_u32(port.substr(std::strlen(prefix)), line_no)};
}

} // namespace

ChainSpec parse_chain_spec_text(const std::string& text) {
    if (!text.empty() && text.find_first_not_of(" \t\r\n") != std::string::npos &&
        text[text.find_first_not_of(" \t\r\n")] == '{')
        return chain_spec_from_json(text);

    ChainSpec spec;
    enum class Section { none, chain, unit, link };
    Section section = Section::none;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        line_no++;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                raise(errc::syntax_error, "line " + std::to_string(line_no) + ": unclosed section");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name == "chain") {
                section = Section::chain;
            } else if (name == "unit") {
                section = Section::unit;
                spec.units.emplace_back();
            } else if (name == "link") {
                section = Section::link;
                spec.links.emplace_back();
            } else {
                raise(errc::syntax_error,
                      "line " + std::to_string(line_no) + ": unknown section [" + name + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            raise(errc::syntax_error, "line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            raise(errc::syntax_error, "line " + std::to_string(line_no) + ": empty key or value");

        switch (section) {
        case Section::none:
            raise(errc::syntax_error,
                  "line " + std::to_string(line_no) + ": key outside any section");
        case Section::chain:
            if (key == "name")
                spec.name = value;
            else if (key == "latency_budget_us")
                spec.latency_budget_s = parse_double(value, line_no) * 1e-6;
            else if (key == "sample_rate_sps")
                spec.sample_rate_sps = parse_double(value, line_no);
            else
                raise(errc::syntax_error,
                      "line " + std::to_string(line_no) + ": unknown chain key '" + key + "'");
            break;
        case Section::unit: {
            UnitSpec& unit = spec.units.back();
            if (key == "name")
                unit.name = value;
            else if (key == "kind")
                unit.kind = value;
            else if (key == "prr")
                unit.prr = value;
            else if (key == "node")
                unit.node = uint8_t(parse_u32(value, line_no));
            else if (key == "share")
                unit.share = value;
            else if (key == "rate")
                unit.source_rate_sps = parse_double(value, line_no);
            else if (key == "clock_hz")
                unit.clock_hz = parse_double(value, line_no);
            else if (key.rfind("param ", 0) == 0)
                unit.params[trim(key.substr(6))] = parse_u32(value, line_no);
            else
                raise(errc::syntax_error,
                      "line " + std::to_string(line_no) + ": unknown unit key '" + key + "'");
            break;
        }
        case Section::link: {
            LinkSpec& link = spec.links.back();
            if (key == "src")
                link.src = parse_port_ref(value, line_no, true);
            else if (key == "dst")
                link.dst = parse_port_ref(value, line_no, false);
            else if (key == "via") {
                if (value == "direct")
                    link.via = LinkVia::direct;
                else if (value == "crossbar")
                    link.via = LinkVia::crossbar;
                else
                    raise(errc::syntax_error,
                          "line " + std::to_string(line_no) + ": via must be direct or crossbar");
            } else if (key == "capacity") {
                link.capacity = parse_u32(value, line_no);
            } else {
                raise(errc::syntax_error,
                      "line " + std::to_string(line_no) + ": unknown link key '" + key + "'");
            }
            break;
        }
        }
    }
    return spec;
}

std::string chain_spec_to_json(const ChainSpec& spec) {
    json doc;
    doc["chain"]["name"] = spec.name;
    doc["chain"]["sample_rate_sps"] = spec.sample_rate_sps;
    if (spec.latency_budget_s) doc["chain"]["latency_budget_us"] = *spec.latency_budget_s * 1e6;
    doc["units"] = json::array();
    for (const auto& u : spec.units) {
        json ju;
        ju["name"] = u.name;
        ju["kind"] = u.kind;
        if (!u.params.empty()) ju["params"] = u.params;
        if (u.prr) ju["prr"] = *u.prr;
        if (u.node) ju["node"] = *u.node;
        if (u.share) ju["share"] = *u.share;
        if (u.source_rate_sps) ju["rate"] = *u.source_rate_sps;
        if (u.clock_hz > 0) ju["clock_hz"] = u.clock_hz;
        doc["units"].push_back(ju);
    }
    doc["links"] = json::array();
    for (const auto& l : spec.links) {
        json jl;
        jl["src"] = l.src.unit + ".out" + std::to_string(l.src.port);
        jl["dst"] = l.dst.unit + ".in" + std::to_string(l.dst.port);
        jl["via"] = to_string(l.via);
        jl["capacity"] = l.capacity;
        doc["links"].push_back(jl);
    }
    return doc.dump();
}

ChainSpec chain_spec_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        raise(errc::syntax_error, std::string("JSON: ") + e.what());
    }
    ChainSpec spec;
    try {
        if (doc.contains("chain")) {
            const json& c = doc["chain"];
            spec.name = c.value("name", "");
            spec.sample_rate_sps = c.value("sample_rate_sps", 0.0);
            if (c.contains("latency_budget_us"))
                spec.latency_budget_s = c["latency_budget_us"].get<double>() * 1e-6;
        }
        for (const json& ju : doc.value("units", json::array())) {
            UnitSpec u;
            u.name = ju.at("name").get<std::string>();
            u.kind = ju.at("kind").get<std::string>();
            if (ju.contains("params"))
                for (auto it = ju["params"].begin(); it != ju["params"].end(); ++it)
                    u.params[it.key()] = it.value().get<uint32_t>();
            if (ju.contains("prr")) u.prr = ju["prr"].get<std::string>();
            if (ju.contains("node")) u.node = ju["node"].get<uint8_t>();
            if (ju.contains("share")) u.share = ju["share"].get<std::string>();
            if (ju.contains("rate")) u.source_rate_sps = ju["rate"].get<double>();
            if (ju.contains("clock_hz")) u.clock_hz = ju["clock_hz"].get<double>();
            spec.units.push_back(std::move(u));
        }
        for (const json& jl : doc.value("links", json::array())) {
            LinkSpec l;
            l.src = parse_port_ref(jl.at("src").get<std::string>(), 0, true);
            l.dst = parse_port_ref(jl.at("dst").get<std::string>(), 0, false);
            const std::string via = jl.value("via", "direct");
            if (via == "crossbar")
                l.via = LinkVia::crossbar;
            else if (via != "direct")
                raise(errc::syntax_error, "via must be direct or crossbar");
            l.capacity = jl.value("capacity", uint32_t(default_link_capacity));
            spec.links.push_back(std::move(l));
        }
    } catch (const json::exception& e) {
        raise(errc::syntax_error, std::string("JSON: ") + e.what());
    }
    return spec;
}

const UnitSpec* ChainGraph::find_unit(const std::string& name) const {
    for (const auto& u : spec.units)
        if (u.name == name) return &u;
    return nullptr;
}

int ChainGraph::unit_index(const std::string& name) const {
    for (size_t i = 0; i < spec.units.size(); i++)
        if (spec.units[i].name == name) return int(i);
    return -1;
}

bool ChainGraph::is_source(size_t index) const {
    return descriptors[index].n_inputs == 0;
}

bool ChainGraph::is_remote(size_t index, uint8_t local_device) const {
    return spec.units[index].node && *spec.units[index].node != local_device;
}

ChainGraph resolve_chain(const ChainSpec& spec, const Catalog& catalog, uint8_t local_device) {
    ChainGraph graph;
    graph.spec = spec;

    std::set<std::string> names;
    for (const auto& u : spec.units) {
        if (u.name.empty()) raise(errc::syntax_error, "unit with empty name");
        if (u.kind.empty()) raise(errc::syntax_error, "unit '" + u.name + "' missing kind");
        if (!names.insert(u.name).second)
            raise(errc::syntax_error, "duplicate unit name '" + u.name + "'");
        const UnitDescriptor& desc = catalog.descriptor(u.kind); // throws unknown_kind
        for (const auto& [pname, value] : u.params) {
            const RegisterSpec* reg = desc.find_register(pname);
            if (!reg)
                raise(errc::param_out_of_range, u.kind + " has no parameter '" + pname + "'");
            if (value < reg->min_value || value > reg->max_value)
                raise(errc::param_out_of_range,
                      u.name + "." + pname + " = " + std::to_string(value) + " outside range");
        }
        graph.descriptors.push_back(desc);
    }

    std::set<std::pair<int, uint32_t>> taken_inputs;
    std::set<std::pair<int, uint32_t>> taken_outputs;
    for (const auto& link : spec.links) {
        const int src = graph.unit_index(link.src.unit);
        const int dst = graph.unit_index(link.dst.unit);
        if (src < 0)
            raise(errc::dangling_port, "link source unit '" + link.src.unit + "' not declared");
        if (dst < 0)
            raise(errc::dangling_port, "link target unit '" + link.dst.unit + "' not declared");
        if (link.src.port >= graph.descriptors[src].n_outputs)
            raise(errc::dangling_port,
                  link.src.unit + ".out" + std::to_string(link.src.port) + " does not exist");
        if (link.dst.port >= graph.descriptors[dst].n_inputs)
            raise(errc::dangling_port,
                  link.dst.unit + ".in" + std::to_string(link.dst.port) + " does not exist");
        if (!taken_inputs.insert({dst, link.dst.port}).second)
            raise(errc::port_occupied,
                  link.dst.unit + ".in" + std::to_string(link.dst.port) + " already linked");
        if (!taken_outputs.insert({src, link.src.port}).second)
            raise(errc::port_occupied,
                  link.src.unit + ".out" + std::to_string(link.src.port) + " already linked");
        if (link.capacity == 0) raise(errc::invalid_argument, "link capacity must be >= 1");

        const ItemKind sk = graph.descriptors[src].output_kind(link.src.port);
        const ItemKind dk = graph.descriptors[dst].input_kind(link.dst.port);
        if (sk != dk)
            raise(errc::invalid_argument, "item kind mismatch on " + link.src.unit + " -> " +
                                              link.dst.unit + " (" + to_string(sk) + " vs " +
                                              to_string(dk) + ")");

        // Shared and cross-node wiring has to go through the switch; samples
        // are the only payload the CHDR bridges carry.
        const bool shared = spec.units[src].share || spec.units[dst].share;
        const uint8_t src_node = spec.units[src].node.value_or(local_device);
        const uint8_t dst_node = spec.units[dst].node.value_or(local_device);
        const bool cross_node = src_node != dst_node;
        if ((shared || cross_node) && link.via != LinkVia::crossbar)
            raise(errc::invalid_argument, "link " + link.src.unit + " -> " + link.dst.unit +
                                              " must be via=crossbar (shared or cross-node)");
        if (link.via == LinkVia::crossbar && sk != ItemKind::sample)
            raise(errc::invalid_argument,
                  "crossbar links carry sample streams only (" + link.src.unit + " -> " +
                      link.dst.unit + ")");
    }

    // Direct links must form a DAG; feedback is only allowed through the
    // crossbar.
    std::vector<std::vector<int>> direct_adj(spec.units.size());
    for (const auto& link : spec.links)
        if (link.via == LinkVia::direct)
            direct_adj[graph.unit_index(link.src.unit)].push_back(graph.unit_index(link.dst.unit));
    std::vector<int> state(spec.units.size(), 0); // 0 unseen, 1 on stack, 2 done
    std::function<void(int)> dfs = [&](int at) {
        state[at] = 1;
        for (int next : direct_adj[at]) {
            if (state[next] == 1)
                raise(errc::invalid_argument, "cycle through direct links at unit '" +
                                                  spec.units[next].name + "'");
            if (state[next] == 0) dfs(next);
        }
        state[at] = 2;
    };
    for (size_t i = 0; i < spec.units.size(); i++)
        if (state[i] == 0) dfs(int(i));

    return graph;
}

ChainGraph parse_chain_spec(const std::string& text, const Catalog& catalog,
                            uint8_t local_device) {
    return resolve_chain(parse_chain_spec_text(text), catalog, local_device);
}

} // namespace sdrp
