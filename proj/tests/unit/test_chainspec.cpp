// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "sdrp/chainspec.hpp"
#include "sdrp/dsp/blocks.hpp"

using namespace sdrp;

namespace {

struct Fixture {
    Catalog catalog{3.0e8};
    Fixture() { dsp::register_builtin_blocks(catalog); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("the four-unit tx fixture parses to 4 units and 3 direct links") {
    Fixture f;
    const std::string text = read_file(std::string(SDRP_FIXTURE_DIR) + "/tx4.chain");
    const ChainGraph graph = parse_chain_spec(text, f.catalog);

    CHECK(graph.spec.name == "tx4");
    CHECK(graph.spec.sample_rate_sps == 10e6);
    REQUIRE(graph.spec.units.size() == 4);
    REQUIRE(graph.spec.links.size() == 3);
    for (const auto& link : graph.spec.links) CHECK(link.via == LinkVia::direct);
    CHECK(graph.spec.units[0].kind == "crc32");
    CHECK(graph.spec.units[2].params.at("rate") == 0);
    CHECK(graph.spec.links[2].capacity == 2048);
    CHECK(graph.descriptors[3].kind == "qam_map");
}

TEST_CASE("unknown kinds are refused") {
    Fixture f;
    const std::string text = "[chain]\nname = x\n[unit]\nname = u0\nkind = ldpc\n";
    try {
        parse_chain_spec(text, f.catalog);
        FAIL("expected UnknownKind");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unknown_kind);
    }
}

TEST_CASE("links to undeclared ports are dangling") {
    Fixture f;
    const std::string text = "[chain]\nname = x\n"
                             "[unit]\nname = a\nkind = passthrough\n"
                             "[link]\nsrc = a.out0\ndst = b.in0\n";
    try {
        parse_chain_spec(text, f.catalog);
        FAIL("expected DanglingPort");
    } catch (const Error& e) {
        CHECK(e.code() == errc::dangling_port);
    }

    const std::string bad_port = "[chain]\nname = x\n"
                                 "[unit]\nname = a\nkind = passthrough\n"
                                 "[unit]\nname = b\nkind = passthrough\n"
                                 "[link]\nsrc = a.out3\ndst = b.in0\n";
    CHECK_THROWS_AS(parse_chain_spec(bad_port, f.catalog), Error);
}

TEST_CASE("syntax errors carry line detail") {
    Fixture f;
    try {
        parse_chain_spec("[chain]\nname\n", f.catalog);
        FAIL("expected SyntaxError");
    } catch (const Error& e) {
        CHECK(e.code() == errc::syntax_error);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_chain_spec("[bogus]\n", f.catalog), Error);
    CHECK_THROWS_AS(parse_chain_spec("[unit]\nname = a\nkind = passthrough\nwidget = 3\n",
                                     f.catalog),
                    Error);
}

TEST_CASE("double-linked ports are refused") {
    Fixture f;
    const std::string text = "[chain]\nname = x\n"
                             "[unit]\nname = a\nkind = passthrough\n"
                             "[unit]\nname = b\nkind = passthrough\n"
                             "[unit]\nname = c\nkind = passthrough\n"
                             "[link]\nsrc = a.out0\ndst = c.in0\n"
                             "[link]\nsrc = b.out0\ndst = c.in0\n";
    try {
        parse_chain_spec(text, f.catalog);
        FAIL("expected PortOccupied");
    } catch (const Error& e) {
        CHECK(e.code() == errc::port_occupied);
    }
}

TEST_CASE("item kinds must match across a link") {
    Fixture f;
    const std::string text = "[chain]\nname = x\n"
                             "[unit]\nname = a\nkind = passthrough\n" // sample out
                             "[unit]\nname = b\nkind = crc32\n"       // byte in
                             "[link]\nsrc = a.out0\ndst = b.in0\n";
    CHECK_THROWS_AS(parse_chain_spec(text, f.catalog), Error);
}

TEST_CASE("direct-link cycles are refused, crossbar feedback is allowed") {
    Fixture f;
    const std::string cyclic = "[chain]\nname = x\n"
                               "[unit]\nname = a\nkind = passthrough\n"
                               "[unit]\nname = b\nkind = passthrough\n"
                               "[link]\nsrc = a.out0\ndst = b.in0\n"
                               "[link]\nsrc = b.out0\ndst = a.in0\n";
    CHECK_THROWS_AS(parse_chain_spec(cyclic, f.catalog), Error);

    const std::string feedback = "[chain]\nname = x\n"
                                 "[unit]\nname = a\nkind = passthrough\n"
                                 "[unit]\nname = b\nkind = passthrough\n"
                                 "[link]\nsrc = a.out0\ndst = b.in0\n"
                                 "[link]\nsrc = b.out0\ndst = a.in0\nvia = crossbar\n";
    CHECK_NOTHROW(parse_chain_spec(feedback, f.catalog));
}

TEST_CASE("shared and cross-node wiring must ride the crossbar") {
    Fixture f;
    const std::string shared_direct = "[chain]\nname = x\n"
                                      "[unit]\nname = a\nkind = passthrough\n"
                                      "[unit]\nname = s\nkind = fft\nshare = pool\n"
                                      "[link]\nsrc = a.out0\ndst = s.in0\n";
    CHECK_THROWS_AS(parse_chain_spec(shared_direct, f.catalog), Error);

    const std::string cross_node = "[chain]\nname = x\n"
                                   "[unit]\nname = a\nkind = passthrough\n"
                                   "[unit]\nname = b\nkind = passthrough\nnode = 2\n"
                                   "[link]\nsrc = a.out0\ndst = b.in0\n";
    CHECK_THROWS_AS(parse_chain_spec(cross_node, f.catalog), Error);
}

TEST_CASE("JSON serialization round-trips the spec") {
    Fixture f;
    const std::string text = read_file(std::string(SDRP_FIXTURE_DIR) + "/tx80211g.chain");
    const ChainSpec spec = parse_chain_spec_text(text);
    const std::string json_text = chain_spec_to_json(spec);
    const ChainSpec back = chain_spec_from_json(json_text);

    CHECK(back.name == spec.name);
    CHECK(back.sample_rate_sps == spec.sample_rate_sps);
    REQUIRE(back.units.size() == spec.units.size());
    for (size_t i = 0; i < spec.units.size(); i++) {
        CHECK(back.units[i].name == spec.units[i].name);
        CHECK(back.units[i].kind == spec.units[i].kind);
        CHECK(back.units[i].params == spec.units[i].params);
    }
    REQUIRE(back.links.size() == spec.links.size());
    for (size_t i = 0; i < spec.links.size(); i++) {
        CHECK(back.links[i].src == spec.links[i].src);
        CHECK(back.links[i].dst == spec.links[i].dst);
        CHECK(back.links[i].via == spec.links[i].via);
        CHECK(back.links[i].capacity == spec.links[i].capacity);
    }

    // the JSON document is accepted by the same entry point
    CHECK_NOTHROW(parse_chain_spec(json_text, f.catalog));
}

TEST_CASE("hex parameter values parse") {
    Fixture f;
    const std::string text = "[chain]\nname = x\n"
                             "[unit]\nname = c\nkind = crc32\nparam polynomial = 0x04C11DB7\n";
    const ChainGraph graph = parse_chain_spec(text, f.catalog);
    CHECK(graph.spec.units[0].params.at("polynomial") == 0x04C11DB7);
}

TEST_CASE("latency budget is read in microseconds") {
    Fixture f;
    const std::string text = "[chain]\nname = x\nlatency_budget_us = 10\nsample_rate_sps = 1e6\n"
                             "[unit]\nname = a\nkind = passthrough\n";
    const ChainGraph graph = parse_chain_spec(text, f.catalog);
    REQUIRE(graph.spec.latency_budget_s.has_value());
    CHECK(*graph.spec.latency_budget_s == doctest::Approx(10e-6));
}
