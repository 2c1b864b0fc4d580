// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sdrp/dsp/blocks.hpp"
#include "sdrp/executor.hpp"
#include "sdrp/unit.hpp"

using namespace sdrp;

namespace {

struct CatalogFixture {
    Catalog catalog{3.0e8};
    CatalogFixture() { dsp::register_builtin_blocks(catalog); }
};

} // namespace

TEST_CASE("registering a kind twice is refused") {
    CatalogFixture fixture;
    Catalog& catalog = fixture.catalog;
    UnitDescriptor d;
    d.kind = "fft"; // already present
    d.throughput_sps = 1e6;
    try {
        catalog.register_kind(d, [](const UnitDescriptor&, const BlockEnv&) {
            return std::make_unique<dsp::StreamSinkBlock>();
        });
        FAIL("expected DuplicateKind");
    } catch (const Error& e) {
        CHECK(e.code() == errc::duplicate_kind);
    }
}

TEST_CASE("descriptor invariants are enforced at registration") {
    Catalog catalog;
    UnitDescriptor d;
    d.kind = "bogus";
    d.throughput_sps = 0; // must be positive
    auto factory = [](const UnitDescriptor&, const BlockEnv&) -> std::unique_ptr<Block> {
        return std::make_unique<dsp::StreamSinkBlock>();
    };
    CHECK_THROWS_AS(catalog.register_kind(d, factory), Error);

    d.throughput_sps = 1e6;
    d.register_map.push_back({2, "misaligned", 0, 1, 0});
    CHECK_THROWS_AS(catalog.register_kind(d, factory), Error);

    d.register_map = {{0, "a", 0, 1, 0}, {0, "b", 0, 1, 0}}; // duplicate offset
    CHECK_THROWS_AS(catalog.register_kind(d, factory), Error);

    // declared throughput above what the clock could deliver
    d.register_map.clear();
    d.samples_out_per_step = 1;
    d.cycles_per_step = 1;
    d.throughput_sps = 4.0e8; // > 3.0e8 fabric ceiling
    CHECK_THROWS_AS(catalog.register_kind(d, factory), Error);
}

TEST_CASE("catalog enumeration is deterministic and complete") {
    CatalogFixture fixture;
    Catalog& catalog = fixture.catalog;
    const auto first = catalog.list();
    const auto second = catalog.list();
    REQUIRE(first.size() == second.size());
    for (size_t i = 0; i < first.size(); i++) {
        CHECK(first[i].kind == second[i].kind);
        CHECK(first[i].throughput_sps == second[i].throughput_sps);
        CHECK(first[i].register_map.size() == second[i].register_map.size());
        if (i > 0) CHECK(first[i - 1].kind < first[i].kind); // sorted, stable
    }
    CHECK(catalog.has("fft"));
    CHECK(catalog.descriptor("fft").cost_logic_cells == 4000);
    CHECK(catalog.descriptor("fft").cost_dsp_slices == 24);
}

TEST_CASE("create_unit applies defaults overlaid with initial params") {
    CatalogFixture fixture;
    Catalog& catalog = fixture.catalog;
    auto fft = create_unit(catalog, "fft", {{"length", 64}});
    CHECK(fft->regs().read_named("length") == 64);
    CHECK(fft->descriptor().kind == "fft");

    auto other = create_unit(catalog, "fft", {});
    CHECK(other->regs().read_named("length") == 64); // default
    CHECK(other->id() != fft->id());
}

TEST_CASE("create_unit rejects bad kinds and bad params") {
    CatalogFixture fixture;
    Catalog& catalog = fixture.catalog;
    try {
        create_unit(catalog, "nosuch", {});
        FAIL("expected UnknownKind");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unknown_kind);
    }
    try {
        create_unit(catalog, "fft", {{"length", 3}}); // below range
        FAIL("expected ParamOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == errc::param_out_of_range);
    }
    try {
        create_unit(catalog, "fft", {{"length", 60}}); // in range, not a power of two
        FAIL("expected ParamOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == errc::param_out_of_range);
    }
    try {
        create_unit(catalog, "fft", {{"girth", 64}});
        FAIL("expected ParamOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == errc::param_out_of_range);
    }
}

TEST_CASE("register write/read semantics") {
    CatalogFixture fixture;
    Catalog& catalog = fixture.catalog;
    auto crc = create_unit(catalog, "crc32", {});

    // write then read back
    crc->regs().write_named("polynomial", 0x8005);
    CHECK(crc->regs().read_named("polynomial") == 0x8005);

    // last-writer-wins
    crc->regs().write_named("polynomial", 0x1021);
    crc->regs().write_named("polynomial", 0x04C11DB7);
    CHECK(crc->regs().read_named("polynomial") == 0x04C11DB7);

    // unknown offset
    try {
        crc->regs().write(0xFFFF, 1);
        FAIL("expected UnknownOffset");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unknown_offset);
    }
    CHECK_THROWS_AS(crc->regs().read(0xFFFC), Error);

    // out of range
    try {
        crc->regs().write_named("mode", 2);
        FAIL("expected ValueOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == errc::value_out_of_range);
    }

    // nonzero-polynomial precondition is a register floor
    CHECK_THROWS_AS(crc->regs().write_named("polynomial", 0), Error);
}

TEST_CASE("port binding honors arity and single-link rule") {
    CatalogFixture fixture;
    Catalog& catalog = fixture.catalog;
    DeployedUnit unit(create_unit(catalog, "passthrough", {}), 16);
    auto buffer = std::make_shared<StreamBuffer>(8, ItemKind::sample);

    try {
        unit.bind_input(1, buffer); // only in0 exists
        FAIL("expected NoSuchPort");
    } catch (const Error& e) {
        CHECK(e.code() == errc::no_such_port);
    }

    unit.bind_input(0, buffer);
    auto second = std::make_shared<StreamBuffer>(8, ItemKind::sample);
    try {
        unit.bind_input(0, second);
        FAIL("expected PortOccupied");
    } catch (const Error& e) {
        CHECK(e.code() == errc::port_occupied);
    }

    // item kind mismatch is refused
    DeployedUnit crc(create_unit(catalog, "crc32", {}), 16);
    auto samples = std::make_shared<StreamBuffer>(8, ItemKind::sample);
    CHECK_THROWS_AS(crc.bind_input(0, samples), Error);
}

TEST_CASE("fft unit consumes and produces its length per step") {
    CatalogFixture fixture;
    Catalog& catalog = fixture.catalog;
    DeployedUnit fft(create_unit(catalog, "fft", {{"length", 64}}), 4096);
    auto in = std::make_shared<StreamBuffer>(256, ItemKind::sample);
    auto out = std::make_shared<StreamBuffer>(256, ItemKind::sample);
    fft.bind_input(0, in);
    fft.bind_output(0, out);

    std::vector<Sample> window(64, Sample{1.0, 0.0});
    in->push(window.data(), window.size());
    in->mark_burst_end();

    const StepReport report = fft.step();
    CHECK(report.progressed);
    CHECK(out->size() == 64);
    auto stats = fft.stats();
    CHECK(stats.items_in == 64);
    CHECK(stats.items_out == 64);
}

TEST_CASE("framed units do not emit before the burst completes") {
    CatalogFixture fixture;
    Catalog& catalog = fixture.catalog;
    DeployedUnit crc(create_unit(catalog, "crc32", {}), 4096);
    auto in = std::make_shared<StreamBuffer>(64, ItemKind::byte);
    auto out = std::make_shared<StreamBuffer>(64, ItemKind::byte);
    crc.bind_input(0, in);
    crc.bind_output(0, out);

    const uint8_t data[4] = {'a', 'b', 'c', 'd'};
    in->push(data, 4);
    crc.step(); // accumulates, no boundary yet
    CHECK(out->size() == 0);

    in->mark_burst_end();
    const StepReport report = crc.step();
    CHECK(report.progressed);
    CHECK(out->size() == 8); // payload + crc32
    auto tag = out->peek_tag();
    REQUIRE(tag.has_value());
    CHECK(tag->end_index == 8);
}
