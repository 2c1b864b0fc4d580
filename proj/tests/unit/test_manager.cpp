// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <thread>

#include "sdrp/dsp/blocks.hpp"
#include "sdrp/manager.hpp"

using namespace sdrp;

namespace {

// Test kinds with controllable modeled constants.
void register_test_kinds(Catalog& catalog) {
    auto passthrough_factory = [](const UnitDescriptor&, const BlockEnv&)
        -> std::unique_ptr<Block> {
        struct Pt : Block {
            void process_windows(WindowIo& io, size_t) override {
                auto in = io.input_raw(0);
                std::memcpy(io.output_raw(0).data(), in.data(), in.size());
            }
        };
        return std::make_unique<Pt>();
    };

    auto add = [&](const std::string& kind, double throughput, uint32_t latency, uint64_t cells,
                   uint64_t dsp) {
        UnitDescriptor d;
        d.kind = kind;
        d.throughput_sps = throughput;
        d.latency_cycles = latency;
        d.cost_logic_cells = cells;
        d.cost_dsp_slices = dsp;
        catalog.register_kind(d, passthrough_factory);
    };
    add("pt_full", 3.0e8, 990, 1000, 2);    // 1 sample/cycle at fabric clock
    add("pt_160", 1.6e8, 990, 1000, 2);     // the spec's 160 Msps example unit
    add("pt_79", 7.9e7, 990, 1000, 2);      // deliberately under 80 Msps
    add("pt_100", 1.0e8, 990, 1000, 2);     // shared-unit sharing scenarios
    add("pt_1010", 3.0e8, 1010, 1000, 2);   // 1010 cycles -> 3.3667us at 300 MHz
    add("pt_big", 3.0e8, 4, 35000, 90);     // tenfold unit fills the platform
    add("pt_cell", 3.0e8, 4, 1, 0);
    add("pt_dsp", 3.0e8, 4, 0, 1);

    {
        // 2-in combiner for dual-stream admission
        UnitDescriptor d;
        d.kind = "combine2";
        d.n_inputs = 2;
        d.n_outputs = 1;
        d.throughput_sps = 1.6e8;
        d.latency_cycles = 990;
        d.cost_logic_cells = 1500;
        catalog.register_kind(d, [](const UnitDescriptor&, const BlockEnv&)
                                     -> std::unique_ptr<Block> {
            struct Sum : Block {
                void process_windows(WindowIo& io, size_t windows) override {
                    auto a = io.in_samples(0);
                    auto b = io.in_samples(1);
                    auto out = io.out_samples(0);
                    for (size_t i = 0; i < windows; i++)
                        out[i] = Sample{a[i].i + b[i].i, a[i].q + b[i].q};
                }
            };
            return std::make_unique<Sum>();
        });
    }
}

UnitSpec unit(const std::string& name, const std::string& kind) {
    UnitSpec u;
    u.name = name;
    u.kind = kind;
    return u;
}

LinkSpec direct(const std::string& src, const std::string& dst, uint32_t src_port = 0,
                uint32_t dst_port = 0) {
    LinkSpec l;
    l.src = {src, src_port};
    l.dst = {dst, dst_port};
    return l;
}

LinkSpec via_xbar(const std::string& src, const std::string& dst) {
    LinkSpec l = direct(src, dst);
    l.via = LinkVia::crossbar;
    return l;
}

// src -> [kinds...] -> sink, all direct
ChainSpec line_chain(const std::string& name, double rate,
                     const std::vector<std::pair<std::string, std::string>>& units) {
    ChainSpec spec;
    spec.name = name;
    spec.sample_rate_sps = rate;
    spec.units.push_back(unit("src", "stream_src"));
    spec.units.back().params = {{"total_items", 0}, {"burst_items", 256}, {"seed", 1}};
    std::string prev = "src";
    for (const auto& [uname, kind] : units) {
        spec.units.push_back(unit(uname, kind));
        spec.links.push_back(direct(prev, uname));
        prev = uname;
    }
    spec.units.push_back(unit("sink", "stream_sink"));
    spec.links.push_back(direct(prev, "sink"));
    return spec;
}

struct Rig {
    Catalog catalog{3.0e8};
    EventBus events;
    Crossbar crossbar{0, &events};
    PlatformModel platform;
    std::vector<PrrConfig> prrs;
    std::unique_ptr<ChainManager> manager;

    explicit Rig(std::vector<PrrConfig> prr_list = {}, ManagerConfig config = {}) {
        dsp::register_builtin_blocks(catalog);
        register_test_kinds(catalog);
        prrs = std::move(prr_list);
        config.impose_reconfig_delay = false; // unit tests skip the modeled sleeps
        manager = std::make_unique<ChainManager>(catalog, platform, prrs, crossbar, &events, BlockEnv{},
                                                 config);
    }

    ChainGraph graph(const ChainSpec& spec) { return resolve_chain(spec, catalog, 0); }
};

} // namespace

TEST_CASE("fronthaul rate matches the CPRI figure exactly") {
    CHECK(fronthaul_rate(8, 30.72e6, 15) == 7.3728e9);
    CHECK(fronthaul_rate(16, 30.72e6, 15) == 2 * 7.3728e9); // linear in antennas
    CHECK_THROWS_AS(fronthaul_rate(1, 1e6, 0), Error);
    CHECK_THROWS_AS(fronthaul_rate(0, 1e6, 15), Error);
    CHECK_THROWS_AS(fronthaul_rate(1, -1.0, 15), Error);
}

TEST_CASE("dual 80 Msps streams admit against adequate units and fail against 79 Msps") {
    Rig rig;
    ChainSpec spec;
    spec.name = "dual80";
    spec.sample_rate_sps = 80e6;
    spec.units.push_back(unit("src_i", "stream_src"));
    spec.units.push_back(unit("src_q", "stream_src"));
    spec.units.push_back(unit("u_i", "pt_full"));
    spec.units.push_back(unit("u_q", "pt_full"));
    spec.units.push_back(unit("combine", "combine2"));
    spec.units.push_back(unit("sink", "stream_sink"));
    spec.links = {direct("src_i", "u_i"), direct("src_q", "u_q"), direct("u_i", "combine", 0, 0),
                  direct("u_q", "combine", 0, 1), direct("combine", "sink")};

    const AdmissionReport ok = rig.manager->validate(rig.graph(spec));
    CHECK(ok.throughput_ok);
    CHECK(ok.admitted());
    // the combiner carries both streams: 160 Msps demanded of a 160 Msps unit
    for (const auto& item : ok.throughput)
        if (item.unit == "combine") {
            CHECK(item.demanded_sps == 160e6);
            CHECK(item.available_sps == 1.6e8);
        }

    ChainSpec slow = spec;
    slow.units[2].kind = "pt_79"; // one per-stream unit drops below 80 Msps
    const AdmissionReport bad = rig.manager->validate(rig.graph(slow));
    CHECK_FALSE(bad.throughput_ok);
    CHECK_FALSE(bad.admitted());
}

TEST_CASE("SIFS latency: 9.9us passes a 10us budget, more does not") {
    Rig rig;
    // three units at 990 cycles / 300 MHz = 3.3us each -> 9.9us
    ChainSpec spec = line_chain("sifs", 1e6,
                                {{"u1", "pt_full"}, {"u2", "pt_full"}, {"u3", "pt_full"}});
    spec.latency_budget_s = 10e-6;
    const AdmissionReport pass = rig.manager->validate(rig.graph(spec));
    CHECK(pass.latency_ok);
    CHECK(pass.latency_path_s == doctest::Approx(9.9e-6).epsilon(1e-12));

    // swap one unit to 1010 cycles: 9.9 + (1010-990)/3e8 = 9.9667us còn passes;
    // three of them make 10.1us and fail
    ChainSpec fail = line_chain("sifs2", 1e6,
                                {{"u1", "pt_1010"}, {"u2", "pt_1010"}, {"u3", "pt_1010"}});
    fail.latency_budget_s = 10e-6;
    const AdmissionReport failed = rig.manager->validate(rig.graph(fail));
    CHECK(failed.latency_path_s == doctest::Approx(10.1e-6).epsilon(1e-12));
    CHECK_FALSE(failed.latency_ok);
    CHECK_FALSE(failed.admitted());

    // the verdict is a pure function of the declared numbers
    for (int i = 0; i < 10; i++) {
        CHECK(rig.manager->validate(rig.graph(spec)).latency_ok);
        CHECK_FALSE(rig.manager->validate(rig.graph(fail)).latency_ok);
    }
}

TEST_CASE("latency: a 12us critical path fails a 10us budget") {
    Rig rig;
    ChainSpec spec = line_chain("long", 1e6, {{"u1", "pt_full"}, {"u2", "pt_full"},
                                              {"u3", "pt_full"}, {"u4", "pt_1010"}});
    spec.latency_budget_s = 10e-6;
    const AdmissionReport report = rig.manager->validate(rig.graph(spec));
    CHECK(report.latency_path_s > 10e-6);
    CHECK_FALSE(report.latency_ok);
}

TEST_CASE("crossbar hops add the modeled hop latency") {
    Rig rig;
    ChainSpec spec;
    spec.name = "hop";
    spec.sample_rate_sps = 1e6;
    spec.latency_budget_s = 10e-6;
    spec.units = {unit("src", "stream_src"), unit("a", "pt_full"), unit("b", "pt_full"),
                  unit("sink", "stream_sink")};
    spec.links = {direct("src", "a"), via_xbar("a", "b"), direct("b", "sink")};
    const AdmissionReport report = rig.manager->validate(rig.graph(spec));
    // 2 x 3.3us units + 1us hop
    CHECK(report.latency_path_s == doctest::Approx(7.6e-6).epsilon(1e-9));
}

TEST_CASE("resource budget: exactly full admits, one more cell or slice does not") {
    Rig rig;
    // ten pt_big = 350,000 cells / 900 DSP exactly
    std::vector<std::pair<std::string, std::string>> tenfold;
    for (int i = 0; i < 10; i++) tenfold.push_back({"u" + std::to_string(i), "pt_big"});
    ChainSpec spec = line_chain("full", 1e6, tenfold);
    // src and sink cost 100 cells each in the builtin catalog; use zero-cost
    // test sources instead
    spec.units[0].kind = "stream_src";
    // rebuild with zero-cost ends: register ad hoc kinds
    UnitDescriptor zsrc = rig.catalog.descriptor("stream_src");
    zsrc.kind = "zsrc";
    zsrc.cost_logic_cells = 0;
    rig.catalog.register_kind(zsrc, [](const UnitDescriptor&, const BlockEnv&)
                                        -> std::unique_ptr<Block> {
        return std::make_unique<dsp::StreamSrcBlock>();
    });
    UnitDescriptor zsink = rig.catalog.descriptor("stream_sink");
    zsink.kind = "zsink";
    zsink.cost_logic_cells = 0;
    rig.catalog.register_kind(zsink, [](const UnitDescriptor&, const BlockEnv&)
                                         -> std::unique_ptr<Block> {
        return std::make_unique<dsp::StreamSinkBlock>();
    });
    spec.units.front().kind = "zsrc";
    spec.units.back().kind = "zsink";

    const AdmissionReport exact = rig.manager->validate(rig.graph(spec));
    CHECK(exact.cells_demanded == 350000);
    CHECK(exact.dsp_demanded == 900);
    CHECK(exact.resource_ok);
    CHECK(exact.admitted());

    const DeployResult deployed = rig.manager->deploy(rig.graph(spec));
    CHECK(rig.manager->budget().cells_free == 0);
    CHECK(rig.manager->budget().dsp_free == 0);

    // +1 cell
    ChainSpec one_cell;
    one_cell.name = "cell";
    one_cell.sample_rate_sps = 1e6;
    one_cell.units = {unit("src", "zsrc"), unit("u", "pt_cell"), unit("sink", "zsink")};
    one_cell.links = {direct("src", "u"), direct("u", "sink")};
    const AdmissionReport over = rig.manager->validate(rig.graph(one_cell));
    CHECK_FALSE(over.resource_ok);
    CHECK_THROWS_AS(rig.manager->deploy(rig.graph(one_cell)), AdmissionError);

    // +1 DSP
    ChainSpec one_dsp = one_cell;
    one_dsp.units[1].kind = "pt_dsp";
    CHECK_FALSE(rig.manager->validate(rig.graph(one_dsp)).resource_ok);

    // teardown returns the budget exactly
    rig.manager->teardown(deployed.id);
    CHECK(rig.manager->budget().cells_free == 350000);
    CHECK(rig.manager->budget().dsp_free == 900);
    CHECK(rig.manager->budget().cells_allocated == 0);
    CHECK(rig.manager->list().empty());
}

TEST_CASE("failed deploys have zero side effects") {
    Rig rig;
    const BudgetSnapshot before = rig.manager->budget();
    ChainSpec spec = line_chain("nope", 80e6, {{"u", "pt_79"}}); // 80 > 79: rejected
    try {
        rig.manager->deploy(rig.graph(spec));
        FAIL("expected AdmissionError");
    } catch (const AdmissionError& e) {
        CHECK_FALSE(e.report.admitted());
        CHECK_FALSE(e.report.throughput_ok);
    }
    const BudgetSnapshot after = rig.manager->budget();
    CHECK(before.cells_allocated == after.cells_allocated);
    CHECK(rig.manager->list().empty());
    CHECK(rig.crossbar.stats().packets_in == 0);
}

TEST_CASE("two disjoint chains run concurrently and teardown is conservative") {
    Rig rig;
    ChainSpec a = line_chain("a", 1e6, {{"u", "pt_full"}});
    a.units[0].params["total_items"] = 4096;
    ChainSpec b = line_chain("b", 1e6, {{"u", "pt_160"}});
    b.units[0].params["total_items"] = 4096;

    const auto da = rig.manager->deploy(rig.graph(a));
    const auto db = rig.manager->deploy(rig.graph(b));
    CHECK(rig.manager->list().size() == 2);

    // both streams complete
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    auto finished = [&](ChainId id) {
        for (const auto& record : rig.manager->stats())
            if (record.id == id)
                for (const auto& u : record.units)
                    if (u.unit == "sink" && u.stream.items_in >= 4096) return true;
        return false;
    };
    while ((!finished(da.id) || !finished(db.id)) && std::chrono::steady_clock::now() < deadline)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    CHECK(finished(da.id));
    CHECK(finished(db.id));

    rig.manager->teardown(da.id);
    rig.manager->teardown(db.id);
    CHECK(rig.manager->budget().cells_allocated == 0);
    CHECK_THROWS_AS(rig.manager->teardown(da.id), Error); // unknown chain now

    // direct-only chains produce zero crossbar traffic
    CHECK(rig.crossbar.stats().packets_in == 0);
}

TEST_CASE("admission monotonicity: any subset of an admitted set is admitted") {
    std::mt19937 rng(9);
    for (int round = 0; round < 5; round++) {
        Rig rig;
        std::vector<ChainSpec> set;
        const int n = 2 + int(rng() % 3);
        for (int c = 0; c < n; c++) {
            const char* kinds[] = {"pt_full", "pt_160", "pt_100"};
            ChainSpec spec = line_chain("c" + std::to_string(c), 20e6 + double(rng() % 40) * 1e6,
                                        {{"u", kinds[rng() % 3]}});
            set.push_back(spec);
        }
        // admitted := deploying every chain in order succeeds
        std::vector<ChainId> ids;
        bool admitted = true;
        for (const auto& spec : set) {
            try {
                ids.push_back(rig.manager->deploy(rig.graph(spec)).id);
            } catch (const AdmissionError&) {
                admitted = false;
                break;
            }
        }
        if (!admitted) continue;
        // any subset is admitted on a fresh platform
        const uint32_t mask = rng() % (1u << n);
        Rig fresh;
        for (int c = 0; c < n; c++)
            if (mask & (1u << c)) CHECK_NOTHROW(fresh.manager->deploy(fresh.graph(set[c])));
    }
}

TEST_CASE("time-multiplexed sharing: 40+40 through a 100 Msps unit, 60+60 rejected") {
    auto shared_chain = [](const std::string& name, double rate) {
        ChainSpec spec;
        spec.name = name;
        spec.sample_rate_sps = rate;
        spec.units = {unit("src", "stream_src"), unit("pre", "pt_full"),
                      unit("shared", "pt_100"), unit("post", "pt_full"),
                      unit("sink", "stream_sink")};
        spec.units[2].share = "pool0";
        spec.links = {direct("src", "pre"), via_xbar("pre", "shared"),
                      via_xbar("shared", "post"), direct("post", "sink")};
        return spec;
    };

    SUBCASE("40 Msps each is admitted") {
        Rig rig;
        const auto a = rig.manager->deploy(rig.graph(shared_chain("a", 40e6)));
        const AdmissionReport report = rig.manager->validate(rig.graph(shared_chain("b", 40e6)));
        CHECK(report.throughput_ok);
        for (const auto& item : report.throughput)
            if (item.unit == "shared") {
                CHECK(item.demanded_sps == doctest::Approx(80e6));
                CHECK(item.available_sps == doctest::Approx(100e6));
            }
        CHECK_NOTHROW(rig.manager->deploy(rig.graph(shared_chain("b", 40e6))));
        // the shared instance is paid for once
        CHECK(rig.manager->budget().cells_allocated ==
              2 * (100 + 2 * 1000 + 100) + 1000); // 2x(src+pre+post+sink) + one shared
        (void)a;
    }

    SUBCASE("60 Msps each is rejected on the second deploy") {
        Rig rig;
        rig.manager->deploy(rig.graph(shared_chain("a", 60e6)));
        const AdmissionReport report = rig.manager->validate(rig.graph(shared_chain("b", 60e6)));
        CHECK_FALSE(report.throughput_ok);
        CHECK_THROWS_AS(rig.manager->deploy(rig.graph(shared_chain("b", 60e6))), AdmissionError);
    }
}

namespace {

std::mutex g_burst_mutex;
std::vector<size_t> g_burst_sizes;

struct BitBurstSrc : Block {
    StepMode mode() const override { return StepMode::source; }
    void on_params(const RegisterSnapshot& regs) override {
        total = regs.at(0);
        bits = regs.at(4);
    }
    bool poll(FrameIo& io) override {
        if (emitted >= total) return false;
        std::vector<uint8_t> burst(bits);
        for (size_t i = 0; i < burst.size(); i++) burst[i] = uint8_t((emitted + i) & 1);
        io.put_octets(0, burst);
        emitted++;
        return true;
    }
    uint32_t total = 0, bits = 100, emitted = 0;
};

struct BurstSizeSink : Block {
    StepMode mode() const override { return StepMode::framed; }
    void process_burst(FrameIo& io) override {
        std::lock_guard lock(g_burst_mutex);
        g_burst_sizes.push_back(io.in_items());
    }
};

size_t recorded_bursts() {
    std::lock_guard lock(g_burst_mutex);
    return g_burst_sizes.size();
}

} // namespace

TEST_CASE("parametric control changes a live coder at a burst boundary") {
    Rig rig;
    {
        UnitDescriptor d;
        d.kind = "bit_burst_src";
        d.n_inputs = 0;
        d.output_kinds = {ItemKind::bit};
        d.throughput_sps = 3.0e8;
        d.register_map.push_back({0, "bursts", 0, 1u << 20, 0});
        d.register_map.push_back({4, "burst_bits", 1, 1u << 16, 100});
        rig.catalog.register_kind(d, [](const UnitDescriptor&, const BlockEnv&) {
            return std::make_unique<BitBurstSrc>();
        });
        UnitDescriptor s;
        s.kind = "burst_size_sink";
        s.n_outputs = 0;
        s.input_kinds = {ItemKind::bit};
        s.throughput_sps = 3.0e8;
        rig.catalog.register_kind(s, [](const UnitDescriptor&, const BlockEnv&) {
            return std::make_unique<BurstSizeSink>();
        });
    }
    {
        std::lock_guard lock(g_burst_mutex);
        g_burst_sizes.clear();
    }

    ChainSpec spec;
    spec.name = "coder";
    spec.sample_rate_sps = 1e6;
    spec.units = {unit("src", "bit_burst_src"), unit("coder", "conv_enc"),
                  unit("sink", "burst_size_sink")};
    spec.units[0].params = {{"bursts", 30}, {"burst_bits", 100}};
    spec.links = {direct("src", "coder"), direct("coder", "sink")};

    const auto deployed = rig.manager->deploy(rig.graph(spec));
    CHECK(rig.manager->get_param(deployed.id, "coder", "rate") == 0);

    // first phase drains at rate 1/2
    auto wait_bursts = [&](size_t n) {
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
        while (recorded_bursts() < n && std::chrono::steady_clock::now() < deadline)
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
        REQUIRE(recorded_bursts() == n);
    };
    wait_bursts(30);

    // flip the rate while deployed, then release thirty more bursts;
    // streaming resumes without any deploy/teardown
    rig.manager->set_param(deployed.id, "coder", "rate", 2); // 3/4
    CHECK(rig.manager->get_param(deployed.id, "coder", "rate") == 2);
    rig.manager->set_param(deployed.id, "src", "bursts", 60);
    wait_bursts(60);

    // rate 1/2: (100+6)*2 = 212 coded bits; rate 3/4: 106 pairs -> 142 bits
    std::lock_guard lock(g_burst_mutex);
    for (size_t i = 0; i < 30; i++) REQUIRE(g_burst_sizes[i] == 212);
    for (size_t i = 30; i < 60; i++) REQUIRE(g_burst_sizes[i] == 142);

    CHECK(rig.manager->list().size() == 1); // never redeployed
    rig.manager->teardown(deployed.id);
}

TEST_CASE("full reconfiguration replaces everything and reports the PCAP time") {
    Rig rig;
    ChainSpec a = line_chain("a", 1e6, {{"u", "pt_full"}});
    ChainSpec b = line_chain("b", 1e6, {{"u", "pt_160"}});
    const auto da = rig.manager->deploy(rig.graph(a));
    const auto db = rig.manager->deploy(rig.graph(b));

    // the new set includes chain b unchanged: it still restarts
    const FullReconfigReport report =
        rig.manager->reconfigure_full({rig.graph(b)}, 32000000);
    CHECK(report.downtime_s == 32000000.0 / 128e6);
    CHECK(report.downtime_s == 0.25);
    REQUIRE(report.chain_ids.size() == 1);
    CHECK(report.chain_ids[0] != da.id);
    CHECK(report.chain_ids[0] != db.id); // a fresh deployment, not the old one

    const auto chains = rig.manager->list();
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].id == report.chain_ids[0]);
    CHECK(chains[0].name == "b");
}

TEST_CASE("full reconfiguration is atomic: a failing set leaves the old chains running") {
    Rig rig;
    ChainSpec a = line_chain("a", 1e6, {{"u", "pt_full"}});
    const auto da = rig.manager->deploy(rig.graph(a));

    ChainSpec over = line_chain("over", 80e6, {{"u", "pt_79"}});
    CHECK_THROWS_AS(rig.manager->reconfigure_full({rig.graph(over)}, 1000), AdmissionError);

    const auto chains = rig.manager->list();
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].id == da.id); // untouched
}

TEST_CASE("PRR swap: timing model, size guard, boundary guard") {
    std::vector<PrrConfig> prrs{{"prr0", 4000, 16}};
    Rig rig(prrs);

    ChainSpec spec = line_chain("host", 1e6, {{"occ", "pt_full"}});
    spec.units[1].prr = "prr0";
    const auto deployed = rig.manager->deploy(rig.graph(spec));

    SUBCASE("swap reports bytes over the PCAP rate") {
        ChainSpec occupant;
        occupant.units = {unit("occ2", "pt_160")};
        const PrrSwapReport report = rig.manager->reconfigure_prr("prr0", occupant, 1280000);
        CHECK(report.swap_time_s == 1280000.0 / 128e6);
        CHECK(report.swap_time_s == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(rig.manager->get_param(deployed.id, "occ2", "num_taps") == 0); // wrong reg
    }

    SUBCASE("a 5000-cell occupant does not fit a 4000-cell region") {
        UnitDescriptor big = rig.catalog.descriptor("pt_full");
        big.kind = "pt_5000";
        big.cost_logic_cells = 5000;
        rig.catalog.register_kind(big, [](const UnitDescriptor&, const BlockEnv&)
                                           -> std::unique_ptr<Block> {
            struct Pt : Block {
                void process_windows(WindowIo& io, size_t) override {
                    std::memcpy(io.output_raw(0).data(), io.input_raw(0).data(),
                                io.input_raw(0).size());
                }
            };
            return std::make_unique<Pt>();
        });
        ChainSpec occupant;
        occupant.units = {unit("occ2", "pt_5000")};
        try {
            rig.manager->reconfigure_prr("prr0", occupant, 1000);
            FAIL("expected OccupantTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == errc::occupant_too_large);
        }
    }

    SUBCASE("boundary arity must match") {
        ChainSpec occupant;
        occupant.units = {unit("occ2", "combine2")}; // 2-in where 1-in is wired
        try {
            rig.manager->reconfigure_prr("prr0", occupant, 1000);
            FAIL("expected IncompatibleBoundary");
        } catch (const Error& e) {
            CHECK(e.code() == errc::incompatible_boundary);
        }
    }

    SUBCASE("unknown PRR and unoccupied PRR are refused") {
        ChainSpec occupant;
        occupant.units = {unit("occ2", "pt_160")};
        CHECK_THROWS_AS(rig.manager->reconfigure_prr("prrX", occupant, 1), Error);
        rig.manager->teardown(deployed.id);
        CHECK_THROWS_AS(rig.manager->reconfigure_prr("prr0", occupant, 1), Error);
    }
}

TEST_CASE("PRR occupants charge the partition, not the general pool") {
    std::vector<PrrConfig> prrs{{"prr0", 4000, 16}};
    Rig rig(prrs);
    const BudgetSnapshot before = rig.manager->budget();
    CHECK(before.cells_prr_reserved == 4000);
    CHECK(before.cells_free == 350000 - 4000);

    ChainSpec spec = line_chain("host", 1e6, {{"occ", "pt_full"}});
    spec.units[1].prr = "prr0";
    const auto deployed = rig.manager->deploy(rig.graph(spec));
    // only src and sink hit the pool (100 cells each)
    CHECK(rig.manager->budget().cells_allocated == 200);

    // a second chain cannot claim the occupied PRR
    ChainSpec second = line_chain("host2", 1e6, {{"occ", "pt_full"}});
    second.units[1].prr = "prr0";
    const AdmissionReport report = rig.manager->validate(rig.graph(second));
    CHECK_FALSE(report.resource_ok);

    rig.manager->teardown(deployed.id);
    CHECK(rig.manager->budget().cells_allocated == 0);
}

TEST_CASE("budget conservation across random deploy/teardown sequences") {
    Rig rig;
    std::mt19937 rng(31);
    std::vector<ChainId> live;
    for (int step = 0; step < 40; step++) {
        if (live.empty() || rng() % 2) {
            const char* kinds[] = {"pt_full", "pt_160", "pt_100", "pt_big"};
            ChainSpec spec = line_chain("c" + std::to_string(step), 1e6,
                                        {{"u", kinds[rng() % 4]}});
            try {
                live.push_back(rig.manager->deploy(rig.graph(spec)).id);
            } catch (const AdmissionError&) {
            }
        } else {
            const size_t pick = rng() % live.size();
            rig.manager->teardown(live[pick]);
            live.erase(live.begin() + long(pick));
        }
        const BudgetSnapshot snap = rig.manager->budget();
        REQUIRE(snap.cells_allocated + snap.cells_prr_reserved + snap.cells_free ==
                snap.cells_total);
        REQUIRE(snap.dsp_allocated + snap.dsp_prr_reserved + snap.dsp_free == snap.dsp_total);
    }
    for (ChainId id : live) rig.manager->teardown(id);
    CHECK(rig.manager->budget().cells_allocated == 0);
}

TEST_CASE("subchain reservations deploy paused and stream after commit") {
    Rig rig;
    SubchainRequest request;
    request.name = "remote-part";
    request.sample_rate_sps = 1e6;
    request.units = {unit("w", "pt_full")};

    // boundary output back to a local collector endpoint
    auto sink_buffer = std::make_shared<StreamBuffer>(4096, ItemKind::sample);
    auto ingress = std::make_shared<CrossbarIngress>(200, sink_buffer);
    rig.crossbar.add_route(0, 200, ingress->endpoint());
    ingress->start();
    request.inputs = {{"w", 0}};
    request.outputs = {{"w", 0, StreamId{0, 0, 0, 200}}};

    const SubchainReservation reservation = rig.manager->reserve_subchain(request);
    REQUIRE(reservation.input_sids.size() == 1);
    const StreamId in_sid = reservation.input_sids[0];

    // reserved but not started: packets pile up in the ingress, nothing flows
    std::vector<Sample> burst(64, Sample{0.5, -0.5});
    rig.crossbar.route(ChdrPacket::make(PacketType::data,
                                        StreamId{0, 99, in_sid.dst_device, in_sid.dst_endpoint},
                                        encode_samples(burst), 0, true));
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    CHECK(sink_buffer->size() == 0);

    rig.manager->commit_subchain(reservation.handle);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (sink_buffer->size() < 64 && std::chrono::steady_clock::now() < deadline)
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    REQUIRE(sink_buffer->size() == 64);
    std::vector<Sample> got(64);
    sink_buffer->try_pop(got.data(), 64);
    for (const auto& s : got) REQUIRE(s == Sample{0.5, -0.5});

    rig.manager->release_subchain(reservation.handle);
    CHECK(rig.manager->budget().cells_allocated == 0);
    ingress->stop();
}
