// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sdrp/errors.hpp"
#include "sdrp/rf.hpp"

using namespace sdrp;

TEST_CASE("read-after-write returns the written value") {
    RfFrontend rf;
    const auto ack = rf.set_param("lo_freq_hz", 2.412e9);
    CHECK_FALSE(ack.snapped);
    CHECK(rf.get_param("lo_freq_hz") == 2.412e9);
}

TEST_CASE("out-of-range and unknown parameters are refused") {
    RfFrontend rf;
    try {
        rf.set_param("pa_gain_db", 90.0);
        FAIL("expected OutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == errc::out_of_range);
    }
    try {
        rf.set_param("tx_power_w", 1.0);
        FAIL("expected UnknownParam");
    } catch (const Error& e) {
        CHECK(e.code() == errc::unknown_param);
    }
    CHECK_THROWS_AS(rf.get_param("tx_power_w"), Error);
    CHECK_THROWS_AS(rf.set_param("lo_freq_hz", 1e6), Error); // below 70 MHz floor
}

TEST_CASE("requests snap to the step grid and the ack says so") {
    RfFrontend rf;
    const auto pa = rf.set_param("pa_gain_db", 10.1);
    CHECK(pa.snapped);
    CHECK(pa.value == 10.0);
    CHECK(rf.get_param("pa_gain_db") == 10.0);

    const auto lna = rf.set_param("lna_gain_db", 33.7);
    CHECK(lna.snapped);
    CHECK(lna.value == 34.0);

    const auto exact = rf.set_param("pa_gain_db", 12.25);
    CHECK_FALSE(exact.snapped);
    CHECK(exact.value == 12.25);
}

TEST_CASE("registers are independent: writing one never disturbs another") {
    const auto& specs = RfFrontend::param_specs();
    for (const auto& target : specs) {
        RfFrontend rf;
        std::map<std::string, double> before = rf.all_params();
        const double mid = (target.min_value + target.max_value) / 2.0;
        rf.set_param(target.name, mid);
        for (const auto& other : specs) {
            if (other.name == target.name) continue;
            CHECK(rf.get_param(other.name) == before.at(other.name));
        }
    }
}

TEST_CASE("identity loopback is exact and preserves length") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::vector<Sample> tx(1000);
    for (auto& s : tx) s = Sample{amp(rng), amp(rng)};

    const auto rx = loopback(tx, ChannelModel{});
    REQUIRE(rx.size() == tx.size());
    for (size_t i = 0; i < tx.size(); i++) REQUIRE(rx[i] == tx[i]);
}

TEST_CASE("awgn is deterministic per seed") {
    std::vector<Sample> tx(500, Sample{0.5, -0.5});
    ChannelModel channel{ChannelModel::Mode::awgn, 15.0, 77};
    const auto first = loopback(tx, channel);
    const auto second = loopback(tx, channel);
    REQUIRE(first.size() == tx.size());
    for (size_t i = 0; i < tx.size(); i++) REQUIRE(first[i] == second[i]);

    channel.seed = 78;
    const auto different = loopback(tx, channel);
    size_t same = 0;
    for (size_t i = 0; i < tx.size(); i++)
        if (different[i] == first[i]) same++;
    CHECK(same < tx.size() / 10);
}

TEST_CASE("awgn injects the configured SNR within 0.1 dB over 1e6 unit-power samples") {
    // unit-power input: alternating +/-1 on I
    std::vector<Sample> tx(1000000);
    for (size_t i = 0; i < tx.size(); i++) tx[i] = Sample{i % 2 ? 1.0 : -1.0, 0.0};

    ChannelModel channel{ChannelModel::Mode::awgn, 20.0, 42};
    const auto rx = loopback(tx, channel);

    double noise_power = 0;
    for (size_t i = 0; i < tx.size(); i++) {
        const double di = rx[i].i - tx[i].i;
        const double dq = rx[i].q - tx[i].q;
        noise_power += di * di + dq * dq;
    }
    noise_power /= double(tx.size());
    const double measured_snr_db = 10.0 * std::log10(1.0 / noise_power);
    CHECK(std::abs(measured_snr_db - 20.0) < 0.1);
}
