// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "sdrp/chdr.hpp"
#include "sdrp/errors.hpp"

using namespace sdrp;

namespace {

std::vector<std::string> read_golden(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

ChdrPacket random_packet(std::mt19937& rng) {
    std::uniform_int_distribution<int> type(0, 3);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> len(0, 100);
    std::uniform_int_distribution<uint32_t> seq(0, 4095);
    std::uniform_int_distribution<uint64_t> ts;

    Bytes payload(len(rng));
    for (auto& b : payload) b = uint8_t(byte(rng));
    StreamId sid{uint8_t(byte(rng)), uint8_t(byte(rng)), uint8_t(byte(rng)), uint8_t(byte(rng))};
    std::optional<uint64_t> time;
    if (byte(rng) % 2) time = ts(rng);
    return ChdrPacket::make(PacketType(type(rng)), sid, std::move(payload), uint16_t(seq(rng)),
                            byte(rng) % 2, time);
}

} // namespace

TEST_CASE("sid packing is positional byte arithmetic") {
    CHECK(pack_sid(StreamId{1, 2, 3, 4}) == 0x01020304u);
    CHECK(pack_sid(StreamId{0, 0, 0, 0}) == 0u);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 1000; i++) {
        StreamId sid{uint8_t(byte(rng)), uint8_t(byte(rng)), uint8_t(byte(rng)),
                     uint8_t(byte(rng))};
        CHECK(unpack_sid(pack_sid(sid)) == sid);
    }
    // every value round-trips: sample the corners and a stride
    for (uint64_t v = 0; v <= 0xffffffffull; v += 0x01010101ull) {
        CHECK(pack_sid(unpack_sid(uint32_t(v))) == uint32_t(v));
    }
    CHECK(pack_sid(unpack_sid(0xffffffffu)) == 0xffffffffu);
}

TEST_CASE("empty data packet packs to the 8-byte header word") {
    ChdrPacket p = ChdrPacket::make(PacketType::data, StreamId{}, {}, 0);
    const Bytes bytes = pack_chdr(p);
    const Bytes expect = {0x00, 0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x00};
    CHECK(bytes == expect);
}

TEST_CASE("pack/unpack round-trip over randomized packets") {
    std::mt19937 rng(12345);
    for (int i = 0; i < 10000; i++) {
        ChdrPacket p = random_packet(rng);
        const Bytes wire = pack_chdr(p);
        CHECK(wire.size() == p.header.length_bytes);
        const ChdrPacket back = unpack_chdr(wire);
        REQUIRE(back == p);
    }
}

TEST_CASE("oversize payload is refused") {
    ChdrPacket p = ChdrPacket::make(PacketType::data, StreamId{}, Bytes(default_mtu + 1, 0), 0);
    CHECK_THROWS_AS(pack_chdr(p), Error);
    try {
        pack_chdr(p);
    } catch (const Error& e) {
        CHECK(e.code() == errc::oversize_mtu);
    }
}

TEST_CASE("inconsistent length field is refused") {
    ChdrPacket p = ChdrPacket::make(PacketType::data, StreamId{}, Bytes(4, 0xab), 0);
    p.header.length_bytes = 8; // actual is 12
    try {
        pack_chdr(p);
        FAIL("expected InconsistentLength");
    } catch (const Error& e) {
        CHECK(e.code() == errc::inconsistent_length);
    }
}

TEST_CASE("truncated buffers are detected") {
    // 8-byte buffer whose length field claims 24 bytes
    Bytes wire(8, 0);
    put_be64(wire.data(), uint64_t(24) << 32);
    try {
        unpack_chdr(wire);
        FAIL("expected Truncated");
    } catch (const Error& e) {
        CHECK(e.code() == errc::truncated);
    }
    CHECK_THROWS_AS(unpack_chdr(Bytes{0x00}), Error);
}

TEST_CASE("has_time with an 8-byte packet violates the layout") {
    Bytes wire(8, 0);
    put_be64(wire.data(), (uint64_t(1) << 61) | (uint64_t(8) << 32));
    try {
        unpack_chdr(wire);
        FAIL("expected BadLength");
    } catch (const Error& e) {
        CHECK(e.code() == errc::bad_length);
    }
}

TEST_CASE("sequence numbers wrap modulo 4096") {
    CHECK(next_seq(0) == 1);
    CHECK(next_seq(4094) == 4095);
    CHECK(next_seq(4095) == 0);
    uint16_t seq = 4000;
    uint16_t prev = seq;
    for (int i = 0; i < 10000; i++) {
        seq = next_seq(seq);
        CHECK(seq == (prev + 1) % 4096);
        prev = seq;
    }
}

TEST_CASE("VRT encapsulation of an 8-byte CHDR is a 5-word frame") {
    ChdrPacket p = ChdrPacket::make(PacketType::data, StreamId{}, {}, 0);
    const Bytes chdr = pack_chdr(p);
    const Bytes frame = encapsulate_vrt(chdr, 7, 3);
    REQUIRE(frame.size() == 5 * 4);
    const uint32_t header = get_be32(frame.data());
    CHECK((header & 0xffff) == 5);         // size in words
    CHECK(((header >> 16) & 0x0f) == 3);   // count
    CHECK((header >> 28) == 0x1);          // IF-data with stream id
    CHECK(((header >> 26) & 1) == 1);      // trailer present
    CHECK(header == 0x14030005u);
    CHECK(get_be32(frame.data() + 4) == 7u);
    CHECK(decapsulate_vrt(frame) == chdr);
}

TEST_CASE("VRT round-trip with padding over random payloads") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> len(0, 300);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 10000; i++) {
        Bytes chdr(len(rng));
        for (auto& b : chdr) b = uint8_t(byte(rng));
        const uint8_t count = uint8_t(i % 16);
        const Bytes frame = encapsulate_vrt(chdr, uint32_t(i), count);
        const VrtFrame parsed = parse_vrt(frame);
        CHECK(parsed.packet_count == count);
        CHECK(parsed.stream_id == uint32_t(i));
        REQUIRE(parsed.payload == chdr);
    }
}

TEST_CASE("VRT size-field corruption is detected") {
    const Bytes frame = encapsulate_vrt(Bytes(8, 0xaa), 1, 0);
    Bytes bad = frame;
    put_be16(bad.data() + 2, uint16_t((frame.size() / 4) + 1));
    CHECK_THROWS_AS(decapsulate_vrt(bad), Error);

    Bytes short_frame(frame.begin(), frame.end() - 4);
    CHECK_THROWS_AS(decapsulate_vrt(short_frame), Error);
}

TEST_CASE("VRT frames over 65535 words are refused") {
    const Bytes big((vrt_max_words - vrt_overhead_words) * 4 + 4, 0);
    try {
        encapsulate_vrt(big, 0, 0);
        FAIL("expected OversizeFrame");
    } catch (const Error& e) {
        CHECK(e.code() == errc::oversize_frame);
    }
}

TEST_CASE("golden CHDR vectors decode to the frozen fields") {
    const auto lines = read_golden(std::string(SDRP_TEST_DATA_DIR) + "/chdr_golden.txt");
    REQUIRE(lines.size() == 6);

    std::vector<ChdrPacket> expect;
    expect.push_back(ChdrPacket::make(PacketType::data, StreamId{}, {}, 0));
    expect.push_back(ChdrPacket::make(PacketType::data, StreamId{1, 2, 3, 4},
                                      {0xde, 0xad, 0xbe, 0xef}, 1));
    expect.push_back(ChdrPacket::make(PacketType::flow_control, StreamId{0xaa, 0xbb, 0xcc, 0xdd},
                                      {}, 4095, false, 0x0000000100000002ull));
    expect.push_back(ChdrPacket::make(PacketType::command, StreamId{0, 1, 0, 5},
                                      {0, 0, 0, 0, 0, 0, 0, 0x40}, 7));
    expect.push_back(ChdrPacket::make(PacketType::response, StreamId{9, 8, 7, 6}, {}, 100, true));
    expect.push_back(ChdrPacket::make(
        PacketType::data, StreamId{1, 1, 2, 2},
        {0x3f, 0xf0, 0, 0, 0, 0, 0, 0, 0xbf, 0xf0, 0, 0, 0, 0, 0, 0}, 2, true));

    for (size_t i = 0; i < lines.size(); i++) {
        const Bytes wire = from_hex(lines[i]);
        const ChdrPacket decoded = unpack_chdr(wire);
        REQUIRE(decoded == expect[i]);
        CHECK(pack_chdr(decoded) == wire); // byte-stable re-encode
    }
}

TEST_CASE("golden VRT vectors decode identically") {
    const auto lines = read_golden(std::string(SDRP_TEST_DATA_DIR) + "/vrt_golden.txt");
    REQUIRE(lines.size() == 2);
    for (const auto& line : lines) {
        const Bytes frame = from_hex(line);
        const VrtFrame parsed = parse_vrt(frame);
        const Bytes again = encapsulate_vrt(parsed.payload, parsed.stream_id, parsed.packet_count);
        CHECK(again == frame);
    }
    // frozen field spot checks
    const VrtFrame first = parse_vrt(from_hex(lines[0]));
    CHECK(first.stream_id == 7u);
    CHECK(first.packet_count == 3);
    CHECK(first.payload.size() == 8);
    const VrtFrame second = parse_vrt(from_hex(lines[1]));
    CHECK(second.stream_id == 0x01020304u);
    CHECK(second.packet_count == 15);
    CHECK(second.payload.size() == 14);
}
