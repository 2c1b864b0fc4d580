// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "sdrp/bytes.hpp"

namespace sdrp {

// CHDR packet layout, one 64-bit big-endian header word:
//
//   63 62 | 61 | 60 | 59 .. 48 | 47 .. 32 | 31 .. 0
//   type  |time|eob | sequence | length   | stream id
//
//   type: 00 Data, 01 FlowControl, 10 Command, 11 Response
//   time: a 64-bit big-endian timestamp word follows the header
//   eob:  end of burst
//   length: total packet bytes including header and timestamp word
//
// The payload follows immediately after the header (and timestamp, when
// present).

enum class PacketType : uint8_t {
    data = 0,
    flow_control = 1,
    command = 2,
    response = 3,
};

const char* to_string(PacketType t);

struct StreamId {
    uint8_t src_device = 0;
    uint8_t src_endpoint = 0;
    uint8_t dst_device = 0;
    uint8_t dst_endpoint = 0;

    bool operator==(const StreamId&) const = default;
};

// sid = src_device * 2^24 + src_endpoint * 2^16 + dst_device * 2^8 + dst_endpoint
uint32_t pack_sid(const StreamId& sid);
StreamId unpack_sid(uint32_t value);

// Returns the SID with source and destination halves exchanged (the default
// return route for a wrapped shared unit).
StreamId swap_sid(const StreamId& sid);

std::string to_string(const StreamId& sid);

constexpr size_t chdr_header_bytes = 8;
constexpr size_t chdr_timestamp_bytes = 8;
constexpr size_t default_mtu = 8000;
constexpr uint16_t chdr_seq_modulus = 4096;

inline uint16_t next_seq(uint16_t seq) {
    return uint16_t((seq + 1) % chdr_seq_modulus);
}

struct ChdrHeader {
    PacketType packet_type = PacketType::data;
    bool has_time = false;
    bool end_of_burst = false;
    uint16_t sequence = 0;    // 0..4095, wraps modulo 4096
    uint32_t length_bytes = chdr_header_bytes;
    StreamId sid;

    size_t overhead_bytes() const {
        return chdr_header_bytes + (has_time ? chdr_timestamp_bytes : 0);
    }

    bool operator==(const ChdrHeader&) const = default;
};

struct ChdrPacket {
    ChdrHeader header;
    std::optional<uint64_t> timestamp; // sample-clock ticks; present iff header.has_time
    Bytes payload;

    static ChdrPacket make(PacketType type, StreamId sid, Bytes payload, uint16_t seq,
                           bool end_of_burst = false,
                           std::optional<uint64_t> timestamp = std::nullopt);

    bool operator==(const ChdrPacket&) const = default;
};

// Serializes to header word, optional timestamp word, payload.
// Throws errc::oversize_mtu, errc::inconsistent_length.
Bytes pack_chdr(const ChdrPacket& packet, size_t mtu = default_mtu);

// Decodes exactly header.length_bytes bytes from the front of `data`.
// Throws errc::truncated, errc::bad_length, errc::oversize_mtu.
ChdrPacket unpack_chdr(ByteSpan data, size_t mtu = default_mtu);

// VRT encapsulation (minimal IF-data profile: mandatory stream identifier and
// trailer, no class identifier, no timestamps):
//
//   word 0:  31..28 type = 0001 | 27 C = 0 | 26 T = 1 | 25..24 rsvd
//            23..22 TSI = 00 | 21..20 TSF = 00 | 19..16 count | 15..0 size
//   word 1:  stream id
//   words 2..n-2: payload (CHDR bytes, zero-padded to a word boundary)
//   word n-1: trailer, low byte = number of pad bytes (0..3)
//
// All words big-endian. `size` counts every word of the frame.

constexpr size_t vrt_max_words = 65535;
constexpr size_t vrt_overhead_words = 3; // header + stream id + trailer

struct VrtFrame {
    uint8_t packet_count = 0; // 0..15, modulo-16 per-link counter
    uint32_t stream_id = 0;
    Bytes payload;            // pad already stripped
};

// Throws errc::oversize_frame when the frame would exceed 65535 words.
Bytes encapsulate_vrt(ByteSpan chdr_bytes, uint32_t stream_id, uint8_t count);

// Inverse of encapsulate_vrt. Throws errc::bad_frame on any inconsistency
// (size field mismatch, bad type/flags, bad pad count), errc::truncated when
// short.
VrtFrame parse_vrt(ByteSpan frame);
Bytes decapsulate_vrt(ByteSpan frame);

} // namespace sdrp
