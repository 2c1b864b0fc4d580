// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/chdr.hpp"

#include <string>

#include "sdrp/errors.hpp"

namespace sdrp {

const char* to_string(PacketType t) {
    switch (t) {
    case PacketType::data: return "data";
    case PacketType::flow_control: return "flow_control";
    case PacketType::command: return "command";
    case PacketType::response: return "response";
    }
    return "?";
}

uint32_t pack_sid(const StreamId& sid) {
    return uint32_t(sid.src_device) << 24 | uint32_t(sid.src_endpoint) << 16 |
           uint32_t(sid.dst_device) << 8 | uint32_t(sid.dst_endpoint);
}

StreamId unpack_sid(uint32_t value) {
    return StreamId{
        uint8_t(value >> 24),
        uint8_t(value >> 16),
        uint8_t(value >> 8),
        uint8_t(value),
    };
}

StreamId swap_sid(const StreamId& sid) {
    return StreamId{sid.dst_device, sid.dst_endpoint, sid.src_device, sid.src_endpoint};
}

std::string to_string(const StreamId& sid) {
    return std::to_string(sid.src_device) + ":" + std::to_string(sid.src_endpoint) + ">" +
           std::to_string(sid.dst_device) + ":" + std::to_string(sid.dst_endpoint);
}

ChdrPacket ChdrPacket::make(PacketType type, StreamId sid, Bytes payload, uint16_t seq,
                            bool end_of_burst, std::optional<uint64_t> timestamp) {
    ChdrPacket p;
    p.header.packet_type = type;
    p.header.sid = sid;
    p.header.sequence = uint16_t(seq % chdr_seq_modulus);
    p.header.end_of_burst = end_of_burst;
    p.header.has_time = timestamp.has_value();
    p.timestamp = timestamp;
    p.header.length_bytes = uint32_t(p.header.overhead_bytes() + payload.size());
    p.payload = std::move(payload);
    return p;
}

Bytes pack_chdr(const ChdrPacket& packet, size_t mtu) {
    const ChdrHeader& h = packet.header;
    if (packet.payload.size() > mtu)
        raise(errc::oversize_mtu, "payload " + std::to_string(packet.payload.size()) +
                                      " exceeds MTU " + std::to_string(mtu));
    if (h.has_time != packet.timestamp.has_value())
        raise(errc::inconsistent_length, "has_time flag does not match timestamp presence");
    if (h.sequence >= chdr_seq_modulus)
        raise(errc::inconsistent_length, "sequence out of range");
    const size_t expect = h.overhead_bytes() + packet.payload.size();
    if (h.length_bytes != expect)
        raise(errc::inconsistent_length, "length field " + std::to_string(h.length_bytes) +
                                             " != actual " + std::to_string(expect));
    if (h.length_bytes > 0xffff)
        raise(errc::oversize_mtu, "packet exceeds 16-bit length field");

    uint64_t word = 0;
    word |= uint64_t(h.packet_type) << 62;
    word |= uint64_t(h.has_time ? 1 : 0) << 61;
    word |= uint64_t(h.end_of_burst ? 1 : 0) << 60;
    word |= uint64_t(h.sequence & 0x0fff) << 48;
    word |= uint64_t(h.length_bytes & 0xffff) << 32;
    word |= pack_sid(h.sid);

    Bytes out;
    out.reserve(h.length_bytes);
    append_be64(out, word);
    if (packet.timestamp) append_be64(out, *packet.timestamp);
    out.insert(out.end(), packet.payload.begin(), packet.payload.end());
    return out;
}

ChdrPacket unpack_chdr(ByteSpan data, size_t mtu) {
    if (data.size() < chdr_header_bytes)
        raise(errc::truncated, "need 8 header bytes, have " + std::to_string(data.size()));

    const uint64_t word = get_be64(data.data());
    ChdrPacket p;
    p.header.packet_type = PacketType((word >> 62) & 0x3);
    p.header.has_time = (word >> 61) & 1;
    p.header.end_of_burst = (word >> 60) & 1;
    p.header.sequence = uint16_t((word >> 48) & 0x0fff);
    p.header.length_bytes = uint32_t((word >> 32) & 0xffff);
    p.header.sid = unpack_sid(uint32_t(word & 0xffffffff));

    const size_t overhead = p.header.overhead_bytes();
    if (p.header.length_bytes < overhead)
        raise(errc::bad_length, "length " + std::to_string(p.header.length_bytes) +
                                    " below minimum " + std::to_string(overhead));
    if (data.size() < p.header.length_bytes)
        raise(errc::truncated, "length field says " + std::to_string(p.header.length_bytes) +
                                   ", have " + std::to_string(data.size()));
    const size_t payload_len = p.header.length_bytes - overhead;
    if (payload_len > mtu) raise(errc::oversize_mtu, "payload exceeds MTU");

    size_t off = chdr_header_bytes;
    if (p.header.has_time) {
        p.timestamp = get_be64(data.data() + off);
        off += chdr_timestamp_bytes;
    }
    p.payload.assign(data.begin() + off, data.begin() + off + payload_len);
    return p;
}

Bytes encapsulate_vrt(ByteSpan chdr_bytes, uint32_t stream_id, uint8_t count) {
    const size_t pad = (4 - chdr_bytes.size() % 4) % 4;
    const size_t payload_words = (chdr_bytes.size() + pad) / 4;
    const size_t total_words = payload_words + vrt_overhead_words;
    if (total_words > vrt_max_words)
        raise(errc::oversize_frame, std::to_string(total_words) + " words exceeds 65535");

    uint32_t header = 0;
    header |= 0x1u << 28;              // IF-data with stream identifier
    header |= 0x1u << 26;              // trailer present
    header |= uint32_t(count & 0x0f) << 16;
    header |= uint32_t(total_words);

    Bytes out;
    out.reserve(total_words * 4);
    append_be32(out, header);
    append_be32(out, stream_id);
    out.insert(out.end(), chdr_bytes.begin(), chdr_bytes.end());
    out.resize(out.size() + pad, 0);
    append_be32(out, uint32_t(pad)); // trailer
    return out;
}

VrtFrame parse_vrt(ByteSpan frame) {
    if (frame.size() < vrt_overhead_words * 4)
        raise(errc::truncated, "frame shorter than VRT overhead");
    if (frame.size() % 4 != 0)
        raise(errc::bad_frame, "frame not word aligned");

    const uint32_t header = get_be32(frame.data());
    if ((header >> 28) != 0x1)
        raise(errc::bad_frame, "not an IF-data packet with stream id");
    if (((header >> 26) & 1) != 1)
        raise(errc::bad_frame, "trailer flag clear");
    if ((header >> 27) & 1)
        raise(errc::bad_frame, "unexpected class id flag");
    if (((header >> 20) & 0x0f) != 0)
        raise(errc::bad_frame, "unexpected timestamp flags");

    const size_t size_words = header & 0xffff;
    if (size_words * 4 != frame.size())
        raise(errc::bad_frame, "size field " + std::to_string(size_words) + " words, frame is " +
                                   std::to_string(frame.size() / 4));

    VrtFrame out;
    out.packet_count = uint8_t((header >> 16) & 0x0f);
    out.stream_id = get_be32(frame.data() + 4);

    const uint32_t trailer = get_be32(frame.data() + frame.size() - 4);
    const uint32_t pad = trailer & 0xff;
    const size_t payload_bytes = (size_words - vrt_overhead_words) * 4;
    if (pad > 3 || pad > payload_bytes)
        raise(errc::bad_frame, "bad pad count " + std::to_string(pad));

    out.payload.assign(frame.begin() + 8, frame.begin() + 8 + (payload_bytes - pad));
    return out;
}

Bytes decapsulate_vrt(ByteSpan frame) {
    return parse_vrt(frame).payload;
}

} // namespace sdrp
