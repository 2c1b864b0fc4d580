// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sdrp {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

// All on-wire integers in this project are big-endian.

inline void put_be16(uint8_t* p, uint16_t v) {
    p[0] = uint8_t(v >> 8);
    p[1] = uint8_t(v);
}

inline void put_be32(uint8_t* p, uint32_t v) {
    p[0] = uint8_t(v >> 24);
    p[1] = uint8_t(v >> 16);
    p[2] = uint8_t(v >> 8);
    p[3] = uint8_t(v);
}

inline void put_be64(uint8_t* p, uint64_t v) {
    put_be32(p, uint32_t(v >> 32));
    put_be32(p + 4, uint32_t(v));
}

inline uint16_t get_be16(const uint8_t* p) {
    return uint16_t(uint16_t(p[0]) << 8 | p[1]);
}

inline uint32_t get_be32(const uint8_t* p) {
    return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | uint32_t(p[3]);
}

inline uint64_t get_be64(const uint8_t* p) {
    return uint64_t(get_be32(p)) << 32 | get_be32(p + 4);
}

inline void append_be32(Bytes& out, uint32_t v) {
    out.resize(out.size() + 4);
    put_be32(out.data() + out.size() - 4, v);
}

inline void append_be64(Bytes& out, uint64_t v) {
    out.resize(out.size() + 8);
    put_be64(out.data() + out.size() - 8, v);
}

std::string to_hex(ByteSpan data);
Bytes from_hex(const std::string& text); // throws errc::bad_frame on non-hex input

} // namespace sdrp
