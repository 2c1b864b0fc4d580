// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/dsp/crc.hpp"

#include "sdrp/errors.hpp"

namespace sdrp::dsp {

static uint32_t reflect_bits(uint32_t v, unsigned width) {
    uint32_t out = 0;
    for (unsigned i = 0; i < width; i++)
        if (v & (1u << i)) out |= 1u << (width - 1 - i);
    return out;
}

static std::array<uint32_t, 256> build_table(uint32_t poly, bool reflect) {
    std::array<uint32_t, 256> table{};
    if (reflect) {
        const uint32_t rpoly = reflect_bits(poly, 32);
        for (uint32_t n = 0; n < 256; n++) {
            uint32_t crc = n;
            for (int bit = 0; bit < 8; bit++)
                crc = (crc & 1) ? (crc >> 1) ^ rpoly : crc >> 1;
            table[n] = crc;
        }
    } else {
        for (uint32_t n = 0; n < 256; n++) {
            uint32_t crc = n << 24;
            for (int bit = 0; bit < 8; bit++)
                crc = (crc & 0x80000000u) ? (crc << 1) ^ poly : crc << 1;
            table[n] = crc;
        }
    }
    return table;
}

uint32_t crc_compute(ByteSpan data, const CrcConfig& config) {
    if (config.polynomial == 0) raise(errc::invalid_argument, "CRC polynomial must be nonzero");
    // Cache for the common case; rebuild when the polynomial register changed.
    thread_local uint32_t cached_poly = 0;
    thread_local bool cached_reflect = false;
    thread_local std::array<uint32_t, 256> table{};
    if (cached_poly != config.polynomial || cached_reflect != config.reflect) {
        table = build_table(config.polynomial, config.reflect);
        cached_poly = config.polynomial;
        cached_reflect = config.reflect;
    }

    uint32_t crc = config.reflect ? reflect_bits(config.init, 32) : config.init;
    if (config.reflect) {
        for (uint8_t b : data) crc = (crc >> 8) ^ table[(crc ^ b) & 0xff];
    } else {
        for (uint8_t b : data) crc = (crc << 8) ^ table[((crc >> 24) ^ b) & 0xff];
    }
    return crc ^ config.xor_out;
}

Bytes crc_append(ByteSpan data, const CrcConfig& config) {
    const uint32_t crc = crc_compute(data, config);
    Bytes out(data.begin(), data.end());
    if (config.reflect) {
        out.push_back(uint8_t(crc));
        out.push_back(uint8_t(crc >> 8));
        out.push_back(uint8_t(crc >> 16));
        out.push_back(uint8_t(crc >> 24));
    } else {
        out.push_back(uint8_t(crc >> 24));
        out.push_back(uint8_t(crc >> 16));
        out.push_back(uint8_t(crc >> 8));
        out.push_back(uint8_t(crc));
    }
    return out;
}

bool crc_check(ByteSpan frame, const CrcConfig& config) {
    if (frame.size() < 4) return false;
    const ByteSpan data = frame.first(frame.size() - 4);
    const uint32_t expect = crc_compute(data, config);
    const uint8_t* t = frame.data() + frame.size() - 4;
    uint32_t got;
    if (config.reflect)
        got = uint32_t(t[0]) | uint32_t(t[1]) << 8 | uint32_t(t[2]) << 16 | uint32_t(t[3]) << 24;
    else
        got = uint32_t(t[0]) << 24 | uint32_t(t[1]) << 16 | uint32_t(t[2]) << 8 | uint32_t(t[3]);
    return got == expect;
}

} // namespace sdrp::dsp
