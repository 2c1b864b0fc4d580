// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "sdrp/bytes.hpp"

namespace sdrp::dsp {

struct CrcConfig {
    uint32_t polynomial = 0x04C11DB7;
    uint32_t init = 0xFFFFFFFF;
    uint32_t xor_out = 0xFFFFFFFF;
    bool reflect = true; // reflected input and output (CRC-32 convention)
};

constexpr CrcConfig crc32_config{};

// Table-driven CRC over the configured polynomial. The polynomial must be
// nonzero. crc32_config yields the familiar check value
// crc_compute("123456789") == 0xCBF43926.
uint32_t crc_compute(ByteSpan data, const CrcConfig& config = crc32_config);

// Appends the CRC to the data, least significant byte first for reflected
// configurations, most significant first otherwise.
Bytes crc_append(ByteSpan data, const CrcConfig& config = crc32_config);

// Verifies a frame produced by crc_append.
bool crc_check(ByteSpan frame, const CrcConfig& config = crc32_config);

} // namespace sdrp::dsp
