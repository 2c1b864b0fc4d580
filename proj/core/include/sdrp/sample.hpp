// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sdrp/bytes.hpp"

namespace sdrp {

// One complex baseband sample. Dimensionless amplitude; must be finite at
// module boundaries.
struct Sample {
    double i = 0.0;
    double q = 0.0;

    bool operator==(const Sample&) const = default;
};

static_assert(sizeof(Sample) == 16);

inline bool is_finite(const Sample& s) {
    return std::isfinite(s.i) && std::isfinite(s.q);
}

// CHDR Data payloads carry samples as big-endian IEEE-754 float64 I then Q,
// 16 bytes per sample. Doubles survive the wire unchanged, which keeps chains
// split across nodes bit-identical to local ones.
constexpr size_t sample_wire_bytes = 16;

void append_samples(Bytes& out, std::span<const Sample> samples);
Bytes encode_samples(std::span<const Sample> samples);

// Throws errc::malformed_command when the byte count is not a multiple of the
// sample width or a decoded value is not finite.
std::vector<Sample> decode_samples(ByteSpan data);

} // namespace sdrp
