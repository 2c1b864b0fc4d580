// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/sample.hpp"

#include <bit>

#include "sdrp/errors.hpp"

namespace sdrp {

void append_samples(Bytes& out, std::span<const Sample> samples) {
    out.reserve(out.size() + samples.size() * sample_wire_bytes);
    for (const Sample& s : samples) {
        append_be64(out, std::bit_cast<uint64_t>(s.i));
        append_be64(out, std::bit_cast<uint64_t>(s.q));
    }
}

Bytes encode_samples(std::span<const Sample> samples) {
    Bytes out;
    append_samples(out, samples);
    return out;
}

std::vector<Sample> decode_samples(ByteSpan data) {
    if (data.size() % sample_wire_bytes != 0)
        raise(errc::malformed_command,
              "payload of " + std::to_string(data.size()) + " bytes is not a whole sample count");
    std::vector<Sample> out(data.size() / sample_wire_bytes);
    for (size_t n = 0; n < out.size(); n++) {
        out[n].i = std::bit_cast<double>(get_be64(data.data() + n * sample_wire_bytes));
        out[n].q = std::bit_cast<double>(get_be64(data.data() + n * sample_wire_bytes + 8));
        if (!is_finite(out[n])) raise(errc::malformed_command, "non-finite sample on wire");
    }
    return out;
}

} // namespace sdrp
