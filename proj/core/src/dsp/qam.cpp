// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/dsp/qam.hpp"

#include <cmath>

#include "sdrp/errors.hpp"

namespace sdrp::dsp {

bool qam_order_supported(unsigned order) {
    return order == 2 || order == 4 || order == 16 || order == 64;
}

unsigned qam_bits_per_symbol(unsigned order) {
    switch (order) {
    case 2: return 1;
    case 4: return 2;
    case 16: return 4;
    case 64: return 6;
    }
    raise(errc::invalid_argument, "unsupported QAM order " + std::to_string(order));
}

// Per-axis Gray mapping, bit group value -> amplitude level.
static const int gray1[2] = {-1, +1};
static const int gray2[4] = {-3, -1, +3, +1};             // 00 01 10 11
static const int gray3[8] = {-7, -5, -1, -3, +7, +5, +1, +3}; // 000..111

static double norm_factor(unsigned order) {
    switch (order) {
    case 2: return 1.0;
    case 4: return 1.0 / std::sqrt(2.0);
    case 16: return 1.0 / std::sqrt(10.0);
    case 64: return 1.0 / std::sqrt(42.0);
    }
    return 1.0;
}

static int axis_level(unsigned value, unsigned bits) {
    switch (bits) {
    case 1: return gray1[value];
    case 2: return gray2[value];
    case 3: return gray3[value];
    }
    return 0;
}

static unsigned axis_value(double level, unsigned bits) {
    // nearest level wins; scan the small table
    const int* table = bits == 1 ? gray1 : bits == 2 ? gray2 : gray3;
    const unsigned count = 1u << bits;
    unsigned best = 0;
    double best_dist = 1e300;
    for (unsigned v = 0; v < count; v++) {
        const double d = std::abs(level - double(table[v]));
        if (d < best_dist) {
            best_dist = d;
            best = v;
        }
    }
    return best;
}

std::vector<Sample> qam_map(std::span<const uint8_t> bits, unsigned order) {
    const unsigned bps = qam_bits_per_symbol(order);
    if (bits.size() % bps != 0)
        raise(errc::length_not_multiple, std::to_string(bits.size()) + " bits, " +
                                             std::to_string(bps) + " per symbol");
    const double scale = norm_factor(order);
    std::vector<Sample> out(bits.size() / bps);
    for (size_t s = 0; s < out.size(); s++) {
        unsigned group = 0;
        for (unsigned b = 0; b < bps; b++) group = group << 1 | (bits[s * bps + b] & 1);
        if (order == 2) {
            out[s] = Sample{scale * axis_level(group, 1), 0.0};
        } else {
            const unsigned half = bps / 2;
            const unsigned iv = group >> half;
            const unsigned qv = group & ((1u << half) - 1);
            out[s] = Sample{scale * axis_level(iv, half), scale * axis_level(qv, half)};
        }
    }
    return out;
}

std::vector<uint8_t> qam_demap(std::span<const Sample> symbols, unsigned order) {
    const unsigned bps = qam_bits_per_symbol(order);
    const double scale = 1.0 / norm_factor(order);
    std::vector<uint8_t> out(symbols.size() * bps);
    for (size_t s = 0; s < symbols.size(); s++) {
        unsigned group;
        if (order == 2) {
            group = axis_value(symbols[s].i * scale, 1);
        } else {
            const unsigned half = bps / 2;
            const unsigned iv = axis_value(symbols[s].i * scale, half);
            const unsigned qv = axis_value(symbols[s].q * scale, half);
            group = iv << half | qv;
        }
        for (unsigned b = 0; b < bps; b++)
            out[s * bps + b] = uint8_t((group >> (bps - 1 - b)) & 1);
    }
    return out;
}

} // namespace sdrp::dsp
