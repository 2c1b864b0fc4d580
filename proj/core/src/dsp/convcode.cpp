// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/dsp/convcode.hpp"

#include <array>
#include <bit>
#include <limits>
#include <optional>

#include "sdrp/errors.hpp"

namespace sdrp::dsp {

ConvRate conv_rate_from_string(const std::string& text) {
    if (text == "1/2") return ConvRate::r1_2;
    if (text == "2/3") return ConvRate::r2_3;
    if (text == "3/4") return ConvRate::r3_4;
    raise(errc::invalid_rate, "'" + text + "' (use 1/2, 2/3 or 3/4)");
}

const char* to_string(ConvRate rate) {
    switch (rate) {
    case ConvRate::r1_2: return "1/2";
    case ConvRate::r2_3: return "2/3";
    case ConvRate::r3_4: return "3/4";
    }
    return "?";
}

namespace {

struct Puncture {
    unsigned period; // in (a,b) pairs
    std::array<std::pair<bool, bool>, 3> keep; // keep_a, keep_b per pair in period
};

const Puncture& puncture_for(ConvRate rate) {
    static const Puncture p12{1, {{{true, true}, {false, false}, {false, false}}}};
    static const Puncture p23{2, {{{true, true}, {true, false}, {false, false}}}};
    static const Puncture p34{3, {{{true, true}, {false, true}, {true, false}}}};
    switch (rate) {
    case ConvRate::r1_2: return p12;
    case ConvRate::r2_3: return p23;
    case ConvRate::r3_4: return p34;
    }
    raise(errc::invalid_rate, "bad rate value");
}

inline uint8_t parity7(unsigned v) {
    return uint8_t(std::popcount(v & 0x7f) & 1);
}

// Coded bits produced by `pairs` trellis steps under a puncture pattern.
size_t punctured_length(size_t pairs, const Puncture& p) {
    size_t per_period = 0;
    for (unsigned i = 0; i < p.period; i++)
        per_period += (p.keep[i].first ? 1 : 0) + (p.keep[i].second ? 1 : 0);
    size_t n = (pairs / p.period) * per_period;
    for (size_t r = 0; r < pairs % p.period; r++)
        n += (p.keep[r].first ? 1 : 0) + (p.keep[r].second ? 1 : 0);
    return n;
}

// Inverse of punctured_length; nullopt when no pair count matches.
std::optional<size_t> pairs_for_coded(size_t coded, const Puncture& p) {
    size_t per_period = 0;
    std::array<size_t, 4> partial{}; // coded bits of the first r pairs of a period
    for (unsigned i = 0; i < p.period; i++) {
        partial[i] = per_period;
        per_period += (p.keep[i].first ? 1 : 0) + (p.keep[i].second ? 1 : 0);
    }
    for (unsigned r = 0; r < p.period; r++) {
        if (coded < partial[r]) continue;
        const size_t body = coded - partial[r];
        if (body % per_period != 0) continue;
        return (body / per_period) * p.period + r;
    }
    return std::nullopt;
}

} // namespace

size_t conv_coded_length(size_t message_bits, ConvRate rate) {
    return punctured_length(message_bits + conv_tail_bits, puncture_for(rate));
}

std::vector<uint8_t> conv_encode(std::span<const uint8_t> bits, ConvRate rate) {
    const Puncture& p = puncture_for(rate);
    const size_t pairs = bits.size() + conv_tail_bits;
    std::vector<uint8_t> out;
    out.reserve(punctured_length(pairs, p));

    unsigned reg = 0; // bit 6 = current input, bits 5..0 = previous six
    for (size_t t = 0; t < pairs; t++) {
        const unsigned bit = t < bits.size() ? (bits[t] & 1) : 0; // zero tail flush
        reg = (reg >> 1) | (bit << 6);
        const uint8_t a = parity7(reg & conv_gen_a);
        const uint8_t b = parity7(reg & conv_gen_b);
        const auto& keep = p.keep[t % p.period];
        if (keep.first) out.push_back(a);
        if (keep.second) out.push_back(b);
    }
    return out;
}

std::vector<uint8_t> viterbi_decode(std::span<const uint8_t> coded, ConvRate rate) {
    const Puncture& p = puncture_for(rate);
    const auto pairs = pairs_for_coded(coded.size(), p);
    if (!pairs)
        raise(errc::invalid_argument,
              "coded length " + std::to_string(coded.size()) + " matches no message length");
    const size_t T = *pairs;
    if (T < conv_tail_bits)
        raise(errc::invalid_argument, "coded burst shorter than the tail flush");
    const size_t k = T - conv_tail_bits;

    // Branch outputs for all 128 possible 7-bit windows.
    static const auto window_out = [] {
        std::array<std::pair<uint8_t, uint8_t>, 128> w{};
        for (unsigned v = 0; v < 128; v++)
            w[v] = {parity7(v & conv_gen_a), parity7(v & conv_gen_b)};
        return w;
    }();

    constexpr uint32_t inf = std::numeric_limits<uint32_t>::max() / 4;
    std::array<uint32_t, 64> metric;
    metric.fill(inf);
    metric[0] = 0;
    std::array<uint32_t, 64> next;

    std::vector<uint64_t> decisions(T); // one predecessor bit per state per step

    size_t pos = 0; // index into coded
    for (size_t t = 0; t < T; t++) {
        const auto& keep = p.keep[t % p.period];
        int ra = -1, rb = -1;
        if (keep.first) ra = coded[pos++] & 1;
        if (keep.second) rb = coded[pos++] & 1;

        next.fill(inf);
        uint64_t dec = 0;
        for (unsigned sp = 0; sp < 64; sp++) {
            uint32_t best = inf;
            unsigned best_w0 = 0;
            for (unsigned w0 = 0; w0 < 2; w0++) {
                const unsigned window = (sp << 1) | w0;
                const unsigned prev = window & 0x3f;
                if (metric[prev] >= inf) continue;
                const auto [a, b] = window_out[window];
                uint32_t m = metric[prev];
                if (ra >= 0 && a != ra) m++;
                if (rb >= 0 && b != rb) m++;
                if (m < best) {
                    best = m;
                    best_w0 = w0;
                }
            }
            next[sp] = best;
            if (best_w0) dec |= uint64_t(1) << sp;
        }
        decisions[t] = dec;
        metric = next;
    }

    // The tail drives the encoder to state zero; trace back from there.
    std::vector<uint8_t> bits(T);
    unsigned state = 0;
    for (size_t t = T; t-- > 0;) {
        const unsigned w0 = (decisions[t] >> state) & 1;
        const unsigned window = (state << 1) | w0;
        bits[t] = uint8_t(window >> 6);
        state = window & 0x3f;
    }

    bits.resize(k); // strip the tail
    return bits;
}

} // namespace sdrp::dsp
