// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "sdrp/sample.hpp"

namespace sdrp::dsp {

// Direct-form FIR, zero prehistory: y[n] = sum_k taps[k] * x[n-k].
class FirFilter {
public:
    explicit FirFilter(std::vector<double> taps);

    const std::vector<double>& taps() const { return _taps; }

    // Streaming: carries history across calls until reset().
    void process(std::span<const Sample> in, std::span<Sample> out);
    std::vector<Sample> process(std::span<const Sample> in);

    void reset();

private:
    std::vector<double> _taps;
    std::vector<Sample> _history; // x[n-1] .. x[n-(T-1)], most recent first
};

// One-shot convenience over a whole buffer.
std::vector<Sample> fir_filter(std::span<const Sample> x, std::span<const double> taps);

} // namespace sdrp::dsp
