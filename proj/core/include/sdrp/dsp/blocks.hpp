// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <mutex>

#include "sdrp/catalog.hpp"
#include "sdrp/unit.hpp"

namespace sdrp::dsp {

// Registers the built-in processing-unit kinds:
//
//   passthrough                 sample -> sample, windowed
//   fir                         sample -> sample, Q16.16 tap registers
//   fft, ifft                   sample -> sample, length register
//   crc32                       byte -> byte, append or check/strip
//   bytes_to_bits, bits_to_bytes
//   conv_enc, viterbi_dec       bit -> bit, rate register
//   qam_map                     bit -> sample, order register
//   qam_demap                   sample -> bit
//   rf_loopback                 sample -> sample, channel-model registers
//   stream_src, stream_sink     test pattern source / collecting sink
//   mac_tx_src, mac_rx_sink     DMA ring adapters (need BlockEnv.mac)
//
// Throughput, latency and resource figures in the descriptors are modeled
// catalog constants, not synthesis results.
void register_builtin_blocks(Catalog& catalog);

// Collecting sink, exposed so harnesses can read back what a chain produced.
class StreamSinkBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }
    void on_params(const RegisterSnapshot& regs) override;
    void process_burst(FrameIo& io) override;
    std::vector<std::pair<std::string, uint64_t>> stats() const override;

    std::vector<Sample> collected() const;
    uint64_t total_items() const;
    uint64_t total_bursts() const;

private:
    mutable std::mutex _mutex;
    std::vector<Sample> _collected;
    uint64_t _items = 0;
    uint64_t _bursts = 0;
    uint32_t _keep = 1u << 20;
};

// Deterministic sample source: seeded generator, configurable burst length
// and total item count.
class StreamSrcBlock : public Block {
public:
    StepMode mode() const override { return StepMode::source; }
    void on_params(const RegisterSnapshot& regs) override;
    bool poll(FrameIo& io) override;
    bool source_done() const override;

private:
    uint64_t _emitted = 0;
    uint64_t _state = 1;
    uint64_t _seed_reg = uint64_t(-1); // sentinel: reseed on first commit
    uint32_t _total = 0;
    uint32_t _burst = 1024;
};

} // namespace sdrp::dsp
