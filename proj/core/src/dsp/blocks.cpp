// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/dsp/blocks.hpp"

#include <cstring>

#include "sdrp/dma.hpp"
#include "sdrp/dsp/convcode.hpp"
#include "sdrp/dsp/crc.hpp"
#include "sdrp/dsp/fft.hpp"
#include "sdrp/dsp/fir.hpp"
#include "sdrp/dsp/qam.hpp"
#include "sdrp/errors.hpp"
#include "sdrp/rf.hpp"

namespace sdrp::dsp {

namespace {

// ---- passthrough -----------------------------------------------------------

class PassthroughBlock : public Block {
public:
    void process_windows(WindowIo& io, size_t) override {
        auto in = io.input_raw(0);
        auto out = io.output_raw(0);
        std::memcpy(out.data(), in.data(), in.size());
    }
};

// ---- fir --------------------------------------------------------------------

constexpr uint32_t fir_max_taps = 32;

class FirBlock : public Block {
public:
    void on_params(const RegisterSnapshot& regs) override {
        const uint32_t count = regs.at(0);
        std::vector<double> taps(count);
        for (uint32_t k = 0; k < count; k++)
            taps[k] = double(int32_t(regs.at(4 + 4 * k))) / 65536.0; // Q16.16
        _filter = std::make_unique<FirFilter>(std::move(taps));
    }

    void process_windows(WindowIo& io, size_t) override {
        _filter->process(io.in_samples(0), io.out_samples(0));
    }

    void on_burst_end() override { _filter->reset(); }

private:
    std::unique_ptr<FirFilter> _filter;
};

// ---- fft / ifft -------------------------------------------------------------

class FftBlock : public Block {
public:
    explicit FftBlock(bool inverse) : _inverse(inverse) {}

    StepMode mode() const override { return StepMode::framed; }

    void check_param(uint32_t offset, uint32_t value) const override {
        if (offset == 0 && !fft_unit_length_supported(value))
            raise(errc::unsupported_length,
                  std::to_string(value) + " (supported: powers of two 16..2048)");
    }

    void on_params(const RegisterSnapshot& regs) override { _length = regs.at(0); }

    void process_burst(FrameIo& io) override {
        auto in = io.in_samples();
        const size_t n = _length;
        const size_t pad = (n - in.size() % n) % n;
        std::vector<Sample> buf(in.begin(), in.end());
        buf.resize(in.size() + pad, Sample{});
        for (size_t at = 0; at < buf.size(); at += n) {
            std::span<Sample> window(buf.data() + at, n);
            if (_inverse)
                ifft_in_place(window);
            else
                fft_in_place(window);
        }
        io.put_samples(0, buf);
        BurstMeta meta = io.in_meta();
        meta.pad_samples += uint32_t(pad);
        io.out_meta(0) = meta;
    }

private:
    bool _inverse;
    size_t _length = 64;
};

// ---- crc32 ------------------------------------------------------------------

class CrcBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }

    void on_params(const RegisterSnapshot& regs) override {
        _config.polynomial = regs.at(0);
        _check_mode = regs.at(4) != 0;
    }

    void process_burst(FrameIo& io) override {
        auto in = io.in_octets();
        if (!_check_mode) {
            io.put_octets(0, crc_append(in, _config));
            io.out_meta(0) = io.in_meta();
            return;
        }
        if (crc_check(in, _config)) {
            _ok++;
            io.put_octets(0, in.first(in.size() - 4));
            io.out_meta(0) = io.in_meta();
        } else {
            _bad++; // burst dropped; failure is observable in the counters
        }
    }

    std::vector<std::pair<std::string, uint64_t>> stats() const override {
        return {{"frames_ok", _ok}, {"frames_bad", _bad}};
    }

private:
    CrcConfig _config;
    bool _check_mode = false;
    uint64_t _ok = 0;
    uint64_t _bad = 0;
};

// ---- bit packing ------------------------------------------------------------

class BytesToBitsBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }

    void process_burst(FrameIo& io) override {
        auto in = io.in_octets();
        Bytes& out = io.out_raw(0);
        out.reserve(in.size() * 8);
        for (uint8_t byte : in)
            for (int b = 7; b >= 0; b--) out.push_back(uint8_t((byte >> b) & 1));
        io.out_meta(0) = io.in_meta();
    }
};

class BitsToBytesBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }

    void process_burst(FrameIo& io) override {
        auto in = io.in_octets();
        size_t usable = in.size();
        const BurstMeta& meta = io.in_meta();
        if (meta.pad_bits > 0 && meta.pad_bits <= usable) usable -= meta.pad_bits;
        usable -= usable % 8; // sub-byte remainder is dropped
        Bytes& out = io.out_raw(0);
        out.reserve(usable / 8);
        for (size_t at = 0; at + 8 <= usable; at += 8) {
            uint8_t byte = 0;
            for (int b = 0; b < 8; b++) byte = uint8_t(byte << 1 | (in[at + b] & 1));
            out.push_back(byte);
        }
    }
};

// ---- convolutional code -----------------------------------------------------

ConvRate rate_from_reg(uint32_t value) {
    switch (value) {
    case 0: return ConvRate::r1_2;
    case 1: return ConvRate::r2_3;
    case 2: return ConvRate::r3_4;
    }
    raise(errc::invalid_rate, "rate register " + std::to_string(value));
}

class ConvEncodeBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }

    void check_param(uint32_t offset, uint32_t value) const override {
        if (offset == 0) rate_from_reg(value);
    }

    void on_params(const RegisterSnapshot& regs) override { _rate = rate_from_reg(regs.at(0)); }

    void process_burst(FrameIo& io) override {
        auto coded = conv_encode(io.in_octets(), _rate);
        io.put_octets(0, coded);
        io.out_meta(0) = io.in_meta();
    }

private:
    ConvRate _rate = ConvRate::r1_2;
};

class ViterbiBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }

    void check_param(uint32_t offset, uint32_t value) const override {
        if (offset == 0) rate_from_reg(value);
    }

    void on_params(const RegisterSnapshot& regs) override { _rate = rate_from_reg(regs.at(0)); }

    void process_burst(FrameIo& io) override {
        auto in = io.in_octets();
        size_t usable = in.size();
        const BurstMeta& meta = io.in_meta();
        if (meta.pad_bits > 0 && meta.pad_bits <= usable) usable -= meta.pad_bits;
        if (usable == 0) return;
        auto bits = viterbi_decode(in.first(usable), _rate);
        io.put_octets(0, bits);
        // pads consumed here; downstream sees clean message bits
    }

private:
    ConvRate _rate = ConvRate::r1_2;
};

// ---- QAM --------------------------------------------------------------------

class QamMapBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }

    void check_param(uint32_t offset, uint32_t value) const override {
        if (offset == 0 && !qam_order_supported(value))
            raise(errc::invalid_argument, "QAM order " + std::to_string(value));
    }

    void on_params(const RegisterSnapshot& regs) override { _order = regs.at(0); }

    void process_burst(FrameIo& io) override {
        auto in = io.in_octets();
        const unsigned bps = qam_bits_per_symbol(_order);
        const size_t pad = (bps - in.size() % bps) % bps;
        std::vector<uint8_t> bits(in.begin(), in.end());
        bits.resize(in.size() + pad, 0);
        io.put_samples(0, qam_map(bits, _order));
        BurstMeta meta = io.in_meta();
        meta.pad_bits += uint32_t(pad);
        io.out_meta(0) = meta;
    }

private:
    unsigned _order = 4;
};

class QamDemapBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }

    void check_param(uint32_t offset, uint32_t value) const override {
        if (offset == 0 && !qam_order_supported(value))
            raise(errc::invalid_argument, "QAM order " + std::to_string(value));
    }

    void on_params(const RegisterSnapshot& regs) override { _order = regs.at(0); }

    void process_burst(FrameIo& io) override {
        auto in = io.in_samples();
        const BurstMeta& meta = io.in_meta();
        size_t usable = in.size();
        if (meta.pad_samples > 0 && meta.pad_samples <= usable) usable -= meta.pad_samples;
        auto bits = qam_demap(in.first(usable), _order);
        io.put_octets(0, bits);
        BurstMeta out = meta;
        out.pad_samples = 0; // consumed here
        io.out_meta(0) = out;
    }

private:
    unsigned _order = 4;
};

// ---- RF loopback ------------------------------------------------------------

class RfLoopbackBlock : public Block {
public:
    StepMode mode() const override { return StepMode::framed; }

    void on_params(const RegisterSnapshot& regs) override {
        _channel.mode = regs.at(0) == 0 ? ChannelModel::Mode::identity : ChannelModel::Mode::awgn;
        _channel.snr_db = double(int32_t(regs.at(4))) / 1000.0; // milli-dB register
        _channel.seed = regs.at(8);
    }

    void process_burst(FrameIo& io) override {
        io.put_samples(0, loopback(io.in_samples(), _channel));
        io.out_meta(0) = io.in_meta();
    }

private:
    ChannelModel _channel;
};

// ---- MAC adapters -----------------------------------------------------------

class MacTxSrcBlock : public Block {
public:
    explicit MacTxSrcBlock(MacDma* mac) : _mac(mac) {
        if (!_mac) raise(errc::invalid_argument, "mac_tx_src requires a MAC plane");
    }

    StepMode mode() const override { return StepMode::source; }

    bool poll(FrameIo& io) override {
        auto next = _mac->tx_pop();
        if (!next) return false;
        io.put_octets(0, next->second);
        _mac->tx_mark_sent(next->first); // sent_IRQ: the chain consumed the packet
        return true;
    }

private:
    MacDma* _mac;
};

class MacRxSinkBlock : public Block {
public:
    explicit MacRxSinkBlock(MacDma* mac) : _mac(mac) {
        if (!_mac) raise(errc::invalid_argument, "mac_rx_sink requires a MAC plane");
    }

    StepMode mode() const override { return StepMode::framed; }

    void process_burst(FrameIo& io) override {
        auto in = io.in_octets();
        if (in.empty()) return;
        _mac->deliver(Bytes(in.begin(), in.end()));
    }

private:
    MacDma* _mac;
};

} // namespace

// ---- stream source / sink ----------------------------------------------------

void StreamSinkBlock::on_params(const RegisterSnapshot& regs) {
    std::lock_guard lock(_mutex);
    _keep = regs.at(0);
}

void StreamSinkBlock::process_burst(FrameIo& io) {
    auto in = io.in_samples();
    std::lock_guard lock(_mutex);
    _items += in.size();
    _bursts++;
    for (const Sample& s : in)
        if (_collected.size() < _keep) _collected.push_back(s);
}

std::vector<std::pair<std::string, uint64_t>> StreamSinkBlock::stats() const {
    std::lock_guard lock(_mutex);
    return {{"items", _items}, {"bursts", _bursts}};
}

std::vector<Sample> StreamSinkBlock::collected() const {
    std::lock_guard lock(_mutex);
    return _collected;
}

uint64_t StreamSinkBlock::total_items() const {
    std::lock_guard lock(_mutex);
    return _items;
}

uint64_t StreamSinkBlock::total_bursts() const {
    std::lock_guard lock(_mutex);
    return _bursts;
}

void StreamSrcBlock::on_params(const RegisterSnapshot& regs) {
    _total = regs.at(0);
    _burst = regs.at(4);
    const uint32_t seed = regs.at(8);
    if (seed != _seed_reg) { // reseed only when the register actually changes
        _seed_reg = seed;
        _state = seed ? seed : 1;
    }
}

bool StreamSrcBlock::poll(FrameIo& io) {
    if (source_done()) return false;
    uint64_t count = _burst;
    if (_total > 0) count = std::min<uint64_t>(count, _total - _emitted);
    if (count == 0) return false;

    std::vector<Sample> burst(count);
    for (Sample& s : burst) {
        // LCG -> int16 amplitudes; values are exact in float32 and float64
        _state = _state * 6364136223846793005ull + 1442695040888963407ull;
        s.i = double(int16_t(_state >> 48)) / 32768.0;
        s.q = double(int16_t(_state >> 32)) / 32768.0;
    }
    io.put_samples(0, burst);
    _emitted += count;
    return true;
}

bool StreamSrcBlock::source_done() const {
    return _total > 0 && _emitted >= _total;
}

// ---- registration -------------------------------------------------------------

void register_builtin_blocks(Catalog& catalog) {
    auto simple = [](auto make) {
        return [make](const UnitDescriptor&, const BlockEnv&) -> std::unique_ptr<Block> {
            return make();
        };
    };

    {
        UnitDescriptor d;
        d.kind = "passthrough";
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 4;
        d.cost_logic_cells = 200;
        catalog.register_kind(d, simple([] { return std::make_unique<PassthroughBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "fir";
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 16;
        d.cost_logic_cells = 3000;
        d.cost_dsp_slices = 16;
        d.register_map.push_back({0, "num_taps", 1, fir_max_taps, 1});
        for (uint32_t k = 0; k < fir_max_taps; k++)
            d.register_map.push_back({4 + 4 * k, "tap" + std::to_string(k), 0, 0xffffffff,
                                      k == 0 ? 0x00010000u : 0u}); // Q16.16, identity default
        catalog.register_kind(d, simple([] { return std::make_unique<FirBlock>(); }));
    }
    for (bool inverse : {false, true}) {
        UnitDescriptor d;
        d.kind = inverse ? "ifft" : "fft";
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 512;
        d.cost_logic_cells = 4000;
        d.cost_dsp_slices = 24;
        d.register_map.push_back({0, "length", fft_unit_min_length, fft_unit_max_length, 64});
        catalog.register_kind(d, simple([inverse] { return std::make_unique<FftBlock>(inverse); }));
    }
    {
        UnitDescriptor d;
        d.kind = "crc32";
        d.input_kinds = {ItemKind::byte};
        d.output_kinds = {ItemKind::byte};
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 8;
        d.cost_logic_cells = 500;
        d.register_map.push_back({0, "polynomial", 1, 0xffffffff, 0x04C11DB7});
        d.register_map.push_back({4, "mode", 0, 1, 0}); // 0 append, 1 check/strip
        catalog.register_kind(d, simple([] { return std::make_unique<CrcBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "bytes_to_bits";
        d.input_kinds = {ItemKind::byte};
        d.output_kinds = {ItemKind::bit};
        d.samples_out_per_step = 8;
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 2;
        d.cost_logic_cells = 50;
        catalog.register_kind(d, simple([] { return std::make_unique<BytesToBitsBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "bits_to_bytes";
        d.input_kinds = {ItemKind::bit};
        d.output_kinds = {ItemKind::byte};
        d.samples_in_per_step = 8;
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 2;
        d.cost_logic_cells = 50;
        catalog.register_kind(d, simple([] { return std::make_unique<BitsToBytesBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "conv_enc";
        d.input_kinds = {ItemKind::bit};
        d.output_kinds = {ItemKind::bit};
        d.samples_out_per_step = 2;
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 12;
        d.cost_logic_cells = 1500;
        d.register_map.push_back({0, "rate", 0, 2, 0}); // 0 = 1/2, 1 = 2/3, 2 = 3/4
        catalog.register_kind(d, simple([] { return std::make_unique<ConvEncodeBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "viterbi_dec";
        d.input_kinds = {ItemKind::bit};
        d.output_kinds = {ItemKind::bit};
        d.samples_in_per_step = 2;
        d.throughput_sps = 1.6e8;
        d.latency_cycles = 1024;
        d.cost_logic_cells = 12000;
        d.register_map.push_back({0, "rate", 0, 2, 0});
        catalog.register_kind(d, simple([] { return std::make_unique<ViterbiBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "qam_map";
        d.input_kinds = {ItemKind::bit};
        d.output_kinds = {ItemKind::sample};
        d.samples_in_per_step = 2;
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 8;
        d.cost_logic_cells = 800;
        d.cost_dsp_slices = 4;
        d.register_map.push_back({0, "order", 2, 64, 4});
        catalog.register_kind(d, simple([] { return std::make_unique<QamMapBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "qam_demap";
        d.input_kinds = {ItemKind::sample};
        d.output_kinds = {ItemKind::bit};
        d.samples_out_per_step = 2;
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 8;
        d.cost_logic_cells = 900;
        d.cost_dsp_slices = 4;
        d.register_map.push_back({0, "order", 2, 64, 4});
        catalog.register_kind(d, simple([] { return std::make_unique<QamDemapBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "rf_loopback";
        d.throughput_sps = 3.0e8;
        d.latency_cycles = 8;
        d.cost_logic_cells = 600;
        d.cost_dsp_slices = 8;
        d.register_map.push_back({0, "mode", 0, 1, 0}); // 0 identity, 1 awgn
        d.register_map.push_back({4, "snr_mdb", 0, 0xffffffff, 20000});
        d.register_map.push_back({8, "seed", 0, 0xffffffff, 1});
        catalog.register_kind(d, simple([] { return std::make_unique<RfLoopbackBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "stream_src";
        d.n_inputs = 0;
        d.throughput_sps = 3.0e8;
        d.cost_logic_cells = 100;
        d.register_map.push_back({0, "total_items", 0, 0xffffffff, 0}); // 0 = endless
        d.register_map.push_back({4, "burst_items", 1, 1u << 20, 1024});
        d.register_map.push_back({8, "seed", 0, 0xffffffff, 1});
        catalog.register_kind(d, simple([] { return std::make_unique<StreamSrcBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "stream_sink";
        d.n_outputs = 0;
        d.throughput_sps = 3.0e8;
        d.cost_logic_cells = 100;
        d.register_map.push_back({0, "keep_items", 0, 0xffffffff, 1u << 20});
        catalog.register_kind(d, simple([] { return std::make_unique<StreamSinkBlock>(); }));
    }
    {
        UnitDescriptor d;
        d.kind = "mac_tx_src";
        d.n_inputs = 0;
        d.output_kinds = {ItemKind::byte};
        d.throughput_sps = 3.0e8;
        d.cost_logic_cells = 400;
        catalog.register_kind(d, [](const UnitDescriptor&, const BlockEnv& env) {
            return std::make_unique<MacTxSrcBlock>(env.mac);
        });
    }
    {
        UnitDescriptor d;
        d.kind = "mac_rx_sink";
        d.n_outputs = 0;
        d.input_kinds = {ItemKind::byte};
        d.throughput_sps = 3.0e8;
        d.cost_logic_cells = 400;
        catalog.register_kind(d, [](const UnitDescriptor&, const BlockEnv& env) {
            return std::make_unique<MacRxSinkBlock>(env.mac);
        });
    }
}

} // namespace sdrp::dsp
