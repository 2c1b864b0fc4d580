// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "sdrp/stream.hpp"

namespace sdrp {

// Control registers are 32 bits wide at 4-byte-aligned offsets. Multi-word
// parameters occupy consecutive registers.
struct RegisterSpec {
    uint32_t offset = 0;
    std::string name;
    uint32_t min_value = 0;
    uint32_t max_value = 0xffffffff;
    uint32_t default_value = 0;
};

// Catalog entry for one processing-unit kind. Throughput, latency and
// resource costs are modeled constants standing in for synthesis reports;
// the admission math treats them as ground truth.
struct UnitDescriptor {
    std::string kind;
    uint32_t n_inputs = 1;
    uint32_t n_outputs = 1;
    uint32_t samples_in_per_step = 1;
    uint32_t samples_out_per_step = 1;
    uint32_t cycles_per_step = 1;   // fabric cycles consumed per step
    double throughput_sps = 0.0;    // modeled peak, items/s
    uint32_t latency_cycles = 0;    // pipeline depth at the unit's clock
    uint64_t cost_logic_cells = 0;
    uint64_t cost_dsp_slices = 0;
    std::vector<RegisterSpec> register_map;
    std::vector<ItemKind> input_kinds;  // per input port; empty = all sample
    std::vector<ItemKind> output_kinds; // per output port; empty = all sample

    ItemKind input_kind(size_t port) const;
    ItemKind output_kind(size_t port) const;
    const RegisterSpec* find_register(uint32_t offset) const;
    const RegisterSpec* find_register(const std::string& name) const;

    // Checks descriptor invariants against the given fabric clock ceiling;
    // throws errc::invalid_descriptor.
    void validate(double fabric_clock_hz) const;
};

// Committed register values visible to a block while it processes one window
// or burst. Control-plane writes land in a shadow file and become visible
// here only between windows.
class RegisterSnapshot {
public:
    RegisterSnapshot() = default;
    explicit RegisterSnapshot(std::map<uint32_t, uint32_t> values) : _values(std::move(values)) {}

    uint32_t at(uint32_t offset) const;
    bool contains(uint32_t offset) const { return _values.count(offset) != 0; }
    const std::map<uint32_t, uint32_t>& values() const { return _values; }

private:
    std::map<uint32_t, uint32_t> _values;
};

class FrameIo;
class WindowIo;

// Stepping discipline of a block.
//
//   windowed  consume exactly in_per_step items per input and produce exactly
//             out_per_step per output, or do nothing observable.
//   framed    consume one whole end_of_burst-delimited burst and emit the
//             transformed burst; used by blocks whose output length depends
//             on the burst (coders, mappers, packet framers).
//   source    no stream inputs; polled for bursts it originates.
enum class StepMode : uint8_t { windowed, framed, source };

class Block {
public:
    virtual ~Block() = default;

    virtual StepMode mode() const { return StepMode::windowed; }

    // Invoked when a fresh register snapshot is committed, always between
    // windows/bursts.
    virtual void on_params(const RegisterSnapshot&) {}

    // Rejects a single register write before it is accepted into the shadow
    // file (beyond the declared min/max check). Throw to refuse.
    virtual void check_param(uint32_t /*offset*/, uint32_t /*value*/) const {}

    // windowed: item counts for the next window; defaults to the descriptor
    // constants. Register-dependent blocks (FFT) override.
    virtual uint32_t window_in(size_t port) const;
    virtual uint32_t window_out(size_t port) const;

    // windowed: process `windows` consecutive windows. Input spans hold
    // windows*window_in(port) items; output spans must be fully written.
    virtual void process_windows(WindowIo& io, size_t windows);

    // windowed: burst boundary crossed on the inputs; clear inter-window
    // state (filter history and the like).
    virtual void on_burst_end() {}

    // framed: transform one complete input burst into output bursts.
    virtual void process_burst(FrameIo& io);

    // source: emit one burst if data is pending; false = nothing to do now.
    virtual bool poll(FrameIo& io);

    // source: true once the block will never produce again (lets the chain
    // drain and finish).
    virtual bool source_done() const { return false; }

    // Block-specific counters for the stats surface.
    virtual std::vector<std::pair<std::string, uint64_t>> stats() const { return {}; }

    const UnitDescriptor* descriptor = nullptr; // set by the catalog at creation
};

// Services a block may bind to at creation time (MAC rings, RF state).
struct BlockEnv {
    class MacDma* mac = nullptr;
    class RfFrontend* rf = nullptr;
};

using BlockFactory = std::function<std::unique_ptr<Block>(const UnitDescriptor&, const BlockEnv&)>;

// The library of precompiled processing-unit kinds. Registration is
// serialized; enumeration is deterministic (sorted by kind name).
class Catalog {
public:
    Catalog() = default;
    explicit Catalog(double fabric_clock_hz) : _fabric_clock_hz(fabric_clock_hz) {}

    // Throws errc::duplicate_kind, errc::invalid_descriptor.
    void register_kind(UnitDescriptor descriptor, BlockFactory factory);

    bool has(const std::string& kind) const;
    const UnitDescriptor& descriptor(const std::string& kind) const; // errc::unknown_kind
    std::vector<UnitDescriptor> list() const;

    std::unique_ptr<Block> make_block(const std::string& kind, const BlockEnv& env) const;

    double fabric_clock_hz() const { return _fabric_clock_hz; }

private:
    struct Entry {
        UnitDescriptor descriptor;
        BlockFactory factory;
    };

    double _fabric_clock_hz = 3.0e8;
    mutable std::mutex _mutex;
    std::map<std::string, Entry> _entries;
};

} // namespace sdrp
