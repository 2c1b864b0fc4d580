// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "sdrp/catalog.hpp"
#include "sdrp/sample.hpp"

namespace sdrp {

// Control registers of one unit instance. Control-plane writes are validated
// and stored immediately (reads return the last accepted write); the data
// path picks them up as a snapshot only at step boundaries, so a window or
// burst is never processed under a half-applied parameter set.
class RegisterFile {
public:
    RegisterFile(const UnitDescriptor& descriptor, const Block* validator);

    // Throws errc::unknown_offset, errc::value_out_of_range, plus whatever the
    // block's check_param refuses.
    void write(uint32_t offset, uint32_t value);
    void write_named(const std::string& name, uint32_t value);

    uint32_t read(uint32_t offset) const;
    uint32_t read_named(const std::string& name) const;

    // Data-path side: true when a new snapshot was committed.
    bool commit();
    const RegisterSnapshot& committed() const { return _committed; }

private:
    const UnitDescriptor& _descriptor;
    const Block* _validator;

    mutable std::mutex _mutex;
    std::map<uint32_t, uint32_t> _shadow;
    std::atomic<bool> _dirty{false};

    RegisterSnapshot _committed; // owned by the data path after construction
};

// A live processing unit: descriptor copy, block state, registers, clock
// domain. The clock is a label plus a modeled frequency used by the
// latency/throughput analysis; there is no cycle simulation.
class UnitInstance {
public:
    UnitInstance(uint64_t id, std::string name, const UnitDescriptor& descriptor,
                 std::unique_ptr<Block> block, std::string clock_domain, double clock_hz);

    uint64_t id() const { return _id; }
    const std::string& name() const { return _name; }
    const UnitDescriptor& descriptor() const { return _descriptor; }
    const std::string& clock_domain() const { return _clock_domain; }
    double clock_hz() const { return _clock_hz; }

    RegisterFile& regs() { return _regs; }
    const RegisterFile& regs() const { return _regs; }
    Block& block() { return *_block; }
    const Block& block() const { return *_block; }

private:
    uint64_t _id;
    std::string _name;
    UnitDescriptor _descriptor;
    std::unique_ptr<Block> _block;
    std::string _clock_domain;
    double _clock_hz;
    RegisterFile _regs;
};

// Instantiates a catalog kind with defaults overlaid by initial_params
// (register names). Throws errc::unknown_kind, errc::param_out_of_range.
std::unique_ptr<UnitInstance> create_unit(const Catalog& catalog, const std::string& kind,
                                          const std::map<std::string, uint32_t>& initial_params,
                                          const BlockEnv& env = {}, const std::string& name = {},
                                          const std::string& clock_domain = "fabric",
                                          double clock_hz = 3.0e8);

// ---- block I/O views ----------------------------------------------------

// Windowed processing: contiguous input/output runs covering one or more
// whole windows.
class WindowIo {
public:
    std::span<const uint8_t> input_raw(size_t port) const;
    std::span<uint8_t> output_raw(size_t port);

    std::span<const Sample> in_samples(size_t port) const;
    std::span<Sample> out_samples(size_t port);
    std::span<const uint8_t> in_octets(size_t port) const; // byte or bit items
    std::span<uint8_t> out_octets(size_t port);

    WindowIo(std::vector<std::pair<const uint8_t*, size_t>> in,
             std::vector<std::pair<uint8_t*, size_t>> out);

private:
    std::vector<std::pair<const uint8_t*, size_t>> _in;  // pointer + byte length
    std::vector<std::pair<uint8_t*, size_t>> _out;
};

// Framed processing: one complete burst in, transformed bursts out.
class FrameIo {
public:
    size_t in_items() const { return _in_items; }
    std::span<const Sample> in_samples() const;
    std::span<const uint8_t> in_octets() const;
    const BurstMeta& in_meta() const { return _in_meta; }

    void put_samples(size_t port, std::span<const Sample> samples);
    void put_octets(size_t port, ByteSpan octets);
    Bytes& out_raw(size_t port);
    BurstMeta& out_meta(size_t port);
    bool wrote(size_t port) const;

    FrameIo(const Bytes* in, size_t in_items, BurstMeta in_meta, size_t n_outputs,
            const UnitDescriptor* desc);

private:
    const Bytes* _in;
    size_t _in_items;
    BurstMeta _in_meta;
    const UnitDescriptor* _desc;
    std::vector<Bytes> _out;
    std::vector<BurstMeta> _out_meta;
    std::vector<bool> _wrote;

    friend class DeployedUnit;
    friend class SharedUnitWrapper;
};

} // namespace sdrp
