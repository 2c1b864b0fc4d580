// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/unit.hpp"

#include <atomic>

#include "sdrp/errors.hpp"

namespace sdrp {

RegisterFile::RegisterFile(const UnitDescriptor& descriptor, const Block* validator)
    : _descriptor(descriptor), _validator(validator) {
    std::map<uint32_t, uint32_t> defaults;
    for (const auto& reg : descriptor.register_map) defaults[reg.offset] = reg.default_value;
    _shadow = defaults;
    _committed = RegisterSnapshot(std::move(defaults));
}

void RegisterFile::write(uint32_t offset, uint32_t value) {
    const RegisterSpec* spec = _descriptor.find_register(offset);
    if (!spec)
        raise(errc::unknown_offset,
              _descriptor.kind + ": no register at offset " + std::to_string(offset));
    if (value < spec->min_value || value > spec->max_value)
        raise(errc::value_out_of_range, _descriptor.kind + "." + spec->name + " = " +
                                            std::to_string(value) + " outside [" +
                                            std::to_string(spec->min_value) + ", " +
                                            std::to_string(spec->max_value) + "]");
    if (_validator) _validator->check_param(offset, value);
    std::lock_guard lock(_mutex);
    _shadow[offset] = value;
    _dirty.store(true, std::memory_order_release);
}

void RegisterFile::write_named(const std::string& name, uint32_t value) {
    const RegisterSpec* spec = _descriptor.find_register(name);
    if (!spec) raise(errc::unknown_offset, _descriptor.kind + ": no register named " + name);
    write(spec->offset, value);
}

uint32_t RegisterFile::read(uint32_t offset) const {
    if (!_descriptor.find_register(offset))
        raise(errc::unknown_offset,
              _descriptor.kind + ": no register at offset " + std::to_string(offset));
    std::lock_guard lock(_mutex);
    return _shadow.at(offset);
}

uint32_t RegisterFile::read_named(const std::string& name) const {
    const RegisterSpec* spec = _descriptor.find_register(name);
    if (!spec) raise(errc::unknown_offset, _descriptor.kind + ": no register named " + name);
    return read(spec->offset);
}

bool RegisterFile::commit() {
    if (!_dirty.load(std::memory_order_acquire)) return false;
    std::lock_guard lock(_mutex);
    _committed = RegisterSnapshot(_shadow);
    _dirty.store(false, std::memory_order_release);
    return true;
}

UnitInstance::UnitInstance(uint64_t id, std::string name, const UnitDescriptor& descriptor,
                           std::unique_ptr<Block> block, std::string clock_domain, double clock_hz)
    : _id(id), _name(std::move(name)), _descriptor(descriptor), _block(std::move(block)),
      _clock_domain(std::move(clock_domain)), _clock_hz(clock_hz),
      _regs(_descriptor, _block.get()) {
    _block->descriptor = &_descriptor;
    _block->on_params(_regs.committed());
}

std::unique_ptr<UnitInstance> create_unit(const Catalog& catalog, const std::string& kind,
                                          const std::map<std::string, uint32_t>& initial_params,
                                          const BlockEnv& env, const std::string& name,
                                          const std::string& clock_domain, double clock_hz) {
    static std::atomic<uint64_t> next_id{1};

    const UnitDescriptor& desc = catalog.descriptor(kind); // throws unknown_kind
    auto block = catalog.make_block(kind, env);
    block->descriptor = &desc;

    auto unit = std::make_unique<UnitInstance>(next_id.fetch_add(1),
                                               name.empty() ? kind : name, desc, std::move(block),
                                               clock_domain, clock_hz);
    for (const auto& [pname, value] : initial_params) {
        const RegisterSpec* spec = desc.find_register(pname);
        if (!spec)
            raise(errc::param_out_of_range, kind + " has no parameter '" + pname + "'");
        try {
            unit->regs().write(spec->offset, value);
        } catch (const Error& e) {
            if (e.code() == errc::value_out_of_range || e.code() == errc::unsupported_length ||
                e.code() == errc::invalid_rate)
                raise(errc::param_out_of_range, kind + "." + pname + ": " + e.what());
            throw;
        }
    }
    unit->regs().commit();
    unit->block().on_params(unit->regs().committed());
    return unit;
}

// ---- I/O views ------------------------------------------------------------

WindowIo::WindowIo(std::vector<std::pair<const uint8_t*, size_t>> in,
                   std::vector<std::pair<uint8_t*, size_t>> out)
    : _in(std::move(in)), _out(std::move(out)) {}

std::span<const uint8_t> WindowIo::input_raw(size_t port) const {
    const auto& [p, n] = _in.at(port);
    return {p, n};
}

std::span<uint8_t> WindowIo::output_raw(size_t port) {
    auto& [p, n] = _out.at(port);
    return {p, n};
}

std::span<const Sample> WindowIo::in_samples(size_t port) const {
    auto raw = input_raw(port);
    return {reinterpret_cast<const Sample*>(raw.data()), raw.size() / sizeof(Sample)};
}

std::span<Sample> WindowIo::out_samples(size_t port) {
    auto raw = output_raw(port);
    return {reinterpret_cast<Sample*>(raw.data()), raw.size() / sizeof(Sample)};
}

std::span<const uint8_t> WindowIo::in_octets(size_t port) const { return input_raw(port); }
std::span<uint8_t> WindowIo::out_octets(size_t port) { return output_raw(port); }

FrameIo::FrameIo(const Bytes* in, size_t in_items, BurstMeta in_meta, size_t n_outputs,
                 const UnitDescriptor* desc)
    : _in(in), _in_items(in_items), _in_meta(in_meta), _desc(desc), _out(n_outputs),
      _out_meta(n_outputs), _wrote(n_outputs, false) {}

std::span<const Sample> FrameIo::in_samples() const {
    if (!_in) return {};
    return {reinterpret_cast<const Sample*>(_in->data()), _in_items};
}

std::span<const uint8_t> FrameIo::in_octets() const {
    if (!_in) return {};
    return {_in->data(), _in_items};
}

void FrameIo::put_samples(size_t port, std::span<const Sample> samples) {
    Bytes& out = out_raw(port);
    const auto* p = reinterpret_cast<const uint8_t*>(samples.data());
    out.insert(out.end(), p, p + samples.size() * sizeof(Sample));
}

void FrameIo::put_octets(size_t port, ByteSpan octets) {
    Bytes& out = out_raw(port);
    out.insert(out.end(), octets.begin(), octets.end());
}

Bytes& FrameIo::out_raw(size_t port) {
    _wrote.at(port) = true;
    return _out.at(port);
}

BurstMeta& FrameIo::out_meta(size_t port) {
    return _out_meta.at(port);
}

bool FrameIo::wrote(size_t port) const {
    return _wrote.at(port);
}

} // namespace sdrp
