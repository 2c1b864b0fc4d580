// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/catalog.hpp"

#include <set>

#include "sdrp/errors.hpp"
#include "sdrp/unit.hpp"

namespace sdrp {

ItemKind UnitDescriptor::input_kind(size_t port) const {
    if (port < input_kinds.size()) return input_kinds[port];
    return ItemKind::sample;
}

ItemKind UnitDescriptor::output_kind(size_t port) const {
    if (port < output_kinds.size()) return output_kinds[port];
    return ItemKind::sample;
}

const RegisterSpec* UnitDescriptor::find_register(uint32_t offset) const {
    for (const auto& reg : register_map)
        if (reg.offset == offset) return &reg;
    return nullptr;
}

const RegisterSpec* UnitDescriptor::find_register(const std::string& name) const {
    for (const auto& reg : register_map)
        if (reg.name == name) return &reg;
    return nullptr;
}

void UnitDescriptor::validate(double fabric_clock_hz) const {
    if (kind.empty()) raise(errc::invalid_descriptor, "empty kind name");
    if (throughput_sps <= 0)
        raise(errc::invalid_descriptor, kind + ": throughput_sps must be > 0");
    if (cycles_per_step == 0)
        raise(errc::invalid_descriptor, kind + ": cycles_per_step must be >= 1");
    if (n_outputs > 0 && samples_out_per_step > 0 && fabric_clock_hz > 0) {
        const double ceiling = double(samples_out_per_step) * fabric_clock_hz / cycles_per_step;
        if (throughput_sps > ceiling)
            raise(errc::invalid_descriptor,
                  kind + ": declared throughput exceeds samples_out_per_step * clock / cycles_per_step");
    }
    if (n_inputs > 0 && samples_in_per_step == 0)
        raise(errc::invalid_descriptor, kind + ": samples_in_per_step must be >= 1");
    if (!input_kinds.empty() && input_kinds.size() != n_inputs)
        raise(errc::invalid_descriptor, kind + ": input_kinds arity mismatch");
    if (!output_kinds.empty() && output_kinds.size() != n_outputs)
        raise(errc::invalid_descriptor, kind + ": output_kinds arity mismatch");

    std::set<uint32_t> offsets;
    std::set<std::string> names;
    for (const auto& reg : register_map) {
        if (reg.offset % 4 != 0)
            raise(errc::invalid_descriptor, kind + ": register offset not 4-byte aligned");
        if (!offsets.insert(reg.offset).second)
            raise(errc::invalid_descriptor, kind + ": duplicate register offset");
        if (!names.insert(reg.name).second)
            raise(errc::invalid_descriptor, kind + ": duplicate register name");
        if (reg.min_value > reg.max_value)
            raise(errc::invalid_descriptor, kind + ": register min > max");
        if (reg.default_value < reg.min_value || reg.default_value > reg.max_value)
            raise(errc::invalid_descriptor, kind + ": register default outside range");
    }
}

uint32_t RegisterSnapshot::at(uint32_t offset) const {
    auto it = _values.find(offset);
    if (it == _values.end()) raise(errc::unknown_offset, "offset " + std::to_string(offset));
    return it->second;
}

uint32_t Block::window_in(size_t) const {
    return descriptor ? descriptor->samples_in_per_step : 1;
}

uint32_t Block::window_out(size_t) const {
    return descriptor ? descriptor->samples_out_per_step : 1;
}

void Block::process_windows(WindowIo&, size_t) {
    raise(errc::invalid_argument, "block does not implement windowed processing");
}

void Block::process_burst(FrameIo&) {
    raise(errc::invalid_argument, "block does not implement framed processing");
}

bool Block::poll(FrameIo&) {
    raise(errc::invalid_argument, "block is not a source");
}

void Catalog::register_kind(UnitDescriptor descriptor, BlockFactory factory) {
    descriptor.validate(_fabric_clock_hz);
    if (!factory) raise(errc::invalid_descriptor, descriptor.kind + ": null factory");
    std::lock_guard lock(_mutex);
    std::string key = descriptor.kind;
    auto [it, inserted] =
        _entries.emplace(std::move(key), Entry{std::move(descriptor), std::move(factory)});
    if (!inserted) raise(errc::duplicate_kind, it->first);
}

bool Catalog::has(const std::string& kind) const {
    std::lock_guard lock(_mutex);
    return _entries.count(kind) != 0;
}

const UnitDescriptor& Catalog::descriptor(const std::string& kind) const {
    std::lock_guard lock(_mutex);
    auto it = _entries.find(kind);
    if (it == _entries.end()) raise(errc::unknown_kind, kind);
    return it->second.descriptor;
}

std::vector<UnitDescriptor> Catalog::list() const {
    std::lock_guard lock(_mutex);
    std::vector<UnitDescriptor> out;
    out.reserve(_entries.size());
    for (const auto& [_, entry] : _entries) out.push_back(entry.descriptor);
    return out;
}

std::unique_ptr<Block> Catalog::make_block(const std::string& kind, const BlockEnv& env) const {
    BlockFactory factory;
    const UnitDescriptor* desc = nullptr;
    {
        std::lock_guard lock(_mutex);
        auto it = _entries.find(kind);
        if (it == _entries.end()) raise(errc::unknown_kind, kind);
        factory = it->second.factory;
        desc = &it->second.descriptor;
    }
    auto block = factory(*desc, env);
    return block;
}

} // namespace sdrp
