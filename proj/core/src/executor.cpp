// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/executor.hpp"

#include <chrono>

#include "sdrp/errors.hpp"

namespace sdrp {

using namespace std::chrono_literals;

DeployedUnit::DeployedUnit(std::shared_ptr<UnitInstance> unit, size_t batch_items)
    : _unit(std::move(unit)), _batch_items(batch_items) {
    const auto& d = _unit->descriptor();
    _inputs.resize(d.n_inputs);
    _outputs.resize(d.n_outputs);
    _win_in.resize(d.n_inputs);
    _win_out.resize(d.n_outputs);
}

DeployedUnit::~DeployedUnit() {
    request_stop();
    join();
}

void DeployedUnit::bind_input(size_t port, std::shared_ptr<StreamBuffer> buffer) {
    if (port >= _inputs.size())
        raise(errc::no_such_port, _unit->name() + " has no input " + std::to_string(port));
    if (_inputs[port]) raise(errc::port_occupied, _unit->name() + ".in" + std::to_string(port));
    if (buffer->kind() != _unit->descriptor().input_kind(port))
        raise(errc::invalid_argument, _unit->name() + ".in" + std::to_string(port) +
                                          ": item kind mismatch");
    buffer->set_consumer_waker([this] { wake(); });
    _inputs[port] = std::move(buffer);
}

void DeployedUnit::bind_output(size_t port, std::shared_ptr<StreamBuffer> buffer) {
    if (port >= _outputs.size())
        raise(errc::no_such_port, _unit->name() + " has no output " + std::to_string(port));
    if (_outputs[port]) raise(errc::port_occupied, _unit->name() + ".out" + std::to_string(port));
    if (buffer->kind() != _unit->descriptor().output_kind(port))
        raise(errc::invalid_argument, _unit->name() + ".out" + std::to_string(port) +
                                          ": item kind mismatch");
    buffer->set_producer_waker([this] { wake(); });
    _outputs[port] = std::move(buffer);
}

StreamBuffer* DeployedUnit::input(size_t port) const {
    return port < _inputs.size() ? _inputs[port].get() : nullptr;
}

StreamBuffer* DeployedUnit::output(size_t port) const {
    return port < _outputs.size() ? _outputs[port].get() : nullptr;
}

bool DeployedUnit::fully_bound() const {
    for (const auto& b : _inputs)
        if (!b) return false;
    for (const auto& b : _outputs)
        if (!b) return false;
    return true;
}

void DeployedUnit::commit_params() {
    if (_unit->regs().commit()) _unit->block().on_params(_unit->regs().committed());
}

StepReport DeployedUnit::step(size_t max_windows) {
    commit_params(); // step-boundary rule: params change only here
    switch (_unit->block().mode()) {
    case StepMode::windowed: return step_windowed(max_windows);
    case StepMode::framed: return step_framed();
    case StepMode::source: return step_source();
    }
    return {};
}

StepReport DeployedUnit::step_windowed(size_t max_windows) {
    StepReport report;
    Block& block = _unit->block();

    // Items usable on each input before the next burst boundary.
    size_t windows = max_windows;
    bool boundary_reached = false;
    BurstMeta boundary_meta;
    bool input_limited = false;

    for (size_t p = 0; p < _inputs.size(); p++) {
        StreamBuffer* in = _inputs[p].get();
        const uint32_t win = block.window_in(p);
        if (win == 0) raise(errc::invalid_descriptor, "windowed block with zero window");
        size_t usable = in->size();
        auto tag = in->peek_tag();
        bool tag_limits = false;
        if (tag) {
            const uint64_t dist = tag->end_index - in->read_index();
            if (dist <= usable) {
                usable = size_t(dist);
                tag_limits = true;
            }
        }
        size_t w = usable / win;
        if (w == 0) {
            if (tag_limits && usable == 0) {
                // Boundary exactly at the read index: cross it now.
                in->pop_tag();
                block.on_burst_end();
                for (auto& out : _outputs)
                    if (out) out->mark_burst_end(p == 0 ? tag->meta : BurstMeta{});
                report.progressed = true;
                {
                    std::lock_guard lock(_stats_mutex);
                    _stats.bursts++;
                }
                return report;
            }
            if (tag_limits && usable > 0) {
                // Burst tail shorter than one window: windowed blocks cannot
                // process it; drop and account.
                Bytes scratch(usable * in->item_bytes());
                in->try_pop(scratch.data(), usable);
                std::lock_guard lock(_stats_mutex);
                _stats.misaligned_drops += usable;
                report.progressed = true;
                return report;
            }
            input_limited = true;
        }
        windows = std::min(windows, w);
    }

    if (input_limited || windows == 0) {
        bool all_exhausted = !_inputs.empty();
        for (const auto& in : _inputs)
            if (!in->exhausted()) all_exhausted = false;
        if (all_exhausted) {
            report.finished = true;
            return report;
        }
        report.blocked_on_input = true;
        return report;
    }

    // Output space check before any input is consumed: no partial effects.
    for (size_t p = 0; p < _outputs.size(); p++) {
        const uint32_t win = block.window_out(p);
        const size_t space_windows = win == 0 ? windows : _outputs[p]->space() / win;
        windows = std::min(windows, space_windows);
    }
    if (windows == 0) {
        report.blocked_on_output = true;
        return report;
    }

    // Move input windows into scratch.
    std::vector<std::pair<const uint8_t*, size_t>> in_ptrs;
    for (size_t p = 0; p < _inputs.size(); p++) {
        const uint32_t win = block.window_in(p);
        const size_t items = windows * win;
        const size_t bytes = items * _inputs[p]->item_bytes();
        _win_in[p].resize(bytes);
        const size_t got = _inputs[p]->try_pop(_win_in[p].data(), items);
        if (got != items) raise(errc::io_error, "concurrent consumer on input port");
        in_ptrs.push_back({_win_in[p].data(), bytes});
    }
    std::vector<std::pair<uint8_t*, size_t>> out_ptrs;
    for (size_t p = 0; p < _outputs.size(); p++) {
        const uint32_t win = block.window_out(p);
        const size_t bytes = windows * win * _outputs[p]->item_bytes();
        _win_out[p].resize(bytes);
        out_ptrs.push_back({_win_out[p].data(), bytes});
    }

    WindowIo io(std::move(in_ptrs), std::move(out_ptrs));
    block.process_windows(io, windows);

    for (size_t p = 0; p < _outputs.size(); p++) {
        const uint32_t win = block.window_out(p);
        const size_t items = windows * win;
        if (items == 0) continue;
        // Space was reserved above; a concurrent consumer only frees more.
        _outputs[p]->push(_win_out[p].data(), items);
    }

    // Cross the burst boundary if this batch consumed exactly up to it.
    if (!_inputs.empty()) {
        StreamBuffer* in0 = _inputs[0].get();
        auto tag = in0->peek_tag();
        if (tag && tag->end_index == in0->read_index()) {
            boundary_meta = tag->meta;
            boundary_reached = true;
            for (auto& in : _inputs) {
                auto t = in->peek_tag();
                if (t && t->end_index == in->read_index()) in->pop_tag();
            }
            block.on_burst_end();
        }
    }
    if (boundary_reached) {
        for (auto& out : _outputs)
            if (out) out->mark_burst_end(boundary_meta);
    }

    report.progressed = true;
    {
        std::lock_guard lock(_stats_mutex);
        _stats.steps += windows;
        if (boundary_reached) _stats.bursts++;
        for (size_t p = 0; p < _inputs.size(); p++)
            _stats.items_in += windows * block.window_in(p);
        for (size_t p = 0; p < _outputs.size(); p++)
            _stats.items_out += windows * block.window_out(p);
    }
    return report;
}

StepReport DeployedUnit::step_framed() {
    StepReport report;
    Block& block = _unit->block();
    StreamBuffer* in = _inputs.empty() ? nullptr : _inputs[0].get();
    if (!in) raise(errc::invalid_descriptor, "framed block without input");

    const size_t item_bytes = in->item_bytes();
    auto tag = in->peek_tag();
    const size_t avail = in->size();

    size_t take = avail;
    bool complete = false;
    BurstMeta meta;
    if (tag) {
        const uint64_t dist = tag->end_index - in->read_index();
        if (dist <= avail) {
            take = size_t(dist);
            complete = true;
            meta = tag->meta;
        }
    }

    if (take > 0) {
        _frame_in.resize((_frame_items + take) * item_bytes);
        const size_t got = in->try_pop(_frame_in.data() + _frame_items * item_bytes, take);
        _frame_items += got;
        report.progressed = got > 0;
    }

    if (!complete) {
        if (in->exhausted()) {
            if (_frame_items == 0) {
                report.finished = true;
                return report;
            }
            complete = true; // closed stream flushes the final burst
        } else if (!report.progressed) {
            report.blocked_on_input = true;
            return report;
        } else {
            return report; // consumed a partial burst; wait for the boundary
        }
    } else {
        in->pop_tag();
    }

    FrameIo io(&_frame_in, _frame_items, meta, _outputs.size(), &_unit->descriptor());
    block.process_burst(io);

    {
        std::lock_guard lock(_stats_mutex);
        _stats.items_in += _frame_items;
        _stats.steps++;
        _stats.bursts++;
    }
    _frame_in.clear();
    _frame_items = 0;

    for (size_t p = 0; p < _outputs.size(); p++) {
        if (!io.wrote(p)) continue;
        const Bytes& out = io._out[p];
        const size_t items = out.size() / _outputs[p]->item_bytes();
        _outputs[p]->push(out.data(), items);
        _outputs[p]->mark_burst_end(io._out_meta[p]);
        std::lock_guard lock(_stats_mutex);
        _stats.items_out += items;
    }

    report.progressed = true;
    return report;
}

StepReport DeployedUnit::step_source() {
    StepReport report;
    if (_source_done.load()) {
        report.finished = true;
        return report;
    }
    Block& block = _unit->block();
    FrameIo io(nullptr, 0, {}, _outputs.size(), &_unit->descriptor());
    if (!block.poll(io)) {
        if (block.source_done())
            report.finished = true;
        else
            report.blocked_on_input = true;
        return report;
    }
    for (size_t p = 0; p < _outputs.size(); p++) {
        if (!io.wrote(p)) continue;
        const Bytes& out = io._out[p];
        const size_t items = out.size() / _outputs[p]->item_bytes();
        _outputs[p]->push(out.data(), items);
        _outputs[p]->mark_burst_end(io._out_meta[p]);
        std::lock_guard lock(_stats_mutex);
        _stats.items_out += items;
    }
    {
        std::lock_guard lock(_stats_mutex);
        _stats.steps++;
        _stats.bursts++;
    }
    report.progressed = true;
    return report;
}

void DeployedUnit::close_outputs() {
    for (auto& out : _outputs)
        if (out) out->close();
}

bool DeployedUnit::park_point(bool at_burst_boundary) {
    if (!_park_requested.load()) return false;
    if (!at_burst_boundary && !_force_park.load()) return false;
    _parked.store(true);
    std::unique_lock lock(_wake_mutex);
    _wake_cv.wait(lock, [this] { return !_park_requested.load() || _stop.load(); });
    _parked.store(false);
    return true;
}

void DeployedUnit::run() {
    // A unit parks only between bursts (framed) or when idle; that is the
    // quiescence point partial reconfiguration relies on.
    while (!_stop.load()) {
        if (_park_requested.load()) {
            const bool between_bursts = _frame_items == 0;
            if (park_point(between_bursts)) continue;
        }
        StepReport report = step(_batch_items);
        if (report.progressed) continue;
        if (report.finished) {
            close_outputs();
            break;
        }
        std::unique_lock lock(_wake_mutex);
        if (_stop.load()) break;
        _wake_cv.wait_for(lock, 200us, [this] { return _wake_pending || _stop.load(); });
        _wake_pending = false;
    }
    _done.store(true);
}

void DeployedUnit::start() {
    if (_thread.joinable()) return;
    if (!fully_bound())
        raise(errc::invalid_argument, _unit->name() + ": cannot start with unbound ports");
    _thread = std::thread([this] { run(); });
}

void DeployedUnit::request_stop() {
    _stop.store(true);
    wake();
}

void DeployedUnit::finish_source() {
    _source_done.store(true);
    wake();
}

void DeployedUnit::join() {
    if (_thread.joinable()) _thread.join();
}

void DeployedUnit::request_park() {
    _park_requested.store(true);
    wake();
}

void DeployedUnit::force_park() {
    _force_park.store(true);
    _park_requested.store(true);
    wake();
}

void DeployedUnit::unpark() {
    _park_requested.store(false);
    _force_park.store(false);
    wake();
}

void DeployedUnit::wake() {
    {
        std::lock_guard lock(_wake_mutex);
        _wake_pending = true;
    }
    _wake_cv.notify_all();
}

UnitStats DeployedUnit::stats() const {
    std::lock_guard lock(_stats_mutex);
    return _stats;
}

std::vector<std::pair<std::string, uint64_t>> DeployedUnit::block_stats() const {
    return _unit->block().stats();
}

} // namespace sdrp
