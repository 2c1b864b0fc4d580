// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <thread>

#include "sdrp/unit.hpp"

namespace sdrp {

struct StepReport {
    bool progressed = false;
    bool blocked_on_input = false;
    bool blocked_on_output = false;
    bool finished = false; // upstream closed and fully drained

    bool blocked() const { return !progressed && !finished; }
};

struct UnitStats {
    uint64_t items_in = 0;
    uint64_t items_out = 0;
    uint64_t steps = 0;
    uint64_t bursts = 0;
    uint64_t misaligned_drops = 0; // burst tails short of a full window
};

// One deployed unit: a UnitInstance bound to its stream buffers, plus the
// thread that pumps it. step() is also callable directly for single-threaded
// harnesses; the thread uses the same path.
class DeployedUnit {
public:
    explicit DeployedUnit(std::shared_ptr<UnitInstance> unit, size_t batch_items = 4096);
    ~DeployedUnit();

    DeployedUnit(const DeployedUnit&) = delete;
    DeployedUnit& operator=(const DeployedUnit&) = delete;

    UnitInstance& unit() { return *_unit; }
    const UnitInstance& unit() const { return *_unit; }

    // Throws errc::no_such_port / errc::port_occupied.
    void bind_input(size_t port, std::shared_ptr<StreamBuffer> buffer);
    void bind_output(size_t port, std::shared_ptr<StreamBuffer> buffer);
    StreamBuffer* input(size_t port) const;
    StreamBuffer* output(size_t port) const;
    bool fully_bound() const;

    // Executes at most max_windows windows (or one burst for framed/source
    // blocks). Never leaves a partial window observable.
    StepReport step(size_t max_windows = 1);

    void start();
    void request_stop();
    // Source blocks: stop originating new bursts, let the chain drain.
    void finish_source();
    void join();
    bool running() const { return _thread.joinable(); }
    // True once the pump thread exited (drained or stopped).
    bool done() const { return _done.load(); }

    // Quiesce support: the unit parks at the next burst boundary (or when
    // idle); force_park() parks at the next window boundary regardless.
    void request_park();
    void force_park();
    bool parked() const { return _parked.load(); }
    void unpark();

    UnitStats stats() const;
    std::vector<std::pair<std::string, uint64_t>> block_stats() const;

    // Wakes the unit's thread; wired into buffer wakers and external feeds.
    void wake();

private:
    void run();
    StepReport step_windowed(size_t max_windows);
    StepReport step_framed();
    StepReport step_source();
    void commit_params();
    void close_outputs();
    bool park_point(bool at_burst_boundary);

    std::shared_ptr<UnitInstance> _unit;
    const size_t _batch_items;

    std::vector<std::shared_ptr<StreamBuffer>> _inputs;
    std::vector<std::shared_ptr<StreamBuffer>> _outputs;

    // scratch for windowed batches, one per port
    std::vector<Bytes> _win_in;
    std::vector<Bytes> _win_out;
    // scratch for framed accumulation
    Bytes _frame_in;
    size_t _frame_items = 0;

    std::thread _thread;
    std::mutex _wake_mutex;
    std::condition_variable _wake_cv;
    bool _wake_pending = false;

    std::atomic<bool> _stop{false};
    std::atomic<bool> _source_done{false};
    std::atomic<bool> _park_requested{false};
    std::atomic<bool> _force_park{false};
    std::atomic<bool> _parked{false};
    std::atomic<bool> _done{false};

    mutable std::mutex _stats_mutex;
    UnitStats _stats;
};

} // namespace sdrp
