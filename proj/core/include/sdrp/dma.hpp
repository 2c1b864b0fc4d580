// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <thread>

#include "sdrp/bytes.hpp"

namespace sdrp {

// The medium access plane boundary: two software ring buffers carry packets
// between packet-level code (the PS side) and sample-level chains (the PL
// side). The operation names follow the DMA call convention: send_packet /
// receive_packet with sent_IRQ / received_IRQ completions.

using Ticket = uint64_t;

struct SentCompletion {
    Ticket ticket;
};

struct RecvCompletion {
    Ticket ticket;
    size_t length; // actual packet length written
    bool truncated = false;
};

struct HpCheck {
    bool ok;
    std::array<double, 4> demand_Bps;
    std::array<double, 4> budget_Bps;
};

struct MacStats {
    uint64_t tx_enqueued = 0;
    uint64_t tx_completed = 0;
    uint64_t rx_arrivals = 0;
    uint64_t rx_delivered = 0; // into posted buffers
    uint64_t rx_ring_held = 0; // currently waiting in the rx ring
    uint64_t rx_dropped = 0;   // ring overflow, oldest first
};

struct MacDmaConfig {
    size_t tx_capacity = 64;
    size_t rx_capacity = 64;
    size_t slot_bytes = 4096;
    double hp_total_Bps = 9.6e9;
};

class MacDma {
public:
    using Config = MacDmaConfig;

    explicit MacDma(Config config = {});
    ~MacDma();

    const Config& config() const { return _config; }

    // ---- PS side ----

    // Queues one packet toward the transmit chain. Throws errc::ring_full,
    // errc::oversize_packet. The sent_IRQ fires exactly once per accepted
    // packet, when the chain has consumed it.
    Ticket send_packet(ByteSpan packet);

    // Posts a writable buffer for the next received packet. When the receive
    // chain delivers, the payload lands in the posted buffer (post order) and
    // received_IRQ fires with the actual length. Arrivals with no posted
    // buffer wait in the rx ring; on overflow the oldest is dropped and
    // counted.
    Ticket receive_packet(std::span<uint8_t> buffer);

    // Completion delivery: registered callbacks run on a dedicated completion
    // context (never on the data path); pollable queues are also offered.
    void on_sent_irq(std::function<void(SentCompletion)> fn);
    void on_received_irq(std::function<void(RecvCompletion)> fn);
    std::optional<SentCompletion> poll_sent_irq();
    std::optional<RecvCompletion> poll_received_irq();

    // ---- chain side ----

    // Pops the next packet queued for transmission (FIFO).
    std::optional<std::pair<Ticket, Bytes>> tx_pop();
    // Marks a popped packet consumed; fires its sent_IRQ.
    void tx_mark_sent(Ticket ticket);
    // Receive chain delivers one packet toward the PS side.
    void deliver(Bytes packet);

    // ---- HP interface budget ----

    // Accepted iff the four ports sum to at most hp_total. Throws
    // errc::budget_exceeded.
    void set_hp_budget(const std::array<double, 4>& per_port_Bps);
    std::array<double, 4> hp_budget() const;
    HpCheck check_hp(const std::array<double, 4>& demand_Bps) const;

    MacStats stats() const;

    // Cancels outstanding work; no ticket completes afterwards.
    void reset();

private:
    void completion_loop();
    void enqueue_completion(std::optional<SentCompletion> s, std::optional<RecvCompletion> r);
    void match_arrivals_locked(std::unique_lock<std::mutex>& lock);

    Config _config;

    mutable std::mutex _mutex;
    uint64_t _next_ticket = 1;

    struct TxEntry {
        Ticket ticket;
        Bytes data;
    };
    std::deque<TxEntry> _tx_ring;

    struct RxPost {
        Ticket ticket;
        std::span<uint8_t> buffer;
    };
    std::deque<RxPost> _rx_posted;
    std::deque<Bytes> _rx_ring; // arrivals waiting for a posted buffer

    std::array<double, 4> _hp_budget{2.4e9, 2.4e9, 2.4e9, 2.4e9};

    MacStats _stats;

    // completion context
    std::thread _completion_thread;
    std::mutex _completion_mutex;
    std::condition_variable _completion_cv;
    std::deque<SentCompletion> _sent_queue;    // callback path
    std::deque<RecvCompletion> _recv_queue;    // callback path
    std::deque<SentCompletion> _sent_pollable; // poll path
    std::deque<RecvCompletion> _recv_pollable;
    std::function<void(SentCompletion)> _sent_cb;
    std::function<void(RecvCompletion)> _recv_cb;
    bool _shutdown = false;
    uint64_t _epoch = 0; // bumped by reset(); stale completions are discarded
};

// 16-bit I + 16-bit Q per sample on the modeled HP path; used only for
// budget arithmetic.
constexpr double hp_bytes_per_sample = 4.0;

inline double hp_demand_Bps(double sample_rate_sps) {
    return sample_rate_sps * hp_bytes_per_sample;
}

} // namespace sdrp
