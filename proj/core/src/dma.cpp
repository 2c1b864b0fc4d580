// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/dma.hpp"

#include <cstring>

#include "sdrp/errors.hpp"

namespace sdrp {

MacDma::MacDma(Config config) : _config(config) {
    _completion_thread = std::thread([this] { completion_loop(); });
}

MacDma::~MacDma() {
    {
        std::lock_guard lock(_completion_mutex);
        _shutdown = true;
    }
    _completion_cv.notify_all();
    if (_completion_thread.joinable()) _completion_thread.join();
}

Ticket MacDma::send_packet(ByteSpan packet) {
    std::lock_guard lock(_mutex);
    if (packet.size() > _config.slot_bytes)
        raise(errc::oversize_packet, std::to_string(packet.size()) + " bytes exceeds slot size " +
                                         std::to_string(_config.slot_bytes));
    if (_tx_ring.size() >= _config.tx_capacity)
        raise(errc::ring_full, "tx ring at capacity " + std::to_string(_config.tx_capacity));
    const Ticket ticket = _next_ticket++;
    _tx_ring.push_back(TxEntry{ticket, Bytes(packet.begin(), packet.end())});
    _stats.tx_enqueued++;
    return ticket;
}

Ticket MacDma::receive_packet(std::span<uint8_t> buffer) {
    std::unique_lock lock(_mutex);
    const Ticket ticket = _next_ticket++;
    _rx_posted.push_back(RxPost{ticket, buffer});
    match_arrivals_locked(lock);
    return ticket;
}

std::optional<std::pair<Ticket, Bytes>> MacDma::tx_pop() {
    std::lock_guard lock(_mutex);
    if (_tx_ring.empty()) return std::nullopt;
    TxEntry entry = std::move(_tx_ring.front());
    _tx_ring.pop_front();
    return std::make_pair(entry.ticket, std::move(entry.data));
}

void MacDma::tx_mark_sent(Ticket ticket) {
    {
        std::lock_guard lock(_mutex);
        _stats.tx_completed++;
    }
    enqueue_completion(SentCompletion{ticket}, std::nullopt);
}

void MacDma::deliver(Bytes packet) {
    std::unique_lock lock(_mutex);
    _stats.rx_arrivals++;
    _rx_ring.push_back(std::move(packet));
    if (_rx_ring.size() > _config.rx_capacity) {
        _rx_ring.pop_front(); // drop oldest
        _stats.rx_dropped++;
    }
    match_arrivals_locked(lock);
    _stats.rx_ring_held = _rx_ring.size();
}

void MacDma::match_arrivals_locked(std::unique_lock<std::mutex>&) {
    while (!_rx_ring.empty() && !_rx_posted.empty()) {
        Bytes packet = std::move(_rx_ring.front());
        _rx_ring.pop_front();
        RxPost post = _rx_posted.front();
        _rx_posted.pop_front();

        const size_t copy = std::min(packet.size(), post.buffer.size());
        if (copy > 0) std::memcpy(post.buffer.data(), packet.data(), copy);
        _stats.rx_delivered++;
        _stats.rx_ring_held = _rx_ring.size();
        enqueue_completion(std::nullopt,
                           RecvCompletion{post.ticket, packet.size(), copy < packet.size()});
    }
}

void MacDma::on_sent_irq(std::function<void(SentCompletion)> fn) {
    std::lock_guard lock(_completion_mutex);
    _sent_cb = std::move(fn);
}

void MacDma::on_received_irq(std::function<void(RecvCompletion)> fn) {
    std::lock_guard lock(_completion_mutex);
    _recv_cb = std::move(fn);
}

std::optional<SentCompletion> MacDma::poll_sent_irq() {
    std::lock_guard lock(_completion_mutex);
    if (_sent_pollable.empty()) return std::nullopt;
    SentCompletion c = _sent_pollable.front();
    _sent_pollable.pop_front();
    return c;
}

std::optional<RecvCompletion> MacDma::poll_received_irq() {
    std::lock_guard lock(_completion_mutex);
    if (_recv_pollable.empty()) return std::nullopt;
    RecvCompletion c = _recv_pollable.front();
    _recv_pollable.pop_front();
    return c;
}

void MacDma::enqueue_completion(std::optional<SentCompletion> s, std::optional<RecvCompletion> r) {
    {
        std::lock_guard lock(_completion_mutex);
        if (s) {
            _sent_queue.push_back(*s);
            _sent_pollable.push_back(*s);
        }
        if (r) {
            _recv_queue.push_back(*r);
            _recv_pollable.push_back(*r);
        }
    }
    _completion_cv.notify_all();
}

void MacDma::completion_loop() {
    std::unique_lock lock(_completion_mutex);
    while (true) {
        _completion_cv.wait(lock,
                            [this] { return _shutdown || !_sent_queue.empty() || !_recv_queue.empty(); });
        if (_shutdown) return;
        while (!_sent_queue.empty()) {
            SentCompletion c = _sent_queue.front();
            _sent_queue.pop_front();
            auto cb = _sent_cb;
            lock.unlock();
            if (cb) cb(c);
            lock.lock();
        }
        while (!_recv_queue.empty()) {
            RecvCompletion c = _recv_queue.front();
            _recv_queue.pop_front();
            auto cb = _recv_cb;
            lock.unlock();
            if (cb) cb(c);
            lock.lock();
        }
    }
}

void MacDma::set_hp_budget(const std::array<double, 4>& per_port_Bps) {
    double total = 0;
    for (double b : per_port_Bps) {
        if (b < 0) raise(errc::budget_exceeded, "negative port budget");
        total += b;
    }
    std::lock_guard lock(_mutex);
    if (total > _config.hp_total_Bps)
        raise(errc::budget_exceeded, "sum " + std::to_string(total) + " B/s exceeds " +
                                         std::to_string(_config.hp_total_Bps));
    _hp_budget = per_port_Bps;
}

std::array<double, 4> MacDma::hp_budget() const {
    std::lock_guard lock(_mutex);
    return _hp_budget;
}

HpCheck MacDma::check_hp(const std::array<double, 4>& demand_Bps) const {
    std::lock_guard lock(_mutex);
    HpCheck check{true, demand_Bps, _hp_budget};
    for (size_t p = 0; p < 4; p++)
        if (demand_Bps[p] > _hp_budget[p]) check.ok = false;
    return check;
}

MacStats MacDma::stats() const {
    std::lock_guard lock(_mutex);
    return _stats;
}

void MacDma::reset() {
    std::scoped_lock lock(_mutex, _completion_mutex);
    _tx_ring.clear();
    _rx_posted.clear();
    _rx_ring.clear();
    _sent_queue.clear();
    _recv_queue.clear();
    _sent_pollable.clear();
    _recv_pollable.clear();
    _epoch++;
}

} // namespace sdrp
