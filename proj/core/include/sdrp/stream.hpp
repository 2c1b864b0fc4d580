// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <vector>

#include "sdrp/errors.hpp"

namespace sdrp {

// Streams are typed by item kind. Bits travel one-per-byte (values 0/1) so
// coding blocks can run ahead of byte packing.
enum class ItemKind : uint8_t {
    sample, // sdrp::Sample, 16 bytes
    byte,   // octet
    bit,    // one bit stored per byte
};

size_t item_size(ItemKind kind);
const char* to_string(ItemKind kind);
ItemKind item_kind_from_string(const std::string& name);

// Metadata attached to a burst boundary. Padding inserted for transform or
// symbol alignment is recorded here so the inverse block downstream can strip
// it; blocks that do not pad forward the fields unchanged.
struct BurstMeta {
    uint32_t pad_samples = 0; // trailing zero samples appended for transform alignment
    uint32_t pad_bits = 0;    // trailing zero bits appended for symbol-group alignment

    bool operator==(const BurstMeta&) const = default;
};

struct BurstTag {
    uint64_t end_index = 0; // absolute item index one past the burst's last item
    BurstMeta meta;
};

// Bounded FIFO between one producer and one consumer. This is the software
// realization of the T_READY/T_VALID handshake: a full buffer stalls the
// producer (valid without ready), an empty buffer stalls the consumer.
//
// Bulk operations move runs of items under one lock so a chain can sustain
// full rate without per-item synchronization. Burst boundaries ride along as
// tags on absolute item indices.
class StreamBuffer {
public:
    StreamBuffer(size_t capacity_items, ItemKind kind);

    ItemKind kind() const { return _kind; }
    size_t capacity() const { return _capacity; }
    size_t item_bytes() const { return _item_bytes; }

    size_t size() const;  // items readable
    size_t space() const; // items writable

    // Nonblocking bulk transfer; returns the number of items moved.
    size_t try_push(const void* items, size_t count);
    size_t try_pop(void* out, size_t count);

    // Blocking bulk transfer; waits for space/data. Returns the number of
    // items moved, which is less than `count` only when the buffer is closed
    // (push) or closed and drained (pop).
    size_t push(const void* items, size_t count);
    size_t pop(void* out, size_t count);

    // Marks the current write position as the end of a burst.
    void mark_burst_end(BurstMeta meta = {});

    uint64_t read_index() const;
    uint64_t write_index() const;

    // The first burst boundary at or after the read index, if one is queued.
    std::optional<BurstTag> peek_tag() const;
    // Drops the first tag once the consumer has read past it.
    void pop_tag();

    // After close, pushes stop accepting items and pops drain what remains.
    void close();
    bool closed() const;

    // True when the buffer is closed and fully drained.
    bool exhausted() const;

    // Wakers fire (outside the lock) whenever items or space become available
    // or the buffer is closed; the executor hangs unit wakeups off these.
    void set_producer_waker(std::function<void()> waker);
    void set_consumer_waker(std::function<void()> waker);

private:
    size_t unlocked_size() const { return size_t(_write_pos - _read_pos); }

    const size_t _capacity;
    const ItemKind _kind;
    const size_t _item_bytes;

    mutable std::mutex _mutex;
    std::condition_variable _not_full;
    std::condition_variable _not_empty;

    std::vector<uint8_t> _storage;
    uint64_t _read_pos = 0;  // absolute item indices
    uint64_t _write_pos = 0;
    std::deque<BurstTag> _tags;
    bool _closed = false;

    std::function<void()> _producer_waker;
    std::function<void()> _consumer_waker;
};

// Graph-level description of a connection between two unit ports.
enum class LinkVia : uint8_t { direct, crossbar };

const char* to_string(LinkVia via);

constexpr size_t default_link_capacity = 1024;

} // namespace sdrp
