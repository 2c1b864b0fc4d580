// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#include "sdrp/stream.hpp"

#include <cstring>

#include "sdrp/sample.hpp"

namespace sdrp {

size_t item_size(ItemKind kind) {
    switch (kind) {
    case ItemKind::sample: return sizeof(Sample);
    case ItemKind::byte: return 1;
    case ItemKind::bit: return 1;
    }
    return 1;
}

const char* to_string(ItemKind kind) {
    switch (kind) {
    case ItemKind::sample: return "sample";
    case ItemKind::byte: return "byte";
    case ItemKind::bit: return "bit";
    }
    return "?";
}

ItemKind item_kind_from_string(const std::string& name) {
    if (name == "sample") return ItemKind::sample;
    if (name == "byte") return ItemKind::byte;
    if (name == "bit") return ItemKind::bit;
    raise(errc::invalid_argument, "unknown item kind '" + name + "'");
}

const char* to_string(LinkVia via) {
    return via == LinkVia::direct ? "direct" : "crossbar";
}

StreamBuffer::StreamBuffer(size_t capacity_items, ItemKind kind)
    : _capacity(capacity_items), _kind(kind), _item_bytes(item_size(kind)) {
    if (capacity_items == 0) raise(errc::invalid_argument, "link capacity must be >= 1");
    _storage.resize(_capacity * _item_bytes);
}

size_t StreamBuffer::size() const {
    std::lock_guard lock(_mutex);
    return unlocked_size();
}

size_t StreamBuffer::space() const {
    std::lock_guard lock(_mutex);
    return _capacity - unlocked_size();
}

size_t StreamBuffer::try_push(const void* items, size_t count) {
    std::function<void()> waker;
    size_t moved = 0;
    {
        std::lock_guard lock(_mutex);
        if (_closed) return 0;
        moved = std::min(count, _capacity - unlocked_size());
        const uint8_t* src = static_cast<const uint8_t*>(items);
        for (size_t done = 0; done < moved;) {
            const size_t at = size_t(_write_pos % _capacity);
            const size_t run = std::min(moved - done, _capacity - at);
            std::memcpy(_storage.data() + at * _item_bytes, src + done * _item_bytes,
                        run * _item_bytes);
            _write_pos += run;
            done += run;
        }
        if (moved) {
            _not_empty.notify_all();
            waker = _consumer_waker;
        }
    }
    if (waker) waker();
    return moved;
}

size_t StreamBuffer::try_pop(void* out, size_t count) {
    std::function<void()> waker;
    size_t moved = 0;
    {
        std::lock_guard lock(_mutex);
        moved = std::min(count, unlocked_size());
        uint8_t* dst = static_cast<uint8_t*>(out);
        for (size_t done = 0; done < moved;) {
            const size_t at = size_t(_read_pos % _capacity);
            const size_t run = std::min(moved - done, _capacity - at);
            std::memcpy(dst + done * _item_bytes, _storage.data() + at * _item_bytes,
                        run * _item_bytes);
            _read_pos += run;
            done += run;
        }
        if (moved) {
            _not_full.notify_all();
            waker = _producer_waker;
        }
    }
    if (waker) waker();
    return moved;
}

size_t StreamBuffer::push(const void* items, size_t count) {
    const uint8_t* src = static_cast<const uint8_t*>(items);
    size_t done = 0;
    while (done < count) {
        {
            std::unique_lock lock(_mutex);
            _not_full.wait(lock, [&] { return _closed || unlocked_size() < _capacity; });
            if (_closed) return done;
        }
        done += try_push(src + done * _item_bytes, count - done);
    }
    return done;
}

size_t StreamBuffer::pop(void* out, size_t count) {
    uint8_t* dst = static_cast<uint8_t*>(out);
    size_t done = 0;
    while (done < count) {
        {
            std::unique_lock lock(_mutex);
            _not_empty.wait(lock, [&] { return _closed || unlocked_size() > 0; });
            if (_closed && unlocked_size() == 0) return done;
        }
        done += try_pop(dst + done * _item_bytes, count - done);
    }
    return done;
}

void StreamBuffer::mark_burst_end(BurstMeta meta) {
    std::function<void()> waker;
    {
        std::lock_guard lock(_mutex);
        if (!_tags.empty() && _tags.back().end_index == _write_pos) {
            _tags.back().meta = meta; // collapse duplicate boundary
        } else {
            _tags.push_back(BurstTag{_write_pos, meta});
        }
        _not_empty.notify_all();
        waker = _consumer_waker;
    }
    if (waker) waker();
}

uint64_t StreamBuffer::read_index() const {
    std::lock_guard lock(_mutex);
    return _read_pos;
}

uint64_t StreamBuffer::write_index() const {
    std::lock_guard lock(_mutex);
    return _write_pos;
}

std::optional<BurstTag> StreamBuffer::peek_tag() const {
    std::lock_guard lock(_mutex);
    if (_tags.empty()) return std::nullopt;
    return _tags.front();
}

void StreamBuffer::pop_tag() {
    std::lock_guard lock(_mutex);
    if (!_tags.empty()) _tags.pop_front();
}

void StreamBuffer::close() {
    std::function<void()> pw, cw;
    {
        std::lock_guard lock(_mutex);
        _closed = true;
        _not_full.notify_all();
        _not_empty.notify_all();
        pw = _producer_waker;
        cw = _consumer_waker;
    }
    if (pw) pw();
    if (cw) cw();
}

bool StreamBuffer::closed() const {
    std::lock_guard lock(_mutex);
    return _closed;
}

bool StreamBuffer::exhausted() const {
    std::lock_guard lock(_mutex);
    return _closed && unlocked_size() == 0;
}

void StreamBuffer::set_producer_waker(std::function<void()> waker) {
    std::lock_guard lock(_mutex);
    _producer_waker = std::move(waker);
}

void StreamBuffer::set_consumer_waker(std::function<void()> waker) {
    std::lock_guard lock(_mutex);
    _consumer_waker = std::move(waker);
}

} // namespace sdrp
