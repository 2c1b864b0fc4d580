// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>

namespace sdrp {

// Lightweight event fan-out for drops, reconfiguration completions and the
// like; the control plane's subscribe verb streams these to clients.
struct Event {
    uint64_t seq = 0;
    std::string type;
    std::map<std::string, std::string> fields;
};

class EventBus {
public:
    using Handler = std::function<void(const Event&)>;

    uint64_t subscribe(Handler handler);
    void unsubscribe(uint64_t id);
    void emit(std::string type, std::map<std::string, std::string> fields = {});

private:
    std::mutex _mutex;
    uint64_t _next_id = 1;
    uint64_t _next_seq = 1;
    std::map<uint64_t, Handler> _handlers;
};

} // namespace sdrp
