// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sdrp/errors.hpp"

namespace sdrp {

class Node;

// The radio control interface: newline-delimited JSON messages over a
// reliable stream (or in-process). One request, one response:
//
//   {"id": 7, "verb": "deploy", "args": {"spec": "..."}}
//   {"id": 7, "status": "ok", "payload": {...}}
//   {"id": 7, "status": "error", "error": {"code": "...", "message": "..."}}
//
// After a successful subscribe, event records are interleaved on the same
// connection as {"event": {...}} lines.
extern const std::vector<std::string> control_verbs;

class ControlService;

// One client conversation. Responses (and, after subscribe, events) are
// written through `out`, one JSON document per call.
class ControlSession {
public:
    ControlSession(ControlService& service, std::function<void(const std::string&)> out);
    ~ControlSession();

    ControlSession(const ControlSession&) = delete;
    ControlSession& operator=(const ControlSession&) = delete;

    // Never throws: malformed input yields an error response.
    void handle_line(const std::string& line);

private:
    friend class ControlService;
    ControlService& _service;
    std::function<void(const std::string&)> _out;
    uint64_t _subscription = 0;
};

class ControlService {
public:
    explicit ControlService(Node& node);
    ~ControlService();

    Node& node() { return _node; }

    // Convenience for tests and the in-process CLI: one request line in, one
    // response line out (subscribe events are not deliverable this way).
    std::string handle_line(const std::string& line);

    // TCP server. Throws errc::endpoint_busy.
    void start(const std::string& address);
    uint16_t port() const;
    void stop();

private:
    friend class ControlSession;
    std::string dispatch(const std::string& line, ControlSession* session,
                         uint64_t* subscription);

    Node& _node;
    struct Server;
    std::unique_ptr<Server> _server;
};

// Client side of the protocol, used by the CLI and by nodes performing
// distributed admission against a peer.
struct ControlReply {
    bool ok = false;
    std::string payload_json; // JSON object text on ok
    std::string error_code;
    std::string error_message;
    std::string error_detail_json; // extra error payload (admission reports)
};

class ControlClient {
public:
    // Throws errc::connection_refused.
    explicit ControlClient(const std::string& address);
    ~ControlClient();

    ControlReply call(const std::string& verb, const std::string& args_json = "{}");

    // Raises the reply's error as an sdrp::Error; returns payload JSON text.
    std::string call_ok(const std::string& verb, const std::string& args_json = "{}");

    // Streams events after a subscribe until the connection drops or stop();
    // call() must not be used concurrently.
    void subscribe(std::function<void(const std::string&)> on_event);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> _impl;
};

} // namespace sdrp
