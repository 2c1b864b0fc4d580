// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0
//
// sdrp-node: hosts one radio data plane and serves the control protocol.
// Cluster links to peer nodes carry CHDR-in-VRT frames; peer control
// endpoints serve distributed admission.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "sdrp/control.hpp"
#include "sdrp/node.hpp"

namespace {

volatile std::sig_atomic_t stop_requested = 0;

void on_signal(int) {
    stop_requested = 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdrp radio data plane node"};

    unsigned device = 0;
    std::string control_address = "127.0.0.1:7700";
    std::string listen_address;              // cluster
    std::vector<std::string> peer_addresses; // cluster
    std::vector<std::string> peer_controls;  // DEV=host:port
    std::vector<std::string> prr_specs;      // id:cells:dsp

    app.add_option("--device", device, "device id on the cluster (0..255)");
    app.add_option("--control", control_address, "control endpoint to serve");
    app.add_option("--listen", listen_address, "cluster endpoint to accept peers on");
    app.add_option("--peer", peer_addresses, "cluster endpoint of a peer node (repeatable)");
    app.add_option("--peer-control", peer_controls,
                   "peer control endpoint as DEV=host:port (repeatable)");
    app.add_option("--prr", prr_specs, "PRR partition as id:cells:dsp (repeatable)");

    CLI11_PARSE(app, argc, argv);

    sdrp::NodeConfig config;
    config.device = uint8_t(device);
    for (const auto& spec : prr_specs) {
        const auto c1 = spec.find(':');
        const auto c2 = spec.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            std::cerr << "bad --prr '" << spec << "', want id:cells:dsp\n";
            return 1;
        }
        sdrp::PrrConfig prr;
        prr.id = spec.substr(0, c1);
        prr.size_logic_cells = std::stoull(spec.substr(c1 + 1, c2 - c1 - 1));
        prr.size_dsp_slices = std::stoull(spec.substr(c2 + 1));
        config.prrs.push_back(std::move(prr));
    }

    try {
        sdrp::Node node(config);
        for (const auto& pc : peer_controls) {
            const auto eq = pc.find('=');
            if (eq == std::string::npos) {
                std::cerr << "bad --peer-control '" << pc << "', want DEV=host:port\n";
                return 1;
            }
            node.set_peer_control(uint8_t(std::stoul(pc.substr(0, eq))), pc.substr(eq + 1));
        }
        if (!listen_address.empty()) node.cluster_listen(listen_address);
        for (const auto& peer : peer_addresses) node.cluster_connect(peer);

        sdrp::ControlService service(node);
        service.start(control_address);
        std::cout << "sdrp-node device " << int(config.device) << " control " << control_address;
        if (!listen_address.empty()) std::cout << " cluster " << listen_address;
        std::cout << std::endl;

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        while (!stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        service.stop();
    } catch (const sdrp::Error& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
