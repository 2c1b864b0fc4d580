// Copyright (c) 2026 The sdrp developers
// SPDX-License-Identifier: Apache-2.0
//
// sdrp: command-line front door to the radio control interface. Speaks the
// newline-delimited JSON control protocol to a running sdrp-node, or hosts an
// in-process data plane with --local.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdrp/control.hpp"
#include "sdrp/node.hpp"

using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_connect = 2;
constexpr int exit_rejected = 3;

struct Caller {
    std::function<sdrp::ControlReply(const std::string&, const std::string&)> call;
    std::function<void(std::function<void(const std::string&)>)> subscribe;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("cannot read file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

sdrp::ControlReply reply_from_response(const std::string& response_line) {
    sdrp::ControlReply reply;
    const json response = json::parse(response_line);
    reply.ok = response.value("status", "") == "ok";
    if (reply.ok) {
        reply.payload_json = response.value("payload", json::object()).dump();
    } else {
        const json error = response.value("error", json::object());
        reply.error_code = error.value("code", "Internal");
        reply.error_message = error.value("message", "");
        if (error.contains("report")) reply.error_detail_json = error["report"].dump();
    }
    return reply;
}

void render_catalog(const json& payload) {
    for (const auto& kind : payload.at("kinds")) {
        std::cout << kind.at("kind").get<std::string>() << ": " << kind.at("n_inputs") << " in / "
                  << kind.at("n_outputs") << " out, window "
                  << kind.at("samples_in_per_step") << "->" << kind.at("samples_out_per_step")
                  << ", throughput " << kind.at("throughput_sps").get<double>() / 1e6
                  << " Msps, latency " << kind.at("latency_cycles") << " cycles, cost "
                  << kind.at("cost_logic_cells") << " cells / " << kind.at("cost_dsp_slices")
                  << " dsp\n";
        for (const auto& reg : kind.at("registers"))
            std::cout << "    reg 0x" << std::hex << reg.at("offset").get<uint32_t>() << std::dec
                      << " " << reg.at("name").get<std::string>() << " [" << reg.at("min") << ", "
                      << reg.at("max") << "] default " << reg.at("default") << "\n";
    }
}

int run_verb(Caller& caller, const std::string& verb, const json& args) {
    sdrp::ControlReply reply;
    try {
        reply = caller.call(verb, args.dump());
    } catch (const sdrp::Error& e) {
        std::cerr << "connection failed: " << e.what() << "\n";
        return exit_connect;
    }
    if (!reply.ok) {
        std::cerr << "error: " << reply.error_code << ": " << reply.error_message << "\n";
        if (!reply.error_detail_json.empty()) {
            const json detail = json::parse(reply.error_detail_json);
            if (detail.contains("text")) std::cerr << detail["text"].get<std::string>();
        }
        return exit_rejected;
    }

    const json payload = json::parse(reply.payload_json);
    if (verb == "catalog") {
        render_catalog(payload);
    } else if (verb == "deploy") {
        std::cout << "chain " << payload.at("chain_id") << " deployed\n";
        std::cout << payload.at("report").at("text").get<std::string>();
    } else if (verb == "list") {
        for (const auto& chain : payload.at("chains"))
            std::cout << chain.at("id") << "  " << chain.at("name").get<std::string>() << "  "
                      << chain.at("state").get<std::string>() << "  " << chain.at("units")
                      << " units  " << chain.at("cells") << " cells / " << chain.at("dsp")
                      << " dsp\n";
    } else if (verb == "get-param" || verb == "rf-get") {
        std::cout << payload.at("value") << "\n";
    } else if (verb == "rf-set") {
        std::cout << payload.at("value").get<double>();
        if (payload.value("snapped", false)) std::cout << " (snapped to grid)";
        std::cout << "\n";
    } else if (verb == "fronthaul-rate") {
        const double rate = payload.at("rate_bps").get<double>();
        std::cout << rate / 1e9 << "e9 b/s (" << rate / 1e9 << " Gbps)\n";
    } else if (verb == "reconfig-full") {
        std::cout << "downtime " << payload.at("downtime_s").get<double>() << " s, chains ";
        for (const auto& id : payload.at("chain_ids")) std::cout << id << " ";
        std::cout << "\n";
    } else if (verb == "reconfig-prr") {
        std::cout << "PRR " << payload.at("prr").get<std::string>() << " swapped in "
                  << payload.at("swap_time_s").get<double>() << " s\n";
    } else {
        std::cout << payload.dump(2) << "\n";
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdrp radio data plane control"};
    app.require_subcommand(0, 1);

    std::string control_address = "127.0.0.1:7700";
    bool local = false;
    bool list_verbs = false;
    app.add_option("--control", control_address, "control endpoint host:port");
    app.add_flag("--local", local, "run an in-process data plane instead of connecting");
    app.add_flag("--list-verbs", list_verbs, "print the protocol verbs and exit");

    std::string verb;
    json args = json::object();

    auto* catalog = app.add_subcommand("catalog", "list the processing-unit catalog");
    catalog->callback([&] { verb = "catalog"; });

    std::string deploy_file;
    auto* deploy = app.add_subcommand("deploy", "deploy a chain from a spec file");
    deploy->add_option("file", deploy_file, "chain spec file")->required();
    deploy->callback([&] {
        verb = "deploy";
        args["spec"] = read_file(deploy_file);
    });

    uint64_t teardown_id = 0;
    std::string teardown_arg;
    auto* teardown = app.add_subcommand("teardown", "tear down a deployed chain");
    teardown->add_option("chain", teardown_arg, "chain id")->required();
    teardown->callback([&] {
        verb = "teardown";
        try {
            teardown_id = std::stoull(teardown_arg);
        } catch (...) {
            teardown_id = 0; // let the service reject it as unknown
        }
        args["chain"] = teardown_id;
    });

    auto* list = app.add_subcommand("list", "list deployed chains");
    list->callback([&] { verb = "list"; });

    uint64_t sp_chain = 0;
    std::string sp_unit, sp_reg;
    uint32_t sp_value = 0;
    auto* set_param = app.add_subcommand("set-param", "write a unit register on a live chain");
    set_param->add_option("chain", sp_chain)->required();
    set_param->add_option("unit", sp_unit)->required();
    set_param->add_option("register", sp_reg)->required();
    set_param->add_option("value", sp_value)->required();
    set_param->callback([&] {
        verb = "set-param";
        args = {{"chain", sp_chain}, {"unit", sp_unit}, {"register", sp_reg}, {"value", sp_value}};
    });

    uint64_t gp_chain = 0;
    std::string gp_unit, gp_reg;
    auto* get_param = app.add_subcommand("get-param", "read a unit register");
    get_param->add_option("chain", gp_chain)->required();
    get_param->add_option("unit", gp_unit)->required();
    get_param->add_option("register", gp_reg)->required();
    get_param->callback([&] {
        verb = "get-param";
        args = {{"chain", gp_chain}, {"unit", gp_unit}, {"register", gp_reg}};
    });

    std::string rf_name;
    double rf_value = 0;
    auto* rf_set = app.add_subcommand("rf-set", "set an RF plane parameter");
    rf_set->add_option("name", rf_name)->required();
    rf_set->add_option("value", rf_value)->required();
    rf_set->callback([&] {
        verb = "rf-set";
        args = {{"name", rf_name}, {"value", rf_value}};
    });

    std::string rf_get_name;
    auto* rf_get = app.add_subcommand("rf-get", "read an RF plane parameter");
    rf_get->add_option("name", rf_get_name)->required();
    rf_get->callback([&] {
        verb = "rf-get";
        args = {{"name", rf_get_name}};
    });

    auto* stats = app.add_subcommand("stats", "crossbar, ring and chain counters");
    stats->callback([&] { verb = "stats"; });

    std::vector<std::string> rf_files;
    uint64_t rf_bytes = 0;
    auto* reconfig_full =
        app.add_subcommand("reconfig-full", "replace every chain (whole-PL reprogram)");
    reconfig_full->add_option("files", rf_files, "chain spec files")->required();
    reconfig_full->add_option("--bitstream-bytes", rf_bytes, "total bitstream size")->required();
    reconfig_full->callback([&] {
        verb = "reconfig-full";
        json specs = json::array();
        for (const auto& file : rf_files) specs.push_back(read_file(file));
        args = {{"specs", specs}, {"bitstream_bytes", rf_bytes}};
    });

    std::string prr_id, prr_file;
    uint64_t prr_bytes = 0;
    auto* reconfig_prr = app.add_subcommand("reconfig-prr", "swap one PRR occupant");
    reconfig_prr->add_option("prr", prr_id)->required();
    reconfig_prr->add_option("file", prr_file, "occupant spec file")->required();
    reconfig_prr->add_option("--bitstream-bytes", prr_bytes, "partial bitstream size")->required();
    reconfig_prr->callback([&] {
        verb = "reconfig-prr";
        args = {{"prr", prr_id}, {"occupant", read_file(prr_file)}, {"bitstream_bytes", prr_bytes}};
    });

    uint64_t antennas = 0, bits = 0;
    double rate = 0;
    auto* fronthaul = app.add_subcommand("fronthaul-rate", "CPRI-style fronthaul rate calculator");
    fronthaul->add_option("--antennas", antennas)->required();
    fronthaul->add_option("--rate", rate, "sample rate per antenna, sps")->required();
    fronthaul->add_option("--bits", bits, "bits per I/Q component")->required();
    fronthaul->callback([&] {
        verb = "fronthaul-rate";
        args = {{"antennas", antennas}, {"sample_rate_sps", rate}, {"bits_per_component", bits}};
    });

    auto* subscribe = app.add_subcommand("subscribe", "stream data plane events");
    subscribe->callback([&] { verb = "subscribe"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    if (list_verbs) {
        for (const auto& v : sdrp::control_verbs) std::cout << v << "\n";
        return exit_ok;
    }
    if (verb.empty()) {
        std::cerr << app.help();
        return exit_usage;
    }

    // Wire a caller: in-process node or remote control endpoint.
    std::unique_ptr<sdrp::Node> local_node;
    std::unique_ptr<sdrp::ControlService> local_service;
    std::unique_ptr<sdrp::ControlClient> client;
    Caller caller;

    if (local) {
        local_node = std::make_unique<sdrp::Node>();
        local_service = std::make_unique<sdrp::ControlService>(*local_node);
        caller.call = [&](const std::string& v, const std::string& a) {
            json request = {{"id", 1}, {"verb", v}, {"args", json::parse(a)}};
            return reply_from_response(local_service->handle_line(request.dump()));
        };
        caller.subscribe = [&](std::function<void(const std::string&)> on_event) {
            local_node->events().subscribe([on_event](const sdrp::Event& event) {
                json j = {{"seq", event.seq}, {"type", event.type}, {"fields", event.fields}};
                on_event(j.dump());
            });
            for (;;) std::this_thread::sleep_for(std::chrono::seconds(1));
        };
    } else {
        try {
            client = std::make_unique<sdrp::ControlClient>(control_address);
        } catch (const sdrp::Error& e) {
            std::cerr << "cannot reach control endpoint " << control_address << ": " << e.what()
                      << "\n";
            return exit_connect;
        }
        caller.call = [&](const std::string& v, const std::string& a) {
            return client->call(v, a);
        };
        caller.subscribe = [&](std::function<void(const std::string&)> on_event) {
            client->subscribe(on_event);
        };
    }

    if (verb == "subscribe") {
        caller.subscribe([](const std::string& event) { std::cout << event << std::endl; });
        return exit_ok;
    }
    return run_verb(caller, verb, args);
}
