/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "fdb/wire_server.h"

namespace {
fdb::wire::Server* g_server = nullptr;
void handleSignal(int) {
    if (g_server) g_server->requestStop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"object-store wire server"};

    std::string root = "fdb-store";
    std::string bind = "127.0.0.1";
    int port = 7654;
    bool noSync = false;
    app.add_option("--root", root, "storage root directory");
    app.add_option("--bind", bind, "bind address");
    app.add_option("--port", port, "TCP port (0 picks a free one)");
    app.add_flag("--no-sync", noSync, "skip fsync on commit (benchmarks only)");

    CLI11_PARSE(app, argc, argv);

    try {
        fdb::wire::Server::Options opts;
        opts.bindAddress = bind;
        opts.port = static_cast<std::uint16_t>(port);
        opts.engine.syncCommits = !noSync;
        fdb::wire::Server server(root, opts);
        server.start();
        g_server = &server;
        std::signal(SIGINT, handleSignal);
        std::signal(SIGTERM, handleSignal);
        std::cout << "listening on " << bind << ":" << server.port() << std::endl;
        server.wait();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
