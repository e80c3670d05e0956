/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fdb/embedded_engine.h"

namespace fdb::wire {

/// Serves an embedded engine over TCP so that independent client processes
/// contend against one shared engine. Each connection gets its own handle
/// namespace; frames on one connection are processed in submission order.
class Server {
public:
    struct Options {
        std::string bindAddress = "127.0.0.1";
        std::uint16_t port = 0;  // 0 picks a free port
        EmbeddedEngine::Options engine;

        Options() {}
    };

    Server(std::filesystem::path storageRoot, Options options = Options());
    ~Server();

    /// Binds and starts accepting; throws EngineError if the address is
    /// not bindable.
    void start();

    /// Blocks until a Shutdown frame arrives or stop() is called.
    void wait();

    void stop();

    /// Async-signal-safe request to shut down; wait() then returns.
    void requestStop();

    std::uint16_t port() const { return port_; }

private:
    void acceptLoop();
    void serveConnection(int fd);

    std::filesystem::path storageRoot_;
    Options options_;
    std::uint16_t port_ = 0;
    int listenFd_ = -1;

    std::atomic<bool> stopping_{false};
    std::once_flag stopOnce_;
    std::thread acceptThread_;
    std::mutex mutex_;
    std::vector<std::thread> connections_;
    std::vector<int> connectionFds_;
    std::mutex waitMutex_;
    std::condition_variable waitCv_;
};

}  // namespace fdb::wire
