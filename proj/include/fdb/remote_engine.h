/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <mutex>
#include <string>

#include "fdb/engine.h"

namespace fdb {

/// Engine client speaking the wire protocol over one TCP connection.
/// Contract-equivalent to EmbeddedEngine; operation timings recorded in the
/// attached profiler include network time.
class RemoteEngine : public Engine {
public:
    /// Address is "host:port"; a bare port means 127.0.0.1.
    explicit RemoteEngine(const std::string& address);
    ~RemoteEngine() override;

    RemoteEngine(const RemoteEngine&) = delete;
    RemoteEngine& operator=(const RemoteEngine&) = delete;

    PoolHandle poolConnect(const std::string& name, bool create = false) override;
    void poolDisconnect(PoolHandle pool) override;
    ContainerHandle contOpen(PoolHandle pool, const std::string& label, bool createIfAbsent) override;
    void contClose(ContainerHandle cont) override;
    Oid allocOids(ContainerHandle cont, std::uint64_t count) override;
    std::uint64_t kvPut(ContainerHandle cont, Oid oid, std::string_view key,
                        std::span<const std::uint8_t> value) override;
    std::optional<Bytes> kvGet(ContainerHandle cont, Oid oid, std::string_view key) override;
    std::vector<std::string> kvList(ContainerHandle cont, Oid oid) override;
    std::uint64_t arrayWrite(ContainerHandle cont, Oid oid, std::uint64_t offset,
                             std::span<const std::uint8_t> data) override;
    Bytes arrayRead(ContainerHandle cont, Oid oid, std::uint64_t offset, std::uint64_t length) override;
    std::uint64_t arrayGetSize(ContainerHandle cont, Oid oid) override;

    void ping();

    /// Asks the server to stop accepting and shut down.
    void shutdownServer();

private:
    Bytes call(std::uint8_t opcode, Bytes payload, bool notFoundIsError = true, bool* notFound = nullptr);

    std::mutex mutex_;
    int fd_ = -1;
    std::uint64_t nextRequestId_ = 1;
    Bytes recvBuffer_;
};

}  // namespace fdb
