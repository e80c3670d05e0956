/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "fdb/engine.h"

namespace fdb {

namespace detail {
struct ContainerState;
struct PoolState;
}  // namespace detail

/// Single-host engine persisting each container as two append-only files,
///
///     <root>/<pool>/<container-label>/values.log
///     <root>/<pool>/<container-label>/commits.log
///
/// Writes append the value bytes to values.log, then publish one CRC-framed
/// commit record to commits.log; the in-memory index is rebuilt from the
/// commit log on open, stopping at the first torn or dangling record.
/// Container state is shared process-wide, so any number of EmbeddedEngine
/// instances (and threads) in one process observe one coherent container.
/// Cross-process sharing goes through the wire server instead.
class EmbeddedEngine : public Engine {
public:
    struct Options {
        /// Flush value bytes and the commit record to stable storage before
        /// each write returns. Leave on unless the data is disposable.
        bool syncCommits = true;

        Options() {}
    };

    explicit EmbeddedEngine(std::filesystem::path storageRoot, Options options = {});
    ~EmbeddedEngine() override;

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

    const std::filesystem::path& root() const { return root_; }

    /// Committed byte count of a container's value log; test hook for the
    /// append-only watermark.
    std::uint64_t valueLogSize(ContainerHandle cont);

    /// Highest commit sequence published in a container.
    std::uint64_t lastCommitSeq(ContainerHandle cont);

private:
    std::shared_ptr<detail::ContainerState> state(ContainerHandle cont);
    std::shared_ptr<detail::PoolState> pool(PoolHandle pool);

    std::filesystem::path root_;
    Options options_;

    std::mutex mutex_;
    std::uint64_t nextHandle_ = 1;
    std::map<std::uint64_t, std::shared_ptr<detail::PoolState>> pools_;
    std::map<std::uint64_t, std::shared_ptr<detail::ContainerState>> containers_;
};

}  // namespace fdb
