/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <atomic>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fdb {

using Bytes = std::vector<std::uint8_t>;

/// 128-bit object identifier. The top 32 bits of hi are reserved and zero
/// in this engine; (0,0) is the per-container entry-point object and is
/// never handed out by the allocator.
struct Oid {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    bool operator==(const Oid&) const = default;
    bool isEntryPoint() const { return hi == 0 && lo == 0; }

    std::string toString() const;
    static Oid fromString(std::string_view s);
};

struct OidHash {
    std::size_t operator()(const Oid& o) const {
        return std::hash<std::uint64_t>()(o.hi * 0x9e3779b97f4a7c15ULL ^ o.lo);
    }
};

struct PoolHandle {
    std::uint64_t id = 0;
};

struct ContainerHandle {
    std::uint64_t id = 0;
};

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PoolNotFound : public EngineError {
public:
    using EngineError::EngineError;
};

class ContainerNotFound : public EngineError {
public:
    using EngineError::EngineError;
};

/// Wall-time and op-count accounting, bucketed the way the benchmark
/// reports profiles. An instance may be attached to an engine; all
/// categories are cumulative.
enum class ProfCategory : int {
    ArrayWrite = 0,
    ArrayRead,
    KvPut,
    KvGet,
    Connect,
    OidAlloc,
    Other,
};

constexpr int kProfCategories = 7;

const char* profCategoryName(ProfCategory cat);

struct Profiler {
    struct Counter {
        std::atomic<std::uint64_t> nanos{0};
        std::atomic<std::uint64_t> ops{0};
    };
    std::array<Counter, kProfCategories> counters;

    void add(ProfCategory cat, std::uint64_t nanos) {
        auto& c = counters[static_cast<int>(cat)];
        c.nanos.fetch_add(nanos, std::memory_order_relaxed);
        c.ops.fetch_add(1, std::memory_order_relaxed);
    }
    std::uint64_t nanos(ProfCategory cat) const {
        return counters[static_cast<int>(cat)].nanos.load(std::memory_order_relaxed);
    }
    std::uint64_t ops(ProfCategory cat) const {
        return counters[static_cast<int>(cat)].ops.load(std::memory_order_relaxed);
    }
};

/// The object-store engine contract: pools of containers, each container
/// holding transactional Key-Value and Array objects plus a batched OID
/// allocator. Implemented embedded (EmbeddedEngine) and over a socket
/// (RemoteEngine); both satisfy the same visibility rules:
///
///  - once kv_put/array_write returns, the write is durable and visible to
///    every subsequently started read from any client;
///  - readers never observe a torn mixture of two committed versions;
///  - committed data is immutable.
class Engine {
public:
    virtual ~Engine() = default;

    virtual PoolHandle poolConnect(const std::string& name, bool create = false) = 0;
    virtual void poolDisconnect(PoolHandle pool) = 0;

    virtual ContainerHandle contOpen(PoolHandle pool, const std::string& label, bool createIfAbsent) = 0;
    virtual void contClose(ContainerHandle cont) = 0;

    /// Reserves a contiguous range of `count` OIDs, unique for the
    /// container's lifetime, never containing (0,0).
    virtual Oid allocOids(ContainerHandle cont, std::uint64_t count) = 0;

    /// Returns the commit sequence number under which the value became
    /// visible. Keys are limited to kMaxKeyLength bytes.
    virtual std::uint64_t kvPut(ContainerHandle cont, Oid oid, std::string_view key,
                                std::span<const std::uint8_t> value) = 0;

    virtual std::optional<Bytes> kvGet(ContainerHandle cont, Oid oid, std::string_view key) = 0;

    /// Snapshot of the keys committed before the call; no duplicates.
    virtual std::vector<std::string> kvList(ContainerHandle cont, Oid oid) = 0;

    virtual std::uint64_t arrayWrite(ContainerHandle cont, Oid oid, std::uint64_t offset,
                                     std::span<const std::uint8_t> data) = 0;

    /// Reads beyond the committed size are short; holes read as zeros.
    virtual Bytes arrayRead(ContainerHandle cont, Oid oid, std::uint64_t offset, std::uint64_t length) = 0;

    virtual std::uint64_t arrayGetSize(ContainerHandle cont, Oid oid) = 0;

    /// Attaches (or detaches, with nullptr) per-category op accounting.
    void attachProfiler(Profiler* profiler) { profiler_ = profiler; }
    Profiler* profiler() const { return profiler_; }

    static constexpr std::size_t kMaxKeyLength = 512;

protected:
    Profiler* profiler_ = nullptr;
};

}  // namespace fdb
