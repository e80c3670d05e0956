/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <memory>

#include "fdb/backend.h"
#include "fdb/config.h"
#include "fdb/engine.h"
#include "fdb/schema.h"

namespace fdb {

/// The user-facing session over one (Store, Catalogue) pair.
///
///  - archive() blocks until the session has taken a copy of the data;
///    the field is not necessarily visible yet (though it may be).
///  - flush() blocks until everything archived from this session is
///    durable, indexed, and visible to any fresh reader session.
///  - Once visible, a field is immutable; re-archiving the same identifier
///    replaces it, the old payload staying visible until the new one is
///    fully persisted and indexed.
///  - retrieve()/list() never report a missing field as an error.
///
/// One session serves one thread; concurrent sessions over shared storage
/// are the supported concurrency unit.
class Fdb {
public:
    Fdb(Schema schema, std::unique_ptr<Store> store, std::unique_ptr<Catalogue> catalogue);

    /// Store first, then index: an index entry never points at data that
    /// was not stored.
    void archive(const Key& identifier, std::span<const std::uint8_t> data);

    /// Store flush first, then catalogue flush, so data is durable before
    /// the index makes it reachable.
    void flush();

    std::optional<Bytes> retrieve(const Key& identifier);

    std::vector<std::pair<Key, FieldLocation>> list(const Request& request);

    std::size_t pending() const { return pending_; }
    const Schema& schema() const { return schema_; }
    Store& store() { return *store_; }
    Catalogue& catalogue() { return *catalogue_; }

    /// Keeps the backing engine (and its profiler hookup) alive for the
    /// session's lifetime; used by the config-driven factory.
    void adoptEngine(std::shared_ptr<Engine> engine) { engine_ = std::move(engine); }
    Engine* engine() const { return engine_.get(); }

private:
    Schema schema_;
    std::unique_ptr<Store> store_;
    std::unique_ptr<Catalogue> catalogue_;
    std::shared_ptr<Engine> engine_;
    std::size_t pending_ = 0;
};

/// Builds a session from a configuration: backend pair, storage location,
/// embedded or remote engine. The profiler, when given, is attached to the
/// engine of kv sessions.
std::unique_ptr<Fdb> openFdb(const Config& config, const Schema& schema, Profiler* profiler = nullptr);

}  // namespace fdb
