/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fdb/key.h"
#include "fdb/location.h"

namespace fdb {

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bulk-data backend. One instance serves a single logical writer or
/// reader thread; cross-instance safety rests on the engine (kv) or on
/// unique file names and append atomicity (file).
class Store {
public:
    virtual ~Store() = default;

    /// Takes control of the data and returns a unique location, never
    /// colliding with concurrent archivers and never overwriting a
    /// previously archived field.
    virtual FieldLocation archive(const Key& dataset, const Key& collocation,
                                  std::span<const std::uint8_t> data) = 0;

    /// Blocks until every archived field is durable.
    virtual void flush() = 0;

    /// Byte-exact payload of exactly location.length bytes. A dangling
    /// location is a storage failure, not a not-found.
    virtual Bytes retrieve(const FieldLocation& location) = 0;
};

/// Indexing backend.
class Catalogue {
public:
    virtual ~Catalogue() = default;

    virtual void archive(const Key& dataset, const Key& collocation, const Key& element,
                         const FieldLocation& location) = 0;

    /// Blocks until every indexed entry is visible to fresh reader sessions.
    virtual void flush() = 0;

    /// Not finding a field is success-shaped.
    virtual std::optional<FieldLocation> retrieve(const Key& dataset, const Key& collocation,
                                                  const Key& element) = 0;

    /// All committed fields matching the request, each under its
    /// superseding (most recent) location, as full identifiers.
    virtual std::vector<std::pair<Key, FieldLocation>> list(const Request& request) = 0;
};

}  // namespace fdb
