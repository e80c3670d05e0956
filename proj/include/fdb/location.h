/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fdb/engine.h"

namespace fdb {

/// URI-like descriptor of the immutable byte extent holding one field.
///
///   kv://<pool>/<container>/<hi>.<lo>?off=0&len=<N>
///   file://<path-relative-to-store-root>?off=<K>&len=<N>
///
/// kv locations always carry offset 0 (one array per field); length is
/// always present so a read needs no size query.
struct FieldLocation {
    enum class Scheme { Kv, File };

    Scheme scheme = Scheme::File;
    std::string pool;       // kv only
    std::string container;  // kv: container label
    Oid oid;                // kv only
    std::string path;       // file only, relative to the store root
    std::uint64_t offset = 0;
    std::uint64_t length = 0;

    std::string toUri() const;
    static FieldLocation fromUri(std::string_view uri);

    bool operator==(const FieldLocation&) const = default;
};

class LocationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fdb
