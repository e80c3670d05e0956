/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fdb {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Session configuration, loaded from a "key = value" file ('#' comments).
///
/// Keys: backend (kv | file), storage_root, schema (path), pool,
/// root_container, oid_batch, engine (embedded | host:port), axis_pruning
/// (on | off), sync (on | off).
struct Config {
    std::string backend = "kv";
    std::string storageRoot = "fdb-store";
    std::string schemaPath;
    std::string pool = "default";
    std::string rootContainer = "root";
    std::uint64_t oidBatch = 64;
    std::string engine = "embedded";  // or "host:port" for the wire server
    bool axisPruning = true;
    bool syncCommits = true;

    static Config load(const std::string& path);
    static Config parse(std::string_view text);
};

}  // namespace fdb
