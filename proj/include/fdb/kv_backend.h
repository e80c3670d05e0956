/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>

#include "fdb/backend.h"
#include "fdb/engine.h"
#include "fdb/schema.h"

namespace fdb {

/// Store backend over the object-store engine: one Array object per field,
/// OIDs drawn from a cached pre-allocated range, all fields of one dataset
/// collocated in the dataset's container. Writes are durable and visible
/// when archive() returns, so flush() issues no engine calls at all.
class KvStore : public Store {
public:
    struct Options {
        std::string pool = "default";
        std::uint64_t oidBatch = 64;

        Options() {}
    };

    KvStore(Engine& engine, Options options = Options());

    FieldLocation archive(const Key& dataset, const Key& collocation,
                          std::span<const std::uint8_t> data) override;
    void flush() override;
    Bytes retrieve(const FieldLocation& location) override;

private:
    struct ContState {
        ContainerHandle handle;
        Oid nextOid{0, 0};
        std::uint64_t oidsLeft = 0;
    };

    ContState& openContainer(const std::string& label, bool create);

    Engine& engine_;
    Options options_;
    PoolHandle pool_;
    std::unordered_map<std::string, ContState> containers_;
};

/// Catalogue backend over the engine, mirroring the Key-Value network of
/// the object-store design:
///
///   root container, KV (0,0):      "schema" -> fingerprint
///                                  "d=<dataset>" -> dataset container label
///   dataset container, KV (0,0):   "c=<collocation>" -> index record
///                                  (index KV OID plus one axis KV OID per
///                                  element keyword)
///   index KV:                      "<element>" -> location URI
///   axis KV (one per keyword):     "<value>" -> ""
///
/// Everything is visible as soon as archive() returns; flush() is a no-op.
class KvCatalogue : public Catalogue {
public:
    struct Options {
        std::string pool = "default";
        std::string rootContainer = "root";
        bool axisPruning = true;

        Options() {}
    };

    KvCatalogue(Engine& engine, const Schema& schema, Options options = Options());

    void archive(const Key& dataset, const Key& collocation, const Key& element,
                 const FieldLocation& location) override;
    void flush() override;
    std::optional<FieldLocation> retrieve(const Key& dataset, const Key& collocation,
                                          const Key& element) override;
    std::vector<std::pair<Key, FieldLocation>> list(const Request& request) override;

private:
    struct CollInfo {
        Oid indexOid;
        std::map<std::string, Oid> axisOids;                    // element keyword -> axis KV
        std::map<std::string, std::set<std::string>> axisSeen;  // local write cache
    };

    std::optional<ContainerHandle> datasetContainer(const std::string& datasetStr, bool create);
    CollInfo* collocationInfo(const std::string& datasetStr, ContainerHandle dsCont,
                              const std::string& collocationStr, bool create);

    Engine& engine_;
    Schema schema_;
    Options options_;
    PoolHandle pool_;
    ContainerHandle rootCont_;

    std::unordered_map<std::string, ContainerHandle> datasetConts_;
    std::unordered_map<std::string, CollInfo> collInfos_;  // "<dataset>|<collocation>"
};

}  // namespace fdb
