/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/kv_backend.h"

#include <algorithm>

#include "../common/util.h"

namespace fdb {

namespace {

const Oid kEntryPoint{0, 0};

Bytes toBytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

std::string toString(const Bytes& b) {
    return std::string(b.begin(), b.end());
}

std::string collKey(const std::string& collocationStr) {
    return "c=" + collocationStr;
}

std::string datasetKey(const std::string& datasetStr) {
    return "d=" + datasetStr;
}

}  // namespace

//----------------------------------------------------------------------------
// KvStore

KvStore::KvStore(Engine& engine, Options options) : engine_(engine), options_(std::move(options)) {
    if (options_.oidBatch == 0) {
        throw BackendError("oid batch size must be positive");
    }
    pool_ = engine_.poolConnect(options_.pool, true);
}

KvStore::ContState& KvStore::openContainer(const std::string& label, bool create) {
    auto it = containers_.find(label);
    if (it == containers_.end()) {
        ContState st;
        st.handle = engine_.contOpen(pool_, label, create);
        it = containers_.emplace(label, st).first;
    }
    return it->second;
}

FieldLocation KvStore::archive(const Key& dataset, const Key& collocation,
                               std::span<const std::uint8_t> data) {
    (void)collocation;  // data placement is per dataset; the collocation key
                        // only structures the catalogue index
    if (data.empty()) {
        throw BackendError("archive: empty payload");
    }
    std::string label = util::pathEncode(dataset.valuesToString());
    ContState& cont = openContainer(label, true);
    if (cont.oidsLeft == 0) {
        cont.nextOid = engine_.allocOids(cont.handle, options_.oidBatch);
        cont.oidsLeft = options_.oidBatch;
    }
    Oid oid = cont.nextOid;
    ++cont.nextOid.lo;
    --cont.oidsLeft;

    engine_.arrayWrite(cont.handle, oid, 0, data);

    FieldLocation loc;
    loc.scheme = FieldLocation::Scheme::Kv;
    loc.pool = options_.pool;
    loc.container = label;
    loc.oid = oid;
    loc.offset = 0;
    loc.length = data.size();
    return loc;
}

void KvStore::flush() {
    // Arrays are durable and visible as soon as archive() returns.
}

Bytes KvStore::retrieve(const FieldLocation& location) {
    if (location.scheme != FieldLocation::Scheme::Kv) {
        throw BackendError("kv store cannot retrieve location '" + location.toUri() + "'");
    }
    try {
        ContState& cont = openContainer(location.container, false);
        Bytes data = engine_.arrayRead(cont.handle, location.oid, location.offset, location.length);
        if (data.size() != location.length) {
            throw BackendError("dangling location '" + location.toUri() + "': short read");
        }
        return data;
    } catch (const ContainerNotFound& e) {
        throw BackendError("dangling location '" + location.toUri() + "': " + e.what());
    }
}

//----------------------------------------------------------------------------
// KvCatalogue

KvCatalogue::KvCatalogue(Engine& engine, const Schema& schema, Options options) :
    engine_(engine), schema_(schema), options_(std::move(options)) {
    pool_ = engine_.poolConnect(options_.pool, true);
    rootCont_ = engine_.contOpen(pool_, options_.rootContainer, true);

    std::string fp = schema_.fingerprint();
    auto stored = engine_.kvGet(rootCont_, kEntryPoint, "schema");
    if (!stored) {
        engine_.kvPut(rootCont_, kEntryPoint, "schema", toBytes(fp));
    } else if (toString(*stored) != fp) {
        throw BackendError("catalogue was created with a different schema");
    }
}

std::optional<ContainerHandle> KvCatalogue::datasetContainer(const std::string& datasetStr, bool create) {
    if (auto it = datasetConts_.find(datasetStr); it != datasetConts_.end()) {
        return it->second;
    }
    std::string label;
    auto entry = engine_.kvGet(rootCont_, kEntryPoint, datasetKey(datasetStr));
    if (entry) {
        label = toString(*entry);
    } else {
        if (!create) {
            return std::nullopt;
        }
        label = util::pathEncode(datasetStr);
        engine_.contOpen(pool_, label, true);  // also creates the dataset KV entry point
        engine_.kvPut(rootCont_, kEntryPoint, datasetKey(datasetStr), toBytes(label));
    }
    ContainerHandle h = engine_.contOpen(pool_, label, true);
    datasetConts_[datasetStr] = h;
    return h;
}

namespace {

std::string encodeCollRecord(const Oid& indexOid, const std::map<std::string, Oid>& axisOids) {
    std::string out = indexOid.toString();
    for (const auto& [kw, oid] : axisOids) {
        out += ";" + kw + "=" + oid.toString();
    }
    return out;
}

void decodeCollRecord(const std::string& record, Oid& indexOid, std::map<std::string, Oid>& axisOids) {
    std::size_t semi = record.find(';');
    indexOid = Oid::fromString(record.substr(0, semi));
    axisOids.clear();
    while (semi != std::string::npos) {
        std::size_t next = record.find(';', semi + 1);
        std::string part = record.substr(semi + 1, next == std::string::npos ? std::string::npos : next - semi - 1);
        std::size_t eq = part.find('=');
        if (eq == std::string::npos) {
            throw BackendError("malformed index record '" + record + "'");
        }
        axisOids[part.substr(0, eq)] = Oid::fromString(part.substr(eq + 1));
        semi = next;
    }
}

}  // namespace

KvCatalogue::CollInfo* KvCatalogue::collocationInfo(const std::string& datasetStr, ContainerHandle dsCont,
                                                    const std::string& collocationStr, bool create) {
    std::string cacheKey = datasetStr + "|" + collocationStr;
    if (auto it = collInfos_.find(cacheKey); it != collInfos_.end()) {
        return &it->second;
    }
    auto entry = engine_.kvGet(dsCont, kEntryPoint, collKey(collocationStr));
    if (!entry && create) {
        // Allocate an index KV plus one axis KV per element keyword, then
        // publish the record. Racing creators both publish; last writer
        // wins and everyone adopts the winning record below.
        const auto& keywords = schema_.elementKeywords();
        Oid first = engine_.allocOids(dsCont, 1 + keywords.size());
        std::map<std::string, Oid> axisOids;
        for (std::size_t i = 0; i < keywords.size(); ++i) {
            axisOids[keywords[i]] = Oid{first.hi, first.lo + 1 + i};
        }
        engine_.kvPut(dsCont, kEntryPoint, collKey(collocationStr), toBytes(encodeCollRecord(first, axisOids)));
        entry = engine_.kvGet(dsCont, kEntryPoint, collKey(collocationStr));
    }
    if (!entry) {
        return nullptr;
    }
    CollInfo info;
    decodeCollRecord(toString(*entry), info.indexOid, info.axisOids);
    return &collInfos_.emplace(cacheKey, std::move(info)).first->second;
}

void KvCatalogue::archive(const Key& dataset, const Key& collocation, const Key& element,
                          const FieldLocation& location) {
    std::string datasetStr = dataset.valuesToString();
    std::string collocationStr = collocation.valuesToString();

    ContainerHandle dsCont = *datasetContainer(datasetStr, true);
    CollInfo* info = collocationInfo(datasetStr, dsCont, collocationStr, true);

    engine_.kvPut(dsCont, info->indexOid, element.valuesToString(), toBytes(location.toUri()));

    // Axis entries are only ever added, so the stored sets are supersets of
    // the indexed values and the local cache can skip repeats.
    for (const auto& [keyword, value] : element) {
        auto& seen = info->axisSeen[keyword];
        if (seen.insert(value).second) {
            engine_.kvPut(dsCont, info->axisOids.at(keyword), value, {});
        }
    }
}

void KvCatalogue::flush() {
    // Index entries are durable and visible as soon as archive() returns.
}

std::optional<FieldLocation> KvCatalogue::retrieve(const Key& dataset, const Key& collocation,
                                                   const Key& element) {
    std::string datasetStr = dataset.valuesToString();
    auto dsCont = datasetContainer(datasetStr, false);
    if (!dsCont) {
        return std::nullopt;
    }
    CollInfo* info = collocationInfo(datasetStr, *dsCont, collocation.valuesToString(), false);
    if (!info) {
        return std::nullopt;
    }
    auto uri = engine_.kvGet(*dsCont, info->indexOid, element.valuesToString());
    if (!uri) {
        return std::nullopt;
    }
    return FieldLocation::fromUri(toString(*uri));
}

std::vector<std::pair<Key, FieldLocation>> KvCatalogue::list(const Request& request) {
    std::vector<std::pair<Key, FieldLocation>> out;

    for (const auto& rootEntry : engine_.kvList(rootCont_, kEntryPoint)) {
        if (!rootEntry.starts_with("d=")) {
            continue;
        }
        std::string datasetStr = rootEntry.substr(2);
        Key dsKey = Key::fromString(datasetStr, schema_.datasetKeywords());
        if (!request.matches(dsKey)) {
            continue;
        }
        auto dsCont = datasetContainer(datasetStr, false);
        if (!dsCont) {
            continue;
        }
        for (const auto& dsEntry : engine_.kvList(*dsCont, kEntryPoint)) {
            if (!dsEntry.starts_with("c=")) {
                continue;
            }
            std::string collocationStr = dsEntry.substr(2);
            Key collKeyK = Key::fromString(collocationStr, schema_.collocationKeywords());
            if (!request.matches(collKeyK)) {
                continue;
            }
            CollInfo* info = collocationInfo(datasetStr, *dsCont, collocationStr, false);
            if (!info) {
                continue;
            }

            if (options_.axisPruning) {
                // Skip the whole index when some requested element keyword
                // has no indexed value inside the requested span.
                bool prunable = false;
                for (const auto& [keyword, span] : request.spans()) {
                    auto axis = info->axisOids.find(keyword);
                    if (axis == info->axisOids.end()) {
                        continue;
                    }
                    bool any = false;
                    for (const auto& value : engine_.kvList(*dsCont, axis->second)) {
                        if (span.contains(value)) {
                            any = true;
                            break;
                        }
                    }
                    if (!any) {
                        prunable = true;
                        break;
                    }
                }
                if (prunable) {
                    continue;
                }
            }

            for (const auto& elementStr : engine_.kvList(*dsCont, info->indexOid)) {
                Key elKey = Key::fromString(elementStr, schema_.elementKeywords());
                if (!request.matches(elKey)) {
                    continue;
                }
                // One engine get per indexed entry: every location lives in
                // its own index KV value.
                auto uri = engine_.kvGet(*dsCont, info->indexOid, elementStr);
                if (!uri) {
                    continue;
                }
                out.emplace_back(schema_.merge(datasetStr, collocationStr, elementStr),
                                 FieldLocation::fromUri(toString(*uri)));
            }
        }
    }
    return out;
}

}  // namespace fdb
