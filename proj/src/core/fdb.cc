/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/fdb.h"

#include <filesystem>

#include "fdb/embedded_engine.h"
#include "fdb/kv_backend.h"
#include "fdb/remote_engine.h"
#include "fdb/toc_backend.h"

namespace fdb {

Fdb::Fdb(Schema schema, std::unique_ptr<Store> store, std::unique_ptr<Catalogue> catalogue) :
    schema_(std::move(schema)), store_(std::move(store)), catalogue_(std::move(catalogue)) {}

void Fdb::archive(const Key& identifier, std::span<const std::uint8_t> data) {
    auto [dataset, collocation, element] = schema_.split(identifier);
    FieldLocation location = store_->archive(dataset, collocation, data);
    catalogue_->archive(dataset, collocation, element, location);
    ++pending_;
}

void Fdb::flush() {
    store_->flush();
    catalogue_->flush();
    pending_ = 0;
}

std::optional<Bytes> Fdb::retrieve(const Key& identifier) {
    auto [dataset, collocation, element] = schema_.split(identifier);
    auto location = catalogue_->retrieve(dataset, collocation, element);
    if (!location) {
        return std::nullopt;
    }
    return store_->retrieve(*location);
}

std::vector<std::pair<Key, FieldLocation>> Fdb::list(const Request& request) {
    return catalogue_->list(request);
}

std::unique_ptr<Fdb> openFdb(const Config& config, const Schema& schema, Profiler* profiler) {
    if (config.backend == "file") {
        std::filesystem::path root = config.storageRoot;
        return std::make_unique<Fdb>(schema, std::make_unique<FileStore>(root / "data"),
                                     std::make_unique<TocCatalogue>(schema, root / "catalogue"));
    }

    std::shared_ptr<Engine> engine;
    if (config.engine == "embedded") {
        EmbeddedEngine::Options opts;
        opts.syncCommits = config.syncCommits;
        engine = std::make_shared<EmbeddedEngine>(config.storageRoot, opts);
    } else {
        engine = std::make_shared<RemoteEngine>(config.engine);
    }
    if (profiler) {
        engine->attachProfiler(profiler);
    }

    KvStore::Options storeOpts;
    storeOpts.pool = config.pool;
    storeOpts.oidBatch = config.oidBatch;

    KvCatalogue::Options catOpts;
    catOpts.pool = config.pool;
    catOpts.rootContainer = config.rootContainer;
    catOpts.axisPruning = config.axisPruning;

    auto fdb = std::make_unique<Fdb>(schema, std::make_unique<KvStore>(*engine, storeOpts),
                                     std::make_unique<KvCatalogue>(*engine, schema, catOpts));
    fdb->adoptEngine(std::move(engine));
    return fdb;
}

}  // namespace fdb
