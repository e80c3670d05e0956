/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fdb/backend.h"
#include "fdb/schema.h"

namespace fdb {

/// Store backend over a directory tree. Each writer process appends its
/// fields to its own data file, <root>/<dataset>/<uuid>.data; durability is
/// deferred to flush().
class FileStore : public Store {
public:
    explicit FileStore(std::filesystem::path rootDir);
    ~FileStore() override;

    FieldLocation archive(const Key& dataset, const Key& collocation,
                          std::span<const std::uint8_t> data) override;
    void flush() override;
    Bytes retrieve(const FieldLocation& location) override;

private:
    struct DataFile {
        int fd = -1;
        std::uint64_t offset = 0;
        std::string relPath;
    };

    std::filesystem::path root_;
    std::string uuid_;
    std::unordered_map<std::string, DataFile> writeFiles_;  // dataset string -> file
    std::unordered_map<std::string, int> readFds_;          // relative path -> fd
};

/// Catalogue backend over a per-dataset table-of-contents file. archive()
/// only accumulates entries in memory; flush() serializes them into a
/// uniquely named index blob, syncs it, then publishes it with one atomic
/// O_APPEND record on the TOC. Readers parse the valid TOC prefix, so a
/// truncated trailing record is ignored and every referenced blob is
/// already synced.
///
/// On-disk records are framed magic "TOC1", u32 payload length, payload,
/// u32 CRC32(payload); payload type 1 (init) carries the dataset key
/// string, type 2 (index) carries blob name, blob length, blob CRC32 and
/// the collocation key string. One record never exceeds 4 KiB.
class TocCatalogue : public Catalogue {
public:
    TocCatalogue(const Schema& schema, std::filesystem::path rootDir);
    ~TocCatalogue() override;

    void archive(const Key& dataset, const Key& collocation, const Key& element,
                 const FieldLocation& location) override;
    void flush() override;
    std::optional<FieldLocation> retrieve(const Key& dataset, const Key& collocation,
                                          const Key& element) override;
    std::vector<std::pair<Key, FieldLocation>> list(const Request& request) override;

    /// Cumulative op counters, for read-path accounting.
    std::uint64_t tocRecordsParsed() const { return recordsParsed_; }
    std::uint64_t indexBlobReads() const { return blobReads_; }

private:
    struct BlobRef {
        std::string name;
        std::uint64_t length = 0;
        std::uint32_t crc = 0;
        std::string collocationStr;
    };
    struct ParsedToc {
        std::string datasetStr;  // from the first init record
        std::vector<BlobRef> blobs;
    };
    struct Entry {
        std::string elementStr;
        std::string uri;
    };

    ParsedToc parseToc(const std::filesystem::path& dsDir);
    std::vector<Entry> loadBlob(const std::filesystem::path& dsDir, const BlobRef& ref);

    Schema schema_;
    std::filesystem::path root_;
    std::string uuid_;
    std::uint64_t blobCounter_ = 0;

    // dataset string -> collocation string -> pending entries
    std::map<std::string, std::map<std::string, std::vector<Entry>>> pending_;
    std::set<std::string> initWritten_;

    std::uint64_t recordsParsed_ = 0;
    std::uint64_t blobReads_ = 0;
};

}  // namespace fdb
