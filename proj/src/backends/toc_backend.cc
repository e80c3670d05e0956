/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/toc_backend.h"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstring>
#include <fstream>

#include "../common/util.h"

namespace fs = std::filesystem;

namespace fdb {

namespace {

constexpr char kTocMagic[4] = {'T', 'O', 'C', '1'};
constexpr std::size_t kTocFrameOverhead = 4 + 4 + 4;
constexpr std::size_t kMaxTocRecord = 4096;

enum TocRecordType : std::uint8_t {
    kInit = 1,
    kIndex = 2,
};

void putU32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void putU64(Bytes& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void putString(Bytes& out, std::string_view s) {
    putU32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

struct Cursor {
    const std::uint8_t* p;
    std::size_t left;

    bool u8(std::uint8_t& v) {
        if (left < 1) {
            return false;
        }
        v = *p++;
        --left;
        return true;
    }
    bool u32(std::uint32_t& v) {
        if (left < 4) {
            return false;
        }
        v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        }
        p += 4;
        left -= 4;
        return true;
    }
    bool u64(std::uint64_t& v) {
        if (left < 8) {
            return false;
        }
        v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        }
        p += 8;
        left -= 8;
        return true;
    }
    bool string(std::string& out) {
        std::uint32_t n = 0;
        if (!u32(n) || left < n) {
            return false;
        }
        out.assign(reinterpret_cast<const char*>(p), n);
        p += n;
        left -= n;
        return true;
    }
};

int openFile(const fs::path& p, int flags, mode_t mode = 0644) {
    int fd = ::open(p.c_str(), flags | O_CLOEXEC, mode);
    if (fd < 0) {
        throw BackendError("cannot open '" + p.string() + "': " + std::strerror(errno));
    }
    return fd;
}

void writeAll(int fd, const void* data, std::size_t len) {
    const char* p = static_cast<const char*>(data);
    while (len > 0) {
        ssize_t n = ::write(fd, p, len);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw BackendError(std::string("write failed: ") + std::strerror(errno));
        }
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

Bytes readWholeFile(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw BackendError("cannot read '" + p.string() + "'");
    }
    Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return out;
}

void syncFile(int fd) {
    if (::fdatasync(fd) != 0) {
        throw BackendError(std::string("fdatasync failed: ") + std::strerror(errno));
    }
}

Bytes frameRecord(const Bytes& payload) {
    Bytes record;
    record.insert(record.end(), kTocMagic, kTocMagic + 4);
    putU32(record, static_cast<std::uint32_t>(payload.size()));
    record.insert(record.end(), payload.begin(), payload.end());
    putU32(record, util::crc32(payload));
    if (record.size() > kMaxTocRecord) {
        throw BackendError("TOC record exceeds the 4 KiB append-atomicity bound");
    }
    return record;
}

}  // namespace

//----------------------------------------------------------------------------
// FileStore

FileStore::FileStore(fs::path rootDir) : root_(std::move(rootDir)), uuid_(util::makeUuid()) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) {
        throw BackendError("store root '" + root_.string() + "' is not usable");
    }
}

FileStore::~FileStore() {
    for (auto& [ds, file] : writeFiles_) {
        if (file.fd >= 0) {
            ::close(file.fd);
        }
    }
    for (auto& [path, fd] : readFds_) {
        if (fd >= 0) {
            ::close(fd);
        }
    }
}

FieldLocation FileStore::archive(const Key& dataset, const Key& collocation,
                                 std::span<const std::uint8_t> data) {
    (void)collocation;
    if (data.empty()) {
        throw BackendError("archive: empty payload");
    }
    std::string datasetStr = dataset.valuesToString();
    auto it = writeFiles_.find(datasetStr);
    if (it == writeFiles_.end()) {
        std::string dirName = util::pathEncode(datasetStr);
        std::error_code ec;
        fs::create_directories(root_ / dirName, ec);
        DataFile file;
        file.relPath = dirName + "/" + uuid_ + ".data";
        file.fd = openFile(root_ / file.relPath, O_WRONLY | O_CREAT | O_EXCL);
        it = writeFiles_.emplace(datasetStr, file).first;
    }
    DataFile& file = it->second;
    writeAll(file.fd, data.data(), data.size());

    FieldLocation loc;
    loc.scheme = FieldLocation::Scheme::File;
    loc.path = file.relPath;
    loc.offset = file.offset;
    loc.length = data.size();
    file.offset += data.size();
    return loc;
}

void FileStore::flush() {
    for (auto& [ds, file] : writeFiles_) {
        syncFile(file.fd);
    }
}

Bytes FileStore::retrieve(const FieldLocation& location) {
    if (location.scheme != FieldLocation::Scheme::File) {
        throw BackendError("file store cannot retrieve location '" + location.toUri() + "'");
    }
    auto it = readFds_.find(location.path);
    if (it == readFds_.end()) {
        it = readFds_.emplace(location.path, openFile(root_ / location.path, O_RDONLY)).first;
    }
    Bytes out(location.length);
    std::size_t done = 0;
    while (done < location.length) {
        ssize_t n = ::pread(it->second, out.data() + done, location.length - done,
                            static_cast<off_t>(location.offset + done));
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            throw BackendError("dangling location '" + location.toUri() + "': short read");
        }
        done += static_cast<std::size_t>(n);
    }
    return out;
}

//----------------------------------------------------------------------------
// TocCatalogue

TocCatalogue::TocCatalogue(const Schema& schema, fs::path rootDir) :
    schema_(schema), root_(std::move(rootDir)), uuid_(util::makeUuid()) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) {
        throw BackendError("catalogue root '" + root_.string() + "' is not usable");
    }
    std::string fp = schema_.fingerprint();
    fs::path fpPath = root_ / "schema.fingerprint";
    int fd = ::open(fpPath.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd >= 0) {
        writeAll(fd, fp.data(), fp.size());
        syncFile(fd);
        ::close(fd);
    } else if (errno == EEXIST) {
        Bytes stored = readWholeFile(fpPath);
        if (std::string(stored.begin(), stored.end()) != fp) {
            throw BackendError("catalogue was created with a different schema");
        }
    } else {
        throw BackendError("cannot create '" + fpPath.string() + "': " + std::strerror(errno));
    }
}

TocCatalogue::~TocCatalogue() = default;

void TocCatalogue::archive(const Key& dataset, const Key& collocation, const Key& element,
                           const FieldLocation& location) {
    pending_[dataset.valuesToString()][collocation.valuesToString()].push_back(
        Entry{element.valuesToString(), location.toUri()});
}

void TocCatalogue::flush() {
    for (auto& [datasetStr, colls] : pending_) {
        std::string dirName = util::pathEncode(datasetStr);
        fs::path dsDir = root_ / dirName;
        std::error_code ec;
        fs::create_directories(dsDir, ec);

        int tocFd = openFile(dsDir / "toc", O_WRONLY | O_CREAT | O_APPEND);

        if (!initWritten_.contains(datasetStr)) {
            Bytes payload;
            payload.push_back(kInit);
            putString(payload, datasetStr);
            Bytes record = frameRecord(payload);
            writeAll(tocFd, record.data(), record.size());
            initWritten_.insert(datasetStr);
        }

        for (auto& [collocationStr, entries] : colls) {
            // Serialize the index blob and make it durable before the TOC
            // record referencing it is published.
            Bytes blob;
            putString(blob, collocationStr);
            putU32(blob, static_cast<std::uint32_t>(entries.size()));
            for (const auto& entry : entries) {
                putString(blob, entry.elementStr);
                putString(blob, entry.uri);
            }
            std::string blobName = uuid_ + "-" + std::to_string(blobCounter_++) + ".index";
            int blobFd = openFile(dsDir / blobName, O_WRONLY | O_CREAT | O_EXCL);
            writeAll(blobFd, blob.data(), blob.size());
            syncFile(blobFd);
            ::close(blobFd);

            Bytes payload;
            payload.push_back(kIndex);
            putString(payload, blobName);
            putU64(payload, blob.size());
            putU32(payload, util::crc32(blob));
            putString(payload, collocationStr);
            Bytes record = frameRecord(payload);
            writeAll(tocFd, record.data(), record.size());  // one atomic append
        }
        syncFile(tocFd);
        ::close(tocFd);
    }
    pending_.clear();
}

TocCatalogue::ParsedToc TocCatalogue::parseToc(const fs::path& dsDir) {
    ParsedToc toc;
    fs::path tocPath = dsDir / "toc";
    if (!fs::exists(tocPath)) {
        return toc;
    }
    Bytes data = readWholeFile(tocPath);
    std::size_t pos = 0;
    while (data.size() - pos >= kTocFrameOverhead) {
        if (std::memcmp(data.data() + pos, kTocMagic, 4) != 0) {
            break;
        }
        Cursor lenCur{data.data() + pos + 4, 4};
        std::uint32_t payloadLen = 0;
        lenCur.u32(payloadLen);
        if (data.size() - pos < kTocFrameOverhead + payloadLen) {
            break;  // trailing partial record
        }
        const std::uint8_t* payload = data.data() + pos + 8;
        Cursor crcCur{payload + payloadLen, 4};
        std::uint32_t storedCrc = 0;
        crcCur.u32(storedCrc);
        if (util::crc32(payload, payloadLen) != storedCrc) {
            break;
        }

        Cursor cur{payload, payloadLen};
        std::uint8_t type = 0;
        if (!cur.u8(type)) {
            break;
        }
        ++recordsParsed_;
        if (type == kInit) {
            std::string ds;
            if (cur.string(ds) && toc.datasetStr.empty()) {
                toc.datasetStr = ds;
            }
        } else if (type == kIndex) {
            BlobRef ref;
            if (cur.string(ref.name) && cur.u64(ref.length) && cur.u32(ref.crc) &&
                cur.string(ref.collocationStr)) {
                toc.blobs.push_back(std::move(ref));
            }
        }
        pos += kTocFrameOverhead + payloadLen;
    }
    return toc;
}

std::vector<TocCatalogue::Entry> TocCatalogue::loadBlob(const fs::path& dsDir, const BlobRef& ref) {
    ++blobReads_;
    Bytes blob = readWholeFile(dsDir / ref.name);
    if (blob.size() != ref.length || util::crc32(blob) != ref.crc) {
        throw BackendError("index blob '" + ref.name + "' fails validation");
    }
    Cursor cur{blob.data(), blob.size()};
    std::string collocationStr;
    std::uint32_t count = 0;
    if (!cur.string(collocationStr) || !cur.u32(count)) {
        throw BackendError("index blob '" + ref.name + "' is malformed");
    }
    std::vector<Entry> entries;
    entries.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Entry entry;
        if (!cur.string(entry.elementStr) || !cur.string(entry.uri)) {
            throw BackendError("index blob '" + ref.name + "' is malformed");
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::optional<FieldLocation> TocCatalogue::retrieve(const Key& dataset, const Key& collocation,
                                                    const Key& element) {
    fs::path dsDir = root_ / util::pathEncode(dataset.valuesToString());
    if (!fs::is_directory(dsDir)) {
        return std::nullopt;
    }
    std::string collocationStr = collocation.valuesToString();
    std::string elementStr = element.valuesToString();

    ParsedToc toc = parseToc(dsDir);
    std::optional<FieldLocation> found;  // later records supersede earlier ones
    for (const auto& ref : toc.blobs) {
        if (ref.collocationStr != collocationStr) {
            continue;
        }
        for (const auto& entry : loadBlob(dsDir, ref)) {
            if (entry.elementStr == elementStr) {
                found = FieldLocation::fromUri(entry.uri);
            }
        }
    }
    return found;
}

std::vector<std::pair<Key, FieldLocation>> TocCatalogue::list(const Request& request) {
    // Accumulate under the full stringified identifier so that later
    // entries supersede earlier ones across all writers' blobs.
    std::vector<std::string> order;
    std::map<std::string, std::pair<Key, FieldLocation>> newest;

    for (const auto& dirEntry : fs::directory_iterator(root_)) {
        if (!dirEntry.is_directory()) {
            continue;
        }
        ParsedToc toc = parseToc(dirEntry.path());
        if (toc.datasetStr.empty()) {
            continue;
        }
        Key dsKey = Key::fromString(toc.datasetStr, schema_.datasetKeywords());
        if (!request.matches(dsKey)) {
            continue;
        }
        for (const auto& ref : toc.blobs) {
            Key collKey = Key::fromString(ref.collocationStr, schema_.collocationKeywords());
            if (!request.matches(collKey)) {
                continue;
            }
            for (const auto& entry : loadBlob(dirEntry.path(), ref)) {
                Key elKey = Key::fromString(entry.elementStr, schema_.elementKeywords());
                if (!request.matches(elKey)) {
                    continue;
                }
                std::string id = toc.datasetStr + "|" + ref.collocationStr + "|" + entry.elementStr;
                auto [it, inserted] = newest.try_emplace(
                    id, std::make_pair(schema_.merge(toc.datasetStr, ref.collocationStr, entry.elementStr),
                                       FieldLocation::fromUri(entry.uri)));
                if (inserted) {
                    order.push_back(id);
                } else {
                    it->second.second = FieldLocation::fromUri(entry.uri);
                }
            }
        }
    }
    std::vector<std::pair<Key, FieldLocation>> out;
    out.reserve(order.size());
    for (const auto& id : order) {
        out.push_back(newest.at(id));
    }
    return out;
}

}  // namespace fdb
