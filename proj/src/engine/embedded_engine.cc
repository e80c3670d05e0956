/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/embedded_engine.h"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <shared_mutex>
#include <unordered_map>

#include "../common/util.h"

namespace fs = std::filesystem;

namespace fdb {

namespace {

constexpr char kCommitMagic[4] = {'M', 'V', 'C', '1'};
constexpr std::size_t kFrameOverhead = 4 + 4 + 4;  // magic + length + trailing CRC

enum RecordKind : std::uint8_t {
    kKvPut = 1,
    kArrayWrite = 2,
    kOidAlloc = 3,
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

struct Cursor {
    const std::uint8_t* p;
    std::size_t left;

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
    bool u8(std::uint8_t& v) {
        if (left < 1) {
            return false;
        }
        v = *p++;
        --left;
        return true;
    }
    bool bytes(std::string& out, std::size_t n) {
        if (left < n) {
            return false;
        }
        out.assign(reinterpret_cast<const char*>(p), n);
        p += n;
        left -= n;
        return true;
    }
};

void writeFull(int fd, const void* data, std::size_t len, std::uint64_t offset) {
    const char* p = static_cast<const char*>(data);
    while (len > 0) {
        ssize_t n = ::pwrite(fd, p, len, static_cast<off_t>(offset));
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw EngineError(std::string("write failed: ") + std::strerror(errno));
        }
        p += n;
        len -= static_cast<std::size_t>(n);
        offset += static_cast<std::uint64_t>(n);
    }
}

std::size_t readFull(int fd, void* data, std::size_t len, std::uint64_t offset) {
    char* p = static_cast<char*>(data);
    std::size_t done = 0;
    while (done < len) {
        ssize_t n = ::pread(fd, p + done, len - done, static_cast<off_t>(offset + done));
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw EngineError(std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            break;
        }
        done += static_cast<std::size_t>(n);
    }
    return done;
}

std::uint64_t fileSize(int fd) {
    struct stat st{};
    if (::fstat(fd, &st) != 0) {
        throw EngineError(std::string("fstat failed: ") + std::strerror(errno));
    }
    return static_cast<std::uint64_t>(st.st_size);
}

class ProfScope {
public:
    ProfScope(Profiler* prof, ProfCategory cat) : prof_(prof), cat_(cat) {
        if (prof_) {
            start_ = util::monotonicNanos();
        }
    }
    ~ProfScope() {
        if (prof_) {
            prof_->add(cat_, util::monotonicNanos() - start_);
        }
    }

private:
    Profiler* prof_;
    ProfCategory cat_;
    std::uint64_t start_ = 0;
};

}  // namespace

namespace detail {

struct Extent {
    std::uint64_t off = 0;
    std::uint64_t len = 0;
    std::uint32_t crc = 0;
};

struct ArrPiece {
    std::uint64_t logOff = 0;
    std::uint64_t len = 0;
};

struct ArrObj {
    std::map<std::uint64_t, ArrPiece> pieces;  // array offset -> extent slice
    std::uint64_t size = 0;
};

struct KvObj {
    std::map<std::string, Extent> entries;
};

struct PoolState {
    std::string name;
    fs::path dir;
};

struct ContainerState {
    fs::path dir;
    bool sync = true;
    int valuesFd = -1;
    int commitsFd = -1;

    std::mutex appendMu;  // guards valuesEnd and value-log appends
    std::uint64_t valuesEnd = 0;

    std::mutex commitMu;  // guards commit ordering, commitsEnd, counters
    std::uint64_t commitsEnd = 0;
    std::uint64_t lastSeq = 0;
    std::uint64_t nextOidLo = 1;
    std::uint64_t syncedValuesEnd = 0;

    std::shared_mutex indexMu;  // guards the committed index
    std::unordered_map<Oid, KvObj, OidHash> kvs;
    std::unordered_map<Oid, ArrObj, OidHash> arrays;

    ~ContainerState() {
        if (valuesFd >= 0) {
            ::close(valuesFd);
        }
        if (commitsFd >= 0) {
            ::close(commitsFd);
        }
    }

    Extent appendValue(std::span<const std::uint8_t> value) {
        Extent ext;
        ext.len = value.size();
        ext.crc = util::crc32(value);
        std::lock_guard lk(appendMu);
        ext.off = valuesEnd;
        writeFull(valuesFd, value.data(), value.size(), ext.off);
        valuesEnd += value.size();
        return ext;
    }

    /// Appends one commit record, makes it durable, and publishes the
    /// change to the in-memory index. `publish` runs under the exclusive
    /// index lock with the assigned sequence number.
    template <typename Payload, typename Publish>
    std::uint64_t commit(std::uint64_t extentEnd, Payload&& payload, Publish&& publish) {
        std::lock_guard lk(commitMu);
        std::uint64_t seq = lastSeq + 1;

        Bytes record;
        record.insert(record.end(), kCommitMagic, kCommitMagic + 4);
        Bytes body;
        putU64(body, seq);
        payload(body);
        putU32(record, static_cast<std::uint32_t>(body.size()));
        record.insert(record.end(), body.begin(), body.end());
        putU32(record, util::crc32(body));

        if (sync && extentEnd > syncedValuesEnd) {
            if (::fdatasync(valuesFd) != 0) {
                throw EngineError(std::string("fdatasync failed: ") + std::strerror(errno));
            }
            syncedValuesEnd = extentEnd;
        }
        writeFull(commitsFd, record.data(), record.size(), commitsEnd);
        if (sync && ::fdatasync(commitsFd) != 0) {
            throw EngineError(std::string("fdatasync failed: ") + std::strerror(errno));
        }
        commitsEnd += record.size();
        lastSeq = seq;

        {
            std::unique_lock idx(indexMu);
            publish(seq);
        }
        return seq;
    }
};

}  // namespace detail

namespace {

using detail::ArrObj;
using detail::ArrPiece;
using detail::ContainerState;
using detail::Extent;

void applyArrayWrite(ArrObj& arr, std::uint64_t aoff, std::uint64_t logOff, std::uint64_t len) {
    std::uint64_t end = aoff + len;
    arr.size = std::max(arr.size, end);
    if (len == 0) {
        return;
    }
    auto it = arr.pieces.lower_bound(aoff);
    if (it != arr.pieces.begin()) {
        auto prev = std::prev(it);
        std::uint64_t pEnd = prev->first + prev->second.len;
        if (pEnd > aoff) {
            if (pEnd > end) {
                arr.pieces[end] = ArrPiece{prev->second.logOff + (end - prev->first), pEnd - end};
            }
            prev->second.len = aoff - prev->first;
        }
    }
    it = arr.pieces.lower_bound(aoff);
    while (it != arr.pieces.end() && it->first < end) {
        std::uint64_t pEnd = it->first + it->second.len;
        if (pEnd <= end) {
            it = arr.pieces.erase(it);
        } else {
            ArrPiece tail{it->second.logOff + (end - it->first), pEnd - end};
            arr.pieces.erase(it);
            arr.pieces[end] = tail;
            break;
        }
    }
    arr.pieces[aoff] = ArrPiece{logOff, len};
}

/// Rebuilds container state from the commit log, stopping at the first
/// record that is torn, fails its CRC, breaks sequence order, or references
/// bytes beyond the value log. The commit log is truncated back to the
/// valid prefix so later appends continue cleanly.
void replay(ContainerState& st) {
    std::uint64_t logSize = fileSize(st.commitsFd);
    Bytes log(logSize);
    if (logSize > 0 && readFull(st.commitsFd, log.data(), logSize, 0) != logSize) {
        throw EngineError("short read of commit log");
    }
    st.valuesEnd = fileSize(st.valuesFd);
    st.syncedValuesEnd = st.valuesEnd;

    std::uint64_t pos = 0;
    while (true) {
        if (logSize - pos < kFrameOverhead) {
            break;
        }
        if (std::memcmp(log.data() + pos, kCommitMagic, 4) != 0) {
            break;
        }
        std::uint32_t bodyLen = 0;
        Cursor lenCur{log.data() + pos + 4, 4};
        lenCur.u32(bodyLen);
        if (logSize - pos < kFrameOverhead + bodyLen) {
            break;
        }
        const std::uint8_t* body = log.data() + pos + 8;
        Cursor crcCur{body + bodyLen, 4};
        std::uint32_t storedCrc = 0;
        crcCur.u32(storedCrc);
        if (util::crc32(body, bodyLen) != storedCrc) {
            break;
        }

        Cursor cur{body, bodyLen};
        std::uint64_t seq = 0;
        std::uint8_t kind = 0;
        if (!cur.u64(seq) || !cur.u8(kind) || seq != st.lastSeq + 1) {
            break;
        }
        bool ok = false;
        switch (kind) {
            case kKvPut: {
                Oid oid;
                std::uint32_t keyLen = 0;
                std::string key;
                Extent ext;
                if (cur.u64(oid.hi) && cur.u64(oid.lo) && cur.u32(keyLen) && cur.bytes(key, keyLen) &&
                    cur.u64(ext.off) && cur.u64(ext.len) && cur.u32(ext.crc) &&
                    ext.off + ext.len <= st.valuesEnd) {
                    st.kvs[oid].entries[key] = ext;
                    ok = true;
                }
                break;
            }
            case kArrayWrite: {
                Oid oid;
                std::uint64_t arrOff = 0;
                Extent ext;
                if (cur.u64(oid.hi) && cur.u64(oid.lo) && cur.u64(arrOff) && cur.u64(ext.off) &&
                    cur.u64(ext.len) && cur.u32(ext.crc) && ext.off + ext.len <= st.valuesEnd) {
                    applyArrayWrite(st.arrays[oid], arrOff, ext.off, ext.len);
                    ok = true;
                }
                break;
            }
            case kOidAlloc: {
                std::uint64_t first = 0;
                std::uint64_t count = 0;
                if (cur.u64(first) && cur.u64(count)) {
                    st.nextOidLo = std::max(st.nextOidLo, first + count);
                    ok = true;
                }
                break;
            }
            default:
                break;
        }
        if (!ok) {
            break;
        }
        st.lastSeq = seq;
        pos += kFrameOverhead + bodyLen;
    }
    st.commitsEnd = pos;
    if (pos < logSize) {
        if (::ftruncate(st.commitsFd, static_cast<off_t>(pos)) != 0) {
            throw EngineError(std::string("ftruncate failed: ") + std::strerror(errno));
        }
    }
}

int openLog(const fs::path& p) {
    int fd = ::open(p.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw EngineError("cannot open '" + p.string() + "': " + std::strerror(errno));
    }
    return fd;
}

/// Containers opened twice within one process share one state object;
/// this is what makes concurrent sessions in one process coherent.
struct ContainerRegistry {
    std::mutex mu;
    std::map<std::string, std::weak_ptr<ContainerState>> open;

    std::shared_ptr<ContainerState> acquire(const fs::path& dir, bool sync) {
        std::lock_guard lk(mu);
        std::string canon = fs::weakly_canonical(dir).string();
        if (auto it = open.find(canon); it != open.end()) {
            if (auto st = it->second.lock()) {
                return st;
            }
        }
        auto st = std::make_shared<ContainerState>();
        st->dir = dir;
        st->sync = sync;
        st->valuesFd = openLog(dir / "values.log");
        st->commitsFd = openLog(dir / "commits.log");
        replay(*st);
        open[canon] = st;
        return st;
    }
};

ContainerRegistry& registry() {
    static ContainerRegistry reg;
    return reg;
}

}  // namespace

EmbeddedEngine::EmbeddedEngine(fs::path storageRoot, Options options) :
    root_(std::move(storageRoot)), options_(options) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) {
        throw EngineError("storage root '" + root_.string() + "' is not usable");
    }
}

EmbeddedEngine::~EmbeddedEngine() = default;

std::shared_ptr<detail::PoolState> EmbeddedEngine::pool(PoolHandle pool) {
    std::lock_guard lk(mutex_);
    auto it = pools_.find(pool.id);
    if (it == pools_.end()) {
        throw EngineError("invalid or closed pool handle");
    }
    return it->second;
}

std::shared_ptr<ContainerState> EmbeddedEngine::state(ContainerHandle cont) {
    std::lock_guard lk(mutex_);
    auto it = containers_.find(cont.id);
    if (it == containers_.end()) {
        throw EngineError("invalid or closed container handle");
    }
    return it->second;
}

PoolHandle EmbeddedEngine::poolConnect(const std::string& name, bool create) {
    ProfScope prof(profiler_, ProfCategory::Connect);
    if (name.empty() || name.find('/') != std::string::npos) {
        throw EngineError("invalid pool name '" + name + "'");
    }
    fs::path dir = root_ / name;
    if (!fs::is_directory(dir)) {
        if (!create) {
            throw PoolNotFound("unknown pool '" + name + "'");
        }
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw EngineError("cannot create pool '" + name + "': " + ec.message());
        }
    }
    auto st = std::make_shared<detail::PoolState>();
    st->name = name;
    st->dir = dir;
    std::lock_guard lk(mutex_);
    PoolHandle h{nextHandle_++};
    pools_[h.id] = std::move(st);
    return h;
}

void EmbeddedEngine::poolDisconnect(PoolHandle pool) {
    std::lock_guard lk(mutex_);
    pools_.erase(pool.id);
}

ContainerHandle EmbeddedEngine::contOpen(PoolHandle poolh, const std::string& label, bool createIfAbsent) {
    ProfScope prof(profiler_, ProfCategory::Connect);
    if (label.empty() || label.find('/') != std::string::npos) {
        throw EngineError("invalid container label '" + label + "'");
    }
    auto p = pool(poolh);
    fs::path dir = p->dir / label;
    if (!fs::is_directory(dir)) {
        if (!createIfAbsent) {
            throw ContainerNotFound("container '" + label + "' not found in pool '" + p->name + "'");
        }
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw EngineError("cannot create container '" + label + "': " + ec.message());
        }
    }
    auto st = registry().acquire(dir, options_.syncCommits);
    std::lock_guard lk(mutex_);
    ContainerHandle h{nextHandle_++};
    containers_[h.id] = std::move(st);
    return h;
}

void EmbeddedEngine::contClose(ContainerHandle cont) {
    std::lock_guard lk(mutex_);
    containers_.erase(cont.id);
}

Oid EmbeddedEngine::allocOids(ContainerHandle cont, std::uint64_t count) {
    ProfScope prof(profiler_, ProfCategory::OidAlloc);
    if (count == 0) {
        throw EngineError("allocOids: count must be positive");
    }
    auto st = state(cont);
    Oid first;
    st->commit(0,
               [&](Bytes& body) {
                   body.push_back(kOidAlloc);
                   first = Oid{0, st->nextOidLo};  // commitMu held
                   st->nextOidLo += count;
                   putU64(body, first.lo);
                   putU64(body, count);
               },
               [](std::uint64_t) {});
    return first;
}

std::uint64_t EmbeddedEngine::kvPut(ContainerHandle cont, Oid oid, std::string_view key,
                                    std::span<const std::uint8_t> value) {
    ProfScope prof(profiler_, ProfCategory::KvPut);
    if (key.size() > kMaxKeyLength) {
        throw EngineError("kvPut: key exceeds " + std::to_string(kMaxKeyLength) + " bytes");
    }
    auto st = state(cont);
    Extent ext = st->appendValue(value);
    return st->commit(ext.off + ext.len,
                      [&](Bytes& body) {
                          body.push_back(kKvPut);
                          putU64(body, oid.hi);
                          putU64(body, oid.lo);
                          putU32(body, static_cast<std::uint32_t>(key.size()));
                          body.insert(body.end(), key.begin(), key.end());
                          putU64(body, ext.off);
                          putU64(body, ext.len);
                          putU32(body, ext.crc);
                      },
                      [&](std::uint64_t) { st->kvs[oid].entries[std::string(key)] = ext; });
}

std::optional<Bytes> EmbeddedEngine::kvGet(ContainerHandle cont, Oid oid, std::string_view key) {
    ProfScope prof(profiler_, ProfCategory::KvGet);
    auto st = state(cont);
    Extent ext;
    {
        std::shared_lock idx(st->indexMu);
        auto obj = st->kvs.find(oid);
        if (obj == st->kvs.end()) {
            return std::nullopt;
        }
        auto entry = obj->second.entries.find(std::string(key));
        if (entry == obj->second.entries.end()) {
            return std::nullopt;
        }
        ext = entry->second;
    }
    Bytes out(ext.len);
    if (readFull(st->valuesFd, out.data(), ext.len, ext.off) != ext.len) {
        throw EngineError("kvGet: value log short read");
    }
    if (util::crc32(out) != ext.crc) {
        throw EngineError("kvGet: value checksum mismatch");
    }
    return out;
}

std::vector<std::string> EmbeddedEngine::kvList(ContainerHandle cont, Oid oid) {
    ProfScope prof(profiler_, ProfCategory::Other);
    auto st = state(cont);
    std::vector<std::string> keys;
    std::shared_lock idx(st->indexMu);
    auto obj = st->kvs.find(oid);
    if (obj != st->kvs.end()) {
        keys.reserve(obj->second.entries.size());
        for (const auto& [k, v] : obj->second.entries) {
            keys.push_back(k);
        }
    }
    return keys;
}

std::uint64_t EmbeddedEngine::arrayWrite(ContainerHandle cont, Oid oid, std::uint64_t offset,
                                         std::span<const std::uint8_t> data) {
    ProfScope prof(profiler_, ProfCategory::ArrayWrite);
    auto st = state(cont);
    Extent ext = st->appendValue(data);
    return st->commit(ext.off + ext.len,
                      [&](Bytes& body) {
                          body.push_back(kArrayWrite);
                          putU64(body, oid.hi);
                          putU64(body, oid.lo);
                          putU64(body, offset);
                          putU64(body, ext.off);
                          putU64(body, ext.len);
                          putU32(body, ext.crc);
                      },
                      [&](std::uint64_t) { applyArrayWrite(st->arrays[oid], offset, ext.off, ext.len); });
}

Bytes EmbeddedEngine::arrayRead(ContainerHandle cont, Oid oid, std::uint64_t offset, std::uint64_t length) {
    ProfScope prof(profiler_, ProfCategory::ArrayRead);
    auto st = state(cont);

    struct Slice {
        std::uint64_t bufOff;
        std::uint64_t logOff;
        std::uint64_t len;
    };
    std::vector<Slice> slices;
    std::uint64_t n = 0;
    {
        std::shared_lock idx(st->indexMu);
        auto obj = st->arrays.find(oid);
        if (obj == st->arrays.end() || obj->second.size <= offset) {
            return {};
        }
        n = std::min<std::uint64_t>(length, obj->second.size - offset);
        std::uint64_t end = offset + n;
        auto it = obj->second.pieces.upper_bound(offset);
        if (it != obj->second.pieces.begin()) {
            --it;
        }
        for (; it != obj->second.pieces.end() && it->first < end; ++it) {
            std::uint64_t pStart = it->first;
            std::uint64_t pEnd = pStart + it->second.len;
            if (pEnd <= offset) {
                continue;
            }
            std::uint64_t from = std::max(pStart, offset);
            std::uint64_t to = std::min(pEnd, end);
            slices.push_back(Slice{from - offset, it->second.logOff + (from - pStart), to - from});
        }
    }
    Bytes out(n, 0);  // holes read as zeros
    for (const auto& s : slices) {
        if (readFull(st->valuesFd, out.data() + s.bufOff, s.len, s.logOff) != s.len) {
            throw EngineError("arrayRead: value log short read");
        }
    }
    return out;
}

std::uint64_t EmbeddedEngine::arrayGetSize(ContainerHandle cont, Oid oid) {
    ProfScope prof(profiler_, ProfCategory::Other);
    auto st = state(cont);
    std::shared_lock idx(st->indexMu);
    auto obj = st->arrays.find(oid);
    return obj == st->arrays.end() ? 0 : obj->second.size;
}

std::uint64_t EmbeddedEngine::valueLogSize(ContainerHandle cont) {
    auto st = state(cont);
    std::lock_guard lk(st->appendMu);
    return st->valuesEnd;
}

std::uint64_t EmbeddedEngine::lastCommitSeq(ContainerHandle cont) {
    auto st = state(cont);
    std::lock_guard lk(st->commitMu);
    return st->lastSeq;
}

}  // namespace fdb
