/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/remote_engine.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "../common/util.h"
#include "fdb/wire.h"

namespace fdb {

using namespace wire;

namespace {

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

RemoteEngine::RemoteEngine(const std::string& address) {
    std::string host = "127.0.0.1";
    std::string portStr = address;
    if (std::size_t colon = address.rfind(':'); colon != std::string::npos) {
        host = address.substr(0, colon);
        portStr = address.substr(colon + 1);
    }
    int port = std::stoi(portStr);

    fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd_ < 0) {
        throw EngineError(std::string("socket failed: ") + std::strerror(errno));
    }
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw EngineError("invalid server address '" + address + "'");
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        int err = errno;
        ::close(fd_);
        throw EngineError("cannot connect to '" + address + "': " + std::strerror(err));
    }
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

RemoteEngine::~RemoteEngine() {
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

Bytes RemoteEngine::call(std::uint8_t opcode, Bytes payload, bool notFoundIsError, bool* notFound) {
    std::lock_guard lk(mutex_);
    Frame req{opcode, nextRequestId_++, std::move(payload)};
    Bytes encoded = encodeFrame(req);
    std::size_t sent = 0;
    while (sent < encoded.size()) {
        ssize_t n = ::send(fd_, encoded.data() + sent, encoded.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw EngineError(std::string("server connection lost: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }

    Frame resp;
    std::uint8_t chunk[64 * 1024];
    while (true) {
        std::size_t consumed = 0;
        DecodeResult dr = decodeFrame(recvBuffer_, resp, consumed);
        if (dr == DecodeResult::Ok) {
            recvBuffer_.erase(recvBuffer_.begin(), recvBuffer_.begin() + consumed);
            break;
        }
        if (dr == DecodeResult::Malformed) {
            throw EngineError("malformed response frame from server");
        }
        ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n <= 0) {
            throw EngineError("server connection closed");
        }
        recvBuffer_.insert(recvBuffer_.end(), chunk, chunk + n);
    }
    if (resp.requestId != req.requestId) {
        throw EngineError("response id mismatch");
    }
    if (resp.payload.empty()) {
        throw EngineError("empty response payload");
    }
    Status status = static_cast<Status>(resp.payload[0]);
    Bytes body(resp.payload.begin() + 1, resp.payload.end());
    switch (status) {
        case Status::Ok:
            if (notFound) {
                *notFound = false;
            }
            return body;
        case Status::NotFound:
            if (!notFoundIsError && notFound) {
                *notFound = true;
                return {};
            }
            throw ContainerNotFound("not found: " + std::string(body.begin(), body.end()));
        case Status::BadRequest:
            throw EngineError("bad request: " + std::string(body.begin(), body.end()));
        case Status::ServerError:
        default:
            throw EngineError("server error: " + std::string(body.begin(), body.end()));
    }
}

PoolHandle RemoteEngine::poolConnect(const std::string& name, bool create) {
    ProfScope prof(profiler_, ProfCategory::Connect);
    Bytes p;
    putU8(p, create ? 1 : 0);
    putString(p, name);
    bool notFound = false;
    try {
        Bytes body = call(static_cast<std::uint8_t>(Op::PoolConnect), std::move(p), false, &notFound);
        if (notFound) {
            throw PoolNotFound("unknown pool '" + name + "'");
        }
        return PoolHandle{PayloadReader(body).u64()};
    } catch (const ContainerNotFound& e) {
        throw PoolNotFound(e.what());
    }
}

void RemoteEngine::poolDisconnect(PoolHandle pool) {
    Bytes p;
    putU64(p, pool.id);
    call(static_cast<std::uint8_t>(Op::PoolDisconnect), std::move(p));
}

ContainerHandle RemoteEngine::contOpen(PoolHandle pool, const std::string& label, bool createIfAbsent) {
    ProfScope prof(profiler_, ProfCategory::Connect);
    Bytes p;
    putU64(p, pool.id);
    putU8(p, createIfAbsent ? 1 : 0);
    putString(p, label);
    Bytes body = call(static_cast<std::uint8_t>(Op::ContOpen), std::move(p));
    return ContainerHandle{PayloadReader(body).u64()};
}

void RemoteEngine::contClose(ContainerHandle cont) {
    Bytes p;
    putU64(p, cont.id);
    call(static_cast<std::uint8_t>(Op::ContClose), std::move(p));
}

Oid RemoteEngine::allocOids(ContainerHandle cont, std::uint64_t count) {
    ProfScope prof(profiler_, ProfCategory::OidAlloc);
    Bytes p;
    putU64(p, cont.id);
    putU64(p, count);
    Bytes body = call(static_cast<std::uint8_t>(Op::AllocOids), std::move(p));
    PayloadReader in(body);
    Oid oid;
    oid.hi = in.u64();
    oid.lo = in.u64();
    return oid;
}

std::uint64_t RemoteEngine::kvPut(ContainerHandle cont, Oid oid, std::string_view key,
                                  std::span<const std::uint8_t> value) {
    ProfScope prof(profiler_, ProfCategory::KvPut);
    if (key.size() > kMaxKeyLength) {
        throw EngineError("kvPut: key exceeds " + std::to_string(kMaxKeyLength) + " bytes");
    }
    Bytes p;
    putU64(p, cont.id);
    putU64(p, oid.hi);
    putU64(p, oid.lo);
    putString(p, key);
    p.insert(p.end(), value.begin(), value.end());
    Bytes body = call(static_cast<std::uint8_t>(Op::KvPut), std::move(p));
    return PayloadReader(body).u64();
}

std::optional<Bytes> RemoteEngine::kvGet(ContainerHandle cont, Oid oid, std::string_view key) {
    ProfScope prof(profiler_, ProfCategory::KvGet);
    Bytes p;
    putU64(p, cont.id);
    putU64(p, oid.hi);
    putU64(p, oid.lo);
    putString(p, key);
    bool notFound = false;
    Bytes body = call(static_cast<std::uint8_t>(Op::KvGet), std::move(p), false, &notFound);
    if (notFound) {
        return std::nullopt;
    }
    return body;
}

std::vector<std::string> RemoteEngine::kvList(ContainerHandle cont, Oid oid) {
    ProfScope prof(profiler_, ProfCategory::Other);
    Bytes p;
    putU64(p, cont.id);
    putU64(p, oid.hi);
    putU64(p, oid.lo);
    Bytes body = call(static_cast<std::uint8_t>(Op::KvList), std::move(p));
    PayloadReader in(body);
    std::uint32_t count = in.u32();
    std::vector<std::string> keys;
    keys.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        keys.push_back(in.string());
    }
    return keys;
}

std::uint64_t RemoteEngine::arrayWrite(ContainerHandle cont, Oid oid, std::uint64_t offset,
                                       std::span<const std::uint8_t> data) {
    ProfScope prof(profiler_, ProfCategory::ArrayWrite);
    Bytes p;
    putU64(p, cont.id);
    putU64(p, oid.hi);
    putU64(p, oid.lo);
    putU64(p, offset);
    p.insert(p.end(), data.begin(), data.end());
    Bytes body = call(static_cast<std::uint8_t>(Op::ArrayWrite), std::move(p));
    return PayloadReader(body).u64();
}

Bytes RemoteEngine::arrayRead(ContainerHandle cont, Oid oid, std::uint64_t offset, std::uint64_t length) {
    ProfScope prof(profiler_, ProfCategory::ArrayRead);
    Bytes p;
    putU64(p, cont.id);
    putU64(p, oid.hi);
    putU64(p, oid.lo);
    putU64(p, offset);
    putU64(p, length);
    return call(static_cast<std::uint8_t>(Op::ArrayRead), std::move(p));
}

std::uint64_t RemoteEngine::arrayGetSize(ContainerHandle cont, Oid oid) {
    ProfScope prof(profiler_, ProfCategory::Other);
    Bytes p;
    putU64(p, cont.id);
    putU64(p, oid.hi);
    putU64(p, oid.lo);
    Bytes body = call(static_cast<std::uint8_t>(Op::ArrayGetSize), std::move(p));
    return PayloadReader(body).u64();
}

void RemoteEngine::ping() {
    call(static_cast<std::uint8_t>(Op::Ping), {});
}

void RemoteEngine::shutdownServer() {
    call(static_cast<std::uint8_t>(Op::Shutdown), {});
}

}  // namespace fdb
