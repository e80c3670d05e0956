/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/wire_server.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "fdb/wire.h"

namespace fdb::wire {

namespace {

void sendAll(int fd, const Bytes& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw EngineError(std::string("send failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
}

Bytes statusPayload(Status status, std::string_view message = {}) {
    Bytes out;
    putU8(out, static_cast<std::uint8_t>(status));
    out.insert(out.end(), message.begin(), message.end());
    return out;
}

}  // namespace

Server::Server(std::filesystem::path storageRoot, Options options) :
    storageRoot_(std::move(storageRoot)), options_(std::move(options)) {}

Server::~Server() {
    stop();
}

void Server::start() {
    listenFd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (listenFd_ < 0) {
        throw EngineError(std::string("socket failed: ") + std::strerror(errno));
    }
    int one = 1;
    ::setsockopt(listenFd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(options_.port);
    if (::inet_pton(AF_INET, options_.bindAddress.c_str(), &addr.sin_addr) != 1) {
        throw EngineError("invalid bind address '" + options_.bindAddress + "'");
    }
    if (::bind(listenFd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw EngineError("cannot bind " + options_.bindAddress + ":" + std::to_string(options_.port) +
                          ": " + std::strerror(errno));
    }
    if (::listen(listenFd_, 128) != 0) {
        throw EngineError(std::string("listen failed: ") + std::strerror(errno));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listenFd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);

    acceptThread_ = std::thread([this] { acceptLoop(); });
}

void Server::wait() {
    {
        std::unique_lock lk(waitMutex_);
        waitCv_.wait(lk, [this] { return stopping_.load(); });
    }
    stop();
}

void Server::requestStop() {
    stopping_.store(true);
    if (listenFd_ >= 0) {
        ::shutdown(listenFd_, SHUT_RDWR);
    }
    waitCv_.notify_all();
}

void Server::stop() {
    requestStop();
    std::call_once(stopOnce_, [this] {
        if (acceptThread_.joinable()) {
            acceptThread_.join();
        }
        if (listenFd_ >= 0) {
            ::close(listenFd_);
            listenFd_ = -1;
        }
        std::vector<std::thread> conns;
        {
            std::lock_guard lk(mutex_);
            for (int fd : connectionFds_) {
                ::shutdown(fd, SHUT_RDWR);
            }
            conns.swap(connections_);
        }
        for (auto& t : conns) {
            t.join();
        }
    });
}

void Server::acceptLoop() {
    while (!stopping_.load()) {
        int fd = ::accept4(listenFd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) {
            if (errno == EINTR) {
                continue;
            }
            break;  // listener closed
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        std::lock_guard lk(mutex_);
        connectionFds_.push_back(fd);
        connections_.emplace_back([this, fd] { serveConnection(fd); });
    }
}

void Server::serveConnection(int fd) {
    // Per-connection engine instance: container state is shared process-wide
    // inside EmbeddedEngine, handle ids are private to this connection.
    EmbeddedEngine engine(storageRoot_, options_.engine);

    Bytes buffer;
    std::vector<std::uint8_t> chunk(64 * 1024);
    bool closing = false;

    while (!closing && !stopping_.load()) {
        Frame req;
        std::size_t consumed = 0;
        DecodeResult dr = decodeFrame(buffer, req, consumed);
        if (dr == DecodeResult::NeedMore) {
            ssize_t n = ::recv(fd, chunk.data(), chunk.size(), 0);
            if (n <= 0) {
                if (n < 0 && errno == EINTR) {
                    continue;
                }
                break;
            }
            buffer.insert(buffer.end(), chunk.begin(), chunk.begin() + n);
            continue;
        }
        if (dr == DecodeResult::Malformed) {
            Frame err{req.opcode, req.requestId, statusPayload(Status::BadRequest, "malformed frame")};
            try {
                sendAll(fd, encodeFrame(err));
            } catch (const EngineError&) {
            }
            break;
        }
        buffer.erase(buffer.begin(), buffer.begin() + consumed);

        Frame resp;
        resp.opcode = req.opcode;
        resp.requestId = req.requestId;
        try {
            PayloadReader in(req.payload);
            Bytes out;
            switch (static_cast<Op>(req.opcode)) {
                case Op::Ping:
                    out = statusPayload(Status::Ok);
                    break;
                case Op::Shutdown:
                    out = statusPayload(Status::Ok);
                    closing = true;
                    break;
                case Op::PoolConnect: {
                    bool create = in.u8() != 0;
                    std::string name = in.string();
                    PoolHandle h = engine.poolConnect(name, create);
                    out = statusPayload(Status::Ok);
                    putU64(out, h.id);
                    break;
                }
                case Op::PoolDisconnect: {
                    engine.poolDisconnect(PoolHandle{in.u64()});
                    out = statusPayload(Status::Ok);
                    break;
                }
                case Op::ContOpen: {
                    PoolHandle pool{in.u64()};
                    bool create = in.u8() != 0;
                    std::string label = in.string();
                    ContainerHandle h = engine.contOpen(pool, label, create);
                    out = statusPayload(Status::Ok);
                    putU64(out, h.id);
                    break;
                }
                case Op::ContClose: {
                    engine.contClose(ContainerHandle{in.u64()});
                    out = statusPayload(Status::Ok);
                    break;
                }
                case Op::AllocOids: {
                    ContainerHandle cont{in.u64()};
                    std::uint64_t count = in.u64();
                    Oid first = engine.allocOids(cont, count);
                    out = statusPayload(Status::Ok);
                    putU64(out, first.hi);
                    putU64(out, first.lo);
                    break;
                }
                case Op::KvPut: {
                    ContainerHandle cont{in.u64()};
                    Oid oid{in.u64(), in.u64()};
                    std::string key = in.string();
                    Bytes value = in.rest();
                    std::uint64_t seq = engine.kvPut(cont, oid, key, value);
                    out = statusPayload(Status::Ok);
                    putU64(out, seq);
                    break;
                }
                case Op::KvGet: {
                    ContainerHandle cont{in.u64()};
                    Oid oid{in.u64(), in.u64()};
                    std::string key = in.string();
                    auto value = engine.kvGet(cont, oid, key);
                    if (!value) {
                        out = statusPayload(Status::NotFound);
                    } else {
                        out = statusPayload(Status::Ok);
                        out.insert(out.end(), value->begin(), value->end());
                    }
                    break;
                }
                case Op::KvList: {
                    ContainerHandle cont{in.u64()};
                    Oid oid{in.u64(), in.u64()};
                    auto keys = engine.kvList(cont, oid);
                    out = statusPayload(Status::Ok);
                    putU32(out, static_cast<std::uint32_t>(keys.size()));
                    for (const auto& k : keys) {
                        putString(out, k);
                    }
                    break;
                }
                case Op::ArrayWrite: {
                    ContainerHandle cont{in.u64()};
                    Oid oid{in.u64(), in.u64()};
                    std::uint64_t offset = in.u64();
                    Bytes data = in.rest();
                    std::uint64_t seq = engine.arrayWrite(cont, oid, offset, data);
                    out = statusPayload(Status::Ok);
                    putU64(out, seq);
                    break;
                }
                case Op::ArrayRead: {
                    ContainerHandle cont{in.u64()};
                    Oid oid{in.u64(), in.u64()};
                    std::uint64_t offset = in.u64();
                    std::uint64_t length = in.u64();
                    Bytes data = engine.arrayRead(cont, oid, offset, length);
                    out = statusPayload(Status::Ok);
                    out.insert(out.end(), data.begin(), data.end());
                    break;
                }
                case Op::ArrayGetSize: {
                    ContainerHandle cont{in.u64()};
                    Oid oid{in.u64(), in.u64()};
                    out = statusPayload(Status::Ok);
                    putU64(out, engine.arrayGetSize(cont, oid));
                    break;
                }
                default:
                    out = statusPayload(Status::BadRequest, "unknown opcode");
                    break;
            }
            resp.payload = std::move(out);
        } catch (const PayloadError& e) {
            resp.payload = statusPayload(Status::BadRequest, e.what());
        } catch (const PoolNotFound& e) {
            resp.payload = statusPayload(Status::NotFound, e.what());
        } catch (const ContainerNotFound& e) {
            resp.payload = statusPayload(Status::NotFound, e.what());
        } catch (const std::exception& e) {
            resp.payload = statusPayload(Status::ServerError, e.what());
        }
        try {
            sendAll(fd, encodeFrame(resp));
        } catch (const EngineError&) {
            break;
        }
        if (closing) {
            requestStop();
        }
    }
    ::close(fd);
}

}  // namespace fdb::wire
