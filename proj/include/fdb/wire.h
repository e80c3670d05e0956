/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "fdb/engine.h"

namespace fdb::wire {

/// Opcode table. Requests and their responses carry the same opcode; the
/// request id is echoed back so pipelined responses can be matched.
enum class Op : std::uint8_t {
    Ping = 0,
    Shutdown = 1,
    PoolConnect = 2,
    PoolDisconnect = 3,
    ContOpen = 4,
    ContClose = 5,
    AllocOids = 6,
    KvPut = 7,
    KvGet = 8,
    KvList = 9,
    ArrayWrite = 10,
    ArrayRead = 11,
    ArrayGetSize = 12,
};

/// First payload byte of every response.
enum class Status : std::uint8_t {
    Ok = 0,
    NotFound = 1,  // success-shaped: an absent key or container is not an error
    BadRequest = 2,
    ServerError = 3,
};

struct Frame {
    std::uint8_t opcode = 0;
    std::uint64_t requestId = 0;
    Bytes payload;

    bool operator==(const Frame&) const = default;
};

/// On the wire: u32 length, u8 opcode, u64 request id, payload bytes; all
/// integers little-endian. length covers opcode + request id + payload.
constexpr std::size_t kFrameHeaderBytes = 4 + 1 + 8;
constexpr std::uint32_t kMaxFrameLength = 16 * 1024 * 1024 + 64;

enum class DecodeResult {
    Ok,
    NeedMore,   // input is a valid prefix; read more bytes
    Malformed,  // length field out of bounds
};

Bytes encodeFrame(const Frame& frame);

/// Decodes one frame from the front of `in`. On Ok, `consumed` is the number
/// of bytes the frame occupied.
DecodeResult decodeFrame(std::span<const std::uint8_t> in, Frame& out, std::size_t& consumed);

// Little-endian payload building blocks shared by client and server.
void putU8(Bytes& out, std::uint8_t v);
void putU32(Bytes& out, std::uint32_t v);
void putU64(Bytes& out, std::uint64_t v);
void putString(Bytes& out, std::string_view s);  // u32 length + bytes

class PayloadReader {
public:
    explicit PayloadReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::string string();  // u32 length + bytes
    Bytes rest();
    bool atEnd() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n);

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

class PayloadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fdb::wire
