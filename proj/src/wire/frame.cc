/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/wire.h"

#include <cstring>

namespace fdb::wire {

void putU8(Bytes& out, std::uint8_t v) {
    out.push_back(v);
}

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

Bytes encodeFrame(const Frame& frame) {
    Bytes out;
    out.reserve(kFrameHeaderBytes + frame.payload.size());
    putU32(out, static_cast<std::uint32_t>(1 + 8 + frame.payload.size()));
    putU8(out, frame.opcode);
    putU64(out, frame.requestId);
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

DecodeResult decodeFrame(std::span<const std::uint8_t> in, Frame& out, std::size_t& consumed) {
    if (in.size() < 4) {
        return DecodeResult::NeedMore;
    }
    std::uint32_t length = 0;
    for (int i = 0; i < 4; ++i) {
        length |= static_cast<std::uint32_t>(in[i]) << (8 * i);
    }
    if (length < 1 + 8 || length > kMaxFrameLength) {
        return DecodeResult::Malformed;
    }
    if (in.size() < 4 + static_cast<std::size_t>(length)) {
        return DecodeResult::NeedMore;
    }
    out.opcode = in[4];
    out.requestId = 0;
    for (int i = 0; i < 8; ++i) {
        out.requestId |= static_cast<std::uint64_t>(in[5 + i]) << (8 * i);
    }
    out.payload.assign(in.begin() + kFrameHeaderBytes, in.begin() + 4 + length);
    consumed = 4 + length;
    return DecodeResult::Ok;
}

void PayloadReader::need(std::size_t n) {
    if (data_.size() - pos_ < n) {
        throw PayloadError("truncated payload");
    }
}

std::uint8_t PayloadReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint32_t PayloadReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
}

std::uint64_t PayloadReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += 8;
    return v;
}

std::string PayloadReader::string() {
    std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data()) + pos_, n);
    pos_ += n;
    return s;
}

Bytes PayloadReader::rest() {
    Bytes b(data_.begin() + pos_, data_.end());
    pos_ = data_.size();
    return b;
}

}  // namespace fdb::wire
