/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "util.h"

#include <zlib.h>

#include <chrono>
#include <random>
#include <string_view>

namespace fdb::util {

std::uint32_t crc32(std::span<const std::uint8_t> data) {
    return crc32(data.data(), data.size());
}

std::uint32_t crc32(const void* data, std::size_t len) {
    return static_cast<std::uint32_t>(::crc32_z(0, static_cast<const Bytef*>(data), len));
}

std::string makeUuid() {
    static thread_local std::mt19937_64 rng{std::random_device{}() ^
                                            static_cast<std::uint64_t>(monotonicNanos())};
    static const char hex[] = "0123456789abcdef";
    std::uint64_t a = rng();
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) {
        out[i] = hex[(a >> (i * 4)) & 0xf];
    }
    return out;
}

std::uint64_t monotonicNanos() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

std::string pathEncode(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '/') {
            out += "%2F";
        } else if (c == '%') {
            out += "%25";
        } else {
            out += c;
        }
    }
    return out;
}

std::uint64_t hash64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace fdb::util
