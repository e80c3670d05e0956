/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace fdb::util {

std::uint32_t crc32(std::span<const std::uint8_t> data);
std::uint32_t crc32(const void* data, std::size_t len);

/// 16 random hex characters, suitable for per-process unique file names.
std::string makeUuid();

/// Monotonic clock, nanoseconds.
std::uint64_t monotonicNanos();

/// Escapes '/' and '%' so a stringified key can name a directory or
/// container.
std::string pathEncode(std::string_view s);

/// 64-bit FNV-1a over a string, used to seed deterministic payloads.
std::uint64_t hash64(std::string_view s);

/// splitmix64 PRNG step.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace fdb::util
