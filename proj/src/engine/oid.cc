/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <charconv>

#include "fdb/engine.h"

namespace fdb {

std::string Oid::toString() const {
    return std::to_string(hi) + "." + std::to_string(lo);
}

Oid Oid::fromString(std::string_view s) {
    std::size_t dot = s.find('.');
    if (dot == std::string_view::npos) {
        throw EngineError("malformed OID '" + std::string(s) + "'");
    }
    Oid oid;
    auto parse = [&](std::string_view part, std::uint64_t& out) {
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc() || ptr != part.data() + part.size()) {
            throw EngineError("malformed OID '" + std::string(s) + "'");
        }
    };
    parse(s.substr(0, dot), oid.hi);
    parse(s.substr(dot + 1), oid.lo);
    return oid;
}

const char* profCategoryName(ProfCategory cat) {
    switch (cat) {
        case ProfCategory::ArrayWrite:
            return "array_write";
        case ProfCategory::ArrayRead:
            return "array_read";
        case ProfCategory::KvPut:
            return "kv_put";
        case ProfCategory::KvGet:
            return "kv_get";
        case ProfCategory::Connect:
            return "connect";
        case ProfCategory::OidAlloc:
            return "oid_alloc";
        case ProfCategory::Other:
            return "other";
    }
    return "unknown";
}

}  // namespace fdb
