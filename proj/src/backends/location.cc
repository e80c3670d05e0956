/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/location.h"

#include <charconv>

namespace fdb {

namespace {

std::uint64_t parseU64(std::string_view s, std::string_view uri) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw LocationError("malformed location URI '" + std::string(uri) + "'");
    }
    return v;
}

}  // namespace

std::string FieldLocation::toUri() const {
    std::string out;
    if (scheme == Scheme::Kv) {
        out = "kv://" + pool + "/" + container + "/" + oid.toString();
    } else {
        out = "file://" + path;
    }
    out += "?off=" + std::to_string(offset) + "&len=" + std::to_string(length);
    return out;
}

FieldLocation FieldLocation::fromUri(std::string_view uri) {
    FieldLocation loc;
    std::string_view rest;
    if (uri.starts_with("kv://")) {
        loc.scheme = Scheme::Kv;
        rest = uri.substr(5);
    } else if (uri.starts_with("file://")) {
        loc.scheme = Scheme::File;
        rest = uri.substr(7);
    } else {
        throw LocationError("unknown location scheme in '" + std::string(uri) + "'");
    }

    std::size_t q = rest.find('?');
    if (q == std::string_view::npos) {
        throw LocationError("location URI missing query in '" + std::string(uri) + "'");
    }
    std::string_view body = rest.substr(0, q);
    std::string_view query = rest.substr(q + 1);

    if (loc.scheme == Scheme::Kv) {
        std::size_t s1 = body.find('/');
        std::size_t s2 = body.rfind('/');
        if (s1 == std::string_view::npos || s2 == s1) {
            throw LocationError("malformed kv location '" + std::string(uri) + "'");
        }
        loc.pool = std::string(body.substr(0, s1));
        loc.container = std::string(body.substr(s1 + 1, s2 - s1 - 1));
        loc.oid = Oid::fromString(body.substr(s2 + 1));
    } else {
        loc.path = std::string(body);
    }

    bool haveOff = false;
    bool haveLen = false;
    while (!query.empty()) {
        std::size_t amp = query.find('&');
        std::string_view param = query.substr(0, amp);
        if (param.starts_with("off=")) {
            loc.offset = parseU64(param.substr(4), uri);
            haveOff = true;
        } else if (param.starts_with("len=")) {
            loc.length = parseU64(param.substr(4), uri);
            haveLen = true;
        } else {
            throw LocationError("unknown location parameter in '" + std::string(uri) + "'");
        }
        if (amp == std::string_view::npos) {
            break;
        }
        query = query.substr(amp + 1);
    }
    if (!haveOff || !haveLen) {
        throw LocationError("location URI missing off/len in '" + std::string(uri) + "'");
    }
    return loc;
}

}  // namespace fdb
