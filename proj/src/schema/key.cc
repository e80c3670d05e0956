/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/key.h"

#include <sstream>

namespace fdb {

namespace {

void checkToken(const std::string& tok, const char* what) {
    if (tok.empty()) {
        throw KeyError(std::string(what) + " must be non-empty");
    }
    if (tok.find(':') != std::string::npos || tok.find('=') != std::string::npos) {
        throw KeyError(std::string(what) + " '" + tok + "' contains a reserved character (':' or '=')");
    }
}

}  // namespace

Key::Key(std::vector<std::pair<std::string, std::string>> pairs) {
    for (auto& [k, v] : pairs) {
        set(std::move(k), std::move(v));
    }
}

void Key::set(std::string keyword, std::string value) {
    checkToken(keyword, "keyword");
    checkToken(value, "value");
    if (has(keyword)) {
        throw KeyError("duplicate keyword '" + keyword + "'");
    }
    pairs_.emplace_back(std::move(keyword), std::move(value));
}

std::optional<std::string_view> Key::get(std::string_view keyword) const {
    for (const auto& [k, v] : pairs_) {
        if (k == keyword) {
            return std::string_view(v);
        }
    }
    return std::nullopt;
}

std::string Key::valuesToString() const {
    if (pairs_.empty()) {
        throw KeyError("cannot stringify an empty key");
    }
    std::string out;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (i) {
            out += ':';
        }
        out += pairs_[i].second;
    }
    return out;
}

Key Key::fromString(std::string_view values, const std::vector<std::string>& keywords) {
    Key key;
    std::size_t start = 0;
    std::size_t idx = 0;
    while (idx < keywords.size()) {
        std::size_t end = (idx + 1 == keywords.size()) ? values.size() : values.find(':', start);
        if (end == std::string_view::npos) {
            throw KeyError("stringified key '" + std::string(values) + "' has fewer values than keywords");
        }
        key.set(keywords[idx], std::string(values.substr(start, end - start)));
        start = end + 1;
        ++idx;
    }
    return key;
}

std::string Key::toString() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (i) {
            out << ',';
        }
        out << pairs_[i].first << '=' << pairs_[i].second;
    }
    return out.str();
}

void Request::set(std::string keyword, std::set<std::string> values) {
    if (values.empty()) {
        throw KeyError("request span for '" + keyword + "' must be non-empty");
    }
    spans_[std::move(keyword)] = std::move(values);
}

bool Request::matches(const Key& key) const {
    for (const auto& [keyword, span] : spans_) {
        auto value = key.get(keyword);
        if (value && !span.contains(std::string(*value))) {
            return false;
        }
    }
    return true;
}

}  // namespace fdb
