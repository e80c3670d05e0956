/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fdb {

class KeyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An ordered keyword -> value mapping identifying a field (or one of the
/// three key levels derived from it). Keyword order is significant and
/// preserved. Keywords and values must be non-empty and must not contain
/// ':' or '='.
class Key {
public:
    Key() = default;
    explicit Key(std::vector<std::pair<std::string, std::string>> pairs);

    /// Appends a pair, enforcing the Key invariants.
    void set(std::string keyword, std::string value);

    std::optional<std::string_view> get(std::string_view keyword) const;
    bool has(std::string_view keyword) const { return get(keyword).has_value(); }

    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }

    const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

    auto begin() const { return pairs_.begin(); }
    auto end() const { return pairs_.end(); }

    /// Values joined with ':' in key order. Invertible given the keyword list.
    std::string valuesToString() const;

    /// Rebuilds a Key from a stringified value list and its keyword list.
    static Key fromString(std::string_view values, const std::vector<std::string>& keywords);

    /// Canonical "k1=v1,k2=v2" form, order-sensitive. For diagnostics and
    /// fingerprinting, not for storage.
    std::string toString() const;

    bool operator==(const Key& other) const { return pairs_ == other.pairs_; }

private:
    std::vector<std::pair<std::string, std::string>> pairs_;
};

/// A partial request: keyword -> set of accepted values. A keyword that is
/// absent matches anything.
class Request {
public:
    Request() = default;

    void set(std::string keyword, std::set<std::string> values);

    const std::map<std::string, std::set<std::string>>& spans() const { return spans_; }
    bool empty() const { return spans_.empty(); }

    /// True iff for every requested keyword that also occurs in the key,
    /// the key's value belongs to the requested span.
    bool matches(const Key& key) const;

private:
    std::map<std::string, std::set<std::string>> spans_;
};

}  // namespace fdb
