/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "fdb/key.h"

namespace fdb {

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The three-level split rule turning a full field identifier into a
/// dataset key, a collocation key and an element key.
///
/// Parsed from a three-line definition:
///
///     dataset: class, stream, expver, date, time
///     collocation: type, levtype, number, levelist
///     element: step, param
///
/// '#' begins a comment line; whitespace around commas is ignored. The
/// three keyword lists must be pairwise disjoint and each non-empty.
class Schema {
public:
    Schema(std::vector<std::string> datasetKeywords, std::vector<std::string> collocationKeywords,
           std::vector<std::string> elementKeywords);

    static Schema parse(std::string_view text);
    static Schema parseFile(const std::string& path);

    const std::vector<std::string>& datasetKeywords() const { return dataset_; }
    const std::vector<std::string>& collocationKeywords() const { return collocation_; }
    const std::vector<std::string>& elementKeywords() const { return element_; }

    /// Splits a full identifier, which must carry exactly the union of the
    /// schema keywords (in any order), into the three level keys, each in
    /// schema keyword order.
    std::tuple<Key, Key, Key> split(const Key& full) const;

    /// Rebuilds a full identifier from the three stringified level keys.
    Key merge(std::string_view dataset, std::string_view collocation, std::string_view element) const;

    /// Stable digest of the keyword lists; two sessions may share a
    /// catalogue only when fingerprints agree.
    std::string fingerprint() const;

    /// Projects a full identifier onto one keyword list, in list order.
    Key extract(const Key& full, const std::vector<std::string>& keywords) const;

private:
    std::vector<std::string> dataset_;
    std::vector<std::string> collocation_;
    std::vector<std::string> element_;
};

}  // namespace fdb
