/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/schema.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace fdb {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Schema::Schema(std::vector<std::string> datasetKeywords, std::vector<std::string> collocationKeywords,
               std::vector<std::string> elementKeywords) :
    dataset_(std::move(datasetKeywords)), collocation_(std::move(collocationKeywords)),
    element_(std::move(elementKeywords)) {

    if (dataset_.empty() || collocation_.empty() || element_.empty()) {
        throw SchemaError("each schema level must declare at least one keyword");
    }
    std::set<std::string> seen;
    for (const auto* level : {&dataset_, &collocation_, &element_}) {
        for (const auto& kw : *level) {
            if (kw.empty()) {
                throw SchemaError("empty keyword");
            }
            if (!seen.insert(kw).second) {
                throw SchemaError("duplicate keyword '" + kw + "' across schema levels");
            }
        }
    }
}

Schema Schema::parse(std::string_view text) {
    std::vector<std::string> levels[3];
    bool found[3] = {false, false, false};
    static const std::string names[3] = {"dataset", "collocation", "element"};

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        std::size_t colon = t.find(':');
        if (colon == std::string::npos) {
            throw SchemaError("schema syntax error at line " + std::to_string(lineno) + ": expected 'level: k1, k2, ...'");
        }
        std::string level = trim(t.substr(0, colon));
        int idx = -1;
        for (int i = 0; i < 3; ++i) {
            if (level == names[i]) {
                idx = i;
            }
        }
        if (idx < 0) {
            throw SchemaError("schema syntax error at line " + std::to_string(lineno) + ": unknown level '" + level + "'");
        }
        if (found[idx]) {
            throw SchemaError("schema syntax error at line " + std::to_string(lineno) + ": level '" + level + "' declared twice");
        }
        found[idx] = true;

        std::string rest = t.substr(colon + 1);
        std::size_t start = 0;
        while (true) {
            std::size_t comma = rest.find(',', start);
            std::string kw = trim(rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (kw.empty()) {
                throw SchemaError("schema syntax error at line " + std::to_string(lineno) + ": empty keyword at column " +
                                  std::to_string(start + colon + 2));
            }
            levels[idx].push_back(std::move(kw));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
    }
    for (int i = 0; i < 3; ++i) {
        if (!found[i]) {
            throw SchemaError("schema is missing the '" + names[i] + "' level");
        }
    }
    return Schema(std::move(levels[0]), std::move(levels[1]), std::move(levels[2]));
}

Schema Schema::parseFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open schema file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

Key Schema::extract(const Key& full, const std::vector<std::string>& keywords) const {
    Key out;
    for (const auto& kw : keywords) {
        auto v = full.get(kw);
        if (!v) {
            throw SchemaError("identifier is missing keyword '" + kw + "'");
        }
        out.set(kw, std::string(*v));
    }
    return out;
}

std::tuple<Key, Key, Key> Schema::split(const Key& full) const {
    std::size_t expected = dataset_.size() + collocation_.size() + element_.size();
    if (full.size() != expected) {
        // Either a keyword is missing (reported by extract below) or the
        // identifier carries a keyword the schema does not know.
        for (const auto& [kw, v] : full) {
            auto known = [&](const std::vector<std::string>& lvl) {
                return std::find(lvl.begin(), lvl.end(), kw) != lvl.end();
            };
            if (!known(dataset_) && !known(collocation_) && !known(element_)) {
                throw SchemaError("identifier carries unknown keyword '" + kw + "'");
            }
        }
    }
    Key ds = extract(full, dataset_);
    Key coll = extract(full, collocation_);
    Key el = extract(full, element_);
    if (full.size() != expected) {
        throw SchemaError("identifier carries a duplicate or unknown keyword");
    }
    return {std::move(ds), std::move(coll), std::move(el)};
}

Key Schema::merge(std::string_view dataset, std::string_view collocation, std::string_view element) const {
    Key full;
    for (const auto& [k, v] : Key::fromString(dataset, dataset_)) {
        full.set(k, v);
    }
    for (const auto& [k, v] : Key::fromString(collocation, collocation_)) {
        full.set(k, v);
    }
    for (const auto& [k, v] : Key::fromString(element, element_)) {
        full.set(k, v);
    }
    return full;
}

std::string Schema::fingerprint() const {
    std::string out = "d:";
    for (const auto& kw : dataset_) {
        out += kw + ",";
    }
    out += ";c:";
    for (const auto& kw : collocation_) {
        out += kw + ",";
    }
    out += ";e:";
    for (const auto& kw : element_) {
        out += kw + ",";
    }
    return out;
}

}  // namespace fdb
