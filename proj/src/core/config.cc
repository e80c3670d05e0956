/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/config.h"

#include <fstream>
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

bool parseSwitch(const std::string& value, const std::string& key) {
    if (value == "on" || value == "true" || value == "1") {
        return true;
    }
    if (value == "off" || value == "false" || value == "0") {
        return false;
    }
    throw ConfigError("config key '" + key + "' expects on/off, got '" + value + "'");
}

}  // namespace

Config Config::parse(std::string_view text) {
    Config cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config syntax error at line " + std::to_string(lineno));
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key == "backend") {
            if (value != "kv" && value != "file") {
                throw ConfigError("backend must be 'kv' or 'file', got '" + value + "'");
            }
            cfg.backend = value;
        } else if (key == "storage_root") {
            cfg.storageRoot = value;
        } else if (key == "schema") {
            cfg.schemaPath = value;
        } else if (key == "pool") {
            cfg.pool = value;
        } else if (key == "root_container") {
            cfg.rootContainer = value;
        } else if (key == "oid_batch") {
            cfg.oidBatch = std::stoull(value);
        } else if (key == "engine") {
            cfg.engine = value;
        } else if (key == "axis_pruning") {
            cfg.axisPruning = parseSwitch(value, key);
        } else if (key == "sync") {
            cfg.syncCommits = parseSwitch(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

}  // namespace fdb
