/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fdb/fdb.h"
#include "fdb/hammer.h"

namespace {

fdb::Schema loadSchema(const fdb::Config& config) {
    if (config.schemaPath.empty()) return fdb::Schema::parse(fdb::hammer::defaultSchemaText());
    return fdb::Schema::parseFile(config.schemaPath);
}

fdb::Key parseKey(const std::vector<std::string>& pairs) {
    fdb::Key key;
    for (const auto& p : pairs) {
        std::size_t eq = p.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected keyword=value, got '" + p + "'");
        key.set(p.substr(0, eq), p.substr(eq + 1));
    }
    return key;
}

fdb::Request parseRequest(const std::vector<std::string>& pairs) {
    fdb::Request request;
    for (const auto& p : pairs) {
        std::size_t eq = p.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected keyword=value[,value...], got '" + p + "'");
        std::set<std::string> values;
        std::istringstream vs(p.substr(eq + 1));
        std::string v;
        while (std::getline(vs, v, ',')) values.insert(v);
        request.set(p.substr(0, eq), std::move(values));
    }
    return request;
}

fdb::Bytes readAll(std::istream& in) {
    fdb::Bytes data;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        data.insert(data.end(), buf, buf + in.gcount());
    return data;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metadata-driven field store client"};
    app.require_subcommand(1);

    std::string configPath;
    app.add_option("--config", configPath, "configuration file")->required();

    std::vector<std::string> putKey, getKey, listKey;
    std::string dataFile, outputFile;

    auto* put = app.add_subcommand("put", "archive one field");
    put->add_option("key", putKey, "keyword=value pairs (full identifier)")->required();
    put->add_option("--data", dataFile, "payload file (default: stdin)");

    auto* get = app.add_subcommand("get", "retrieve one field");
    get->add_option("key", getKey, "keyword=value pairs (full identifier)")->required();
    get->add_option("--output", outputFile, "payload destination (default: stdout)");

    auto* list = app.add_subcommand("list", "list fields matching a request");
    list->add_option("key", listKey, "keyword=value[,value...] constraints");

    CLI11_PARSE(app, argc, argv);

    try {
        fdb::Config config = fdb::Config::load(configPath);
        fdb::Schema schema = loadSchema(config);
        auto session = fdb::openFdb(config, schema);

        if (put->parsed()) {
            fdb::Bytes data;
            if (dataFile.empty()) {
                data = readAll(std::cin);
            } else {
                std::ifstream in(dataFile, std::ios::binary);
                if (!in) throw std::runtime_error("cannot open " + dataFile);
                data = readAll(in);
            }
            session->archive(parseKey(putKey), data);
            session->flush();
        } else if (get->parsed()) {
            auto data = session->retrieve(parseKey(getKey));
            if (!data) {
                std::cerr << "not found\n";
                return 1;
            }
            if (outputFile.empty()) {
                std::cout.write(reinterpret_cast<const char*>(data->data()),
                                std::streamsize(data->size()));
            } else {
                std::ofstream out(outputFile, std::ios::binary);
                out.write(reinterpret_cast<const char*>(data->data()),
                          std::streamsize(data->size()));
            }
        } else if (list->parsed()) {
            for (const auto& [key, loc] : session->list(parseRequest(listKey)))
                std::cout << key.toString() << " " << loc.toUri() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
