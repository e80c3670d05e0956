/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "fdb/hammer.h"

namespace fs = std::filesystem;
using namespace fdb;
using namespace fdb::hammer;

namespace {

Schema loadSchema(const Config& config) {
    if (config.schemaPath.empty()) return Schema::parse(defaultSchemaText());
    return Schema::parseFile(config.schemaPath);
}

std::string selfExe() {
    char buf[4096];
    ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (n <= 0) throw std::runtime_error("cannot resolve /proc/self/exe");
    buf[n] = '\0';
    return buf;
}

void writeRecord(const std::string& path, const BenchRecord& record) {
    std::ofstream out(path);
    out << record.toJsonLine() << "\n";
}

/// Averages per-group metrics over repeated runs; counts must agree.
std::vector<Summary> averageRepeats(const std::vector<std::vector<Summary>>& repeats) {
    std::map<std::string, Summary> acc;
    std::map<std::string, int> seen;
    std::vector<std::string> order;
    for (const auto& run : repeats) {
        for (const auto& s : run) {
            std::string key = s.backend + "/" + s.pattern + "/" + s.phase + "/" + s.role + "/" +
                              std::to_string(s.processes);
            auto [it, fresh] = acc.emplace(key, s);
            if (fresh) {
                order.push_back(key);
            } else {
                it->second.seconds += s.seconds;
                it->second.bandwidthBytesPerSec += s.bandwidthBytesPerSec;
                it->second.valid = it->second.valid && s.valid;
                for (int c = 0; c < kProfCategories; ++c) {
                    it->second.categoryNanos[c] += s.categoryNanos[c];
                    it->second.categoryOps[c] += s.categoryOps[c];
                }
            }
            seen[key] += 1;
        }
    }
    std::vector<Summary> out;
    for (const auto& key : order) {
        Summary s = acc[key];
        int n = seen[key];
        s.seconds /= n;
        s.bandwidthBytesPerSec /= n;
        for (int c = 0; c < kProfCategories; ++c) {
            s.categoryNanos[c] /= n;
            s.categoryOps[c] /= n;
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"field store benchmark"};
    app.require_subcommand(1);

    // worker: one process's share of a run, spawned by `run`.
    auto* worker = app.add_subcommand("worker", "run a single benchmark worker");
    std::string wConfig, wMode = "archive", wRole = "writer", wPhase = "main", wOutput;
    std::string wReadMembers;
    std::vector<std::string> wSets;
    RunSpec wSpec;
    bool wTransposed = false;
    worker->add_option("--config", wConfig)->required();
    worker->add_option("--mode", wMode);
    worker->add_option("--nsteps", wSpec.nsteps);
    worker->add_option("--nparams", wSpec.nparams);
    worker->add_option("--nlevels", wSpec.nlevels);
    worker->add_option("--member", wSpec.member);
    worker->add_option("--field-size", wSpec.fieldSize);
    worker->add_option("--generation", wSpec.generation);
    worker->add_option("--process-id", wSpec.processId);
    worker->add_option("--role", wRole);
    worker->add_option("--phase", wPhase);
    worker->add_option("--read-members", wReadMembers, "comma-separated member list");
    worker->add_flag("--transposed", wTransposed);
    worker->add_option("--set", wSets, "keyword=value override");
    worker->add_option("--output", wOutput, "record file (default: stdout)");

    // run: orchestrate workers, aggregate, and report.
    auto* run = app.add_subcommand("run", "orchestrate a benchmark and report");
    std::string rConfig, rBackend, rPattern = "no_contention", rOutputDir = "hammer-out";
    int rProcesses = 8, rReaders = -1, rRepeats = 3;
    bool rOverwrite = false, rTransposed = false;
    RunSpec rSpec;
    run->add_option("--config", rConfig)->required();
    run->add_option("--backend", rBackend, "override config backend (kv | file)");
    run->add_option("--pattern", rPattern, "no_contention | contention");
    run->add_option("--processes", rProcesses, "writer process count");
    run->add_option("--readers", rReaders, "reader process count (default: writers)");
    run->add_option("--nsteps", rSpec.nsteps);
    run->add_option("--nparams", rSpec.nparams);
    run->add_option("--nlevels", rSpec.nlevels);
    run->add_option("--field-size", rSpec.fieldSize);
    run->add_option("--repeats", rRepeats);
    run->add_flag("--overwrite", rOverwrite, "contention writers overwrite prepopulated fields");
    run->add_flag("--transposed", rTransposed, "readers scan steps across members");
    run->add_option("--output-dir", rOutputDir);

    // aggregate: turn an existing record directory into CSV and SVG.
    auto* agg = app.add_subcommand("aggregate", "aggregate worker records");
    std::string aDir, aBackend = "kv", aPattern = "no_contention", aOutputDir;
    agg->add_option("--records-dir", aDir)->required();
    agg->add_option("--backend", aBackend);
    agg->add_option("--pattern", aPattern);
    agg->add_option("--output-dir", aOutputDir, "default: records dir");

    CLI11_PARSE(app, argc, argv);

    try {
        if (worker->parsed()) {
            Config config = Config::load(wConfig);
            Schema schema = loadSchema(config);
            wSpec.mode = parseMode(wMode);
            wSpec.role = wRole;
            wSpec.phase = wPhase;
            wSpec.transposed = wTransposed;
            if (!wReadMembers.empty()) {
                std::istringstream ms(wReadMembers);
                std::string m;
                while (std::getline(ms, m, ',')) wSpec.readMembers.push_back(std::stoi(m));
            }
            for (const auto& s : wSets) {
                std::size_t eq = s.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--set expects keyword=value");
                wSpec.constants[s.substr(0, eq)] = s.substr(eq + 1);
            }
            try {
                BenchRecord record = runWorker(config, schema, wSpec);
                if (wOutput.empty())
                    std::cout << record.toJsonLine() << "\n";
                else
                    writeRecord(wOutput, record);
            } catch (const WorkerFailure& e) {
                if (!wOutput.empty()) writeRecord(wOutput, e.record);
                std::cerr << e.what() << "\n";
                return 1;
            }
            return 0;
        }

        if (run->parsed()) {
            Config config = Config::load(rConfig);
            if (!rBackend.empty()) config.backend = rBackend;
            if (rReaders < 0) rReaders = rProcesses;
            Pattern pattern;
            pattern.kind = parsePattern(rPattern);
            pattern.writers = rProcesses;
            pattern.readers = rReaders;
            rSpec.transposed = rTransposed;

            fs::create_directories(rOutputDir);
            std::string exe = selfExe();
            std::vector<std::vector<Summary>> repeats;
            for (int rep = 0; rep < rRepeats; ++rep) {
                fs::path repDir = fs::path(rOutputDir) / ("rep-" + std::to_string(rep));
                fs::create_directories(repDir);
                // Fresh storage per repeat so every repeat measures the
                // same work against an empty store.
                Config repConfig = config;
                repConfig.storageRoot = (repDir / "store").string();
                std::string cfgPath = writeConfigFile(repConfig, (repDir / "config").string());
                orchestrate(exe, cfgPath, rSpec, pattern, (repDir / "records").string(),
                            rOverwrite);
                auto records = loadRecords((repDir / "records").string());
                repeats.push_back(aggregate(records, config.backend, rPattern));
            }
            auto summary = averageRepeats(repeats);
            writeCsv(summary, (fs::path(rOutputDir) / "summary.csv").string());
            writeSvg(summary, (fs::path(rOutputDir) / "summary.svg").string());
            for (const auto& s : summary) {
                std::cout << s.backend << " " << s.pattern << " " << s.phase << "/" << s.role
                          << " procs=" << s.processes << " fields=" << s.fields
                          << " bandwidth=" << formatMiBps(s.bandwidthBytesPerSec) << " MiB/s"
                          << (s.valid ? "" : " [invalid: no contention overlap]") << "\n";
            }
            return 0;
        }

        if (agg->parsed()) {
            if (aOutputDir.empty()) aOutputDir = aDir;
            auto records = loadRecords(aDir);
            auto summary = aggregate(records, aBackend, aPattern);
            writeCsv(summary, (fs::path(aOutputDir) / "summary.csv").string());
            writeSvg(summary, (fs::path(aOutputDir) / "summary.svg").string());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
