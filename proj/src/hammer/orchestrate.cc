/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "fdb/hammer.h"
#include "fdb/wire_server.h"

namespace fdb::hammer {

namespace fs = std::filesystem;

namespace {

struct WorkerJob {
    RunSpec spec;
    std::string outputFile;
};

std::vector<std::string> workerArgv(const std::string& exe, const std::string& configPath,
                                    const WorkerJob& job) {
    const RunSpec& s = job.spec;
    std::vector<std::string> argv = {
        exe,
        "worker",
        "--config", configPath,
        "--mode", modeName(s.mode),
        "--nsteps", std::to_string(s.nsteps),
        "--nparams", std::to_string(s.nparams),
        "--nlevels", std::to_string(s.nlevels),
        "--member", std::to_string(s.member),
        "--field-size", std::to_string(s.fieldSize),
        "--generation", std::to_string(s.generation),
        "--process-id", std::to_string(s.processId),
        "--role", s.role,
        "--phase", s.phase,
        "--output", job.outputFile,
    };
    if (s.transposed) argv.push_back("--transposed");
    if (!s.readMembers.empty()) {
        std::ostringstream members;
        for (std::size_t i = 0; i < s.readMembers.size(); ++i) {
            if (i) members << ',';
            members << s.readMembers[i];
        }
        argv.push_back("--read-members");
        argv.push_back(members.str());
    }
    for (const auto& [k, v] : s.constants) {
        argv.push_back("--set");
        argv.push_back(k + "=" + v);
    }
    return argv;
}

pid_t spawnWorker(const std::string& exe, const std::string& configPath, const WorkerJob& job) {
    std::vector<std::string> argv = workerArgv(exe, configPath, job);
    // Children inherit unflushed stdio buffers; drain them before forking.
    std::cout.flush();
    std::fflush(nullptr);
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        std::vector<char*> cargv;
        for (auto& a : argv) cargv.push_back(a.data());
        cargv.push_back(nullptr);
        execv(exe.c_str(), cargv.data());
        _exit(127);
    }
    return pid;
}

void runPhase(const std::string& exe, const std::string& configPath,
              const std::vector<WorkerJob>& jobs) {
    std::vector<pid_t> pids;
    pids.reserve(jobs.size());
    for (const auto& job : jobs) pids.push_back(spawnWorker(exe, configPath, job));
    bool failed = false;
    for (pid_t pid : pids) {
        int status = 0;
        if (waitpid(pid, &status, 0) < 0 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
            failed = true;
    }
    if (failed) throw std::runtime_error("one or more benchmark workers failed");
}

WorkerJob makeJob(const RunSpec& tmpl, const std::string& outputDir, Mode mode,
                  const std::string& role, const std::string& phase, int member, int processId) {
    WorkerJob job;
    job.spec = tmpl;
    job.spec.mode = mode;
    job.spec.role = role;
    job.spec.phase = phase;
    job.spec.member = member;
    job.spec.processId = processId;
    job.outputFile =
        (fs::path(outputDir) / (phase + "-" + role + "-" + std::to_string(processId) + ".json"))
            .string();
    return job;
}

}  // namespace

std::string writeConfigFile(const Config& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "backend = " << config.backend << "\n";
    out << "storage_root = " << config.storageRoot << "\n";
    if (!config.schemaPath.empty()) out << "schema = " << config.schemaPath << "\n";
    out << "pool = " << config.pool << "\n";
    out << "root_container = " << config.rootContainer << "\n";
    out << "oid_batch = " << config.oidBatch << "\n";
    out << "engine = " << config.engine << "\n";
    out << "axis_pruning = " << (config.axisPruning ? "on" : "off") << "\n";
    out << "sync = " << (config.syncCommits ? "on" : "off") << "\n";
    return path;
}

void orchestrate(const std::string& workerExe, const std::string& configPath, const RunSpec& tmpl,
                 const Pattern& pattern, const std::string& outputDir, bool overwrite) {
    if (pattern.writers <= 0 || pattern.readers < 0)
        throw std::invalid_argument("pattern needs at least one writer");
    fs::create_directories(outputDir);

    // The embedded engine is only coherent within one process, so
    // multi-process kv runs go through a wire server hosted here.
    Config config = Config::load(configPath);
    std::unique_ptr<wire::Server> server;
    std::string workerConfig = configPath;
    if (config.backend == "kv" && config.engine == "embedded") {
        wire::Server::Options serverOpts;
        serverOpts.engine.syncCommits = config.syncCommits;
        server = std::make_unique<wire::Server>(config.storageRoot, serverOpts);
        server->start();
        config.engine = "127.0.0.1:" + std::to_string(server->port());
        workerConfig = writeConfigFile(config, (fs::path(outputDir) / "worker-config").string());
    }

    if (pattern.kind == Pattern::Kind::NoContention) {
        // Write phase runs to completion before any reader starts.
        std::vector<WorkerJob> writers;
        for (int i = 0; i < pattern.writers; ++i)
            writers.push_back(makeJob(tmpl, outputDir, Mode::Archive, "writer", "main", i + 1, i));
        runPhase(workerExe, workerConfig, writers);

        std::vector<WorkerJob> readers;
        for (int i = 0; i < pattern.readers; ++i) {
            int member = (i % pattern.writers) + 1;
            readers.push_back(
                makeJob(tmpl, outputDir, Mode::Retrieve, "reader", "main", member, i));
        }
        runPhase(workerExe, workerConfig, readers);
        return;
    }

    // Contention: prepopulate the members the readers will scan, then run
    // writers and readers simultaneously. Writers take fresh members unless
    // the run deliberately overwrites the prepopulated ones.
    std::vector<WorkerJob> prepopulate;
    for (int i = 0; i < pattern.writers; ++i)
        prepopulate.push_back(
            makeJob(tmpl, outputDir, Mode::Archive, "writer", "prepopulate", i + 1, i));
    runPhase(workerExe, workerConfig, prepopulate);

    std::vector<WorkerJob> main;
    for (int i = 0; i < pattern.writers; ++i) {
        int member = overwrite ? i + 1 : pattern.writers + i + 1;
        auto job = makeJob(tmpl, outputDir, Mode::Archive, "writer", "main", member, i);
        if (overwrite) job.spec.generation = tmpl.generation + 1;
        main.push_back(job);
    }
    for (int i = 0; i < pattern.readers; ++i) {
        int member = (i % pattern.writers) + 1;
        main.push_back(makeJob(tmpl, outputDir, Mode::Retrieve, "reader", "main", member, i));
    }
    runPhase(workerExe, workerConfig, main);
}

std::vector<BenchRecord> loadRecords(const std::string& outputDir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(outputDir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<BenchRecord> records;
    for (const auto& path : files) {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) records.push_back(BenchRecord::fromJsonLine(line));
    }
    return records;
}

}  // namespace fdb::hammer
