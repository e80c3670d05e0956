/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include "engine_contract.h"
#include "fdb/embedded_engine.h"

using namespace fdb;
using fdb_test::bytes;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fdb-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("embedded engine satisfies the engine contract") {
    TempDir dir;
    EmbeddedEngine engine(dir.path);
    fdb_test::engineContractSuite(engine);
}

TEST_CASE("state survives engine restart") {
    TempDir dir;
    Oid oid;
    {
        EmbeddedEngine engine(dir.path);
        auto pool = engine.poolConnect("p", true);
        auto cont = engine.contOpen(pool, "c", true);
        oid = engine.allocOids(cont, 1);
        engine.kvPut(cont, {0, 0}, "k", bytes("v"));
        engine.arrayWrite(cont, oid, 0, bytes("payload"));
    }
    EmbeddedEngine engine(dir.path);
    auto pool = engine.poolConnect("p");
    auto cont = engine.contOpen(pool, "c", false);
    CHECK(engine.kvGet(cont, {0, 0}, "k") == bytes("v"));
    CHECK(engine.arrayRead(cont, oid, 0, 7) == bytes("payload"));
    // Restart must not re-issue already allocated oids.
    Oid next = engine.allocOids(cont, 1);
    CHECK(next.toString() != oid.toString());
}

TEST_CASE("two sessions in one process share committed state") {
    TempDir dir;
    EmbeddedEngine a(dir.path);
    EmbeddedEngine b(dir.path);
    auto contA = a.contOpen(a.poolConnect("p", true), "c", true);
    auto contB = b.contOpen(b.poolConnect("p", true), "c", true);
    a.kvPut(contA, {0, 0}, "k", bytes("from-a"));
    CHECK(b.kvGet(contB, {0, 0}, "k") == bytes("from-a"));
    Oid oa = a.allocOids(contA, 1);
    Oid ob = b.allocOids(contB, 1);
    CHECK(oa.toString() != ob.toString());
}

TEST_CASE("no torn reads under concurrent writers and readers") {
    // Writers rewrite a fixed set of keys with self-checksummed payloads;
    // readers must only ever observe complete versions.
    TempDir dir;
    EmbeddedEngine::Options opts;
    opts.syncCommits = false;  // throughput; durability is covered elsewhere
    EmbeddedEngine engine(dir.path, opts);
    auto cont = engine.contOpen(engine.poolConnect("p", true), "c", true);
    Oid kvOid = engine.allocOids(cont, 1);
    Oid arrOid = engine.allocOids(cont, 1);

    constexpr int kWriters = 8, kReaders = 8, kKeys = 4;
    constexpr int kWritesPerWriter = 700;  // 8*700 writes + reads > 10^4 ops
    auto makeValue = [](int key, std::uint32_t version) {
        // value = key byte, version, then a run derived from both
        Bytes v(64);
        v[0] = std::uint8_t(key);
        v[1] = std::uint8_t(version);
        v[2] = std::uint8_t(version >> 8);
        for (std::size_t i = 3; i < v.size(); ++i)
            v[i] = std::uint8_t((key * 131 + version * 31 + i) & 0xff);
        return v;
    };
    auto isValid = [&](int key, const Bytes& v) {
        if (v.size() != 64 || v[0] != std::uint8_t(key)) return false;
        std::uint32_t version = v[1] | (std::uint32_t(v[2]) << 8);
        return v == makeValue(key, version);
    };

    std::atomic<bool> stop{false};
    std::atomic<int> failures{0};
    std::vector<std::thread> threads;
    for (int w = 0; w < kWriters; ++w) {
        threads.emplace_back([&, w] {
            std::mt19937 rng(w);
            for (int i = 0; i < kWritesPerWriter; ++i) {
                int key = int(rng() % kKeys);
                auto value = makeValue(key, std::uint32_t(i));
                if (rng() % 2)
                    engine.kvPut(cont, kvOid, "k" + std::to_string(key), value);
                else
                    engine.arrayWrite(cont, arrOid, std::uint64_t(key) * 64, value);
            }
        });
    }
    for (int r = 0; r < kReaders; ++r) {
        threads.emplace_back([&, r] {
            std::mt19937 rng(1000 + r);
            while (!stop.load(std::memory_order_relaxed)) {
                int key = int(rng() % kKeys);
                if (rng() % 2) {
                    auto v = engine.kvGet(cont, kvOid, "k" + std::to_string(key));
                    if (v && !isValid(key, *v)) failures.fetch_add(1);
                } else {
                    auto v = engine.arrayRead(cont, arrOid, std::uint64_t(key) * 64, 64);
                    bool allZero = true;
                    for (auto b : v)
                        if (b) allZero = false;
                    if (!v.empty() && !allZero && !isValid(key, v)) failures.fetch_add(1);
                }
            }
        });
    }
    for (int w = 0; w < kWriters; ++w) threads[w].join();
    stop = true;
    for (int r = 0; r < kReaders; ++r) threads[kWriters + r].join();
    CHECK(failures.load() == 0);
}

TEST_CASE("recovery lands on a prefix of commit order") {
    // Build a commit history with an oracle snapshot after every commit,
    // then truncate the logs at random points and require the recovered
    // state to equal one of the snapshots.
    TempDir dir;
    fs::path source = dir.path / "source";
    fs::create_directories(source);

    using KvState = std::map<std::string, Bytes>;
    std::vector<KvState> snapshots;  // snapshots[i]: state after i commits
    std::mt19937 rng(987654);
    Oid kvOid;
    {
        EmbeddedEngine engine(source);
        auto cont = engine.contOpen(engine.poolConnect("p", true), "c", true);
        kvOid = engine.allocOids(cont, 1);
        KvState state;
        snapshots.push_back(state);  // before the kv writes start
        for (int i = 0; i < 40; ++i) {
            std::string key = "k" + std::to_string(rng() % 6);
            Bytes value(1 + rng() % 32);
            for (auto& b : value) b = std::uint8_t(rng());
            engine.kvPut(cont, kvOid, key, value);
            state[key] = value;
            snapshots.push_back(state);
        }
    }

    auto fileSize = [](const fs::path& p) { return fs::file_size(p); };
    fs::path contDir;
    for (const auto& entry : fs::recursive_directory_iterator(source))
        if (entry.path().filename() == "commits.log") contDir = entry.path().parent_path();
    REQUIRE(!contDir.empty());

    for (int trial = 0; trial < 100; ++trial) {
        fs::path copy = dir.path / ("trial-" + std::to_string(trial));
        fs::create_directories(copy);
        fs::copy(source, copy, fs::copy_options::recursive);
        fs::path copyCont = copy / fs::relative(contDir, source);

        // Truncate either log at a random byte boundary.
        fs::path victim = copyCont / (trial % 2 ? "commits.log" : "values.log");
        std::uintmax_t size = fileSize(victim);
        std::uintmax_t cut = rng() % (size + 1);
        fs::resize_file(victim, cut);

        EmbeddedEngine engine(copy);
        auto cont = engine.contOpen(engine.poolConnect("p", true), "c", true);
        KvState recovered;
        // The allocOids commit may itself be cut; kvOid stays addressable.
        for (const auto& key : engine.kvList(cont, kvOid)) {
            auto v = engine.kvGet(cont, kvOid, key);
            REQUIRE(v.has_value());
            recovered[key] = *v;
        }
        bool isPrefix = false;
        for (const auto& snap : snapshots)
            if (snap == recovered) isPrefix = true;
        CHECK(isPrefix);
        fs::remove_all(copy);
    }
}

TEST_CASE("torn trailing commit record is discarded and truncated") {
    TempDir dir;
    fs::path root = dir.path / "store";
    std::uint64_t commitsBefore = 0;
    fs::path commitsLog;
    {
        EmbeddedEngine engine(root);
        auto cont = engine.contOpen(engine.poolConnect("p", true), "c", true);
        engine.kvPut(cont, {0, 0}, "a", bytes("1"));
        engine.kvPut(cont, {0, 0}, "b", bytes("2"));
    }
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.path().filename() == "commits.log") commitsLog = entry.path();
    REQUIRE(!commitsLog.empty());
    commitsBefore = fs::file_size(commitsLog);
    // Chop the middle of the last record.
    fs::resize_file(commitsLog, commitsBefore - 3);

    EmbeddedEngine engine(root);
    auto cont = engine.contOpen(engine.poolConnect("p", true), "c", true);
    CHECK(engine.kvGet(cont, {0, 0}, "a") == bytes("1"));
    CHECK(!engine.kvGet(cont, {0, 0}, "b").has_value());
    CHECK(fs::file_size(commitsLog) < commitsBefore - 3);
}
