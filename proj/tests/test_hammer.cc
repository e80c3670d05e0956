/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "fdb/hammer.h"

using namespace fdb;
using namespace fdb::hammer;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fdb-hammer-test-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

BenchRecord record(const std::string& role, std::uint64_t startNs, std::uint64_t endNs,
                   std::uint64_t bytes) {
    BenchRecord r;
    r.role = role;
    r.phase = "main";
    r.mode = role == "writer" ? "archive" : "retrieve";
    r.startNanos = startNs;
    r.endNanos = endNs;
    r.bytes = bytes;
    r.fields = 1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("payloads are deterministic and self-validating") {
    Schema schema = Schema::parse(defaultSchemaText());
    RunSpec spec;
    Key id = makeIdentifier(schema, spec, 3, 1, 2, 4);
    Key same = makeIdentifier(schema, spec, 3, 1, 2, 4);
    CHECK(id.toString() == same.toString());

    Bytes p1 = makePayload(id, 4096, 0);
    Bytes p2 = makePayload(id, 4096, 0);
    CHECK(p1 == p2);
    CHECK(verifyPayload(p1, id) == PayloadCheck::Ok);

    // A newer generation differs but still validates for the identifier.
    Bytes p3 = makePayload(id, 4096, 1);
    CHECK(p3 != p1);
    CHECK(verifyPayload(p3, id) == PayloadCheck::Ok);

    // Any flipped byte is caught.
    Bytes torn = p1;
    torn[100] ^= 0x01;
    CHECK(verifyPayload(torn, id) == PayloadCheck::Corrupt);
    // A mix of two versions is caught too.
    Bytes mixed = p1;
    std::copy(p3.begin() + 2048, p3.end(), mixed.begin() + 2048);
    CHECK(verifyPayload(mixed, id) == PayloadCheck::Corrupt);

    // Another identifier's complete payload is intact but foreign.
    Key other = makeIdentifier(schema, spec, 4, 1, 2, 4);
    CHECK(verifyPayload(makePayload(other, 4096, 0), id) == PayloadCheck::ForeignSeed);

    CHECK_THROWS(makePayload(id, 8, 0));
}

TEST_CASE("bench records round trip through JSON lines") {
    BenchRecord r = record("writer", 100, 900, 12345);
    r.processId = 7;
    r.notFound = 2;
    r.checksumFailures = 1;
    r.categoryNanos[0] = 42;
    r.categoryOps[0] = 3;
    BenchRecord back = BenchRecord::fromJsonLine(r.toJsonLine());
    CHECK(back.toJsonLine() == r.toJsonLine());
    CHECK(back.processId == 7);
    CHECK(back.categoryNanos[0] == 42);
    CHECK(back.categoryOps[0] == 3);
}

TEST_CASE("global-timing bandwidth arithmetic") {
    const std::uint64_t MiB = 1024 * 1024;

    SUBCASE("4000 MiB over 11 seconds") {
        // Two writers: combined interval spans 3s..14s = 11 s.
        std::vector<BenchRecord> records = {
            record("writer", 3'000'000'000, 10'000'000'000, 1500 * MiB),
            record("writer", 5'000'000'000, 14'000'000'000, 2500 * MiB),
        };
        auto summaries = aggregate(records, "kv", "no_contention");
        REQUIRE(summaries.size() == 1);
        CHECK(summaries[0].bytes == 4000 * MiB);
        CHECK(summaries[0].seconds == doctest::Approx(11.0));
        CHECK(formatMiBps(summaries[0].bandwidthBytesPerSec) == "363.64");
        CHECK(summaries[0].processes == 2);
    }

    SUBCASE("one byte per second") {
        std::vector<BenchRecord> records = {record("writer", 0, 1'000'000'000, 1)};
        auto summaries = aggregate(records, "kv", "no_contention");
        REQUIRE(summaries.size() == 1);
        CHECK(summaries[0].bandwidthBytesPerSec == doctest::Approx(1.0));
    }

    SUBCASE("record order does not matter") {
        std::vector<BenchRecord> records;
        std::mt19937 rng(99);
        for (int i = 0; i < 20; ++i)
            records.push_back(record(i % 2 ? "writer" : "reader", 1000 + rng() % 500,
                                     2000 + rng() % 500, 1 + rng() % 10000));
        auto base = aggregate(records, "kv", "no_contention");
        for (int trial = 0; trial < 10; ++trial) {
            std::shuffle(records.begin(), records.end(), rng);
            auto shuffled = aggregate(records, "kv", "no_contention");
            REQUIRE(shuffled.size() == base.size());
            for (std::size_t i = 0; i < base.size(); ++i) {
                CHECK(shuffled[i].role == base[i].role);
                CHECK(shuffled[i].bandwidthBytesPerSec ==
                      doctest::Approx(base[i].bandwidthBytesPerSec));
                CHECK(shuffled[i].bytes == base[i].bytes);
            }
        }
    }

    SUBCASE("phases and roles aggregate separately") {
        auto pre = record("writer", 0, 1'000'000'000, MiB);
        pre.phase = "prepopulate";
        std::vector<BenchRecord> records = {
            pre,
            record("writer", 2'000'000'000, 3'000'000'000, 2 * MiB),
            record("reader", 2'000'000'000, 3'000'000'000, 3 * MiB),
        };
        auto summaries = aggregate(records, "kv", "contention");
        REQUIRE(summaries.size() == 3);
        for (const auto& s : summaries) {
            if (s.phase == "prepopulate") CHECK(s.bytes == MiB);
            if (s.phase == "main" && s.role == "writer") CHECK(s.bytes == 2 * MiB);
            if (s.phase == "main" && s.role == "reader") CHECK(s.bytes == 3 * MiB);
        }
    }

    SUBCASE("failed records and empty input are rejected") {
        CHECK_THROWS(aggregate({}, "kv", "no_contention"));
        auto bad = record("writer", 0, 1, 1);
        bad.failed = true;
        CHECK_THROWS(aggregate({bad}, "kv", "no_contention"));
    }
}

TEST_CASE("contention overlap detection") {
    std::vector<BenchRecord> overlapping = {
        record("writer", 1000, 5000, 1),
        record("reader", 4000, 9000, 1),
    };
    CHECK(contentionOverlaps(overlapping));
    std::vector<BenchRecord> disjoint = {
        record("writer", 1000, 2000, 1),
        record("reader", 3000, 4000, 1),
    };
    CHECK(!contentionOverlaps(disjoint));
    auto summaries = aggregate(disjoint, "kv", "contention");
    for (const auto& s : summaries) CHECK(!s.valid);
}

TEST_CASE("reports are deterministic") {
    TempDir dir;
    std::vector<BenchRecord> records = {
        record("writer", 0, 2'000'000'000, 8 << 20),
        record("reader", 500'000'000, 1'500'000'000, 4 << 20),
    };
    auto summaries = aggregate(records, "kv", "no_contention");
    writeCsv(summaries, (dir.path / "a.csv").string());
    writeCsv(summaries, (dir.path / "b.csv").string());
    writeSvg(summaries, (dir.path / "a.svg").string());
    writeSvg(summaries, (dir.path / "b.svg").string());
    CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));
    CHECK(slurp(dir.path / "a.svg") == slurp(dir.path / "b.svg"));
    std::string csv = slurp(dir.path / "a.csv");
    CHECK(csv.find("backend,pattern,phase,role,processes,fields,bytes,seconds,"
                   "bandwidth_bytes_per_s,valid") == 0);
    CHECK(csv.find("kv,no_contention,main,writer") != std::string::npos);
    std::string svg = slurp(dir.path / "a.svg");
    CHECK(svg.find("<svg") == 0);
}

TEST_CASE("worker runs against a real store") {
    TempDir dir;
    Config config;
    config.backend = "kv";
    config.storageRoot = (dir.path / "store").string();
    config.syncCommits = false;
    Schema schema = Schema::parse(defaultSchemaText());

    RunSpec writeSpec;
    writeSpec.mode = Mode::Archive;
    writeSpec.nsteps = 2;
    writeSpec.nparams = 3;
    writeSpec.nlevels = 2;
    writeSpec.member = 1;
    writeSpec.fieldSize = 256;
    BenchRecord w = runWorker(config, schema, writeSpec);
    CHECK(w.fields == 12);
    CHECK(w.bytes == 12 * 256);
    CHECK(w.endNanos > w.startNanos);
    CHECK(!w.failed);

    RunSpec readSpec = writeSpec;
    readSpec.mode = Mode::Retrieve;
    readSpec.role = "reader";
    BenchRecord r = runWorker(config, schema, readSpec);
    CHECK(r.fields == 12);
    CHECK(r.notFound == 0);
    CHECK(r.checksumFailures == 0);

    RunSpec listSpec = writeSpec;
    listSpec.mode = Mode::List;
    BenchRecord l = runWorker(config, schema, listSpec);
    CHECK(l.listedEntries == 6);  // nparams * nlevels fields in step 0
}
