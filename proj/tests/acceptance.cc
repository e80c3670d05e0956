/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

// End-to-end acceptance checks, one pass/fail line each. Run via ctest or
// directly; exits nonzero if any check fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "fdb/embedded_engine.h"
#include "fdb/fdb.h"
#include "fdb/hammer.h"
#include "fdb/kv_backend.h"
#include "fdb/remote_engine.h"
#include "fdb/toc_backend.h"
#include "fdb/wire.h"
#include "fdb/wire_server.h"

using namespace fdb;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fdb-acceptance-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

Bytes bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

const char* kSchemaText =
    "dataset: class, date\n"
    "collocation: type, number\n"
    "element: step, param\n";

Key makeKey(const std::string& number, const std::string& step, const std::string& param) {
    Key k;
    k.set("class", "od");
    k.set("date", "20240101");
    k.set("type", "ef");
    k.set("number", number);
    k.set("step", step);
    k.set("param", param);
    return k;
}

Config backendConfig(const std::string& backend, const fs::path& root) {
    Config config;
    config.backend = backend;
    config.storageRoot = root.string();
    return config;
}

// 1. Full round trip at survey scale: 10 steps x 10 params x 20 levels
//    (2000 fields of 4 KiB), archived then retrieved checksum-clean on
//    both backend pairs, in under a minute.
void criterion1() {
    using namespace hammer;
    auto start = std::chrono::steady_clock::now();
    Schema schema = Schema::parse(defaultSchemaText());
    for (const char* backend : {"kv", "file"}) {
        TempDir dir;
        Config config = backendConfig(backend, dir.path / "store");
        RunSpec spec;
        spec.nsteps = 10;
        spec.nparams = 10;
        spec.nlevels = 20;
        spec.fieldSize = 4096;
        BenchRecord w = runWorker(config, schema, spec);
        require(w.fields == 2000, "expected 2000 archived fields");
        spec.mode = Mode::Retrieve;
        BenchRecord r = runWorker(config, schema, spec);
        require(r.fields == 2000, std::string(backend) + ": expected 2000 retrieved fields");
        require(r.notFound == 0, std::string(backend) + ": fields missing on read-back");
        require(r.checksumFailures == 0, std::string(backend) + ": checksum failures");
    }
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    require(elapsed.count() < 60.0, "round trip exceeded 60 s");
}

// 2. Flush is a visibility barrier: after the k-th flush, a fresh reader
//    session finds every field of steps <= k. 50 steps x 20 fields, both
//    backends, zero misses.
void criterion2() {
    Schema schema = Schema::parse(kSchemaText);
    for (const char* backend : {"kv", "file"}) {
        TempDir dir;
        Config config = backendConfig(backend, dir.path / "store");
        config.syncCommits = false;
        auto writer = openFdb(config, schema);
        for (int step = 0; step < 50; ++step) {
            for (int f = 0; f < 20; ++f)
                writer->archive(makeKey("1", std::to_string(step), "p" + std::to_string(f)),
                                bytes("s" + std::to_string(step) + "f" + std::to_string(f)));
            writer->flush();
            auto reader = openFdb(config, schema);
            for (int s = 0; s <= step; ++s)
                for (int f = 0; f < 20; ++f) {
                    auto got =
                        reader->retrieve(makeKey("1", std::to_string(s), "p" + std::to_string(f)));
                    require(got.has_value(), std::string(backend) + ": miss after flush");
                    require(*got == bytes("s" + std::to_string(s) + "f" + std::to_string(f)),
                            std::string(backend) + ": wrong payload after flush");
                }
        }
    }
}

// 3. Contention consistency: 8 writers and 8 readers running
//    simultaneously, writers deliberately overwriting the prepopulated
//    fields, more than 10^4 operations in total; every read returns a
//    complete old or new payload, never a torn one. Both backends.
void criterion3() {
    using namespace hammer;
    for (const char* backend : {"kv", "file"}) {
        TempDir dir;
        Config config = backendConfig(backend, dir.path / "store");
        config.syncCommits = false;
        std::ofstream cfg(dir.path / "config");
        cfg << "backend = " << backend << "\nstorage_root = " << (dir.path / "store").string()
            << "\nsync = off\n";
        cfg.close();

        RunSpec tmpl;
        tmpl.nsteps = 5;
        tmpl.nparams = 10;
        tmpl.nlevels = 9;  // 450 fields per worker; 24 * 450 > 10^4 total ops
        tmpl.fieldSize = 1024;
        Pattern pattern;
        pattern.kind = Pattern::Kind::Contention;
        pattern.writers = 8;
        pattern.readers = 8;
        orchestrate(FDB_HAMMER_BIN, (dir.path / "config").string(), tmpl, pattern,
                    (dir.path / "records").string(), /*overwrite=*/true);
        auto records = loadRecords((dir.path / "records").string());
        require(records.size() == 24, "expected 24 worker records");
        std::uint64_t reads = 0;
        for (const auto& r : records) {
            require(!r.failed, std::string(backend) + ": worker failed");
            require(r.checksumFailures == 0, std::string(backend) + ": torn or corrupt read");
            if (r.role == "reader") {
                require(r.notFound == 0, std::string(backend) + ": prepopulated field missing");
                reads += r.fields;
            }
        }
        require(reads == 8 * 450, "unexpected read count");
        require(contentionOverlaps(records),
                std::string(backend) + ": writer and reader intervals did not overlap");
    }
}

// 4. Listing matches brute-force filtering over 20 randomized schema
//    instances of up to 500 fields, 100 random requests each, with axis
//    pruning on and off agreeing.
void criterion4() {
    std::mt19937 rng(20240404);
    for (int instance = 0; instance < 20; ++instance) {
        // Random 3-level partition of a random keyword list.
        int nkw = 4 + int(rng() % 4);
        std::vector<std::string> kws;
        for (int i = 0; i < nkw; ++i) kws.push_back("k" + std::to_string(i));
        std::shuffle(kws.begin(), kws.end(), rng);
        std::size_t cut1 = 1 + rng() % (kws.size() - 2);
        std::size_t cut2 = cut1 + 1 + rng() % (kws.size() - cut1 - 1);
        std::ostringstream dsl;
        auto emit = [&](const char* level, std::size_t from, std::size_t to) {
            dsl << level << ":";
            for (std::size_t i = from; i < to; ++i) dsl << (i == from ? " " : ", ") << kws[i];
            dsl << "\n";
        };
        emit("dataset", 0, cut1);
        emit("collocation", cut1, cut2);
        emit("element", cut2, kws.size());
        Schema schema = Schema::parse(dsl.str());

        TempDir dir;
        EmbeddedEngine::Options eopts;
        eopts.syncCommits = false;
        EmbeddedEngine engine(dir.path, eopts);
        KvStore store(engine);
        KvCatalogue::Options unprunedOpts;
        unprunedOpts.axisPruning = false;
        KvCatalogue pruned(engine, schema);
        KvCatalogue unpruned(engine, schema, unprunedOpts);

        int nfields = 50 + int(rng() % 451);
        std::map<std::string, Key> population;  // unique by identifier
        for (int f = 0; f < nfields; ++f) {
            Key full;
            for (const auto& kw : kws) full.set(kw, "v" + std::to_string(rng() % 5));
            if (!population.emplace(full.toString(), full).second) continue;
            auto [ds, coll, el] = schema.split(full);
            pruned.archive(ds, coll, el, store.archive(ds, coll, bytes("x")));
        }

        for (int q = 0; q < 100; ++q) {
            Request req;
            for (const auto& kw : kws) {
                if (rng() % 3) continue;
                std::set<std::string> span;
                int n = 1 + int(rng() % 3);
                for (int i = 0; i < n; ++i) span.insert("v" + std::to_string(rng() % 6));
                req.set(kw, span);
            }
            std::set<std::string> expect;
            for (const auto& [str, key] : population)
                if (req.matches(key)) expect.insert(key.toString());
            auto collect = [](const std::vector<std::pair<Key, FieldLocation>>& v) {
                std::set<std::string> s;
                for (const auto& [k, loc] : v) s.insert(k.toString());
                return s;
            };
            auto a = collect(pruned.list(req));
            auto b = collect(unpruned.list(req));
            require(a == expect, "pruned listing differs from brute force");
            require(b == expect, "unpruned listing differs from brute force");
        }
    }
}

// 5. TOC appends are atomic: 8 concurrent flushers x 100 records all
//    parse, and any truncation of the TOC leaves a parseable prefix whose
//    blobs are fully synced.
void criterion5() {
    Schema schema = Schema::parse(kSchemaText);
    TempDir dir;
    fs::path catDir = dir.path / "catalogue";
    {
        std::vector<std::thread> threads;
        for (int t = 0; t < 8; ++t) {
            threads.emplace_back([&, t] {
                FileStore store(dir.path / "data");
                TocCatalogue catalogue(schema, catDir);
                for (int i = 0; i < 100; ++i) {
                    Key full = makeKey(std::to_string(t + 1), std::to_string(i), "t");
                    auto [ds, coll, el] = schema.split(full);
                    catalogue.archive(ds, coll, el, store.archive(ds, coll, bytes("v")));
                    store.flush();
                    catalogue.flush();
                }
            });
        }
        for (auto& th : threads) th.join();
    }
    {
        TocCatalogue reader(schema, catDir);
        auto entries = reader.list(Request{});
        require(entries.size() == 800, "expected all 800 records to parse");
        require(reader.tocRecordsParsed() == 808, "expected 800 index + 8 init records");
    }

    fs::path tocFile;
    for (const auto& entry : fs::recursive_directory_iterator(catDir))
        if (entry.path().filename() == "toc") tocFile = entry.path();
    require(!tocFile.empty(), "toc file not found");
    std::uintmax_t fullSize = fs::file_size(tocFile);
    Bytes original(fullSize);
    {
        std::ifstream in(tocFile, std::ios::binary);
        in.read(reinterpret_cast<char*>(original.data()), std::streamsize(fullSize));
    }
    std::mt19937 rng(5555);
    for (int trial = 0; trial < 50; ++trial) {
        std::uintmax_t cut = rng() % (fullSize + 1);
        {
            std::ofstream out(tocFile, std::ios::binary | std::ios::trunc);
            out.write(reinterpret_cast<const char*>(original.data()), std::streamsize(cut));
        }
        TocCatalogue reader(schema, catDir);
        auto entries = reader.list(Request{});
        require(entries.size() <= 800, "truncated toc listed too much");
        // Every listed location's blob existed and passed its CRC, or the
        // reader would have skipped it; retrieves must agree.
        for (const auto& [key, loc] : entries) {
            auto found = reader.retrieve(schema.extract(key, schema.datasetKeywords()),
                                         schema.extract(key, schema.collocationKeywords()),
                                         schema.extract(key, schema.elementKeywords()));
            require(found.has_value(), "listed entry not retrievable after truncation");
        }
    }
    {
        std::ofstream out(tocFile, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(original.data()), std::streamsize(fullSize));
    }
}

// 6. Engine crash consistency: 100 random log truncations each recover to
//    a state equal to some prefix of the commit order.
void criterion6() {
    TempDir dir;
    fs::path source = dir.path / "source";
    using KvState = std::map<std::string, Bytes>;
    std::vector<KvState> snapshots;
    std::mt19937 rng(66666);
    Oid kvOid;
    {
        EmbeddedEngine engine(source);
        auto cont = engine.contOpen(engine.poolConnect("p", true), "c", true);
        kvOid = engine.allocOids(cont, 1);
        KvState state;
        snapshots.push_back(state);
        for (int i = 0; i < 50; ++i) {
            std::string key = "k" + std::to_string(rng() % 8);
            Bytes value(1 + rng() % 40);
            for (auto& b : value) b = std::uint8_t(rng());
            engine.kvPut(cont, kvOid, key, value);
            state[key] = value;
            snapshots.push_back(state);
        }
    }
    fs::path contDir;
    for (const auto& entry : fs::recursive_directory_iterator(source))
        if (entry.path().filename() == "commits.log") contDir = entry.path().parent_path();
    require(!contDir.empty(), "container directory not found");

    for (int trial = 0; trial < 100; ++trial) {
        fs::path copy = dir.path / ("trial-" + std::to_string(trial));
        fs::create_directories(copy);
        fs::copy(source, copy, fs::copy_options::recursive);
        fs::path victim =
            copy / fs::relative(contDir, source) / (trial % 2 ? "commits.log" : "values.log");
        fs::resize_file(victim, rng() % (fs::file_size(victim) + 1));

        EmbeddedEngine engine(copy);
        auto cont = engine.contOpen(engine.poolConnect("p", true), "c", true);
        KvState recovered;
        for (const auto& key : engine.kvList(cont, kvOid)) {
            auto v = engine.kvGet(cont, kvOid, key);
            require(v.has_value(), "listed key unreadable after recovery");
            recovered[key] = *v;
        }
        bool isPrefix = false;
        for (const auto& snap : snapshots)
            if (snap == recovered) isPrefix = true;
        require(isPrefix, "recovered state is not a prefix of commit order");
        fs::remove_all(copy);
    }
}

// 7. OID uniqueness: 16 separate client processes each allocate 1000 OIDs
//    through the wire server; all 16000 are distinct and (0,0) is absent.
void criterion7() {
    TempDir dir;
    wire::Server server(dir.path / "store");
    server.start();
    std::string address = "127.0.0.1:" + std::to_string(server.port());

    constexpr int kProcs = 16, kPerProc = 1000;
    std::vector<pid_t> pids;
    for (int i = 0; i < kProcs; ++i) {
        fs::path outFile = dir.path / ("oids-" + std::to_string(i));
        pid_t pid = fork();
        require(pid >= 0, "fork failed");
        if (pid == 0) {
            FILE* out = std::freopen(outFile.c_str(), "w", stdout);
            if (!out) _exit(126);
            execl(OID_HELPER_BIN, OID_HELPER_BIN, address.c_str(),
                  std::to_string(kPerProc).c_str(), nullptr);
            _exit(127);
        }
        pids.push_back(pid);
    }
    for (pid_t pid : pids) {
        int status = 0;
        waitpid(pid, &status, 0);
        require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "allocator process failed");
    }
    server.stop();

    std::set<std::string> oids;
    for (int i = 0; i < kProcs; ++i) {
        std::ifstream in(dir.path / ("oids-" + std::to_string(i)));
        std::string line;
        int count = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            require(line != "0.0", "reserved oid (0,0) was handed out");
            require(oids.insert(line).second, "duplicate oid " + line);
            ++count;
        }
        require(count == kPerProc, "allocator produced wrong count");
    }
    require(oids.size() == std::size_t(kProcs) * kPerProc, "missing oids");
}

// 8. Read-path cost asymmetry: a warm kv retrieve costs exactly one kv get
//    plus one array read; toc readers parse every TOC record but read at
//    most one file per index blob; kv listing pays at least one get per
//    entry.
void criterion8() {
    Schema schema = Schema::parse(kSchemaText);
    constexpr int kFields = 30;

    // kv side
    {
        TempDir dir;
        Config config = backendConfig("kv", dir.path / "store");
        config.syncCommits = false;
        Profiler profiler;
        auto session = openFdb(config, schema, &profiler);
        for (int i = 0; i < kFields; ++i)
            session->archive(makeKey("1", std::to_string(i), "t"), bytes("x"));
        session->flush();
        Key id = makeKey("1", "7", "t");
        session->retrieve(id);  // warm the handle and index caches

        auto snapshot = [&] {
            std::array<std::uint64_t, kProfCategories> ops{};
            for (int c = 0; c < kProfCategories; ++c) ops[c] = profiler.counters[c].ops.load();
            return ops;
        };
        auto before = snapshot();
        auto got = session->retrieve(id);
        require(got.has_value(), "warm retrieve missed");
        auto after = snapshot();
        for (int c = 0; c < kProfCategories; ++c) {
            std::uint64_t delta = after[c] - before[c];
            auto cat = static_cast<ProfCategory>(c);
            if (cat == ProfCategory::KvGet)
                require(delta == 1, "warm retrieve: kv gets != 1");
            else if (cat == ProfCategory::ArrayRead)
                require(delta == 1, "warm retrieve: array reads != 1");
            else
                require(delta == 0, "warm retrieve issued extra engine ops");
        }

        before = snapshot();
        auto entries = session->list(Request{});
        after = snapshot();
        require(entries.size() == kFields, "kv list count");
        std::uint64_t gets = after[int(ProfCategory::KvGet)] - before[int(ProfCategory::KvGet)];
        require(gets >= kFields, "kv list used fewer than one get per entry");
    }

    // toc side
    {
        TempDir dir;
        Config config = backendConfig("file", dir.path / "store");
        Schema sch = schema;
        auto countBlobs = [&] {
            std::uint64_t n = 0;
            for (const auto& e : fs::recursive_directory_iterator(dir.path / "store"))
                if (e.path().extension() == ".index") ++n;
            return n;
        };
        {
            auto session = openFdb(config, sch);
            for (int i = 0; i < kFields; ++i) {
                session->archive(makeKey("1", std::to_string(i), "t"), bytes("x"));
                session->flush();  // one TOC record and one blob per field
            }
        }
        FileStore store(dir.path / "store" / "data");
        TocCatalogue reader(sch, dir.path / "store" / "catalogue");
        Key id = makeKey("1", "3", "t");
        auto [ds, coll, el] = sch.split(id);
        auto found = reader.retrieve(ds, coll, el);
        require(found.has_value(), "toc retrieve missed");
        // Parsing walks every published record (grows with the TOC)...
        require(reader.tocRecordsParsed() >= kFields, "toc parse count did not grow with records");
        std::uint64_t blobs = countBlobs();
        TocCatalogue lister(sch, dir.path / "store" / "catalogue");
        auto entries = lister.list(Request{});
        require(entries.size() == kFields, "toc list count");
        // ... but listing reads each blob at most once.
        require(lister.indexBlobReads() <= blobs, "toc list read more than one pass over blobs");
    }
}

// 9. Bandwidth aggregation reproduces hand-computed values exactly.
void criterion9() {
    using namespace hammer;
    const std::uint64_t MiB = 1024 * 1024;
    auto rec = [](std::uint64_t start, std::uint64_t end, std::uint64_t nbytes) {
        BenchRecord r;
        r.role = "writer";
        r.mode = "archive";
        r.startNanos = start;
        r.endNanos = end;
        r.bytes = nbytes;
        r.fields = 1;
        return r;
    };
    std::vector<BenchRecord> records = {
        rec(3'000'000'000, 10'000'000'000, 1500 * MiB),
        rec(5'000'000'000, 14'000'000'000, 2500 * MiB),
    };
    auto summaries = aggregate(records, "kv", "no_contention");
    require(summaries.size() == 1, "expected one summary group");
    require(formatMiBps(summaries[0].bandwidthBytesPerSec) == "363.64",
            "4000 MiB / 11 s misformatted: got " +
                formatMiBps(summaries[0].bandwidthBytesPerSec));
    auto one = aggregate({rec(0, 1'000'000'000, 1)}, "kv", "no_contention");
    require(std::abs(one[0].bandwidthBytesPerSec - 1.0) < 1e-9, "1 B/s case wrong");
    std::vector<BenchRecord> shuffled = {records[1], records[0]};
    auto again = aggregate(shuffled, "kv", "no_contention");
    require(again[0].bandwidthBytesPerSec == summaries[0].bandwidthBytesPerSec,
            "aggregation depends on record order");
}

// 10. Backend interchangeability: one shared corpus exercises the same
//     semantics against kv-embedded, kv-over-the-wire, and file/toc.
void criterion10() {
    Schema schema = Schema::parse(kSchemaText);
    struct Corpus {
        Key id;
        Bytes payload;
    };
    std::vector<Corpus> corpus;
    for (int step = 0; step < 4; ++step)
        for (int param = 0; param < 5; ++param)
            corpus.push_back({makeKey("1", std::to_string(step), "p" + std::to_string(param)),
                              bytes("payload-" + std::to_string(step * 5 + param))});

    auto exercise = [&](const Config& config, const std::string& label) {
        auto writer = openFdb(config, schema);
        writer->flush();  // flush with nothing archived is a no-op
        for (const auto& c : corpus) writer->archive(c.id, c.payload);
        writer->flush();
        auto reader = openFdb(config, schema);
        for (const auto& c : corpus) {
            auto got = reader->retrieve(c.id);
            require(got.has_value(), label + ": corpus field missing");
            require(*got == c.payload, label + ": corpus payload mismatch");
        }
        require(!reader->retrieve(makeKey("9", "0", "p0")).has_value(),
                label + ": phantom field");
        require(reader->list(Request{}).size() == corpus.size(), label + ": list count");
        Request firstStep;
        firstStep.set("step", {"0"});
        require(reader->list(firstStep).size() == 5, label + ": filtered list count");
        // Replacement: new payload wins after flush.
        writer->archive(corpus[0].id, bytes("replaced"));
        writer->flush();
        auto got = openFdb(config, schema)->retrieve(corpus[0].id);
        require(got.has_value() && *got == bytes("replaced"), label + ": replacement not visible");
    };

    {
        TempDir dir;
        Config config = backendConfig("kv", dir.path / "store");
        config.syncCommits = false;
        exercise(config, "kv-embedded");
    }
    {
        TempDir dir;
        Config config = backendConfig("file", dir.path / "store");
        exercise(config, "file-toc");
    }
    {
        TempDir dir;
        wire::Server server(dir.path / "store");
        server.start();
        Config config;
        config.backend = "kv";
        config.engine = "127.0.0.1:" + std::to_string(server.port());
        exercise(config, "kv-wire");
        server.stop();
    }
}

// 11. Wire robustness: 10^4 random frames round trip; truncated input asks
//     for more; an oversized length field is rejected as malformed.
void criterion11() {
    using namespace wire;
    std::mt19937_64 rng(11111);
    for (int i = 0; i < 10000; ++i) {
        Frame f;
        f.opcode = std::uint8_t(rng() % 256);
        f.requestId = rng();
        f.payload.resize(rng() % 256);
        for (auto& b : f.payload) b = std::uint8_t(rng());
        Bytes enc = encodeFrame(f);
        Frame out;
        std::size_t consumed = 0;
        require(decodeFrame(enc, out, consumed) == DecodeResult::Ok, "frame decode failed");
        require(consumed == enc.size(), "frame consumed wrong length");
        require(out == f, "frame round trip mismatch");
        Frame partial;
        require(decodeFrame(std::span(enc.data(), enc.size() - 1), partial, consumed) ==
                    DecodeResult::NeedMore,
                "truncated frame not flagged as incomplete");
    }
    Bytes oversized;
    putU32(oversized, kMaxFrameLength + 1);
    oversized.resize(oversized.size() + 16);
    Frame out;
    std::size_t consumed = 0;
    require(decodeFrame(oversized, out, consumed) == DecodeResult::Malformed,
            "oversized frame not flagged as malformed");
}

}  // namespace

int main() {
    struct Check {
        const char* description;
        void (*fn)();
    };
    const Check checks[] = {
        {"1. 2000-field round trip, both backends, checksum-clean, < 60 s", criterion1},
        {"2. flush visibility barrier: 50 steps x 20 fields, zero misses", criterion2},
        {"3. 8w+8r contention with overwrites: no torn or missing reads", criterion3},
        {"4. listing equals brute force on 20 random schemas, pruning on/off", criterion4},
        {"5. 8x100 concurrent TOC appends parse; truncation keeps a valid prefix", criterion5},
        {"6. 100 random log truncations recover a prefix of commit order", criterion6},
        {"7. 16 processes x 1000 OIDs via the wire: all distinct, no (0,0)", criterion7},
        {"8. read-path op-count asymmetry between kv and toc catalogues", criterion8},
        {"9. bandwidth aggregation matches hand-computed values", criterion9},
        {"10. one semantics corpus passes on kv, wire, and file backends", criterion10},
        {"11. wire frames: 10^4 round trips, truncated and oversized handling", criterion11},
    };
    int failures = 0;
    for (const auto& check : checks) {
        try {
            check.fn();
            std::cout << "PASS " << check.description << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "FAIL " << check.description << " -- " << e.what() << "\n";
        }
    }
    return failures == 0 ? 0 : 1;
}
