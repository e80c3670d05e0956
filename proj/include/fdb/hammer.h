/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <array>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdb/config.h"
#include "fdb/fdb.h"
#include "fdb/schema.h"

namespace fdb::hammer {

/// Keyword layout used by the benchmark: forecast metadata with the
/// ensemble member and level at the collocation level.
const char* defaultSchemaText();

enum class Mode { Archive, Retrieve, List };

Mode parseMode(const std::string& s);
const char* modeName(Mode mode);

/// One worker's share of a run: nsteps x nparams x nlevels fields for a
/// single dataset and member, flushed once per step.
struct RunSpec {
    Mode mode = Mode::Archive;
    int nsteps = 10;
    int nparams = 10;
    int nlevels = 20;
    int member = 1;
    std::uint64_t fieldSize = 4096;
    int generation = 0;  // payload generation, bumped for deliberate overwrites
    int processId = 0;
    std::string role = "writer";
    std::string phase = "main";
    std::vector<int> readMembers;  // retrieve: members to read (empty = own)
    bool transposed = false;       // retrieve: step-major slice across members
    std::map<std::string, std::string> constants;  // overrides for fixed keywords
};

/// Full identifier for one generated field; deterministic, so writers and
/// readers agree without synchronisation.
Key makeIdentifier(const Schema& schema, const RunSpec& spec, int member, int step, int level, int param);

/// Payload layout: 8-byte seed, then a splitmix64 byte stream from that
/// seed. Self-validating, and the seed pins (identifier, generation).
std::uint64_t payloadSeed(const Key& identifier, int generation);
Bytes makePayload(const Key& identifier, std::uint64_t size, int generation);

enum class PayloadCheck {
    Ok,
    Corrupt,      // bytes do not match the embedded seed's stream (torn read)
    ForeignSeed,  // intact stream, but the seed belongs to no known generation
};
PayloadCheck verifyPayload(std::span<const std::uint8_t> payload, const Key& identifier,
                           int maxGeneration = 64);

/// Per-process benchmark output, one JSON line per record.
struct BenchRecord {
    int processId = 0;
    std::string role = "writer";
    std::string phase = "main";
    std::string mode = "archive";
    std::uint64_t startNanos = 0;  // first I/O start, monotonic
    std::uint64_t endNanos = 0;    // last I/O end
    std::uint64_t bytes = 0;
    std::uint64_t fields = 0;
    std::uint64_t notFound = 0;
    std::uint64_t checksumFailures = 0;
    std::uint64_t listedEntries = 0;
    bool failed = false;
    std::array<std::uint64_t, kProfCategories> categoryNanos{};
    std::array<std::uint64_t, kProfCategories> categoryOps{};

    std::string toJsonLine() const;
    static BenchRecord fromJsonLine(const std::string& line);
};

/// Thrown by runWorker on I/O failure; carries the partial record
/// (failed=true) so callers can still persist what was measured.
class WorkerFailure : public std::runtime_error {
public:
    WorkerFailure(BenchRecord record, const std::string& why)
        : std::runtime_error("benchmark worker failed: " + why), record(std::move(record)) {}
    BenchRecord record;
};

/// Runs one worker loop in-process and returns its record.
BenchRecord runWorker(const Config& config, const Schema& schema, RunSpec spec);

struct Pattern {
    enum class Kind { NoContention, Contention };
    Kind kind = Kind::NoContention;
    int writers = 8;
    int readers = 8;
};

Pattern::Kind parsePattern(const std::string& s);
const char* patternName(Pattern::Kind kind);

/// Spawns worker processes (re-invoking `workerExe worker ...`) per the
/// access pattern and leaves one JSON record per worker in outputDir.
/// No-contention runs the write phase to completion before the read phase;
/// contention prepopulates, then runs writers and readers simultaneously
/// on disjoint member ranges (or the same range when overwrite is set).
void orchestrate(const std::string& workerExe, const std::string& configPath, const RunSpec& tmpl,
                 const Pattern& pattern, const std::string& outputDir, bool overwrite = false);

/// Serializes a configuration back to its file form; returns the path.
std::string writeConfigFile(const Config& config, const std::string& path);

std::vector<BenchRecord> loadRecords(const std::string& outputDir);

/// Global-timing bandwidth per (phase, role) group: total bytes over the
/// span from the earliest first-I/O-start to the latest last-I/O-end.
struct Summary {
    std::string backend;
    std::string pattern;
    std::string phase;
    std::string role;
    int processes = 0;
    std::uint64_t fields = 0;
    std::uint64_t bytes = 0;
    double seconds = 0;
    double bandwidthBytesPerSec = 0;
    bool valid = true;  // contention runs: writer and reader intervals overlap
    std::array<std::uint64_t, kProfCategories> categoryNanos{};
    std::array<std::uint64_t, kProfCategories> categoryOps{};
};

std::vector<Summary> aggregate(const std::vector<BenchRecord>& records, const std::string& backend,
                               const std::string& pattern);

/// True when the writer and reader I/O intervals of the main phase
/// intersect, i.e. the run really exercised contention.
bool contentionOverlaps(const std::vector<BenchRecord>& records);

std::string formatMiBps(double bytesPerSec);

/// summary CSV: backend, pattern, phase, role, processes, fields, bytes,
/// seconds, bandwidth_bytes_per_s, valid, one column per category.
void writeCsv(const std::vector<Summary>& summaries, const std::string& path);

/// Static SVG: bandwidth curves per (backend, pattern, role) series over
/// process counts, plus a stacked per-category time profile per row.
void writeSvg(const std::vector<Summary>& summaries, const std::string& path);

}  // namespace fdb::hammer
