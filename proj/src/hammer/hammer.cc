/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "fdb/hammer.h"

#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "common/util.h"

namespace fdb::hammer {

using util::hash64;
using util::monotonicNanos;
using util::splitmix64;

using json = nlohmann::json;

const char* defaultSchemaText() {
    return "dataset: class, stream, expver, date, time\n"
           "collocation: type, levtype, number, levelist\n"
           "element: step, param\n";
}

Mode parseMode(const std::string& s) {
    if (s == "archive") return Mode::Archive;
    if (s == "retrieve") return Mode::Retrieve;
    if (s == "list") return Mode::List;
    throw std::invalid_argument("unknown mode: " + s);
}

const char* modeName(Mode mode) {
    switch (mode) {
        case Mode::Archive: return "archive";
        case Mode::Retrieve: return "retrieve";
        case Mode::List: return "list";
    }
    return "?";
}

Pattern::Kind parsePattern(const std::string& s) {
    if (s == "no_contention") return Pattern::Kind::NoContention;
    if (s == "contention") return Pattern::Kind::Contention;
    throw std::invalid_argument("unknown pattern: " + s);
}

const char* patternName(Pattern::Kind kind) {
    return kind == Pattern::Kind::NoContention ? "no_contention" : "contention";
}

Key makeIdentifier(const Schema& schema, const RunSpec& spec, int member, int step, int level,
                   int param) {
    std::map<std::string, std::string> values = {
        {"class", "od"},   {"stream", "oper"}, {"expver", "0001"}, {"date", "20231201"},
        {"time", "1200"},  {"type", "ef"},     {"levtype", "ml"},
    };
    for (const auto& [k, v] : spec.constants) values[k] = v;
    values["number"] = std::to_string(member);
    values["levelist"] = std::to_string(level + 1);
    values["step"] = std::to_string(step);
    values["param"] = std::to_string(param + 1);

    // Build in schema order so identifiers stringify identically everywhere.
    Key id;
    for (const auto* level_kws :
         {&schema.datasetKeywords(), &schema.collocationKeywords(), &schema.elementKeywords()}) {
        for (const auto& kw : *level_kws) {
            auto it = values.find(kw);
            if (it == values.end())
                throw std::invalid_argument("no value for schema keyword: " + kw);
            id.set(kw, it->second);
        }
    }
    return id;
}

std::uint64_t payloadSeed(const Key& identifier, int generation) {
    return hash64(identifier.toString() + "#" + std::to_string(generation));
}

namespace {

void fillStream(std::uint8_t* out, std::uint64_t n, std::uint64_t seed) {
    std::uint64_t state = seed;
    std::uint64_t i = 0;
    while (i < n) {
        std::uint64_t word = splitmix64(state);
        std::uint64_t take = std::min<std::uint64_t>(8, n - i);
        std::memcpy(out + i, &word, take);
        i += take;
    }
}

}  // namespace

Bytes makePayload(const Key& identifier, std::uint64_t size, int generation) {
    if (size < 16) throw std::invalid_argument("field size must be at least 16 bytes");
    Bytes out(size);
    std::uint64_t seed = payloadSeed(identifier, generation);
    std::memcpy(out.data(), &seed, 8);
    fillStream(out.data() + 8, size - 8, seed);
    return out;
}

PayloadCheck verifyPayload(std::span<const std::uint8_t> payload, const Key& identifier,
                           int maxGeneration) {
    if (payload.size() < 16) return PayloadCheck::Corrupt;
    std::uint64_t seed = 0;
    std::memcpy(&seed, payload.data(), 8);
    Bytes expected(payload.size() - 8);
    fillStream(expected.data(), expected.size(), seed);
    if (std::memcmp(expected.data(), payload.data() + 8, expected.size()) != 0)
        return PayloadCheck::Corrupt;
    for (int g = 0; g <= maxGeneration; ++g)
        if (payloadSeed(identifier, g) == seed) return PayloadCheck::Ok;
    return PayloadCheck::ForeignSeed;
}

std::string BenchRecord::toJsonLine() const {
    json j;
    j["process_id"] = processId;
    j["role"] = role;
    j["phase"] = phase;
    j["mode"] = mode;
    j["start_ns"] = startNanos;
    j["end_ns"] = endNanos;
    j["bytes"] = bytes;
    j["fields"] = fields;
    j["not_found"] = notFound;
    j["checksum_failures"] = checksumFailures;
    j["listed_entries"] = listedEntries;
    j["failed"] = failed;
    json cats = json::object();
    for (int c = 0; c < kProfCategories; ++c) {
        cats[profCategoryName(static_cast<ProfCategory>(c))] = {{"nanos", categoryNanos[c]},
                                                                {"ops", categoryOps[c]}};
    }
    j["categories"] = cats;
    return j.dump();
}

BenchRecord BenchRecord::fromJsonLine(const std::string& line) {
    json j = json::parse(line);
    BenchRecord r;
    r.processId = j.at("process_id").get<int>();
    r.role = j.at("role").get<std::string>();
    r.phase = j.at("phase").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.startNanos = j.at("start_ns").get<std::uint64_t>();
    r.endNanos = j.at("end_ns").get<std::uint64_t>();
    r.bytes = j.at("bytes").get<std::uint64_t>();
    r.fields = j.at("fields").get<std::uint64_t>();
    r.notFound = j.at("not_found").get<std::uint64_t>();
    r.checksumFailures = j.at("checksum_failures").get<std::uint64_t>();
    r.listedEntries = j.at("listed_entries").get<std::uint64_t>();
    r.failed = j.at("failed").get<bool>();
    const auto& cats = j.at("categories");
    for (int c = 0; c < kProfCategories; ++c) {
        const auto& e = cats.at(profCategoryName(static_cast<ProfCategory>(c)));
        r.categoryNanos[c] = e.at("nanos").get<std::uint64_t>();
        r.categoryOps[c] = e.at("ops").get<std::uint64_t>();
    }
    return r;
}

namespace {

struct WorkerState {
    Profiler profiler;
    BenchRecord record;

    void markIo(std::uint64_t start, std::uint64_t end) {
        if (record.startNanos == 0) record.startNanos = start;
        record.endNanos = end;
    }

    void finish() {
        for (int c = 0; c < kProfCategories; ++c) {
            record.categoryNanos[c] = profiler.counters[c].nanos.load();
            record.categoryOps[c] = profiler.counters[c].ops.load();
        }
    }
};

void runArchive(Fdb& fdb, const Schema& schema, const RunSpec& spec, WorkerState& st) {
    for (int step = 0; step < spec.nsteps; ++step) {
        for (int level = 0; level < spec.nlevels; ++level) {
            for (int param = 0; param < spec.nparams; ++param) {
                Key id = makeIdentifier(schema, spec, spec.member, step, level, param);
                Bytes payload = makePayload(id, spec.fieldSize, spec.generation);
                std::uint64_t t0 = monotonicNanos();
                fdb.archive(id, payload);
                st.markIo(t0, monotonicNanos());
                st.record.bytes += payload.size();
                st.record.fields += 1;
            }
        }
        std::uint64_t t0 = monotonicNanos();
        fdb.flush();
        st.markIo(t0, monotonicNanos());
    }
}

void readOne(Fdb& fdb, const Schema& schema, const RunSpec& spec, WorkerState& st, int member,
             int step, int level, int param) {
    Key id = makeIdentifier(schema, spec, member, step, level, param);
    std::uint64_t t0 = monotonicNanos();
    auto data = fdb.retrieve(id);
    st.markIo(t0, monotonicNanos());
    if (!data) {
        st.record.notFound += 1;
        return;
    }
    st.record.bytes += data->size();
    st.record.fields += 1;
    if (data->size() != spec.fieldSize || verifyPayload(*data, id) != PayloadCheck::Ok)
        st.record.checksumFailures += 1;
}

void runRetrieve(Fdb& fdb, const Schema& schema, const RunSpec& spec, WorkerState& st) {
    std::vector<int> members = spec.readMembers;
    if (members.empty()) members.push_back(spec.member);
    if (spec.transposed) {
        for (int step = 0; step < spec.nsteps; ++step)
            for (int member : members)
                for (int level = 0; level < spec.nlevels; ++level)
                    for (int param = 0; param < spec.nparams; ++param)
                        readOne(fdb, schema, spec, st, member, step, level, param);
    } else {
        for (int member : members)
            for (int step = 0; step < spec.nsteps; ++step)
                for (int level = 0; level < spec.nlevels; ++level)
                    for (int param = 0; param < spec.nparams; ++param)
                        readOne(fdb, schema, spec, st, member, step, level, param);
    }
}

void runList(Fdb& fdb, const Schema& schema, const RunSpec& spec, WorkerState& st) {
    // List every field of the first step across all members of the run.
    Key probe = makeIdentifier(schema, spec, spec.member, 0, 0, 0);
    Request request;
    for (const auto& kw : schema.datasetKeywords())
        request.set(kw, std::set<std::string>{std::string(*probe.get(kw))});
    request.set("step", std::set<std::string>{"0"});
    std::uint64_t t0 = monotonicNanos();
    auto entries = fdb.list(request);
    st.markIo(t0, monotonicNanos());
    st.record.listedEntries = entries.size();
}

}  // namespace

BenchRecord runWorker(const Config& config, const Schema& schema, RunSpec spec) {
    WorkerState st;
    st.record.processId = spec.processId;
    st.record.role = spec.role;
    st.record.phase = spec.phase;
    st.record.mode = modeName(spec.mode);
    auto fdb = openFdb(config, schema, &st.profiler);
    try {
        switch (spec.mode) {
            case Mode::Archive: runArchive(*fdb, schema, spec, st); break;
            case Mode::Retrieve: runRetrieve(*fdb, schema, spec, st); break;
            case Mode::List: runList(*fdb, schema, spec, st); break;
        }
    } catch (const std::exception& e) {
        st.finish();
        st.record.failed = true;
        throw WorkerFailure(st.record, e.what());
    }
    st.finish();
    return st.record;
}

}  // namespace fdb::hammer
