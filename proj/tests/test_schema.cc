/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "fdb/schema.h"

using namespace fdb;

namespace {

const char* kForecastSchema =
    "dataset: class, stream, expver, date, time\n"
    "collocation: type, levtype, number, levelist\n"
    "element: step, param\n";

Key forecastIdentifier() {
    Key k;
    k.set("class", "od");
    k.set("date", "20231201");
    k.set("levtype", "sfc");
    k.set("step", "1");
    k.set("stream", "oper");
    k.set("time", "1200");
    k.set("number", "13");
    k.set("param", "v");
    k.set("expver", "0001");
    k.set("type", "ef");
    k.set("levelist", "1");
    return k;
}

}  // namespace

TEST_CASE("key invariants") {
    Key k;
    k.set("a", "1");
    CHECK(k.get("a") == "1");
    CHECK(!k.has("b"));
    CHECK_THROWS_AS(k.set("a", "2"), KeyError);   // duplicate keyword
    CHECK_THROWS_AS(k.set("", "x"), KeyError);    // empty keyword
    CHECK_THROWS_AS(k.set("b", ""), KeyError);    // empty value
    CHECK_THROWS_AS(k.set("b", "x:y"), KeyError); // reserved separator
    CHECK_THROWS_AS(k.set("b", "x=y"), KeyError);
    CHECK_THROWS_AS(k.set("b:c", "x"), KeyError);
}

TEST_CASE("three-level split of the forecast identifier") {
    Schema schema = Schema::parse(kForecastSchema);
    auto [ds, coll, el] = schema.split(forecastIdentifier());
    CHECK(ds.valuesToString() == "od:oper:0001:20231201:1200");
    CHECK(coll.valuesToString() == "ef:sfc:13:1");
    CHECK(el.valuesToString() == "1:v");
}

TEST_CASE("split then merge round trips") {
    Schema schema = Schema::parse(kForecastSchema);
    Key full = forecastIdentifier();
    auto [ds, coll, el] = schema.split(full);
    Key merged =
        schema.merge(ds.valuesToString(), coll.valuesToString(), el.valuesToString());
    for (const auto& [kw, v] : full.pairs()) CHECK(merged.get(kw) == v);
    CHECK(merged.pairs().size() == full.pairs().size());
}

TEST_CASE("split rejects missing and unknown keywords") {
    Schema schema = Schema::parse(kForecastSchema);
    Key partial;
    partial.set("class", "od");
    CHECK_THROWS(schema.split(partial));
    Key extra = forecastIdentifier();
    extra.set("resolution", "high");
    CHECK_THROWS(schema.split(extra));
}

TEST_CASE("schema DSL parsing") {
    CHECK_THROWS(Schema::parse("dataset: a\ncollocation: b\n"));        // missing level
    CHECK_THROWS(Schema::parse("dataset: a\ncollocation: a\nelement: b\n"));  // overlap
    CHECK_THROWS(Schema::parse("dataset:\ncollocation: a\nelement: b\n"));    // empty level
    Schema commented = Schema::parse("# comment\ndataset: a\ncollocation: b\nelement: c\n");
    CHECK(commented.datasetKeywords() == std::vector<std::string>{"a"});
}

TEST_CASE("fingerprints differ per layout") {
    Schema a = Schema::parse("dataset: x\ncollocation: y\nelement: z\n");
    Schema b = Schema::parse("dataset: x\ncollocation: z\nelement: y\n");
    CHECK(a.fingerprint() != b.fingerprint());
    CHECK(a.fingerprint() == Schema::parse("dataset: x\ncollocation: y\nelement: z\n").fingerprint());
}

TEST_CASE("random identifiers round trip through split and merge") {
    std::mt19937 rng(12345);
    Schema schema = Schema::parse(kForecastSchema);
    auto randomValue = [&] {
        std::string v;
        int n = 1 + int(rng() % 8);
        for (int i = 0; i < n; ++i) v += char('a' + rng() % 26);
        return v;
    };
    for (int iter = 0; iter < 200; ++iter) {
        Key full;
        for (const auto* kws : {&schema.datasetKeywords(), &schema.collocationKeywords(),
                                &schema.elementKeywords()})
            for (const auto& kw : *kws) full.set(kw, randomValue());
        auto [ds, coll, el] = schema.split(full);
        Key merged =
            schema.merge(ds.valuesToString(), coll.valuesToString(), el.valuesToString());
        for (const auto& [kw, v] : full.pairs()) CHECK(merged.get(kw) == v);
    }
}

TEST_CASE("stringify is injective for a fixed keyword list") {
    std::mt19937 rng(777);
    std::vector<std::string> kws = {"a", "bb", "ccc"};
    std::set<std::vector<std::string>> tuples;
    std::set<std::string> strings;
    for (int iter = 0; iter < 500; ++iter) {
        std::vector<std::string> tuple;
        for (std::size_t i = 0; i < kws.size(); ++i) {
            std::string v;
            int n = 1 + int(rng() % 4);
            for (int j = 0; j < n; ++j) v += char('a' + rng() % 3);
            tuple.push_back(v);
        }
        Key k;
        for (std::size_t i = 0; i < kws.size(); ++i) k.set(kws[i], tuple[i]);
        tuples.insert(tuple);
        strings.insert(k.valuesToString());
    }
    CHECK(tuples.size() == strings.size());
    // And the inverse recovers the tuple given the keyword list.
    Key k;
    k.set("a", "x");
    k.set("bb", "yy");
    Key back = Key::fromString(k.valuesToString(), {"a", "bb"});
    CHECK(back.get("a") == "x");
    CHECK(back.get("bb") == "yy");
}

TEST_CASE("request matching equals brute-force filtering") {
    std::mt19937 rng(424242);
    Schema schema = Schema::parse(kForecastSchema);
    std::vector<Key> keys;
    for (int s = 0; s < 3; ++s)
        for (int p = 0; p < 3; ++p) {
            Key k = forecastIdentifier();
            Key k2;
            for (const auto& [kw, v] : k.pairs()) {
                if (kw == "step")
                    k2.set(kw, std::to_string(s));
                else if (kw == "param")
                    k2.set(kw, "p" + std::to_string(p));
                else
                    k2.set(kw, v);
            }
            keys.push_back(k2);
        }
    for (int iter = 0; iter < 100; ++iter) {
        Request req;
        if (rng() % 2) req.set("step", {std::to_string(rng() % 4)});
        if (rng() % 2) req.set("param", {"p0", "p2"});
        for (const auto& k : keys) {
            bool expect = true;
            for (const auto& [kw, span] : req.spans()) {
                auto v = k.get(kw);
                if (v && !span.count(std::string(*v))) expect = false;
            }
            CHECK(req.matches(k) == expect);
        }
    }
}
