#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "mtsref/bench.hpp"
#include "mtsref/core.hpp"
#include "mtsref/gen.hpp"
#include "mtsref/modal.hpp"
#include "mtsref/qbf.hpp"
#include "mtsref/textfmt.hpp"

using namespace mtsref;

namespace {

GenConfig config(SystemKind kind, std::size_t states, std::size_t params = 0) {
    GenConfig c;
    c.kind = kind;
    c.numStates = states;
    c.numParams = params;
    return c;
}

std::vector<std::size_t> outDegrees(const TransitionSystem& sys) {
    std::vector<std::size_t> d(sys.stateCount(), 0);
    for (const auto& t : sys.transitions()) ++d[t.source];
    return d;
}

std::vector<std::string> column(const std::string& csv, std::size_t index) {
    std::vector<std::string> out;
    std::size_t pos = csv.find('\n') + 1;
    while (pos < csv.size()) {
        auto end = csv.find('\n', pos);
        std::string line = csv.substr(pos, end - pos);
        std::size_t start = 0;
        for (std::size_t i = 0; i < index; ++i) start = line.find(',', start) + 1;
        out.push_back(line.substr(start, line.find(',', start) - start));
        pos = end + 1;
    }
    return out;
}

}  // namespace

TEST_CASE("generated MTS with uniform branching") {
    auto sys = generate(config(SystemKind::MTS, 25));
    CHECK(classify(sys) == SystemKind::MTS);
    CHECK(sys.stateCount() == 25);
    for (auto d : outDegrees(sys)) CHECK(d == 2);
    CHECK(reachableStates(sys, 0).size() == 25);
    CHECK(serializeSystem(generate(config(SystemKind::MTS, 25))) == serializeSystem(sys));
    auto other = config(SystemKind::MTS, 25);
    other.seed = 2;
    CHECK(serializeSystem(generate(other)) != serializeSystem(sys));
}

TEST_CASE("generated PMTS carries its parameters") {
    auto sys = generate(config(SystemKind::PMTS, 20, 5));
    CHECK(classify(sys) == SystemKind::PMTS);
    CHECK(sys.paramCount() == 5);
}

TEST_CASE("generated systems have the requested kind and are locally consistent") {
    for (auto kind : {SystemKind::MTS, SystemKind::DMTS, SystemKind::BMTS, SystemKind::PMTS})
        for (auto topo : {Topology::TreeNoise, Topology::Clusters})
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                auto c = config(kind, 30, kind == SystemKind::PMTS ? 3 : 0);
                c.topology = topo;
                c.branchingDegree = 3;
                c.seed = seed;
                auto sys = generate(c);
                CHECK(classify(sys) == kind);
                for (StateId s = 0; s < sys.stateCount(); ++s) CHECK(isLocallyConsistent(sys, s));
                for (auto d : outDegrees(sys)) CHECK(d == 3);
                std::set<std::tuple<StateId, ActionId, StateId>> unique;
                for (const auto& t : sys.transitions()) unique.emplace(t.source, t.action, t.target);
                CHECK(unique.size() == sys.transitions().size());
            }
}

TEST_CASE("clusters connect only through interface states") {
    auto c = config(SystemKind::BMTS, 40);
    c.topology = Topology::Clusters;
    c.clusterSize = 8;
    c.interfaceCount = 2;
    c.branchingDegree = 4;
    int crossing = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        c.seed = seed;
        auto sys = generate(c);
        for (const auto& t : sys.transitions()) {
            if (t.source / 8 == t.target / 8) continue;
            ++crossing;
            CHECK(t.source % 8 < 2);
            CHECK(t.target % 8 < 2);
        }
        CHECK(reachableStates(sys, 0).size() == 40);
    }
    CHECK(crossing > 0);
}

TEST_CASE("generator rejects invalid configurations") {
    auto c = config(SystemKind::BMTS, 5, 2);
    CHECK_THROWS_AS(generate(c), Error);
    c = config(SystemKind::BMTS, 1);
    c.branchingDegree = 3;
    c.alphabetSize = 2;
    try {
        generate(c);
        FAIL("expected GenFailure");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GenFailure);
    }
}

TEST_CASE("bench smoke matrix") {
    BenchOptions o;
    o.pairsPerCell = 3;
    o.timeoutSecs = 30;
    auto rows = runBench({config(SystemKind::BMTS, 25)}, o);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK_FALSE(r.timedOut);
        CHECK((r.verdict == "HOLDS" || r.verdict == "DOES-NOT-HOLD"));
    }
    auto csv = benchCsv(rows);
    CHECK(csv.rfind("kind,states,alphabet,branching,params,topology,seed,checker,verdict,wall_ms,timed_out\n", 0) == 0);
    CHECK(column(csv, 0) == std::vector<std::string>(3, "BMTS"));
}

TEST_CASE("bench rows are deterministic across worker counts") {
    std::vector<GenConfig> matrix;
    for (auto [k, p] : {std::pair{SystemKind::MTS, 0}, std::pair{SystemKind::PMTS, 2}})
        for (std::size_t n : {6, 10}) matrix.push_back(config(k, n, p));
    BenchOptions o;
    o.pairsPerCell = 4;
    o.checkers = {Checker::Direct, Checker::QbfInternal};
    auto one = runBench(matrix, o);
    o.workers = 3;
    auto three = runBench(matrix, o);
    auto a = benchCsv(one), b = benchCsv(three);
    for (std::size_t col : {0, 1, 4, 6, 7, 8}) CHECK(column(a, col) == column(b, col));
    // Checker agreement wherever both completed.
    for (std::size_t i = 0; i + 1 < one.size(); i += 2) {
        REQUIRE(one[i].checker == Checker::Direct);
        if (one[i].timedOut || one[i + 1].timedOut) continue;
        CHECK(one[i].verdict == one[i + 1].verdict);
    }
}

TEST_CASE("self pairs hold under every checker") {
    for (auto [k, p] : {std::pair{SystemKind::BMTS, 0}, std::pair{SystemKind::PMTS, 2}}) {
        auto sys = generate(config(k, 8, p));
        CHECK(modalRefinesPmts(sys, 0, sys, 0).holds);
        auto inst = p ? encodePmts(sys, 0, sys, 0) : encodeBmts(sys, 0, sys, 0);
        CHECK(evalQbf(inst));
    }
}

TEST_CASE("timeouts are flagged per row") {
    BenchOptions o;
    o.pairsPerCell = 2;
    o.timeoutSecs = 0;
    o.checkers = {Checker::QbfInternal};
    auto rows = runBench({config(SystemKind::BMTS, 40)}, o);
    for (const auto& r : rows) {
        CHECK(r.timedOut);
        CHECK(r.verdict == "TIMEOUT");
    }
}

TEST_CASE("bench matrix JSON") {
    auto m = parseBenchMatrix(R"({"pairsPerCell": 2, "timeoutSecs": 5, "checkers": ["DIRECT", "QBF_INTERNAL"],
        "cells": [{"kind": "PMTS", "states": [25, 50], "params": [1, 5], "branching": 2, "alphabet": 2, "seed": 7},
                  {"kind": "MTS", "states": 10, "topology": "CLUSTERS", "clusterSize": 5}]})");
    CHECK(m.options.pairsPerCell == 2);
    CHECK(m.options.checkers.size() == 2);
    REQUIRE(m.cells.size() == 5);
    CHECK(m.cells[0].numParams == 1);
    CHECK(m.cells[1].numStates == 50);
    CHECK(m.cells[3].numParams == 5);
    CHECK(m.cells[4].topology == Topology::Clusters);
    CHECK(m.cells[0].seed == 7);
    for (const char* bad : {"[]", "{\"cells\": [{\"kind\": \"XTS\"}]}", "{\"cells\": [{\"kind\": \"MTS\", \"params\": 2}]}",
                            "{\"cells\": [], \"checkers\": [\"NOPE\"]}", "{not json"})
        CHECK_THROWS_AS(parseBenchMatrix(bad), Error);
}

TEST_CASE("golden corpus digest is pinned") {
    // FNV-1a over the serialized pair systems of every golden cell. Changes
    // when the generator or the serializer changes; update deliberately.
    auto m = parseBenchMatrix(testing::readModel("golden.json"));
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& cell : m.cells)
        for (std::size_t i = 0; i < m.options.pairsPerCell; ++i) {
            auto [l, r] = benchPair(cell, benchPairSeed(cell, i));
            CHECK(classify(l) == cell.kind);
            for (char ch : serializeSystem(l) + serializeSystem(r)) {
                h ^= static_cast<unsigned char>(ch);
                h *= 1099511628211ull;
            }
        }
    CHECK(h == 0x0bc39cce60b0b8ccull);
}
