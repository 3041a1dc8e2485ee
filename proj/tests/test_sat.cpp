#include <vector>

#include "doctest.h"
#include "mtsref/gen.hpp"
#include "mtsref/sat.hpp"

using namespace mtsref;

namespace {

using Cnf = std::vector<std::vector<int>>;

bool bruteSat(const Cnf& cnf, int vars) {
    for (std::uint64_t m = 0; m < (1ull << vars); ++m) {
        bool all = true;
        for (const auto& c : cnf) {
            bool any = false;
            for (int l : c) any = any || (((m >> (std::abs(l) - 1)) & 1u) == (l > 0 ? 1u : 0u));
            if (!(all = any)) break;
        }
        if (all) return true;
    }
    return false;
}

Cnf randomCnf(Rng& rng, int vars, int clauses, int width) {
    Cnf cnf;
    for (int i = 0; i < clauses; ++i) {
        std::vector<int> c;
        int w = 1 + static_cast<int>(rng.below(width));
        for (int j = 0; j < w; ++j) {
            int v = 1 + static_cast<int>(rng.below(vars));
            c.push_back(rng.chance(1, 2) ? v : -v);
        }
        cnf.push_back(c);
    }
    return cnf;
}

}  // namespace

TEST_CASE("trivial instances") {
    SatSolver empty;
    CHECK(empty.solve());

    SatSolver unit;
    int x = unit.newVar();
    unit.addClause({x});
    REQUIRE(unit.solve());
    CHECK(unit.modelValue(x));

    SatSolver contra;
    int y = contra.newVar();
    contra.addClause({y});
    CHECK_FALSE(contra.addClause({-y}));
    CHECK_FALSE(contra.solve());

    SatSolver emptyClause;
    emptyClause.newVar();
    CHECK_FALSE(emptyClause.addClause(std::span<const int>{}));
    CHECK_FALSE(emptyClause.solve());
}

TEST_CASE("pigeonhole 4 into 3 is unsatisfiable") {
    SatSolver s;
    int p[4][3];
    for (auto& row : p)
        for (int& v : row) v = s.newVar();
    for (auto& row : p) s.addClause({row[0], row[1], row[2]});
    for (int h = 0; h < 3; ++h)
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) s.addClause({-p[i][h], -p[j][h]});
    CHECK_FALSE(s.solve());
}

TEST_CASE("random CNF agrees with brute force and models satisfy the clauses") {
    Rng rng(2024);
    int sat = 0, unsat = 0;
    for (int round = 0; round < 600; ++round) {
        int vars = 3 + static_cast<int>(rng.below(10));
        int clauses = static_cast<int>(rng.between(vars * 2, vars * 6));
        auto cnf = randomCnf(rng, vars, clauses, 4);
        SatSolver s;
        for (int v = 0; v < vars; ++v) s.newVar();
        for (const auto& c : cnf) s.addClause(std::span<const int>(c));
        bool got = s.solve();
        CHECK(got == bruteSat(cnf, vars));
        if (got) {
            ++sat;
            for (const auto& c : cnf) {
                bool any = false;
                for (int l : c) any = any || (s.modelValue(std::abs(l)) == (l > 0));
                CHECK(any);
            }
        } else {
            ++unsat;
        }
    }
    CHECK(sat > 50);
    CHECK(unsat > 50);
}

TEST_CASE("incremental clause addition") {
    Rng rng(77);
    for (int round = 0; round < 100; ++round) {
        int vars = 8;
        auto cnf = randomCnf(rng, vars, 30, 3);
        SatSolver s;
        for (int v = 0; v < vars; ++v) s.newVar();
        Cnf prefix;
        for (const auto& c : cnf) {
            s.addClause(std::span<const int>(c));
            prefix.push_back(c);
            if (prefix.size() % 5 == 0) CHECK(s.solve() == bruteSat(prefix, vars));
        }
    }
}

TEST_CASE("larger satisfiable chain") {
    SatSolver s;
    const int n = 2000;
    for (int i = 0; i < n; ++i) s.newVar();
    for (int i = 1; i < n; ++i) s.addClause({-i, i + 1});
    s.addClause({1});
    REQUIRE(s.solve());
    CHECK(s.modelValue(n));
}
