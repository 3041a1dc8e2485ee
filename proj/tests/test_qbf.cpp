#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "mtsref/core.hpp"
#include "mtsref/gen.hpp"
#include "mtsref/modal.hpp"
#include "mtsref/qbf.hpp"

using namespace mtsref;
using testing::loadModel;

namespace {

bool evalCircuit(const ExprPool& pool, ExprPool::Id e, const std::vector<bool>& val) {
    switch (pool.kind(e)) {
    case ExprKind::True: return true;
    case ExprKind::Var: return val[pool.varOf(e)];
    case ExprKind::Not: return !evalCircuit(pool, pool.children(e)[0], val);
    case ExprKind::And:
        for (auto k : pool.children(e))
            if (!evalCircuit(pool, k, val)) return false;
        return true;
    case ExprKind::Or:
        for (auto k : pool.children(e))
            if (evalCircuit(pool, k, val)) return true;
        return false;
    }
    return false;
}

// Reference semantics: flatten the prefix and split variable by variable.
bool oracle(const QbfInstance& inst) {
    std::vector<std::pair<Quantifier, std::uint32_t>> order;
    std::vector<bool> bound(inst.variableCount() + 1, false);
    for (const auto& b : inst.prefix)
        for (auto v : b.vars) {
            order.emplace_back(b.quantifier, v);
            bound[v] = true;
        }
    for (std::uint32_t v = 1; v <= inst.variableCount(); ++v)
        if (!bound[v]) order.insert(order.begin(), {Quantifier::Exists, v});
    std::vector<bool> val(inst.variableCount() + 1, false);
    auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == order.size()) return evalCircuit(inst.pool, inst.matrix, val);
        auto [q, v] = order[i];
        val[v] = false;
        bool lo = self(self, i + 1);
        if (q == Quantifier::Exists && lo) return true;
        if (q == Quantifier::Forall && !lo) return false;
        val[v] = true;
        return self(self, i + 1);
    };
    return rec(rec, 0);
}

QbfInstance randomQbf(Rng& rng, std::uint32_t maxVars = 8) {
    QbfInstance inst;
    auto n = static_cast<std::uint32_t>(rng.between(1, maxVars));
    for (std::uint32_t i = 0; i < n; ++i) inst.addVariable({VarRole::Plain, 0, 0, "x" + std::to_string(i + 1)});
    Quantifier q = rng.chance(1, 2) ? Quantifier::Exists : Quantifier::Forall;
    for (std::uint32_t v = 1; v <= n;) {
        QuantBlock b{q, {}};
        auto len = static_cast<std::uint32_t>(rng.between(1, 3));
        for (std::uint32_t k = 0; k < len && v <= n; ++k) b.vars.push_back(v++);
        inst.prefix.push_back(b);
        q = q == Quantifier::Exists ? Quantifier::Forall : Quantifier::Exists;
    }
    auto gen = [&](auto&& self, int depth) -> ExprPool::Id {
        if (depth == 0 || rng.chance(1, 4)) {
            auto leaf = inst.pool.var(static_cast<std::uint32_t>(rng.between(1, n)));
            return rng.chance(1, 2) ? inst.pool.negate(leaf) : leaf;
        }
        std::vector<ExprPool::Id> kids;
        auto k = rng.between(2, 3);
        for (std::uint64_t i = 0; i < k; ++i) kids.push_back(self(self, depth - 1));
        switch (rng.below(3)) {
        case 0: return inst.pool.conj(kids);
        case 1: return inst.pool.disj(kids);
        default: return inst.pool.iff(kids[0], kids[1]);
        }
    };
    inst.matrix = gen(gen, 4);
    inst.normalize();
    return inst;
}

QbfInstance single(Quantifier q, const char* op) {
    QbfInstance inst;
    auto x = inst.addVariable({VarRole::Plain, 0, 0, "x"});
    inst.prefix.push_back({q, {x}});
    inst.matrix = inst.pool.var(x);
    if (std::string(op) == "iff") {
        auto y = inst.addVariable({VarRole::Plain, 0, 0, "y"});
        inst.prefix.push_back({Quantifier::Exists, {y}});
        inst.matrix = inst.pool.iff(inst.pool.var(x), inst.pool.var(y));
    }
    return inst;
}

std::vector<std::string> nonCommentLines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != 'c') out.push_back(line);
    return out;
}

RandomSystemConfig pairConfig(SystemKind kind, std::size_t maxStates, std::size_t params = 0) {
    RandomSystemConfig cfg;
    cfg.kind = kind;
    cfg.maxStates = maxStates;
    cfg.maxActions = 2;
    cfg.maxOutDegree = 3;
    cfg.maxParams = params;
    return cfg;
}

}  // namespace

TEST_CASE("tiny instances") {
    auto ex = single(Quantifier::Exists, "var");
    CHECK(evalQbfExpansion(ex));
    CHECK(evalQbfCegar(ex));
    auto fa = single(Quantifier::Forall, "var");
    CHECK_FALSE(evalQbfExpansion(fa));
    CHECK_FALSE(evalQbfCegar(fa));
    auto mirror = single(Quantifier::Forall, "iff");
    CHECK(evalQbfExpansion(mirror));
    CHECK(evalQbfCegar(mirror));
    auto swapped = mirror;
    std::swap(swapped.prefix[0].quantifier, swapped.prefix[1].quantifier);
    CHECK_FALSE(evalQbf(swapped));
}

TEST_CASE("QDIMACS of the tiny instances") {
    auto ex = single(Quantifier::Exists, "var");
    CHECK(nonCommentLines(toQdimacs(ex)) == std::vector<std::string>{"p cnf 1 1", "e 1 0", "1 0"});
    CHECK(toQdimacs(ex).find("c ") == 0);

    auto mirror = single(Quantifier::Forall, "iff");
    auto lines = nonCommentLines(toQdimacs(mirror));
    REQUIRE(lines.size() >= 4);
    CHECK(lines[1] == "a 1 0");
    CHECK(lines[2].rfind("e 2", 0) == 0);
    // Top-level conjunction of implications needs no aux variables.
    CHECK(lines[0] == "p cnf 2 2");
    auto back = parseQdimacs(toQdimacs(mirror));
    CHECK(back.prefix.size() == 2);
    CHECK(evalQbfExpansion(back));
}

TEST_CASE("variable limit") {
    QbfInstance inst;
    std::vector<ExprPool::Id> lits;
    for (int i = 0; i < 30; ++i) lits.push_back(inst.pool.var(inst.addVariable({VarRole::Plain, 0, 0, "x"})));
    QuantBlock b{Quantifier::Exists, {}};
    for (std::uint32_t v = 1; v <= 30; ++v) b.vars.push_back(v);
    inst.prefix.push_back(b);
    inst.matrix = inst.pool.conj(lits);
    try {
        evalQbfExpansion(inst);
        FAIL("expected VarLimit");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VarLimit);
    }
    CHECK(evalQbf(inst));
}

TEST_CASE("evaluators agree with the reference semantics") {
    Rng rng(99);
    for (int round = 0; round < 400; ++round) {
        auto inst = randomQbf(rng);
        bool want = oracle(inst);
        CHECK(evalQbfExpansion(inst) == want);
        CHECK(evalQbfCegar(inst) == want);
    }
}

TEST_CASE("QDIMACS round-trip preserves the verdict") {
    Rng rng(123);
    for (int round = 0; round < 50; ++round) {
        auto inst = randomQbf(rng, 6);
        auto text = toQdimacs(inst);
        auto back = parseQdimacs(text);
        Limits lim;
        lim.maxQbfExpansionVars = 40;
        CHECK(evalQbfExpansion(back, lim) == evalQbf(inst));
        CHECK(oracle(back) == oracle(inst));
    }
}

TEST_CASE("QDIMACS parser errors") {
    CHECK_THROWS_AS(parseQdimacs("e 1 0\n1 0\n"), Error);
    CHECK_THROWS_AS(parseQdimacs("p cnf 1 1\ne 2 0\n1 0\n"), Error);
    auto free = parseQdimacs("p cnf 2 1\na 1 0\n1 2 0\n");
    CHECK(free.prefix.front().quantifier == Quantifier::Exists);
    CHECK(evalQbf(free));
}

TEST_CASE("encoding variable counts") {
    auto l = parseSystem("system L { states: s0, s1; init: s0; trans: s0 -a-> s1; s1 -a-> s0; }");
    auto r = parseSystem("system R { states: t0, t1; init: t0; trans: t0 -a-> t1; t1 -b-> t0; }");
    auto inst = encodeBmts(l, 0, r, 0);
    CHECK(inst.countRole(VarRole::Rel) == 4);
    CHECK(inst.countRole(VarRole::LTrans) == 2);
    CHECK(inst.countRole(VarRole::RTrans) == 4);
    REQUIRE(inst.prefix.size() == 3);
    CHECK(inst.prefix[0].quantifier == Quantifier::Exists);
    CHECK(inst.prefix[1].quantifier == Quantifier::Forall);
    CHECK(inst.prefix[2].quantifier == Quantifier::Exists);
    CHECK(inst.prefix[0].vars.size() == 4);
    CHECK(inst.prefix[1].vars.size() == 2);
    CHECK(inst.prefix[2].vars.size() == 4);
}

TEST_CASE("encoded examples") {
    auto classic = loadModel("classic.mts");
    CHECK_FALSE(evalQbf(encodeBmts(classic[0], 0, classic[1], 0)));
    auto one = parseSystem("system O { states: s; init: s; }");
    CHECK(evalQbf(encodeBmts(one, 0, one, 0)));

    auto ex3 = loadModel("ex3.pmts");
    auto i3 = encodePmts(ex3[0], 0, ex3[1], 0);
    CHECK(i3.prefix.front().quantifier == Quantifier::Forall);
    CHECK(i3.countRole(VarRole::LParam) == 1);
    CHECK(i3.countRole(VarRole::RParam) == 1);
    CHECK(evalQbf(i3));
    CHECK(evalQbfCegar(i3));
    auto ex4 = loadModel("ex4.pmts");
    CHECK_FALSE(evalQbf(encodePmts(ex4[0], 0, ex4[1], 0)));
    CHECK_FALSE(evalQbfCegar(encodePmts(ex4[0], 0, ex4[1], 0)));

    CHECK_THROWS_AS(encodeBmts(ex3[0], 0, ex3[1], 0), Error);
}

TEST_CASE("parameter-free PMTS encoding equals the BMTS encoding") {
    auto classic = loadModel("classic.mts");
    auto a = encodeBmts(classic[0], 0, classic[1], 0);
    auto b = encodePmts(classic[0], 0, classic[1], 0);
    CHECK(a.variableCount() == b.variableCount());
    REQUIRE(a.prefix.size() == b.prefix.size());
    for (std::size_t i = 0; i < a.prefix.size(); ++i) {
        CHECK(a.prefix[i].quantifier == b.prefix[i].quantifier);
        CHECK(a.prefix[i].vars == b.prefix[i].vars);
    }
    CHECK(toQdimacs(a) == toQdimacs(b));
}

TEST_CASE("BMTS encoding agrees with the direct checker") {
    Rng rng(7);
    int disagreements = 0, holds = 0, total = 0;
    for (SystemKind kind : {SystemKind::MTS, SystemKind::DMTS, SystemKind::BMTS}) {
        auto cfg = pairConfig(kind, 5);
        for (int round = 0; round < 120; ++round) {
            auto l = prune(randomSystem(cfg, rng)).system;
            auto r = prune(randomSystem(cfg, rng)).system;
            if (l.stateCount() == 0 || r.stateCount() == 0) continue;
            bool direct = modalRefinesBmts(l, 0, r, 0).holds;
            bool q = evalQbf(encodeBmts(l, 0, r, 0));
            disagreements += direct != q;
            holds += direct;
            ++total;
        }
    }
    CHECK(disagreements == 0);
    CHECK(holds > 0);
    CHECK(holds < total);
}

TEST_CASE("PMTS encoding agrees with the direct checker") {
    Rng rng(8);
    auto cfg = pairConfig(SystemKind::PMTS, 3, 2);
    int disagreements = 0;
    for (int round = 0; round < 150; ++round) {
        auto l = prune(randomSystem(cfg, rng)).system;
        auto r = prune(randomSystem(cfg, rng)).system;
        if (l.stateCount() == 0 || r.stateCount() == 0) continue;
        bool direct = modalRefinesPmts(l, 0, r, 0).holds;
        auto inst = encodePmts(l, 0, r, 0);
        disagreements += direct != evalQbf(inst);
        disagreements += direct != evalQbfCegar(inst);
    }
    CHECK(disagreements == 0);
}

TEST_CASE("fixed-relation encoding agrees with the fixed-relation checker") {
    auto ex3 = loadModel("ex3.pmts");
    auto i3 = encodePmtsOriginal(ex3[0], 0, ex3[1], 0);
    CHECK(i3.prefix.front().quantifier == Quantifier::Exists);
    CHECK(i3.variables[i3.prefix.front().vars.front() - 1].role == VarRole::Rel);
    CHECK_FALSE(evalQbf(i3));
    CHECK_FALSE(evalQbfCegar(i3));

    Rng rng(18);
    auto cfg = pairConfig(SystemKind::PMTS, 3, 2);
    int disagreements = 0, strict = 0;
    for (int round = 0; round < 150; ++round) {
        auto l = prune(randomSystem(cfg, rng)).system;
        auto r = prune(randomSystem(cfg, rng)).system;
        if (l.stateCount() == 0 || r.stateCount() == 0) continue;
        bool direct = modalRefinesPmtsOriginal(l, 0, r, 0).holds;
        auto inst = encodePmtsOriginal(l, 0, r, 0);
        disagreements += direct != evalQbf(inst);
        disagreements += direct != evalQbfCegar(inst);
        strict += !direct && modalRefinesPmts(l, 0, r, 0).holds;
    }
    CHECK(disagreements == 0);
    MESSAGE("pairs separating the two definitions: " << strict);
}

TEST_CASE("Tseitin output is equisatisfiable") {
    Rng rng(9);
    auto cfg = pairConfig(SystemKind::BMTS, 2);
    cfg.maxOutDegree = 2;
    Limits lim;
    lim.maxQbfExpansionVars = 64;
    for (int round = 0; round < 40; ++round) {
        auto l = prune(randomSystem(cfg, rng)).system;
        auto r = prune(randomSystem(cfg, rng)).system;
        if (l.stateCount() == 0 || r.stateCount() == 0) continue;
        auto inst = encodeBmts(l, 0, r, 0);
        auto cnf = parseQdimacs(toQdimacs(inst));
        CHECK(evalQbfCegar(cnf) == evalQbf(inst));
    }
}

TEST_CASE("encoding size is linear in the measure") {
    // Pinned constant; measured maximum ratio on this corpus stays well below.
    constexpr double kSizeConstant = 8.0;
    Rng rng(10);
    double worst = 0;
    for (SystemKind kind : {SystemKind::MTS, SystemKind::BMTS, SystemKind::PMTS}) {
        auto cfg = pairConfig(kind, 6, 2);
        for (int round = 0; round < 80; ++round) {
            auto l = randomSystem(cfg, rng);
            auto r = randomSystem(cfg, rng);
            auto inst = kind == SystemKind::PMTS ? encodePmts(l, 0, r, 0) : encodeBmts(l, 0, r, 0);
            double ratio = double(inst.pool.size(inst.matrix)) / double(encodingSizeMeasure(l, r));
            worst = std::max(worst, ratio);
            CHECK(ratio <= kSizeConstant);
        }
    }
    MESSAGE("worst size ratio " << worst);
}

TEST_CASE("external solver protocol") {
    auto ex = single(Quantifier::Exists, "var");
    CHECK(solveExternal(ex, {"sh -c 'exit 10' solver {file}", std::nullopt}));
    CHECK_FALSE(solveExternal(ex, {"sh -c 'test -s \"$0\" && exit 20' {file}", std::nullopt}));
    try {
        solveExternal(ex, {"sh -c 'exit 3'", std::nullopt});
        FAIL("expected SolverProtocol");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SolverProtocol);
    }
    try {
        solveExternal(ex, {"/nonexistent/qbf-solver", std::nullopt});
        FAIL("expected SolverUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SolverUnavailable);
    }
    try {
        solveExternal(ex, {"sh -c 'sleep 5'", 0.2});
        FAIL("expected SolverTimeout");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SolverTimeout);
    }
}
