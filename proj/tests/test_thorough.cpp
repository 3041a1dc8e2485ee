#include "doctest.h"
#include "helpers.hpp"
#include "mtsref/core.hpp"
#include "mtsref/gen.hpp"
#include "mtsref/modal.hpp"
#include "mtsref/thorough.hpp"
#include "mtsref/transform.hpp"

using namespace mtsref;
using testing::loadModel;
using testing::state;

namespace {

RandomSystemConfig acyclicConfig(SystemKind kind, std::size_t maxStates, std::size_t params = 0) {
    RandomSystemConfig cfg;
    cfg.kind = kind;
    cfg.maxStates = maxStates;
    cfg.maxActions = 2;
    cfg.maxOutDegree = 3;
    cfg.maxParams = params;
    cfg.acyclic = true;
    return cfg;
}

bool refines(const TransitionSystem& impl, const TransitionSystem& spec, StateId t) {
    return modalRefinesBmts(impl, *impl.initial(), spec, t).holds;
}

bool sizeLimited(const Error& e) { return e.code() == ErrorCode::SizeLimit; }

}  // namespace

TEST_CASE("Avoid contains every empty avoidance set") {
    auto classic = loadModel("classic.mts");
    auto u = disjointUnion(classic[0], classic[1]);
    auto avoid = computeAvoid(u);
    for (StateId s = 0; s < u.stateCount(); ++s) CHECK(avoid.contains(s, std::uint64_t{0}));
    CHECK_FALSE(avoid.contains(state(u, "s0"), std::vector<StateId>{state(u, "t0")}));
    // s0 is not refined by the t1 branch alone: the deadlock implementation escapes it.
    CHECK(avoid.contains(state(u, "s0"), std::vector<StateId>{state(u, "t1")}));
}

TEST_CASE("a required step that the other side forbids is avoidable") {
    auto sys = parseSystem(R"(
system A {
  states: s, u, t, w;
  init: s;
  trans: s -a-> u; t -a-> w;
  phi s = (a,u);
  phi t = !(a,w);
}
)");
    auto avoid = computeAvoid(sys);
    CHECK(avoid.contains(state(sys, "s"), std::vector<StateId>{state(sys, "t")}));
    CHECK_FALSE(avoid.contains(state(sys, "t"), std::vector<StateId>{state(sys, "t")}));
    auto impl = distinguishingImplementation(avoid, sys, state(sys, "s"), avoid.maskOf({state(sys, "t")}));
    CHECK(refines(impl, sys, state(sys, "s")));
    CHECK_FALSE(refines(impl, sys, state(sys, "t")));
}

TEST_CASE("thorough refinement examples") {
    auto classic = loadModel("classic.mts");
    CHECK(thoroughRefinesBmts(classic[0], 0, classic[1], 0));
    CHECK_FALSE(modalRefinesBmts(classic[0], 0, classic[1], 0).holds);

    auto bad = parseSystem("system X { states: s, t; init: s; trans: s -a-> t; phi s = (a,t) && !(a,t); }");
    auto any = loadModel("traffic_mts.mts").at(0);
    CHECK(thoroughRefinesBmts(bad, 0, any, 0));
    CHECK_FALSE(thoroughRefinesBmts(any, 0, bad, 0));

    auto ex4 = loadModel("ex4.pmts");
    CHECK(thoroughRefinesPmts(ex4[0], 0, ex4[1], 0));
    auto ex3 = loadModel("ex3.pmts");
    CHECK(thoroughRefinesPmts(ex3[0], 0, ex3[1], 0));
    CHECK(thoroughRefinesPmts(ex3[1], 0, ex3[0], 0));
    CHECK(thoroughRefinesPmts(ex3[0], 0, ex3[0], 0));
    CHECK(thoroughRefinesPmts(any, 0, any, 0));
}

TEST_CASE("state limit on the Avoid universe") {
    SystemBuilder b("Big");
    for (int i = 0; i < 12; ++i) b.addState("s" + std::to_string(i));
    auto big = std::move(b).build();
    try {
        computeAvoid(big);
        FAIL("expected StateLimit");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StateLimit);
    }
}

TEST_CASE("implementation enumeration") {
    auto one = parseSystem("system O { states: s; init: s; }");
    CHECK(enumerateImplementations(one, 0, 0).size() == 1);

    auto classic = loadModel("classic.mts");
    auto store = std::make_shared<TreeStore>();
    auto s = enumerateImplementations(classic[0], 0, 3, {}, store);
    auto t = enumerateImplementations(classic[1], 0, 3, {}, store);
    // deadlock, a, a.a and the branching a + a.a
    CHECK(s.size() == 4);
    CHECK(s.includedIn(t));
    for (auto id : s.members) CHECK(refines(store->toSystem(id), classic[0], 0));
    for (auto id : t.members) CHECK(refines(store->toSystem(id), classic[1], 0));

    auto ex4 = loadModel("ex4.pmts");
    auto t0b = deparameterize(ex4[1], 0);
    CHECK(enumerateImplementations(t0b.system, t0b.initial, 3).size() == 2);

    CHECK_THROWS_AS(enumerateImplementations(loadModel("traffic_mts.mts").at(0), 0, 10), Error);
    CHECK_THROWS_AS(enumerateImplementations(classic[0], 0, 1), Error);
}

TEST_CASE("Avoid matches the implementation oracle exactly") {
    Rng rng(404);
    int nonTrivial = 0, skipped = 0, checked = 0;
    for (SystemKind kind : {SystemKind::MTS, SystemKind::DMTS, SystemKind::BMTS}) {
        auto cfg = acyclicConfig(kind, 5);
        for (int round = 0; round < 40; ++round) {
            auto sys = prune(randomSystem(cfg, rng)).system;
            if (sys.stateCount() == 0) continue;
            auto avoid = computeAvoid(sys);
            const std::uint64_t full = std::uint64_t{1} << sys.stateCount();
            for (StateId s = 0; s < sys.stateCount(); ++s) {
                auto store = std::make_shared<TreeStore>();
                Limits lim;
                lim.maxImplementations = 5000;
                ImplementationSet impls;
                try {
                    impls = enumerateImplementations(sys, s, sys.stateCount(), lim, store);
                } catch (const Error& e) {
                    REQUIRE(sizeLimited(e));
                    ++skipped;
                    continue;
                }
                ++checked;
                // For each implementation: the states it does not refine.
                std::vector<std::uint64_t> escapes;
                for (auto id : impls.members) {
                    auto isys = store->toSystem(id);
                    std::uint64_t m = 0;
                    for (StateId t = 0; t < sys.stateCount(); ++t)
                        if (!refines(isys, sys, t)) m |= std::uint64_t{1} << t;
                    escapes.push_back(m);
                }
                for (std::uint64_t mask = 0; mask < full; ++mask) {
                    bool oracle = false;
                    for (auto e : escapes) oracle = oracle || (mask & ~e) == 0;
                    CHECK(avoid.contains(s, mask) == oracle);
                    if (avoid.contains(s, mask)) {
                        for (std::uint64_t sub = mask; sub; sub = (sub - 1) & mask) CHECK(avoid.contains(s, sub));
                        if (mask) {
                            ++nonTrivial;
                            auto impl = distinguishingImplementation(avoid, sys, s, mask);
                            CHECK(refines(impl, sys, s));
                            for (StateId t = 0; t < sys.stateCount(); ++t)
                                if ((mask >> t) & 1u) CHECK_FALSE(refines(impl, sys, t));
                        }
                    }
                }
            }
        }
    }
    MESSAGE("oracle states checked " << checked << ", skipped at the size cap " << skipped);
    CHECK(nonTrivial > 100);
    CHECK(skipped * 10 < checked);
}

TEST_CASE("distinguishing implementations on cyclic systems") {
    Rng rng(405);
    RandomSystemConfig cfg;
    cfg.kind = SystemKind::BMTS;
    cfg.maxStates = 4;
    for (int round = 0; round < 40; ++round) {
        auto sys = prune(randomSystem(cfg, rng)).system;
        if (sys.stateCount() == 0) continue;
        auto avoid = computeAvoid(sys);
        for (StateId s = 0; s < sys.stateCount(); ++s)
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << sys.stateCount()); ++mask) {
                if (!avoid.contains(s, mask)) continue;
                auto impl = distinguishingImplementation(avoid, sys, s, mask);
                CHECK(classify(impl) == SystemKind::Implementation);
                CHECK(refines(impl, sys, s));
                for (StateId t = 0; t < sys.stateCount(); ++t)
                    if ((mask >> t) & 1u) CHECK_FALSE(refines(impl, sys, t));
            }
    }
}

TEST_CASE("thorough check agrees with implementation inclusion on acyclic pairs") {
    Rng rng(406);
    int holds = 0, total = 0, skipped = 0;
    Limits lim;
    lim.maxImplementations = 20000;
    for (SystemKind kind : {SystemKind::MTS, SystemKind::DMTS, SystemKind::BMTS}) {
        auto cfg = acyclicConfig(kind, 5);
        for (int round = 0; round < 60; ++round) {
            auto l = prune(randomSystem(cfg, rng)).system;
            auto r = prune(randomSystem(cfg, rng)).system;
            if (l.stateCount() == 0 || r.stateCount() == 0) continue;
            bool t = thoroughRefinesBmts(l, 0, r, 0);
            bool oracle = false;
            try {
                oracle = implementationInclusion(l, 0, r, 0, lim);
            } catch (const Error& e) {
                REQUIRE(sizeLimited(e));
                ++skipped;
                continue;
            }
            CHECK(t == oracle);
            if (modalRefinesBmts(l, 0, r, 0).holds) CHECK(t);
            holds += t;
            ++total;
        }
    }
    MESSAGE("pairs checked " << total << ", skipped at the size cap " << skipped);
    CHECK(holds > 0);
    CHECK(holds < total);
    CHECK(skipped * 5 < total);
}

TEST_CASE("modal refinement implies thorough refinement on PMTS") {
    Rng rng(407);
    auto cfg = acyclicConfig(SystemKind::PMTS, 3, 1);
    cfg.maxOutDegree = 2;
    int implied = 0;
    for (int round = 0; round < 80; ++round) {
        auto l = prune(randomSystem(cfg, rng)).system;
        auto r = prune(randomSystem(cfg, rng)).system;
        if (l.stateCount() == 0 || r.stateCount() == 0) continue;
        if (modalRefinesPmts(l, 0, r, 0).holds) {
            ++implied;
            CHECK(thoroughRefinesPmts(l, 0, r, 0));
        }
    }
    CHECK(implied > 0);
}
