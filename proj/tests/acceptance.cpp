// Acceptance run: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance [--only N] [--expect-fail N,...]
//
// Exit status is 0 when the set of failing criteria equals the expected
// set, so a known failure stays visible without breaking ctest, and an
// unexpected pass or failure does.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "mtsref/approx.hpp"
#include "mtsref/bench.hpp"
#include "mtsref/core.hpp"
#include "mtsref/gen.hpp"
#include "mtsref/modal.hpp"
#include "mtsref/qbf.hpp"
#include "mtsref/textfmt.hpp"
#include "mtsref/thorough.hpp"
#include "mtsref/transform.hpp"

using namespace mtsref;

namespace {

// Pinned budgets and tolerances.
constexpr double kCorpusSecs = 1.0;
constexpr double kBmtsEncodingSecs = 60.0;
constexpr double kTableSecs = 600.0;
constexpr double kMedianRatio = 3.0;
constexpr std::size_t kOracleImplementations = 20000;

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<TransitionSystem> model(const std::string& file) {
    return parseSystems(readFile(std::string(MTSREF_MODELS_DIR) + "/" + file));
}

struct Outcome {
    enum Status { Pass, Fail, Skip } status = Fail;
    std::string detail;
};

Outcome verdict(bool ok, std::string d) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(d)}; }

Limits oracleLimits() {
    Limits lim;
    lim.maxImplementations = kOracleImplementations;
    return lim;
}

bool sizeCapped(const Error& e) { return e.code() == ErrorCode::SizeLimit; }

// ⟦s⟧ of a PMTS as the union of the per-valuation semantics.
std::vector<TreeStore::Id> semantics(const TransitionSystem& sys, StateId s, std::shared_ptr<TreeStore> store) {
    std::set<TreeStore::Id> out;
    for (std::uint64_t nu = 0; nu < (std::uint64_t{1} << sys.paramCount()); ++nu) {
        auto set = enumerateImplementations(induceValuation(sys, Valuation(nu)), s, sys.stateCount(), oracleLimits(),
                                            store);
        out.insert(set.members.begin(), set.members.end());
    }
    return {out.begin(), out.end()};
}

RandomSystemConfig randomConfig(SystemKind kind, std::size_t states, std::size_t degree, bool acyclic,
                                std::size_t params = 0) {
    RandomSystemConfig cfg;
    cfg.kind = kind;
    cfg.maxStates = states;
    cfg.maxActions = 2;
    cfg.maxOutDegree = degree;
    cfg.maxParams = params;
    cfg.acyclic = acyclic;
    return cfg;
}

// ------------------------------------------------------------ criteria

Outcome corpus() {
    auto t0 = Clock::now();
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) bad.push_back(what);
    };
    auto classic = model("classic.mts");
    expect(!modalRefinesBmts(classic[0], 0, classic[1], 0).holds, "classic <=m");
    expect(!evalQbf(encodeBmts(classic[0], 0, classic[1], 0)), "classic <=m (qbf)");
    expect(thoroughRefinesBmts(classic[0], 0, classic[1], 0), "classic <=t");

    auto ex3 = model("ex3.pmts");
    expect(modalRefinesPmts(ex3[0], 0, ex3[1], 0).holds, "ex3 new");
    expect(evalQbf(encodePmts(ex3[0], 0, ex3[1], 0)), "ex3 new (qbf)");
    expect(!modalRefinesPmtsOriginal(ex3[0], 0, ex3[1], 0).holds, "ex3 original");
    expect(!evalQbf(encodePmtsOriginal(ex3[0], 0, ex3[1], 0)), "ex3 original (qbf)");

    auto ex4 = model("ex4.pmts");
    expect(!modalRefinesPmts(ex4[0], 0, ex4[1], 0).holds, "ex4 <=m");
    expect(!evalQbf(encodePmts(ex4[0], 0, ex4[1], 0)), "ex4 <=m (qbf)");
    expect(thoroughRefinesPmts(ex4[0], 0, ex4[1], 0), "ex4 <=t");

    int traffic = 0;
    for (auto [file, kind] : {std::pair{"traffic_mts.mts", SystemKind::MTS}, {"traffic_pmts.pmts", SystemKind::PMTS}})
        for (const auto& sys : model(file)) {
            ++traffic;
            StateId s = sys.initial().value_or(0);
            expect(classify(sys) == kind, "traffic kind");
            expect(modalRefinesPmts(sys, s, sys, s).holds, "traffic self-refinement");
        }
    const double secs = secondsSince(t0);
    if (secs >= kCorpusSecs) bad.push_back("too slow");
    std::ostringstream d;
    d << "examples exact, " << traffic << " traffic systems, " << secs << " s";
    for (const auto& b : bad) d << "; wrong: " << b;
    return verdict(bad.empty(), d.str());
}

Outcome bmtsEncoding() {
    auto t0 = Clock::now();
    Rng rng(1001);
    auto cfg = randomConfig(SystemKind::BMTS, 5, 3, false);
    int agree = 0, holds = 0;
    for (int i = 0; i < 500; ++i) {
        auto l = randomSystem(cfg, rng);
        auto r = randomSystem(cfg, rng);
        bool direct = modalRefinesBmts(l, 0, r, 0).holds;
        agree += direct == evalQbf(encodeBmts(l, 0, r, 0));
        holds += direct;
    }
    const double secs = secondsSince(t0);
    std::ostringstream d;
    d << agree << "/500 agree (" << holds << " hold), " << secs << " s";
    return verdict(agree == 500 && secs < kBmtsEncodingSecs, d.str());
}

Outcome pmtsEncoding() {
    Rng rng(1002);
    auto cfg = randomConfig(SystemKind::PMTS, 4, 2, false, 2);
    int agree = 0, holds = 0;
    for (int i = 0; i < 200; ++i) {
        auto l = randomSystem(cfg, rng);
        auto r = randomSystem(cfg, rng);
        bool direct = modalRefinesPmts(l, 0, r, 0).holds;
        agree += direct == evalQbf(encodePmts(l, 0, r, 0));
        holds += direct;
    }
    std::ostringstream d;
    d << agree << "/200 agree (" << holds << " hold)";
    return verdict(agree == 200, d.str());
}

bool refines(const TransitionSystem& impl, const TransitionSystem& spec, StateId t) {
    return modalRefinesBmts(impl, *impl.initial(), spec, t).holds;
}

// Every (s, mask): Avoid membership against the escape sets of ⟦s⟧, and
// each member's distinguishing implementation checked directly.
std::optional<bool> avoidAgrees(const TransitionSystem& sys) {
    auto avoid = computeAvoid(sys);
    const std::uint64_t full = std::uint64_t{1} << sys.stateCount();
    for (StateId s = 0; s < sys.stateCount(); ++s) {
        auto store = std::make_shared<TreeStore>();
        ImplementationSet impls;
        try {
            impls = enumerateImplementations(sys, s, sys.stateCount(), oracleLimits(), store);
        } catch (const Error& e) {
            if (sizeCapped(e)) return std::nullopt;
            throw;
        }
        std::vector<std::uint64_t> escapes;
        for (auto id : impls.members) {
            auto isys = store->toSystem(id);
            std::uint64_t m = 0;
            for (StateId t = 0; t < sys.stateCount(); ++t)
                if (!refines(isys, sys, t)) m |= std::uint64_t{1} << t;
            escapes.push_back(m);
        }
        for (std::uint64_t mask = 0; mask < full; ++mask) {
            bool oracle = std::any_of(escapes.begin(), escapes.end(), [&](auto e) { return (mask & ~e) == 0; });
            if (avoid.contains(s, mask) != oracle) return false;
            if (oracle && mask) {
                auto impl = distinguishingImplementation(avoid, sys, s, mask);
                if (!refines(impl, sys, s)) return false;
                for (StateId t = 0; t < sys.stateCount(); ++t)
                    if (((mask >> t) & 1u) && refines(impl, sys, t)) return false;
            }
        }
    }
    return true;
}

Outcome avoidOracle() {
    Rng rng(1003);
    auto cfg = randomConfig(SystemKind::BMTS, 5, 3, true);
    int checked = 0, agree = 0, drawn = 0, capped = 0;
    while (checked < 200 && drawn < 1000) {
        ++drawn;
        auto sys = prune(randomSystem(cfg, rng)).system;
        if (sys.stateCount() == 0) continue;
        auto ok = avoidAgrees(sys);
        if (!ok) {
            ++capped;
            continue;
        }
        ++checked;
        agree += *ok;
    }
    std::ostringstream d;
    d << agree << "/" << checked << " instances agree in both directions (" << capped
      << " redrawn at the enumeration cap)";
    return verdict(checked == 200 && agree == 200, d.str());
}

Outcome thoroughOracle() {
    Rng rng(1004);
    auto cfg = randomConfig(SystemKind::BMTS, 5, 3, true);
    int checked = 0, agree = 0, holds = 0, capped = 0, drawn = 0;
    while (checked < 200 && drawn < 1000) {
        ++drawn;
        auto l = randomSystem(cfg, rng);
        auto r = randomSystem(cfg, rng);
        bool oracle;
        try {
            oracle = implementationInclusion(l, 0, r, 0, oracleLimits());
        } catch (const Error& e) {
            if (!sizeCapped(e)) throw;
            ++capped;
            continue;
        }
        bool t = thoroughRefinesBmts(l, 0, r, 0);
        ++checked;
        agree += t == oracle;
        holds += t;
    }
    std::ostringstream d;
    d << agree << "/" << checked << " agree (" << holds << " hold, " << capped << " redrawn at the enumeration cap)";
    return verdict(checked == 200 && agree == 200, d.str());
}

Outcome transformations() {
    struct Leg {
        std::string name;
        int ok = 0, total = 0;
    };
    Leg deparam{"deparam semantics"}, deneg{"denegation semantics"}, hull{"s0 <=m D(s0)"}, chain{"s0 <=m s0^B <=m P(s0)"},
        size{"deparam size"};
    Rng rng(1005);

    // Draws until `want` instances avoid the enumeration cap.
    auto sample = [&](const RandomSystemConfig& cfg, int want, const std::function<bool(const TransitionSystem&)>& f,
                      Leg& leg) {
        for (int drawn = 0; leg.total < want && drawn < 5 * want; ++drawn) {
            auto sys = randomSystem(cfg, rng);
            try {
                bool ok = f(sys);
                ++leg.total;
                leg.ok += ok;
            } catch (const Error& e) {
                if (!sizeCapped(e)) throw;
            }
        }
    };

    auto pcfg = randomConfig(SystemKind::PMTS, 4, 2, true, 2);
    pcfg.minParams = 1;
    sample(pcfg, 100, [](const TransitionSystem& sys) {
        auto store = std::make_shared<TreeStore>();
        auto want = semantics(sys, 0, store);
        auto d = deparameterize(sys, 0);
        auto got = enumerateImplementations(d.system, d.initial, d.system.stateCount(), oracleLimits(), store);
        return got.members == want;
    }, deparam);

    sample(randomConfig(SystemKind::BMTS, 4, 2, true), 100, [](const TransitionSystem& raw) {
        auto sys = prune(raw).system;
        if (sys.stateCount() == 0) return true;
        auto dn = denegate(sys, 0);
        auto store = std::make_shared<TreeStore>();
        auto want = enumerateImplementations(sys, 0, sys.stateCount(), oracleLimits(), store);
        std::set<TreeStore::Id> got;
        for (StateId m : dn.initials) {
            auto part = enumerateImplementations(dn.system, m, dn.system.stateCount(), oracleLimits(), store);
            got.insert(part.members.begin(), part.members.end());
        }
        return kindAtMost(classify(dn.system), SystemKind::DMTS) &&
               std::vector<TreeStore::Id>(got.begin(), got.end()) == want.members;
    }, deneg);

    auto gcfg = randomConfig(SystemKind::PMTS, 4, 2, true, 2);
    sample(gcfg, 100, [](const TransitionSystem& sys) {
        auto h = deterministicHull(sys, 0);
        return isDeterministic(h.system) && modalRefinesPmts(sys, 0, h.system, h.initial).holds;
    }, hull);
    sample(gcfg, 100, [](const TransitionSystem& sys) {
        auto b = deparameterize(sys, 0);
        auto p = parameterFreeHull(sys);
        return modalRefinesPmts(sys, 0, b.system, b.initial).holds && modalRefinesBmts(b.system, b.initial, p, 0).holds;
    }, chain);
    sample(gcfg, 100, [](const TransitionSystem& sys) {
        DeparamOptions o;
        o.trimUnreachable = false;
        auto b = deparameterize(sys, 0, o);
        const std::size_t expected =
            sys.paramCount() ? 1 + sys.stateCount() * (std::size_t{1} << sys.paramCount()) : sys.stateCount();
        return b.system.stateCount() == expected;
    }, size);

    std::ostringstream d;
    bool all = true;
    for (const Leg* leg : {&deparam, &deneg, &hull, &chain, &size}) {
        d << (leg == &deparam ? "" : "; ") << leg->name << " " << leg->ok << "/" << leg->total;
        all = all && leg->total == 100 && leg->ok == leg->total;
    }
    if (hull.ok != hull.total) d << " (negated obligations over same-action successors collapse in the hull)";
    return verdict(all, d.str());
}

Outcome sandwich() {
    Rng rng(1006);
    int detPairs = 0, coincide = 0, unknownDet = 0;
    auto lcfg = randomConfig(SystemKind::BMTS, 4, 2, false);
    while (detPairs < 200) {
        auto l = prune(randomSystem(lcfg, rng)).system;
        auto r = prune(deterministicHull(randomSystem(lcfg, rng), 0).system).system;
        if (l.stateCount() == 0 || r.stateCount() == 0) continue;
        ++detPairs;
        coincide += thoroughRefinesBmts(l, 0, r, 0) == modalRefinesBmts(l, 0, r, 0).holds;
        unknownDet += decideThoroughApprox(l, 0, r, 0, false).answer == SandwichAnswer::Unknown;
    }

    int general = 0, contradictions = 0, yes = 0, no = 0, unknown = 0, infeasible = 0;
    auto pcfg = randomConfig(SystemKind::PMTS, 4, 2, false, 2);
    for (int i = 0; i < 200; ++i) {
        auto l = randomSystem(pcfg, rng);
        auto r = randomSystem(pcfg, rng);
        auto v = decideThoroughApprox(l, 0, r, 0, false);
        ++general;
        yes += v.answer == SandwichAnswer::Yes;
        no += v.answer == SandwichAnswer::No;
        unknown += v.answer == SandwichAnswer::Unknown;
        if (v.answer == SandwichAnswer::Unknown) continue;
        try {
            bool exact = thoroughRefinesPmts(l, 0, r, 0);
            contradictions += exact != (v.answer == SandwichAnswer::Yes);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::StateLimit && e.code() != ErrorCode::ParamLimit) throw;
            ++infeasible;
        }
    }
    std::ostringstream d;
    d << "deterministic right: " << coincide << "/" << detPairs << " coincide, " << unknownDet
      << " UNKNOWN; general: " << general << " pairs (yes " << yes << ", no " << no << ", unknown " << unknown
      << "), " << contradictions << " contradictions, " << infeasible << " beyond exact limits";
    return verdict(coincide == 200 && unknownDet == 0 && contradictions == 0, d.str());
}

std::optional<std::string> externalSolver() {
    for (const char* name : {"depqbf", "caqe", "qute", "rareqs", "quantor", "qfun", "cadet", "qesto"}) {
        std::string probe = std::string("command -v ") + name + " >/dev/null 2>&1";
        if (std::system(probe.c_str()) == 0) return std::string(name);
    }
    return std::nullopt;
}

Outcome qdimacs() {
    Rng rng(1007);
    Limits lim;
    lim.maxQbfExpansionVars = 36;
    std::vector<QbfInstance> instances;
    int agree = 0, drawn = 0;
    for (auto kind : {SystemKind::BMTS, SystemKind::PMTS}) {
        auto cfg = randomConfig(kind, 3, 2, false, kind == SystemKind::PMTS ? 1 : 0);
        int taken = 0;
        while (taken < 25) {
            ++drawn;
            auto l = randomSystem(cfg, rng);
            auto r = randomSystem(cfg, rng);
            auto inst = kind == SystemKind::PMTS ? encodePmts(l, 0, r, 0) : encodeBmts(l, 0, r, 0);
            auto back = parseQdimacs(toQdimacs(inst));
            if (back.variableCount() > lim.maxQbfExpansionVars) continue;
            ++taken;
            agree += evalQbfExpansion(back, lim) == evalQbf(inst);
            instances.push_back(std::move(inst));
        }
    }
    std::ostringstream d;
    d << agree << "/50 internal round trips agree (" << drawn << " drawn, CNF within " << lim.maxQbfExpansionVars
      << " variables)";
    bool ok = agree == 50;
    if (auto solver = externalSolver()) {
        int ext = 0;
        for (const auto& inst : instances) ext += solveExternal(inst, {*solver + " {file}", 60.0}) == evalQbf(inst);
        d << "; " << *solver << " agrees on " << ext << "/50";
        ok = ok && ext == 50;
    } else {
        d << "; external leg skipped, no QDIMACS solver on PATH";
    }
    return verdict(ok, d.str());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

Outcome table1() {
    auto t0 = Clock::now();
    auto m = parseBenchMatrix(readFile(std::string(MTSREF_MODELS_DIR) + "/table1.json"));
    auto rows = runBench(m.cells, m.options);
    const double secs = secondsSince(t0);

    std::size_t timeouts = 0, errors = 0, disagreements = 0;
    std::map<std::pair<std::string, std::size_t>, std::vector<double>> direct, qbf;
    std::map<std::pair<std::uint64_t, std::size_t>, std::string> first;  // (pair seed, states) -> verdict
    for (const auto& r : rows) {
        timeouts += r.timedOut;
        errors += r.verdict.rfind("ERROR", 0) == 0;
        std::string kind = systemKindName(r.cell.kind);
        if (r.cell.kind == SystemKind::PMTS) kind += "(" + std::to_string(r.cell.numParams) + ")";
        auto key = std::pair{kind, r.cell.numStates};
        (r.checker == Checker::Direct ? direct : qbf)[key].push_back(r.wallMillis);
        auto [it, fresh] = first.emplace(std::pair{r.seed, r.cell.numStates}, r.verdict);
        if (!fresh && !r.timedOut && it->second != "TIMEOUT" && it->second != r.verdict) ++disagreements;
    }
    std::ostringstream d;
    bool ratiosOk = true;
    d << rows.size() << " rows, " << timeouts << " timeouts, " << errors << " errors, " << disagreements
      << " checker disagreements, " << secs << " s; PMTS(5)/BMTS median ratio DIRECT";
    for (std::size_t n : {25, 50, 75, 100}) {
        auto& p = direct[{"PMTS(5)", n}];
        auto& b = direct[{"BMTS", n}];
        if (p.empty() || b.empty()) {
            ratiosOk = false;
            d << " " << n << ":missing";
            continue;
        }
        double ratio = median(p) / median(b);
        ratiosOk = ratiosOk && ratio <= kMedianRatio;
        char buf[64];
        std::snprintf(buf, sizeof buf, " %zu:%.2f", n, ratio);
        d << buf;
    }
    if (!qbf.empty()) {
        d << ", QBF_INTERNAL";
        for (std::size_t n : {25, 50, 75, 100}) {
            double ratio = median(qbf[{"PMTS(5)", n}]) / median(qbf[{"BMTS", n}]);
            ratiosOk = ratiosOk && ratio <= kMedianRatio;
            char buf[64];
            std::snprintf(buf, sizeof buf, " %zu:%.2f", n, ratio);
            d << buf;
        }
    }
    return verdict(timeouts == 0 && errors == 0 && disagreements == 0 && ratiosOk && secs < kTableSecs, d.str());
}

// Golden corpus: every cell's pair systems plus the bench verdicts.
std::pair<std::string, std::string> goldenRun() {
    auto m = parseBenchMatrix(readFile(std::string(MTSREF_MODELS_DIR) + "/golden.json"));
    std::string systems;
    for (const auto& cell : m.cells)
        for (std::size_t i = 0; i < m.options.pairsPerCell; ++i) {
            auto [l, r] = benchPair(cell, benchPairSeed(cell, i));
            systems += serializeSystem(l) + serializeSystem(r);
        }
    std::string verdicts;
    for (const auto& row : runBench(m.cells, m.options))
        verdicts += std::string(checkerName(row.checker)) + "," + row.verdict + "\n";
    return {systems, verdicts};
}

Outcome determinism() {
    auto a = goldenRun();
    auto b = goldenRun();
    std::ostringstream d;
    d << a.first.size() << " bytes of systems, " << std::count(a.second.begin(), a.second.end(), '\n')
      << " verdict rows; systems " << (a.first == b.first ? "identical" : "differ") << ", verdicts "
      << (a.second == b.second ? "identical" : "differ");
    return verdict(a.first == b.first && a.second == b.second, d.str());
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expectFail;
    std::optional<int> only;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (arg == "--expect-fail" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string item; std::getline(ss, item, ',');) expectFail.insert(std::stoi(item));
        } else {
            std::cerr << "usage: acceptance [--only N] [--expect-fail N,...]\n";
            return 64;
        }
    }

    const std::vector<std::pair<int, Outcome (*)()>> criteria{
        {1, corpus},           {2, bmtsEncoding}, {3, pmtsEncoding}, {4, avoidOracle},  {5, thoroughOracle},
        {6, transformations},  {7, sandwich}, {8, qdimacs},  {9, table1}, {10, determinism}};
    std::set<int> failed;
    for (auto [id, run] : criteria) {
        if (only && *only != id) continue;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Outcome::Pass ? "PASS" : o.status == Outcome::Skip ? "SKIP" : "FAIL";
        if (o.status == Outcome::Fail) failed.insert(id);
        std::printf("criterion %2d %s (%.1f s): %s\n", id, tag, secondsSince(t0), o.detail.c_str());
        std::fflush(stdout);
    }
    if (only) {
        std::set<int> relevant;
        if (expectFail.count(*only)) relevant.insert(*only);
        expectFail = relevant;
    }
    if (failed != expectFail) {
        std::printf("failing criteria differ from the expected set\n");
        return 1;
    }
    return 0;
}
