#include "mtsref/bench.hpp"

#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mtsref/modal.hpp"
#include "mtsref/qbf.hpp"

namespace mtsref {

const char* checkerName(Checker c) {
    switch (c) {
    case Checker::Direct: return "DIRECT";
    case Checker::QbfInternal: return "QBF_INTERNAL";
    case Checker::QbfExternal: return "QBF_EXTERNAL";
    }
    return "?";
}

std::optional<Checker> parseChecker(std::string_view name) {
    for (Checker c : {Checker::Direct, Checker::QbfInternal, Checker::QbfExternal})
        if (name == checkerName(c)) return c;
    return std::nullopt;
}

std::uint64_t benchPairSeed(const GenConfig& cell, std::size_t index) { return Rng(cell.seed).split(index).next(); }

std::pair<TransitionSystem, TransitionSystem> benchPair(const GenConfig& cell, std::uint64_t pairSeed,
                                                        const Limits& limits) {
    Rng rng(pairSeed);
    GenConfig l = cell, r = cell;
    l.seed = rng.split(0).next();
    l.name = "L";
    l.statePrefix = "s";
    r.seed = rng.split(1).next();
    r.name = "R";
    r.statePrefix = "t";
    return {generate(l, limits), generate(r, limits)};
}

namespace {

bool runChecker(Checker c, const TransitionSystem& l, const TransitionSystem& r, const BenchOptions& o,
                const Deadline& deadline) {
    const StateId s0 = l.initial().value_or(0), t0 = r.initial().value_or(0);
    const bool parametric = l.paramCount() || r.paramCount();
    switch (c) {
    case Checker::Direct:
        return parametric ? modalRefinesPmts(l, s0, r, t0, o.limits, &deadline).holds
                          : modalRefinesBmts(l, s0, r, t0, o.limits, &deadline).holds;
    case Checker::QbfInternal:
    case Checker::QbfExternal: {
        auto inst = parametric ? encodePmts(l, s0, r, t0) : encodeBmts(l, s0, r, t0);
        if (c == Checker::QbfInternal) return evalQbf(inst, o.limits, &deadline);
        ExternalSolverOptions ext;
        ext.command = o.externalCommand;
        ext.timeoutSeconds = o.timeoutSecs;
        return solveExternal(inst, ext);
    }
    }
    return false;
}

}  // namespace

std::vector<BenchRow> runBench(const std::vector<GenConfig>& matrix, const BenchOptions& options) {
    const std::size_t perCell = options.pairsPerCell * options.checkers.size();
    std::vector<BenchRow> rows(matrix.size() * perCell);
    const std::size_t jobs = matrix.size() * options.pairsPerCell;
    std::atomic<std::size_t> next{0};
    const auto budget = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(options.timeoutSecs));

    auto work = [&] {
        for (std::size_t job; (job = next.fetch_add(1)) < jobs;) {
            const std::size_t cell = job / options.pairsPerCell, pair = job % options.pairsPerCell;
            const std::uint64_t seed = benchPairSeed(matrix[cell], pair);
            std::optional<std::pair<TransitionSystem, TransitionSystem>> systems;
            std::string genError;
            try {
                systems = benchPair(matrix[cell], seed, options.limits);
            } catch (const Error& e) {
                genError = std::string("ERROR:") + errorCodeName(e.code());
            }
            for (std::size_t k = 0; k < options.checkers.size(); ++k) {
                BenchRow& row = rows[cell * perCell + pair * options.checkers.size() + k];
                row.cell = matrix[cell];
                row.seed = seed;
                row.checker = options.checkers[k];
                if (!systems) {
                    row.verdict = genError;
                    continue;
                }
                const auto start = std::chrono::steady_clock::now();
                Deadline deadline(budget);
                try {
                    bool holds = runChecker(row.checker, systems->first, systems->second, options, deadline);
                    row.verdict = holds ? "HOLDS" : "DOES-NOT-HOLD";
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::Timeout || e.code() == ErrorCode::SolverTimeout) {
                        row.verdict = "TIMEOUT";
                        row.timedOut = true;
                    } else {
                        row.verdict = std::string("ERROR:") + errorCodeName(e.code());
                    }
                }
                row.wallMillis =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                if (row.timedOut) row.wallMillis = std::max(row.wallMillis, options.timeoutSecs * 1000);
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(options.workers, jobs));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

std::string benchCsv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "kind,states,alphabet,branching,params,topology,seed,checker,verdict,wall_ms,timed_out\n";
    for (const auto& r : rows) {
        out << systemKindName(r.cell.kind) << ',' << r.cell.numStates << ',' << r.cell.alphabetSize << ','
            << r.cell.branchingDegree << ',' << r.cell.numParams << ',' << topologyName(r.cell.topology) << ','
            << r.seed << ',' << checkerName(r.checker) << ',' << r.verdict << ',';
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", r.wallMillis);
        out << ms << ',' << (r.timedOut ? "true" : "false") << '\n';
    }
    return out.str();
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, "bench matrix: " + what); }

SystemKind kindFromName(const std::string& s) {
    for (SystemKind k : {SystemKind::MTS, SystemKind::DMTS, SystemKind::BMTS, SystemKind::PMTS})
        if (s == systemKindName(k)) return k;
    bad("unknown kind " + s);
}

std::vector<std::size_t> sizes(const nlohmann::json& cell, const char* key, std::size_t fallback) {
    if (!cell.contains(key)) return {fallback};
    const auto& v = cell.at(key);
    if (v.is_number_unsigned()) return {v.get<std::size_t>()};
    if (!v.is_array() || v.empty()) bad(std::string(key) + " must be a count or a nonempty array of counts");
    std::vector<std::size_t> out;
    for (const auto& x : v) {
        if (!x.is_number_unsigned()) bad(std::string(key) + " entries must be counts");
        out.push_back(x.get<std::size_t>());
    }
    return out;
}

}  // namespace

BenchMatrix parseBenchMatrix(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        bad(e.what());
    }
    if (!j.is_object() || !j.contains("cells") || !j.at("cells").is_array()) bad("expected an object with cells");
    BenchMatrix m;
    try {
        m.options.pairsPerCell = j.value("pairsPerCell", m.options.pairsPerCell);
        m.options.timeoutSecs = j.value("timeoutSecs", m.options.timeoutSecs);
        m.options.workers = j.value("workers", m.options.workers);
        if (j.contains("checkers")) {
            m.options.checkers.clear();
            for (const auto& c : j.at("checkers")) {
                auto parsed = parseChecker(c.get<std::string>());
                if (!parsed) bad("unknown checker " + c.get<std::string>());
                m.options.checkers.push_back(*parsed);
            }
        }
        for (const auto& c : j.at("cells")) {
            GenConfig base;
            base.kind = kindFromName(c.value("kind", std::string("BMTS")));
            base.alphabetSize = c.value("alphabet", base.alphabetSize);
            base.branchingDegree = c.value("branching", base.branchingDegree);
            std::string topo = c.value("topology", std::string("TREE_NOISE"));
            if (topo == "TREE_NOISE") base.topology = Topology::TreeNoise;
            else if (topo == "CLUSTERS") base.topology = Topology::Clusters;
            else bad("unknown topology " + topo);
            base.clusterSize = c.value("clusterSize", base.clusterSize);
            base.interfaceCount = c.value("interfaceCount", base.interfaceCount);
            base.formulaDepth = c.value("formulaDepth", base.formulaDepth);
            base.seed = c.value("seed", base.seed);
            for (std::size_t p : sizes(c, "params", 0))
                for (std::size_t n : sizes(c, "states", base.numStates)) {
                    GenConfig cell = base;
                    cell.numParams = p;
                    cell.numStates = n;
                    if (p && cell.kind != SystemKind::PMTS) bad("params require kind PMTS");
                    m.cells.push_back(cell);
                }
        }
    } catch (const nlohmann::json::exception& e) {
        bad(e.what());
    }
    if (m.options.checkers.empty()) bad("no checkers");
    return m;
}

}  // namespace mtsref
