// mtsref: command-line front end for the refinement library.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
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

enum Exit : int { kHolds = 0, kFails = 1, kUnknown = 2, kUsage = 64, kInput = 65, kInternal = 70 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exitFor(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UndeclaredName:
    case ErrorCode::AtomWithoutTransition:
    case ErrorCode::DuplicateName:
    case ErrorCode::InvalidArgument:
    case ErrorCode::KindError:
    case ErrorCode::CyclicInput: return kInput;
    default: return kInternal;
    }
}

std::string readFile(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeOutput(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
}

struct Ref {
    TransitionSystem system;
    StateId state = 0;
};

// FILE#SYSTEM (its initial state), FILE#STATE (unique across the file),
// FILE#SYSTEM.STATE, or FILE alone for a single-system file.
Ref resolve(const std::string& spec) {
    const auto hash = spec.rfind('#');
    const std::string file = hash == std::string::npos ? spec : spec.substr(0, hash);
    const std::string name = hash == std::string::npos ? "" : spec.substr(hash + 1);
    auto systems = parseSystems(readFile(file));
    auto rootOf = [&](const TransitionSystem& sys) {
        if (!sys.initial()) throw Error(ErrorCode::InvalidArgument, "system " + sys.name() + " has no init");
        return Ref{sys, *sys.initial()};
    };
    if (name.empty()) {
        if (systems.size() != 1) throw UsageError(file + " holds several systems; use FILE#NAME");
        return rootOf(systems[0]);
    }
    for (const auto& sys : systems)
        if (sys.name() == name) return rootOf(sys);
    std::optional<Ref> found;
    for (const auto& sys : systems)
        if (auto s = sys.findState(name)) {
            if (found) throw Error(ErrorCode::InvalidArgument, "state " + name + " is ambiguous in " + file);
            found = Ref{sys, *s};
        }
    if (found) return *found;
    if (auto dot = name.find('.'); dot != std::string::npos)
        for (const auto& sys : systems)
            if (sys.name() == name.substr(0, dot))
                if (auto s = sys.findState(name.substr(dot + 1))) return Ref{sys, *s};
    throw Error(ErrorCode::InvalidArgument, "no system or state " + name + " in " + file);
}

// The same system with `s` as its initial state.
TransitionSystem rootedAt(const TransitionSystem& sys, StateId s) {
    SystemBuilder b(sys.name());
    for (const auto& a : sys.actionNames()) b.addAction(a);
    for (const auto& p : sys.paramNames()) b.addParam(p);
    for (const auto& n : sys.stateNames()) b.addState(n);
    for (const auto& t : sys.transitions()) b.addTransition(t.source, t.action, t.target);
    for (StateId q = 0; q < sys.stateCount(); ++q) b.setObligation(q, sys.obligation(q));
    b.setInitial(s);
    return std::move(b).build();
}

std::string valuationText(const TransitionSystem& sys, Valuation v) {
    std::string out = "{";
    for (ParamId p = 0; p < sys.paramCount(); ++p)
        if (v.contains(p)) out += (out.size() > 1 ? "," : "") + sys.paramName(p);
    return out + "}";
}

std::optional<Deadline> deadlineFor(double secs) {
    if (secs <= 0) return std::nullopt;
    return Deadline(std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(secs)));
}

int verdict(bool holds) {
    std::cout << (holds ? "HOLDS" : "DOES-NOT-HOLD") << '\n';
    return holds ? kHolds : kFails;
}

// ------------------------------------------------------------ subcommands

struct ModalArgs {
    std::string left, right, definition = "new", engine = "direct", solver;
    std::optional<std::size_t> bound;
    double timeout = 0;
};

int checkModal(const ModalArgs& a) {
    auto l = resolve(a.left);
    auto r = resolve(a.right);
    const bool parametric = l.system.paramCount() || r.system.paramCount();
    const bool original = a.definition == "original";
    auto dl = deadlineFor(a.timeout);
    const Deadline* d = dl ? &*dl : nullptr;

    if (a.bound) {
        if (a.engine != "direct") throw UsageError("--bound needs --engine direct");
        if (parametric) throw Error(ErrorCode::KindError, "--bound expects parameter-free systems");
        return verdict(boundedModalRefines(l.system, l.state, r.system, r.state, *a.bound));
    }
    if (a.engine == "direct") {
        ModalVerdict v;
        if (!parametric)
            v = modalRefinesBmts(l.system, l.state, r.system, r.state, {}, d);
        else if (original)
            v = modalRefinesPmtsOriginal(l.system, l.state, r.system, r.state, {}, d);
        else
            v = modalRefinesPmts(l.system, l.state, r.system, r.state, {}, d);
        if (!v.holds) {
            if (v.failingMu) std::cerr << "no matching valuation for " << valuationText(l.system, *v.failingMu) << '\n';
            if (v.counterexample)
                std::cerr << "counterexample pair (" << l.system.stateName(v.counterexample->first) << ", "
                          << r.system.stateName(v.counterexample->second) << ")\n";
        }
        return verdict(v.holds);
    }
    QbfInstance inst = !parametric ? encodeBmts(l.system, l.state, r.system, r.state)
                       : original  ? encodePmtsOriginal(l.system, l.state, r.system, r.state)
                                   : encodePmts(l.system, l.state, r.system, r.state);
    std::cerr << "qbf: " << inst.variableCount() << " variables, " << inst.prefix.size() << " blocks\n";
    if (a.engine == "qbf-internal") return verdict(evalQbf(inst, {}, d));
    if (a.solver.empty()) throw UsageError("--engine qbf-external needs --solver CMD");
    ExternalSolverOptions opts{a.solver, std::nullopt};
    if (a.timeout > 0) opts.timeoutSeconds = a.timeout;
    return verdict(solveExternal(inst, opts));
}

int checkThorough(const std::string& left, const std::string& right, const std::string& mode, double timeout) {
    auto l = resolve(left);
    auto r = resolve(right);
    auto dl = deadlineFor(timeout);
    const Deadline* d = dl ? &*dl : nullptr;
    if (mode == "exact") return verdict(thoroughRefinesPmts(l.system, l.state, r.system, r.state, {}, d));
    auto v = decideThoroughApprox(l.system, l.state, r.system, r.state, mode == "auto", {}, d);
    std::cerr << "rule: " << sandwichRuleName(v.rule) << '\n';
    if (!v.note.empty()) std::cerr << v.note << '\n';
    if (v.answer == SandwichAnswer::Unknown) {
        std::cout << "UNKNOWN(" << sandwichRuleName(v.rule) << ")\n";
        return kUnknown;
    }
    return verdict(v.answer == SandwichAnswer::Yes);
}

struct TransformArgs {
    std::string input, op, out, combination = "guarded";
    bool simplify = false, noTrim = false;
};

int transform(const TransformArgs& a) {
    auto in = resolve(a.input);
    std::string text;
    if (a.op == "deparam") {
        DeparamOptions opts;
        opts.simplify = a.simplify;
        opts.trimUnreachable = !a.noTrim;
        opts.combination = a.combination == "parity"        ? InitialCombination::Parity
                           : a.combination == "exactly-one" ? InitialCombination::ExactlyOne
                                                            : InitialCombination::Guarded;
        auto res = deparameterize(in.system, in.state, opts);
        text = serializeSystem(rootedAt(res.system, res.initial));
    } else if (a.op == "denegate") {
        auto res = denegate(in.system, in.state);
        std::string initials;
        for (auto s : res.initials) initials += (initials.empty() ? "" : ", ") + res.system.stateName(s);
        text = "# initial states: " + initials + "\n" + serializeSystem(res.system);
    } else if (a.op == "dethull") {
        text = serializeSystem(deterministicHull(in.system, in.state, a.simplify).system);
    } else if (a.op == "pfhull") {
        text = serializeSystem(rootedAt(parameterFreeHull(in.system, a.simplify), in.state));
    } else {
        auto res = prune(in.system);
        if (!res.removed.empty()) {
            std::cerr << "removed:";
            for (auto s : res.removed) std::cerr << ' ' << in.system.stateName(s);
            std::cerr << '\n';
        }
        if (!res.mapping[in.state]) std::cerr << "root " << in.system.stateName(in.state) << " was removed\n";
        text = serializeSystem(res.mapping[in.state] ? rootedAt(res.system, *res.mapping[in.state]) : res.system);
    }
    writeOutput(a.out, text);
    return kHolds;
}

int encodeQbf(const std::string& left, const std::string& right, const std::string& definition,
              const std::string& out) {
    auto l = resolve(left);
    auto r = resolve(right);
    const bool parametric = l.system.paramCount() || r.system.paramCount();
    QbfInstance inst = !parametric                 ? encodeBmts(l.system, l.state, r.system, r.state)
                       : definition == "original" ? encodePmtsOriginal(l.system, l.state, r.system, r.state)
                                                  : encodePmts(l.system, l.state, r.system, r.state);
    writeOutput(out, toQdimacs(inst));
    return kHolds;
}

// A bare FILE lists every system it holds.
int classifyCmd(const std::string& input) {
    if (input.find('#') == std::string::npos) {
        auto systems = parseSystems(readFile(input));
        if (systems.size() != 1) {
            for (const auto& sys : systems) std::cout << sys.name() << ' ' << systemKindName(classify(sys)) << '\n';
            return kHolds;
        }
    }
    auto in = resolve(input);
    std::cout << systemKindName(classify(in.system)) << '\n';
    return kHolds;
}

SystemKind parseKind(const std::string& s) {
    for (auto k : {SystemKind::Implementation, SystemKind::MTS, SystemKind::DMTS, SystemKind::BMTS, SystemKind::PMTS}) {
        std::string name = systemKindName(k);
        if (std::equal(name.begin(), name.end(), s.begin(), s.end(),
                       [](char x, char y) { return x == std::toupper(static_cast<unsigned char>(y)); }))
            return k;
    }
    throw UsageError("unknown kind " + s);
}

int genCmd(GenConfig cfg, const std::string& kind, const std::string& topology, const std::string& out) {
    cfg.kind = parseKind(kind);
    cfg.topology = topology == "clusters" ? Topology::Clusters : Topology::TreeNoise;
    writeOutput(out, serializeSystem(generate(cfg)));
    return kHolds;
}

struct BenchArgs {
    std::string matrix, out, solver;
    std::optional<double> timeout;
    std::optional<std::size_t> workers;
    std::vector<std::string> checkers;
};

int benchCmd(const BenchArgs& a) {
    auto m = parseBenchMatrix(readFile(a.matrix));
    if (a.timeout) m.options.timeoutSecs = *a.timeout;
    if (a.workers) m.options.workers = *a.workers;
    if (!a.checkers.empty()) {
        m.options.checkers.clear();
        for (const auto& c : a.checkers) {
            auto parsed = parseChecker(c);
            if (!parsed) throw UsageError("unknown checker " + c);
            m.options.checkers.push_back(*parsed);
        }
    }
    m.options.externalCommand = a.solver;
    auto rows = runBench(m.cells, m.options);
    std::size_t timeouts = 0, errors = 0;
    for (const auto& r : rows) {
        timeouts += r.timedOut;
        errors += r.verdict.rfind("ERROR", 0) == 0;
    }
    writeOutput(a.out, benchCsv(rows));
    std::cerr << rows.size() << " rows, " << timeouts << " timeouts, " << errors << " errors\n";
    return kHolds;
}

// Solver-style exit codes, so the command can serve as --solver itself.
int solveQdimacs(const std::string& input, double timeout) {
    auto inst = parseQdimacs(readFile(input));
    auto dl = deadlineFor(timeout);
    bool value = evalQbf(inst, {}, dl ? &*dl : nullptr);
    std::cout << (value ? "TRUE" : "FALSE") << '\n';
    return value ? 10 : 20;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Refinement checking for modal, Boolean and parametric transition systems"};
    app.require_subcommand(1);
    const std::vector<std::string> engines{"direct", "qbf-internal", "qbf-external"};

    ModalArgs modal;
    auto* cm = app.add_subcommand("check-modal", "modal refinement");
    cm->add_option("left", modal.left, "FILE#REF")->required();
    cm->add_option("right", modal.right, "FILE#REF")->required();
    cm->add_option("--definition", modal.definition)->check(CLI::IsMember({"new", "original"}));
    cm->add_option("--engine", modal.engine)->check(CLI::IsMember(engines));
    cm->add_option("--solver", modal.solver, "external QDIMACS solver command; {file} is the input path");
    cm->add_option("--bound", modal.bound, "check the n-th approximant only");
    cm->add_option("--timeout-secs", modal.timeout);

    std::string tl, tr, mode = "auto";
    double ttimeout = 0;
    auto* ct = app.add_subcommand("check-thorough", "thorough refinement");
    ct->add_option("left", tl)->required();
    ct->add_option("right", tr)->required();
    ct->add_option("--mode", mode)->check(CLI::IsMember({"exact", "approx", "auto"}));
    ct->add_option("--timeout-secs", ttimeout);

    TransformArgs tf;
    auto* tr_ = app.add_subcommand("transform", "rewrite a system");
    tr_->add_option("input", tf.input)->required();
    tr_->add_option("--op", tf.op)->required()->check(CLI::IsMember({"deparam", "denegate", "dethull", "pfhull", "prune"}));
    tr_->add_flag("--simplify", tf.simplify);
    tr_->add_flag("--no-trim", tf.noTrim, "deparam: keep unreachable copies");
    tr_->add_option("--combination", tf.combination, "deparam initial obligation")
        ->check(CLI::IsMember({"guarded", "parity", "exactly-one"}));
    tr_->add_option("-o,--output", tf.out);

    std::string el, er, edef = "new", eout;
    auto* eq = app.add_subcommand("encode-qbf", "write the refinement QBF as QDIMACS");
    eq->add_option("left", el)->required();
    eq->add_option("right", er)->required();
    eq->add_option("--definition", edef)->check(CLI::IsMember({"new", "original"}));
    eq->add_option("-o,--output", eout);

    std::string cin_;
    auto* cl = app.add_subcommand("classify", "print the most specific kind");
    cl->add_option("input", cin_)->required();

    GenConfig gcfg;
    std::string gkind = "BMTS", gtop = "tree-noise", gout;
    auto* gn = app.add_subcommand("gen", "generate a random system");
    gn->add_option("--kind", gkind);
    gn->add_option("--states", gcfg.numStates);
    gn->add_option("--seed", gcfg.seed);
    gn->add_option("--alphabet", gcfg.alphabetSize);
    gn->add_option("--branching", gcfg.branchingDegree);
    gn->add_option("--params", gcfg.numParams);
    gn->add_option("--topology", gtop)->check(CLI::IsMember({"tree-noise", "clusters"}));
    gn->add_option("--cluster-size", gcfg.clusterSize);
    gn->add_option("--interfaces", gcfg.interfaceCount);
    gn->add_option("--formula-depth", gcfg.formulaDepth);
    gn->add_option("--name", gcfg.name);
    gn->add_option("--state-prefix", gcfg.statePrefix);
    gn->add_option("-o,--output", gout);

    BenchArgs ba;
    auto* bn = app.add_subcommand("bench", "run a benchmark matrix");
    bn->add_option("--matrix", ba.matrix)->required();
    bn->add_option("-o,--output", ba.out);
    bn->add_option("--timeout-secs", ba.timeout);
    bn->add_option("--workers", ba.workers);
    bn->add_option("--checkers", ba.checkers, "DIRECT, QBF_INTERNAL, QBF_EXTERNAL");
    bn->add_option("--solver", ba.solver);

    std::string sq;
    double sqTimeout = 0;
    auto* sv = app.add_subcommand("solve-qdimacs", "evaluate a QDIMACS file (exit 10 true, 20 false)");
    sv->add_option("input", sq)->required();
    sv->add_option("--timeout-secs", sqTimeout);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*cm) return checkModal(modal);
        if (*ct) return checkThorough(tl, tr, mode, ttimeout);
        if (*tr_) return transform(tf);
        if (*eq) return encodeQbf(el, er, edef, eout);
        if (*cl) return classifyCmd(cin_);
        if (*gn) return genCmd(gcfg, gkind, gtop, gout);
        if (*bn) return benchCmd(ba);
        if (*sv) return solveQdimacs(sq, sqTimeout);
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << e.what();
        if (e.span()) std::cerr << " at line " << e.span()->line << ", column " << e.span()->column;
        std::cerr << '\n';
        return exitFor(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
