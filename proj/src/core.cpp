#include "mtsref/core.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <string>

namespace mtsref {

bool evalFormula(const Formula& phi, const std::set<std::pair<ActionId, StateId>>& chosen, Valuation nu) {
    return phi.evaluate([&](ActionId a, StateId t) { return chosen.count({a, t}) > 0; },
                        [&](ParamId p) { return nu.contains(p); });
}

namespace {

// Postfix program over local transition indices.
struct Program {
    enum Op : std::uint8_t { PushTrue, PushTrans, PushParam, Not, And, Or };
    struct Instr {
        Op op;
        std::uint32_t arg;
    };
    std::vector<Instr> code;

    static Program compile(const TransitionSystem& sys, StateId s) {
        Program p;
        std::function<void(const Formula&)> emit = [&](const Formula& f) {
            switch (f.kind()) {
            case FormulaKind::True: p.code.push_back({PushTrue, 0}); break;
            case FormulaKind::Trans:
                p.code.push_back({PushTrans, *sys.localIndex(s, f.action(), f.target())});
                break;
            case FormulaKind::Param: p.code.push_back({PushParam, f.param()}); break;
            case FormulaKind::Not:
                emit(f.child());
                p.code.push_back({Not, 0});
                break;
            case FormulaKind::And:
            case FormulaKind::Or:
                emit(f.left());
                emit(f.right());
                p.code.push_back({f.kind() == FormulaKind::And ? And : Or, 0});
                break;
            }
        };
        emit(sys.obligation(s));
        return p;
    }

    bool run(std::uint32_t mask, std::uint64_t params, std::vector<char>& stack) const {
        stack.clear();
        for (const auto& in : code) {
            switch (in.op) {
            case PushTrue: stack.push_back(1); break;
            case PushTrans: stack.push_back(static_cast<char>((mask >> in.arg) & 1u)); break;
            case PushParam: stack.push_back(static_cast<char>((params >> in.arg) & 1u)); break;
            case Not: stack.back() = !stack.back(); break;
            case And: {
                char r = stack.back();
                stack.pop_back();
                stack.back() = stack.back() && r;
                break;
            }
            case Or: {
                char r = stack.back();
                stack.pop_back();
                stack.back() = stack.back() || r;
                break;
            }
            }
        }
        return stack.back();
    }
};

void collectParams(const Formula& f, std::uint64_t& used) {
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Trans: return;
    case FormulaKind::Param: used |= std::uint64_t{1} << f.param(); return;
    case FormulaKind::Not: collectParams(f.child(), used); return;
    case FormulaKind::And:
    case FormulaKind::Or:
        collectParams(f.left(), used);
        collectParams(f.right(), used);
        return;
    }
}

void checkDegree(const TransitionSystem& sys, StateId s, const Limits& limits) {
    auto deg = sys.outgoing(s).size();
    if (deg > limits.maxOutDegree || deg > 31) {
        throw Error(ErrorCode::OutDegreeLimit, "state '" + sys.stateName(s) + "' has " + std::to_string(deg) +
                                                   " outgoing transitions (cap " +
                                                   std::to_string(limits.maxOutDegree) + ")");
    }
}

bool isPositiveConjunction(const Formula& f, std::vector<Formula>& atoms) {
    switch (f.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::Trans: atoms.push_back(f); return true;
    case FormulaKind::And: return isPositiveConjunction(f.left(), atoms) && isPositiveConjunction(f.right(), atoms);
    default: return false;
    }
}

bool isPositiveClause(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Trans: return true;
    case FormulaKind::Or: return isPositiveClause(f.left()) && isPositiveClause(f.right());
    default: return false;
    }
}

bool isPositiveCnf(const Formula& f) {
    if (f.kind() == FormulaKind::And) return isPositiveCnf(f.left()) && isPositiveCnf(f.right());
    return isPositiveClause(f);
}

}  // namespace

std::vector<AdmissibleSet> tranSets(const TransitionSystem& sys, StateId s, Valuation nu, const Limits& limits) {
    checkDegree(sys, s, limits);
    const auto deg = static_cast<std::uint32_t>(sys.outgoing(s).size());
    Program prog = Program::compile(sys, s);
    std::vector<char> stack;
    std::vector<AdmissibleSet> out;
    const std::uint64_t end = std::uint64_t{1} << deg;
    for (std::uint64_t m = 0; m < end; ++m) {
        if (prog.run(static_cast<std::uint32_t>(m), nu.bits(), stack))
            out.push_back({s, static_cast<std::uint32_t>(m)});
    }
    return out;
}

std::vector<std::vector<AdmissibleSet>> tranSetsPerValuation(const TransitionSystem& sys, StateId s,
                                                             const Limits& limits) {
    checkDegree(sys, s, limits);
    if (sys.paramCount() >= 63) throw Error(ErrorCode::ParamLimit, "too many parameters");
    const auto deg = static_cast<std::uint32_t>(sys.outgoing(s).size());
    std::uint64_t used = 0;
    collectParams(sys.obligation(s), used);
    Program prog = Program::compile(sys, s);
    std::vector<char> stack;
    std::vector<std::vector<AdmissibleSet>> out(std::size_t{1} << sys.paramCount());
    for (std::uint64_t nu = 0; nu < out.size(); ++nu) {
        // Valuations agreeing on the mentioned parameters share one answer.
        if ((nu & used) != nu) {
            out[nu] = out[nu & used];
            continue;
        }
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << deg); ++m)
            if (prog.run(static_cast<std::uint32_t>(m), nu, stack)) out[nu].push_back({s, static_cast<std::uint32_t>(m)});
    }
    return out;
}

TransitionSystem induceValuation(const TransitionSystem& sys, Valuation nu) {
    SystemBuilder b(sys.name());
    for (const auto& n : sys.stateNames()) b.addState(n);
    for (const auto& a : sys.actionNames()) b.addAction(a);
    for (const auto& t : sys.transitions()) b.addTransition(t.source, t.action, t.target);
    for (StateId s = 0; s < sys.stateCount(); ++s) {
        const Formula& phi = sys.obligation(s);
        if (!phi.mentionsParams()) {
            b.setObligation(s, phi);
            continue;
        }
        b.setObligation(s, phi.substitute([](ActionId a, StateId t) { return Formula::trans(a, t); },
                                          [&](ParamId p) { return nu.contains(p) ? Formula::tt() : Formula::ff(); }));
    }
    if (sys.initial()) b.setInitial(*sys.initial());
    return std::move(b).build();
}

SystemKind classify(const TransitionSystem& sys) {
    if (sys.paramCount() > 0) return SystemKind::PMTS;
    bool implementation = true;
    bool mts = true;
    bool dmts = true;
    for (StateId s = 0; s < sys.stateCount() && dmts; ++s) {
        const Formula& phi = sys.obligation(s);
        std::vector<Formula> atoms;
        if (isPositiveConjunction(phi, atoms)) {
            if (implementation) {
                std::vector<std::uint32_t> idx;
                for (const auto& a : atoms) idx.push_back(*sys.localIndex(s, a.action(), a.target()));
                std::sort(idx.begin(), idx.end());
                idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
                implementation = idx.size() == sys.outgoing(s).size();
            }
            continue;
        }
        implementation = false;
        mts = false;
        dmts = isPositiveCnf(phi);
    }
    if (implementation) return SystemKind::Implementation;
    if (mts) return SystemKind::MTS;
    if (dmts) return SystemKind::DMTS;
    return SystemKind::BMTS;
}

bool isLocallyConsistent(const TransitionSystem& sys, StateId s, const Limits& limits) {
    checkDegree(sys, s, limits);
    std::uint64_t used = 0;
    collectParams(sys.obligation(s), used);
    std::vector<ParamId> ps;
    for (ParamId p = 0; p < 64; ++p)
        if ((used >> p) & 1u) ps.push_back(p);
    if (ps.size() > limits.maxParams) throw Error(ErrorCode::ParamLimit, "too many parameters in one obligation");
    Program prog = Program::compile(sys, s);
    std::vector<char> stack;
    const auto deg = static_cast<std::uint32_t>(sys.outgoing(s).size());
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << ps.size()); ++v) {
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < ps.size(); ++i)
            if ((v >> i) & 1u) bits |= std::uint64_t{1} << ps[i];
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << deg); ++m)
            if (prog.run(static_cast<std::uint32_t>(m), bits, stack)) return true;
    }
    return false;
}

TransitionSystem restrictStates(const TransitionSystem& sys, const std::vector<StateId>& keep,
                                std::vector<std::optional<StateId>>* mapping) {
    std::vector<std::optional<StateId>> map(sys.stateCount());
    for (std::size_t i = 0; i < keep.size(); ++i) map[keep[i]] = static_cast<StateId>(i);
    SystemBuilder b(sys.name());
    for (StateId s : keep) b.addState(sys.stateName(s));
    for (const auto& a : sys.actionNames()) b.addAction(a);
    for (const auto& p : sys.paramNames()) b.addParam(p);
    for (const auto& t : sys.transitions())
        if (map[t.source] && map[t.target]) b.addTransition(*map[t.source], t.action, *map[t.target]);
    for (StateId s : keep) {
        b.setObligation(*map[s], sys.obligation(s).substitute(
                                     [&](ActionId a, StateId t) {
                                         return map[t] ? Formula::trans(a, *map[t]) : Formula::ff();
                                     },
                                     [](ParamId p) { return Formula::param(p); }));
    }
    if (sys.initial() && map[*sys.initial()]) b.setInitial(*map[*sys.initial()]);
    if (mapping) *mapping = map;
    return std::move(b).build();
}

PruneResult prune(const TransitionSystem& sys, const Limits& limits) {
    std::vector<char> alive(sys.stateCount(), 1);
    std::vector<StateId> removed;
    TransitionSystem current = sys;
    std::vector<StateId> currentToInput(sys.stateCount());
    for (StateId s = 0; s < sys.stateCount(); ++s) currentToInput[s] = s;
    for (;;) {
        std::vector<StateId> keep;
        bool changed = false;
        for (StateId s = 0; s < current.stateCount(); ++s) {
            if (isLocallyConsistent(current, s, limits)) {
                keep.push_back(s);
            } else {
                removed.push_back(currentToInput[s]);
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<StateId> nextToInput;
        for (StateId s : keep) nextToInput.push_back(currentToInput[s]);
        current = restrictStates(current, keep);
        currentToInput = std::move(nextToInput);
    }
    std::sort(removed.begin(), removed.end());
    PruneResult result;
    result.mapping.assign(sys.stateCount(), std::nullopt);
    for (StateId s = 0; s < currentToInput.size(); ++s) result.mapping[currentToInput[s]] = s;
    if (removed.empty()) {
        result.system = sys;
    } else {
        result.system = std::move(current);
    }
    result.removed = std::move(removed);
    return result;
}

std::vector<StateId> reachableStates(const TransitionSystem& sys, StateId from) {
    std::vector<char> seen(sys.stateCount(), 0);
    std::deque<StateId> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (const auto& t : sys.outgoing(s)) {
            if (!seen[t.target]) {
                seen[t.target] = 1;
                queue.push_back(t.target);
            }
        }
    }
    std::vector<StateId> out;
    for (StateId s = 0; s < sys.stateCount(); ++s)
        if (seen[s]) out.push_back(s);
    return out;
}

bool isDeterministic(const TransitionSystem& sys, StateId from) {
    for (StateId s : reachableStates(sys, from)) {
        auto out = sys.outgoing(s);
        for (std::size_t i = 1; i < out.size(); ++i)
            if (out[i].action == out[i - 1].action) return false;
    }
    return true;
}

bool isDeterministic(const TransitionSystem& sys) {
    for (StateId s = 0; s < sys.stateCount(); ++s) {
        auto out = sys.outgoing(s);
        for (std::size_t i = 1; i < out.size(); ++i)
            if (out[i].action == out[i - 1].action) return false;
    }
    return true;
}

bool isAcyclic(const TransitionSystem& sys) {
    // Kahn's algorithm.
    std::vector<std::size_t> indeg(sys.stateCount(), 0);
    for (const auto& t : sys.transitions()) ++indeg[t.target];
    std::vector<StateId> stack;
    for (StateId s = 0; s < sys.stateCount(); ++s)
        if (indeg[s] == 0) stack.push_back(s);
    std::size_t visited = 0;
    while (!stack.empty()) {
        StateId s = stack.back();
        stack.pop_back();
        ++visited;
        for (const auto& t : sys.outgoing(s))
            if (--indeg[t.target] == 0) stack.push_back(t.target);
    }
    return visited == sys.stateCount();
}

TransitionSystem disjointUnion(const TransitionSystem& left, const TransitionSystem& right, std::string name) {
    SystemBuilder b(std::move(name));
    for (const auto& n : left.stateNames()) b.addState(n);
    const auto shift = static_cast<StateId>(left.stateCount());
    for (const auto& n : right.stateNames()) {
        std::string candidate = n;
        while (b.findState(candidate)) candidate += "'";
        b.addState(candidate);
    }
    std::vector<ActionId> la, ra;
    for (const auto& a : left.actionNames()) la.push_back(b.addAction(a));
    for (const auto& a : right.actionNames()) ra.push_back(b.addAction(a));
    std::vector<ParamId> lp, rp;
    for (const auto& p : left.paramNames()) lp.push_back(b.addParam(p));
    for (const auto& p : right.paramNames()) {
        std::string candidate = p;
        while (b.findParam(candidate)) candidate += "'";
        rp.push_back(b.addParam(candidate));
    }
    for (const auto& t : left.transitions()) b.addTransition(t.source, la[t.action], t.target);
    for (const auto& t : right.transitions()) b.addTransition(t.source + shift, ra[t.action], t.target + shift);
    for (StateId s = 0; s < left.stateCount(); ++s)
        b.setObligation(s, left.obligation(s).substitute(
                               [&](ActionId a, StateId t) { return Formula::trans(la[a], t); },
                               [&](ParamId p) { return Formula::param(lp[p]); }));
    for (StateId s = 0; s < right.stateCount(); ++s)
        b.setObligation(s + shift, right.obligation(s).substitute(
                                       [&](ActionId a, StateId t) { return Formula::trans(ra[a], t + shift); },
                                       [&](ParamId p) { return Formula::param(rp[p]); }));
    if (left.initial()) b.setInitial(*left.initial());
    return std::move(b).build();
}

}  // namespace mtsref
