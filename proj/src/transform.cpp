#include "mtsref/transform.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "mtsref/core.hpp"

namespace mtsref {

const char* initialCombinationName(InitialCombination c) {
    switch (c) {
    case InitialCombination::Guarded: return "guarded";
    case InitialCombination::Parity: return "parity";
    case InitialCombination::ExactlyOne: return "exactly-one";
    }
    return "?";
}

namespace {

void checkParams(const TransitionSystem& sys, const Limits& limits) {
    if (sys.paramCount() > limits.maxParams || sys.paramCount() >= 63)
        throw Error(ErrorCode::ParamLimit, std::to_string(sys.paramCount()) + " parameters exceed the cap of " +
                                               std::to_string(limits.maxParams));
}

std::string valuationName(const TransitionSystem& sys, Valuation nu) {
    std::string out = "{";
    bool first = true;
    for (ParamId p = 0; p < sys.paramCount(); ++p)
        if (nu.contains(p)) {
            if (!first) out += ",";
            out += sys.paramName(p);
            first = false;
        }
    return out + "}";
}

Formula paramValue(Valuation nu, ParamId p) { return nu.contains(p) ? Formula::tt() : Formula::ff(); }

Formula finish(Formula f, bool simplify) { return simplify ? f.simplified() : f; }

}  // namespace

Rooted deparameterize(const TransitionSystem& sys, StateId s0, const DeparamOptions& options, const Limits& limits) {
    if (s0 >= sys.stateCount()) throw Error(ErrorCode::InvalidArgument, "initial state out of range");
    if (sys.paramCount() == 0) return {sys, s0};
    checkParams(sys, limits);

    const std::uint64_t vals = std::uint64_t{1} << sys.paramCount();
    const auto n = sys.stateCount();
    SystemBuilder b(sys.name() + "B");
    std::vector<ActionId> act;
    for (const auto& a : sys.actionNames()) act.push_back(b.addAction(a));

    // Copy names first so the fresh initial can avoid them.
    std::vector<std::string> copyNames;
    copyNames.reserve(n * vals);
    for (StateId s = 0; s < n; ++s)
        for (std::uint64_t nu = 0; nu < vals; ++nu)
            copyNames.push_back(sys.stateName(s) + "@" + valuationName(sys, Valuation(nu)));
    std::string initName = sys.stateName(s0) + "^B";
    while (std::find(copyNames.begin(), copyNames.end(), initName) != copyNames.end()) initName += "'";
    const StateId init = b.addState(initName);
    for (auto& name : copyNames) b.addState(std::move(name));
    auto copy = [&](StateId s, std::uint64_t nu) { return static_cast<StateId>(1 + s * vals + nu); };

    for (StateId s = 0; s < n; ++s)
        for (std::uint64_t nu = 0; nu < vals; ++nu) {
            for (const auto& t : sys.outgoing(s)) b.addTransition(copy(s, nu), act[t.action], copy(t.target, nu));
            Valuation v(nu);
            b.setObligation(copy(s, nu), finish(sys.obligation(s).substitute(
                                                    [&](ActionId a, StateId t) { return Formula::trans(act[a], copy(t, nu)); },
                                                    [&](ParamId p) { return paramValue(v, p); }),
                                                options.simplify));
        }

    std::vector<Formula> parts;
    for (std::uint64_t nu = 0; nu < vals; ++nu) {
        for (const auto& t : sys.outgoing(s0)) b.addTransition(init, act[t.action], copy(t.target, nu));
        Valuation v(nu);
        parts.push_back(sys.obligation(s0).substitute(
            [&](ActionId a, StateId t) { return Formula::trans(act[a], copy(t, nu)); },
            [&](ParamId p) { return paramValue(v, p); }));
    }
    Formula phi0;
    switch (options.combination) {
    case InitialCombination::Parity: {
        phi0 = parts[0];
        for (std::size_t i = 1; i < parts.size(); ++i) phi0 = Formula::exclusiveOr(phi0, parts[i]);
        break;
    }
    case InitialCombination::ExactlyOne: {
        std::vector<Formula> alts;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            std::vector<Formula> c{parts[i]};
            for (std::size_t j = 0; j < parts.size(); ++j)
                if (j != i) c.push_back(Formula::negation(parts[j]));
            alts.push_back(Formula::conjunction(c));
        }
        phi0 = Formula::disjunction(alts);
        break;
    }
    case InitialCombination::Guarded: {
        std::vector<Formula> alts;
        for (std::uint64_t nu = 0; nu < vals; ++nu) {
            std::vector<Formula> c{parts[nu]};
            for (std::uint64_t other = 0; other < vals; ++other)
                if (other != nu)
                    for (const auto& t : sys.outgoing(s0))
                        c.push_back(Formula::negation(Formula::trans(act[t.action], copy(t.target, other))));
            alts.push_back(Formula::conjunction(c));
        }
        phi0 = Formula::disjunction(alts);
        break;
    }
    }
    b.setObligation(init, finish(phi0, options.simplify));
    b.setInitial(init);
    auto full = std::move(b).build();
    if (!options.trimUnreachable) return {std::move(full), init};
    auto keep = reachableStates(full, init);
    auto trimmed = restrictStates(full, keep);
    return {std::move(trimmed), 0};
}

MultiInitialSystem denegate(const TransitionSystem& sys, StateId s0, const Limits& limits) {
    if (sys.paramCount() != 0) throw Error(ErrorCode::KindError, "de-negation expects a parameter-free system");
    if (s0 >= sys.stateCount()) throw Error(ErrorCode::InvalidArgument, "initial state out of range");
    std::vector<std::vector<AdmissibleSet>> tran(sys.stateCount());
    std::vector<StateId> first(sys.stateCount() + 1, 0);
    for (StateId s = 0; s < sys.stateCount(); ++s) {
        tran[s] = tranSets(sys, s, {}, limits);
        first[s + 1] = first[s] + static_cast<StateId>(tran[s].size());
    }
    SystemBuilder b(sys.name() + "D");
    std::vector<ActionId> act;
    for (const auto& a : sys.actionNames()) act.push_back(b.addAction(a));
    for (StateId k = 0; k < first.back(); ++k) b.addState("M#" + std::to_string(k));
    for (StateId s = 0; s < sys.stateCount(); ++s)
        for (std::size_t i = 0; i < tran[s].size(); ++i) {
            StateId m = first[s] + static_cast<StateId>(i);
            std::vector<Formula> clauses;
            for (auto [a, target] : tran[s][i].pairs(sys)) {
                std::vector<Formula> alts;
                for (std::size_t j = 0; j < tran[target].size(); ++j) {
                    StateId mp = first[target] + static_cast<StateId>(j);
                    b.addTransition(m, act[a], mp);
                    alts.push_back(Formula::trans(act[a], mp));
                }
                clauses.push_back(Formula::disjunction(alts));
            }
            b.setObligation(m, Formula::conjunction(clauses));
        }
    if (tran[s0].empty()) throw Error(ErrorCode::InvalidArgument, "initial state is locally inconsistent");
    b.setInitial(first[s0]);
    MultiInitialSystem out{std::move(b).build(), {}};
    for (std::size_t i = 0; i < tran[s0].size(); ++i) out.initials.push_back(first[s0] + static_cast<StateId>(i));
    return out;
}

Rooted deterministicHull(const TransitionSystem& sys, StateId s0, bool simplify, const Limits& limits) {
    if (s0 >= sys.stateCount()) throw Error(ErrorCode::InvalidArgument, "initial state out of range");
    using Macro = std::vector<StateId>;
    std::map<Macro, StateId> index;
    std::vector<Macro> macros;
    // successor macrostate per (macrostate, action), -1 when empty
    std::vector<std::vector<std::int64_t>> succ;
    auto intern = [&](Macro m) {
        auto [it, fresh] = index.emplace(m, static_cast<StateId>(macros.size()));
        if (fresh) {
            if (macros.size() >= limits.maxHullStates)
                throw Error(ErrorCode::StateLimit, "deterministic hull exceeds " +
                                                       std::to_string(limits.maxHullStates) + " macrostates");
            macros.push_back(std::move(m));
        }
        return it->second;
    };
    intern({s0});
    for (std::size_t q = 0; q < macros.size(); ++q) {
        std::vector<Macro> byAction(sys.actionCount());
        for (StateId s : macros[q])
            for (const auto& t : sys.outgoing(s)) byAction[t.action].push_back(t.target);
        std::vector<std::int64_t> row(sys.actionCount(), -1);
        for (ActionId a = 0; a < sys.actionCount(); ++a) {
            auto& m = byAction[a];
            if (m.empty()) continue;
            std::sort(m.begin(), m.end());
            m.erase(std::unique(m.begin(), m.end()), m.end());
            row[a] = intern(std::move(m));
        }
        succ.push_back(std::move(row));
    }

    SystemBuilder b(sys.name() + "Det");
    std::vector<ActionId> act;
    for (const auto& a : sys.actionNames()) act.push_back(b.addAction(a));
    for (const auto& p : sys.paramNames()) b.addParam(p);
    for (const auto& m : macros) {
        std::string name = "{";
        for (std::size_t i = 0; i < m.size(); ++i) name += (i ? "," : "") + sys.stateName(m[i]);
        b.addState(name + "}");
    }
    for (StateId q = 0; q < macros.size(); ++q) {
        for (ActionId a = 0; a < sys.actionCount(); ++a)
            if (succ[q][a] >= 0) b.addTransition(q, act[a], static_cast<StateId>(succ[q][a]));
        std::vector<Formula> alts;
        for (StateId s : macros[q])
            alts.push_back(sys.obligation(s).substitute(
                [&](ActionId a, StateId) { return Formula::trans(act[a], static_cast<StateId>(succ[q][a])); },
                [](ParamId p) { return Formula::param(p); }));
        b.setObligation(q, finish(Formula::disjunction(alts), simplify));
    }
    b.setInitial(0);
    return {std::move(b).build(), 0};
}

TransitionSystem parameterFreeHull(const TransitionSystem& sys, bool simplify, const Limits& limits) {
    if (sys.paramCount() == 0) return sys;
    checkParams(sys, limits);
    const std::uint64_t vals = std::uint64_t{1} << sys.paramCount();
    SystemBuilder b(sys.name() + "P");
    std::vector<ActionId> act;
    for (const auto& a : sys.actionNames()) act.push_back(b.addAction(a));
    for (const auto& n : sys.stateNames()) b.addState(n);
    for (const auto& t : sys.transitions()) b.addTransition(t.source, act[t.action], t.target);
    for (StateId s = 0; s < sys.stateCount(); ++s) {
        std::vector<Formula> alts;
        for (std::uint64_t nu = 0; nu < vals; ++nu) {
            Valuation v(nu);
            alts.push_back(sys.obligation(s).substitute(
                [&](ActionId a, StateId t) { return Formula::trans(act[a], t); },
                [&](ParamId p) { return paramValue(v, p); }));
        }
        b.setObligation(s, finish(Formula::disjunction(alts), simplify));
    }
    if (sys.initial()) b.setInitial(*sys.initial());
    return std::move(b).build();
}

}  // namespace mtsref
