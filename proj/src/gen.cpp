#include "mtsref/gen.hpp"

#include <algorithm>

#include "mtsref/core.hpp"

namespace mtsref {

std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
        std::uint64_t x = next();
        if (x < limit) return x % n;
    }
}

Rng Rng::split(std::uint64_t key) const {
    Rng mix(state_ ^ (key * 0xD1B54A32D192ED03ull));
    return Rng(mix.next());
}

const char* topologyName(Topology t) { return t == Topology::TreeNoise ? "TREE_NOISE" : "CLUSTERS"; }

namespace {

using Atom = std::pair<ActionId, StateId>;

std::string actionLabel(std::size_t i) {
    if (i < 26) return std::string(1, static_cast<char>('a' + i));
    return "a" + std::to_string(i);
}

Formula randomTree(const std::vector<Atom>& atoms, std::size_t numParams, std::size_t depth, Rng& rng) {
    auto leaf = [&]() -> Formula {
        const std::size_t choices = atoms.size() + numParams;
        if (choices == 0) return rng.chance(1, 2) ? Formula::tt() : Formula::negation(Formula::tt());
        std::size_t k = rng.below(choices);
        // Parameters are drawn at most half the time when both kinds exist.
        if (numParams > 0 && !atoms.empty()) k = rng.chance(1, 3) ? atoms.size() + rng.below(numParams) : rng.below(atoms.size());
        if (k < atoms.size()) return Formula::trans(atoms[k].first, atoms[k].second);
        return Formula::param(static_cast<ParamId>(k - atoms.size()));
    };
    if (depth == 0 || rng.chance(1, 3)) return leaf();
    switch (rng.below(4)) {
    case 0: return Formula::negation(randomTree(atoms, numParams, depth - 1, rng));
    case 1:
        return Formula::conj(randomTree(atoms, numParams, depth - 1, rng), randomTree(atoms, numParams, depth - 1, rng));
    default:
        return Formula::disj(randomTree(atoms, numParams, depth - 1, rng), randomTree(atoms, numParams, depth - 1, rng));
    }
}

Formula drawObligation(SystemKind kind, const std::vector<Atom>& atoms, std::size_t numParams, std::size_t depth,
                       Rng& rng) {
    auto atom = [&](const Atom& a) { return Formula::trans(a.first, a.second); };
    switch (kind) {
    case SystemKind::Implementation: {
        std::vector<Formula> parts;
        for (const auto& a : atoms) parts.push_back(atom(a));
        return Formula::conjunction(parts);
    }
    case SystemKind::MTS: {
        std::vector<Formula> parts;
        for (const auto& a : atoms)
            if (rng.chance(1, 2)) parts.push_back(atom(a));
        return Formula::conjunction(parts);
    }
    case SystemKind::DMTS: {
        if (atoms.empty()) return Formula::tt();
        std::vector<Formula> clauses;
        const std::size_t n = rng.between(1, std::min<std::size_t>(2, atoms.size()));
        for (std::size_t c = 0; c < n; ++c) {
            std::vector<Formula> lits;
            const std::size_t width = rng.between(1, std::min<std::size_t>(3, atoms.size()));
            std::vector<std::size_t> idx(atoms.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            for (std::size_t i = 0; i < width; ++i) {
                std::size_t j = i + rng.below(idx.size() - i);
                std::swap(idx[i], idx[j]);
                lits.push_back(atom(atoms[idx[i]]));
            }
            clauses.push_back(Formula::disjunction(lits));
        }
        return Formula::conjunction(clauses);
    }
    case SystemKind::BMTS: return randomTree(atoms, 0, depth, rng);
    case SystemKind::PMTS: return randomTree(atoms, numParams, depth, rng);
    }
    return Formula::tt();
}

bool satisfiable(const Formula& phi, const std::vector<Atom>& atoms, std::size_t numParams) {
    const std::uint64_t masks = std::uint64_t{1} << atoms.size();
    const std::uint64_t vals = std::uint64_t{1} << numParams;
    for (std::uint64_t nu = 0; nu < vals; ++nu)
        for (std::uint64_t m = 0; m < masks; ++m) {
            bool ok = phi.evaluate(
                [&](ActionId a, StateId t) {
                    for (std::size_t i = 0; i < atoms.size(); ++i)
                        if (atoms[i].first == a && atoms[i].second == t) return ((m >> i) & 1u) != 0;
                    return false;
                },
                [&](ParamId p) { return ((nu >> p) & 1u) != 0; });
            if (ok) return true;
        }
    return false;
}

/// Builds a system from edges and draws per-state obligations.
TransitionSystem assemble(const std::string& name, const std::string& prefix, std::size_t numStates,
                          std::size_t numActions, std::size_t numParams, const std::vector<Transition>& edges,
                          SystemKind kind, std::size_t depth, bool consistent, Rng& rng) {
    std::vector<std::vector<Atom>> atoms(numStates);
    for (const auto& e : edges) atoms[e.source].emplace_back(e.action, e.target);
    for (auto& a : atoms) std::sort(a.begin(), a.end());
    std::vector<Formula> phi(numStates);
    for (StateId s = 0; s < numStates; ++s) {
        std::size_t attempts = 0;
        for (;;) {
            phi[s] = drawObligation(kind, atoms[s], numParams, depth, rng);
            if (!consistent || satisfiable(phi[s], atoms[s], numParams)) break;
            if (++attempts >= 100)
                throw Error(ErrorCode::GenFailure, "no consistent obligation after 100 draws");
        }
    }
    SystemBuilder b(name);
    for (std::size_t i = 0; i < numStates; ++i) b.addState(prefix + std::to_string(i));
    for (std::size_t i = 0; i < numActions; ++i) b.addAction(actionLabel(i));
    for (std::size_t i = 0; i < numParams; ++i) b.addParam("p" + std::to_string(i));
    for (const auto& e : edges) b.addTransition(e.source, e.action, e.target);
    for (StateId s = 0; s < numStates; ++s) b.setObligation(s, phi[s]);
    if (numStates > 0) b.setInitial(0);
    return std::move(b).build();
}

}  // namespace

TransitionSystem generate(const GenConfig& cfg, const Limits& limits) {
    if (cfg.numStates == 0) throw Error(ErrorCode::InvalidArgument, "numStates must be positive");
    if (cfg.branchingDegree == 0) throw Error(ErrorCode::InvalidArgument, "branchingDegree must be positive");
    if (cfg.alphabetSize == 0) throw Error(ErrorCode::InvalidArgument, "alphabetSize must be positive");
    if (cfg.kind != SystemKind::PMTS && cfg.numParams != 0)
        throw Error(ErrorCode::InvalidArgument, "parameters are only allowed for PMTS");
    if (cfg.kind == SystemKind::PMTS && cfg.numParams == 0)
        throw Error(ErrorCode::InvalidArgument, "PMTS generation needs at least one parameter");
    if (cfg.branchingDegree > limits.maxOutDegree)
        throw Error(ErrorCode::OutDegreeLimit, "branching degree exceeds the out-degree cap");
    const std::size_t n = cfg.numStates;
    Rng rng(cfg.seed);

    for (std::size_t attempt = 0; attempt < 100; ++attempt) {
        Rng edgeRng = rng.split(2 * attempt);
        Rng phiRng = rng.split(2 * attempt + 1);
        std::vector<Transition> edges;
        std::vector<std::size_t> degree(n, 0);
        auto has = [&](StateId s, ActionId a, StateId t) {
            return std::find(edges.begin(), edges.end(), Transition{s, a, t}) != edges.end();
        };
        auto add = [&](StateId s, ActionId a, StateId t) {
            edges.push_back({s, a, t});
            ++degree[s];
        };
        // Fill s up to the branching degree with targets drawn from `pool`.
        auto fill = [&](StateId s, const std::vector<StateId>& pool) {
            if (pool.size() * cfg.alphabetSize < cfg.branchingDegree)
                throw Error(ErrorCode::GenFailure, "too few distinct (action,target) pairs for the branching degree");
            while (degree[s] < cfg.branchingDegree) {
                StateId t = pool[edgeRng.below(pool.size())];
                ActionId a = static_cast<ActionId>(edgeRng.below(cfg.alphabetSize));
                if (!has(s, a, t)) add(s, a, t);
            }
        };
        auto treeEdge = [&](const std::vector<StateId>& members, std::size_t i) {
            std::vector<StateId> open;
            for (std::size_t j = 0; j < i; ++j)
                if (degree[members[j]] < cfg.branchingDegree) open.push_back(members[j]);
            StateId parent = open[edgeRng.below(open.size())];
            add(parent, static_cast<ActionId>(edgeRng.below(cfg.alphabetSize)), members[i]);
        };

        if (cfg.topology == Topology::TreeNoise) {
            std::vector<StateId> all(n);
            for (StateId s = 0; s < n; ++s) all[s] = s;
            for (std::size_t i = 1; i < n; ++i) treeEdge(all, i);
            for (StateId s = 0; s < n; ++s) fill(s, all);
        } else {
            const std::size_t cs = std::max<std::size_t>(1, cfg.clusterSize);
            const std::size_t ifaces = std::clamp<std::size_t>(cfg.interfaceCount, 1, cs);
            std::vector<std::vector<StateId>> clusters;
            for (StateId s = 0; s < n; ++s) {
                if (s % cs == 0) clusters.emplace_back();
                clusters.back().push_back(s);
            }
            std::vector<StateId> interfaces;
            for (const auto& c : clusters)
                for (std::size_t i = 0; i < std::min(ifaces, c.size()); ++i) interfaces.push_back(c[i]);
            // Spanning structure: a tree inside each cluster, and interface-to-interface links between clusters.
            // Links go first so they never find their interface full; with
            // branching 1 a link would starve the tree, so clusters stay apart.
            for (std::size_t k = 0; k < clusters.size(); ++k) {
                if (k + 1 < clusters.size() && cfg.branchingDegree >= 2) {
                    StateId from = clusters[k][edgeRng.below(std::min(ifaces, clusters[k].size()))];
                    add(from, static_cast<ActionId>(edgeRng.below(cfg.alphabetSize)), clusters[k + 1][0]);
                }
                for (std::size_t i = 1; i < clusters[k].size(); ++i) treeEdge(clusters[k], i);
            }
            for (std::size_t k = 0; k < clusters.size(); ++k)
                for (std::size_t i = 0; i < clusters[k].size(); ++i) {
                    StateId s = clusters[k][i];
                    std::vector<StateId> pool = clusters[k];
                    if (i < ifaces)
                        for (StateId t : interfaces)
                            if (std::find(pool.begin(), pool.end(), t) == pool.end()) pool.push_back(t);
                    fill(s, pool);
                }
        }
        std::sort(edges.begin(), edges.end());
        TransitionSystem sys = assemble(cfg.name, cfg.statePrefix, n, cfg.alphabetSize, cfg.numParams, edges,
                                        cfg.kind, cfg.formulaDepth, true, phiRng);
        if (classify(sys) == cfg.kind) return sys;
    }
    throw Error(ErrorCode::GenFailure, std::string("no system of kind ") + systemKindName(cfg.kind) +
                                           " within 100 draws");
}

TransitionSystem randomSystem(const RandomSystemConfig& cfg, Rng& rng) {
    const std::size_t n = rng.between(1, std::max<std::size_t>(1, cfg.maxStates));
    const std::size_t actions = rng.between(1, std::max<std::size_t>(1, cfg.maxActions));
    std::size_t params = 0;
    if (cfg.kind == SystemKind::PMTS) params = rng.between(std::min(cfg.minParams, cfg.maxParams), cfg.maxParams);
    std::vector<Transition> edges;
    for (StateId s = 0; s < n; ++s) {
        const std::size_t first = cfg.acyclic ? s + 1 : 0;
        if (first >= n) continue;
        const std::size_t room = (n - first) * actions;
        const std::size_t deg = rng.between(0, std::min(cfg.maxOutDegree, room));
        std::vector<Transition> mine;
        while (mine.size() < deg) {
            Transition e{s, static_cast<ActionId>(rng.below(actions)), static_cast<StateId>(first + rng.below(n - first))};
            if (std::find(mine.begin(), mine.end(), e) == mine.end()) mine.push_back(e);
        }
        edges.insert(edges.end(), mine.begin(), mine.end());
    }
    std::sort(edges.begin(), edges.end());
    return assemble(cfg.name, cfg.statePrefix, n, actions, params, edges, cfg.kind, cfg.formulaDepth, cfg.consistent,
                    rng);
}

}  // namespace mtsref
