#include "mtsref/thorough.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <unordered_map>

#include "mtsref/core.hpp"
#include "mtsref/transform.hpp"

namespace mtsref {

std::uint64_t AvoidSet::maskOf(const std::vector<StateId>& rightStates) const {
    std::uint64_t mask = 0;
    for (StateId t : rightStates) {
        if (t >= universeIndex_.size() || universeIndex_[t] < 0)
            throw Error(ErrorCode::InvalidArgument, "state outside the Avoid universe");
        mask |= std::uint64_t{1} << universeIndex_[t];
    }
    return mask;
}

bool AvoidSet::contains(StateId s, std::uint64_t mask) const {
    if (mask == 0) return s < member_.size();
    return s < member_.size() && mask < member_[s].size() && member_[s][mask] != -1;
}

bool AvoidSet::contains(StateId s, const std::vector<StateId>& rightStates) const {
    return contains(s, maskOf(rightStates));
}

std::size_t AvoidSet::size() const {
    std::size_t n = 0;
    for (const auto& row : member_)
        for (auto v : row) n += v != -1;
    return n;
}

const AvoidEntry* AvoidSet::origin(StateId s, std::uint64_t mask) const {
    if (mask == 0 || !contains(s, mask)) return nullptr;
    return &entries_[static_cast<std::size_t>(member_[s][mask])];
}

namespace {

void requireParameterFree(const TransitionSystem& sys, const char* what) {
    if (sys.paramCount() != 0)
        throw Error(ErrorCode::KindError, std::string(what) + " expects a parameter-free system");
}

struct LeftElement {
    std::uint32_t action;  // joint id
    StateId target;
};

struct RightChoice {
    StateId owner;
    std::uint32_t index;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (joint action, universe bit)
    std::vector<std::uint64_t> byAction;                          // joint action -> target mask
};

}  // namespace

AvoidSet computeAvoid(const TransitionSystem& left, const TransitionSystem& right, std::vector<StateId> universe,
                      const Limits& limits, const Deadline* deadline) {
    requireParameterFree(left, "Avoid");
    requireParameterFree(right, "Avoid");
    if (universe.size() > limits.maxAvoidStates || universe.size() > 30)
        throw Error(ErrorCode::StateLimit, "Avoid universe of " + std::to_string(universe.size()) +
                                               " states exceeds the cap of " + std::to_string(limits.maxAvoidStates));
    AvoidSet out;
    out.universe_ = std::move(universe);
    out.universeIndex_.assign(right.stateCount(), -1);
    for (std::size_t i = 0; i < out.universe_.size(); ++i) {
        if (out.universe_[i] >= right.stateCount()) throw Error(ErrorCode::InvalidArgument, "universe state out of range");
        out.universeIndex_[out.universe_[i]] = static_cast<std::int32_t>(i);
    }

    JointAlphabet joint(left, right);
    const std::size_t actions = joint.labels.size();
    const std::size_t k = out.universe_.size();
    const std::uint64_t full = std::uint64_t{1} << k;

    std::vector<std::vector<AdmissibleSet>> tranL(left.stateCount());
    std::vector<std::vector<std::vector<LeftElement>>> elems(left.stateCount());
    for (StateId s = 0; s < left.stateCount(); ++s) {
        tranL[s] = tranSets(left, s, {}, limits);
        if (tranL[s].empty()) throw Error(ErrorCode::InvalidArgument, "Avoid expects a globally consistent left system");
        for (const auto& m : tranL[s]) {
            std::vector<LeftElement> e;
            for (auto [a, t] : m.pairs(left)) e.push_back({joint.left[a], t});
            elems[s].push_back(std::move(e));
        }
    }
    std::vector<std::vector<RightChoice>> tranR(k);
    for (std::size_t i = 0; i < k; ++i) {
        StateId t = out.universe_[i];
        auto sets = tranSets(right, t, {}, limits);
        if (sets.empty()) throw Error(ErrorCode::InvalidArgument, "Avoid expects a globally consistent right system");
        for (std::uint32_t j = 0; j < sets.size(); ++j) {
            RightChoice rc{t, j, {}, std::vector<std::uint64_t>(actions, 0)};
            for (auto [a, target] : sets[j].pairs(right)) {
                auto bit = out.universeIndex_[target];
                if (bit < 0) throw Error(ErrorCode::InvalidArgument, "Avoid universe is not closed under successors");
                rc.pairs.emplace_back(joint.right[a], static_cast<std::uint32_t>(bit));
                rc.byAction[joint.right[a]] |= std::uint64_t{1} << bit;
            }
            tranR[i].push_back(std::move(rc));
        }
    }

    out.member_.assign(left.stateCount(), std::vector<std::int32_t>(full, -1));
    for (auto& row : out.member_) row[0] = -2;
    auto inAvoid = [&](StateId s, std::uint64_t mask) { return out.member_[s][mask] != -1; };

    // Searches later sets for one admissible set against the choices `fs`.
    auto attempt = [&](const std::vector<LeftElement>& e,
                       std::vector<const RightChoice*>& fs, std::vector<std::uint64_t>& later) {
        const std::size_t nf = fs.size();
        later.assign(e.size() * nf, 0);
        std::vector<std::uint8_t> hasAction(actions, 0);
        for (const auto& x : e) hasAction[x.action] = 1;
        // Constraints without a vacuous option, in order.
        std::vector<std::size_t> open;
        for (std::size_t j = 0; j < nf; ++j) {
            const auto& n = *fs[j];
            bool vacuous = false;
            for (auto [a, bit] : n.pairs) vacuous = vacuous || !hasAction[a];  // first disjunct, M(a) = ∅
            for (const auto& x : e) vacuous = vacuous || n.byAction[x.action] == 0;  // second, N(a) = ∅
            if (!vacuous) open.push_back(j);
        }
        std::function<bool(std::size_t)> dfs = [&](std::size_t c) -> bool {
            if (c == open.size()) return true;
            const auto& n = *fs[open[c]];
            const auto saved = later;
            for (auto [a, bit] : n.pairs) {
                bool ok = true;
                for (std::size_t i = 0; i < e.size() && ok; ++i) {
                    if (e[i].action != a) continue;
                    for (std::size_t j = 0; j < nf && ok; ++j) {
                        auto& l = later[i * nf + j];
                        l |= std::uint64_t{1} << bit;
                        ok = inAvoid(e[i].target, l);
                    }
                }
                if (ok && dfs(c + 1)) return true;
                later = saved;
            }
            for (std::size_t i = 0; i < e.size(); ++i) {
                auto& l = later[i * nf + open[c]];
                l |= n.byAction[e[i].action];
                if (inAvoid(e[i].target, l) && dfs(c + 1)) return true;
                later = saved;
            }
            return false;
        };
        return dfs(0);
    };

    std::vector<std::uint64_t> masks;
    for (std::uint64_t m = 1; m < full; ++m) masks.push_back(m);
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint64_t a, std::uint64_t b) { return std::popcount(a) < std::popcount(b); });

    for (bool changed = true; changed;) {
        changed = false;
        ++out.rounds_;
        for (StateId s = 0; s < left.stateCount(); ++s)
            for (std::uint64_t mask : masks) {
                if (inAvoid(s, mask)) continue;
                if (deadline) deadline->check();
                std::vector<const RightChoice*> fs;
                for (std::size_t i = 0; i < k; ++i)
                    if ((mask >> i) & 1u)
                        for (const auto& rc : tranR[i]) fs.push_back(&rc);
                std::vector<std::uint64_t> later;
                for (std::size_t mi = 0; mi < tranL[s].size(); ++mi) {
                    const auto& e = elems[s][mi];
                    if (!attempt(e, fs, later)) continue;
                    AvoidEntry entry;
                    entry.left = s;
                    entry.mask = mask;
                    entry.witnessM = tranL[s][mi];
                    entry.sequence = out.entries_.size();
                    for (std::uint32_t i = 0; i < e.size(); ++i)
                        for (std::size_t j = 0; j < fs.size(); ++j)
                            entry.later.push_back({i, fs[j]->owner, fs[j]->index, later[i * fs.size() + j]});
                    auto idx = static_cast<std::int32_t>(out.entries_.size());
                    out.entries_.push_back(std::move(entry));
                    // Downward closure.
                    for (std::uint64_t sub = mask; sub; sub = (sub - 1) & mask)
                        if (out.member_[s][sub] == -1) out.member_[s][sub] = idx;
                    changed = true;
                    break;
                }
            }
    }
    return out;
}

AvoidSet computeAvoid(const TransitionSystem& sys, const Limits& limits, const Deadline* deadline) {
    std::vector<StateId> all(sys.stateCount());
    for (StateId s = 0; s < sys.stateCount(); ++s) all[s] = s;
    return computeAvoid(sys, sys, std::move(all), limits, deadline);
}

TransitionSystem distinguishingImplementation(const AvoidSet& avoid, const TransitionSystem& left, StateId s,
                                              std::uint64_t mask, const Limits& limits) {
    if (!avoid.contains(s, mask)) throw Error(ErrorCode::InvalidArgument, "pair is not in Avoid");
    SystemBuilder b("I");
    std::vector<ActionId> act;
    for (const auto& a : left.actionNames()) act.push_back(b.addAction(a));
    std::vector<std::vector<std::pair<ActionId, StateId>>> out;  // per built state
    auto newState = [&](const std::string& name) {
        out.emplace_back();
        return b.addState(name);
    };

    // Default implementation: first admissible set at every left state.
    std::unordered_map<StateId, StateId> plain;
    std::function<StateId(StateId)> plainOf = [&](StateId x) -> StateId {
        if (auto it = plain.find(x); it != plain.end()) return it->second;
        StateId id = newState("d" + std::to_string(out.size()));
        plain.emplace(x, id);
        auto sets = tranSets(left, x, {}, limits);
        if (sets.empty()) throw Error(ErrorCode::InvalidArgument, "left system is not globally consistent");
        for (auto [a, t] : sets.front().pairs(left)) {
            StateId child = plainOf(t);
            out[id].emplace_back(act[a], child);
        }
        return id;
    };
    std::unordered_map<std::size_t, StateId> built;
    std::function<StateId(StateId, std::uint64_t)> build = [&](StateId x, std::uint64_t m) -> StateId {
        const AvoidEntry* e = avoid.origin(x, m);
        if (!e) return plainOf(x);
        if (auto it = built.find(e->sequence); it != built.end()) return it->second;
        StateId id = newState("i" + std::to_string(out.size()));
        built.emplace(e->sequence, id);
        auto pairs = e->witnessM.pairs(left);
        for (const auto& l : e->later) {
            StateId child = build(pairs[l.mElement].second, l.mask);
            out[id].emplace_back(act[pairs[l.mElement].first], child);
        }
        return id;
    };
    StateId root = build(s, mask);
    for (StateId x = 0; x < out.size(); ++x) {
        std::vector<Formula> atoms;
        for (auto [a, t] : out[x]) {
            b.addTransition(x, a, t);
            atoms.push_back(Formula::trans(a, t));
        }
        b.setObligation(x, Formula::conjunction(atoms));
    }
    b.setInitial(root);
    return std::move(b).build();
}

bool thoroughRefinesBmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                         const Limits& limits, const Deadline* deadline) {
    requireParameterFree(left, "thoroughRefinesBmts");
    requireParameterFree(right, "thoroughRefinesBmts");
    auto pl = prune(left, limits);
    auto pr = prune(right, limits);
    if (!pl.mapping.at(s0)) return true;
    if (!pr.mapping.at(t0)) return false;
    std::vector<std::optional<StateId>> lmap;
    auto l = restrictStates(pl.system, reachableStates(pl.system, *pl.mapping[s0]), &lmap);
    StateId t = *pr.mapping[t0];
    auto universe = reachableStates(pr.system, t);
    auto avoid = computeAvoid(l, pr.system, universe, limits, deadline);
    return !avoid.contains(*lmap.at(*pl.mapping[s0]), avoid.maskOf({t}));
}

bool thoroughRefinesPmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                         const Limits& limits, const Deadline* deadline) {
    auto l = deparameterize(left, s0, {}, limits);
    auto r = deparameterize(right, t0, {}, limits);
    return thoroughRefinesBmts(l.system, l.initial, r.system, r.initial, limits, deadline);
}

// ---------------------------------------------------------------------------

TreeStore::Id TreeStore::intern(Children children) {
    std::sort(children.begin(), children.end());
    children.erase(std::unique(children.begin(), children.end()), children.end());
    auto [it, fresh] = index_.emplace(children, static_cast<Id>(trees_.size()));
    if (fresh) trees_.push_back(std::move(children));
    return it->second;
}

std::size_t TreeStore::depth(Id id) const {
    std::size_t d = 0;
    for (const auto& [a, c] : trees_[id]) d = std::max(d, 1 + depth(c));
    return d;
}

TransitionSystem TreeStore::toSystem(Id id, const std::string& name) const {
    SystemBuilder b(name);
    std::unordered_map<Id, StateId> state;
    std::vector<Id> order{id};
    state.emplace(id, b.addState("n" + std::to_string(id)));
    for (std::size_t i = 0; i < order.size(); ++i)
        for (const auto& [a, c] : trees_[order[i]])
            if (state.emplace(c, 0).second) {
                state[c] = b.addState("n" + std::to_string(c));
                order.push_back(c);
            }
    for (Id node : order) {
        std::vector<Formula> atoms;
        for (const auto& [a, c] : trees_[node]) {
            ActionId act = b.addAction(a);
            b.addTransition(state[node], act, state[c]);
            atoms.push_back(Formula::trans(act, state[c]));
        }
        b.setObligation(state[node], Formula::conjunction(atoms));
    }
    b.setInitial(state[id]);
    return std::move(b).build();
}

bool ImplementationSet::contains(TreeStore::Id id) const {
    return std::binary_search(members.begin(), members.end(), id);
}

bool ImplementationSet::includedIn(const ImplementationSet& other) const {
    if (store != other.store) throw Error(ErrorCode::InvalidArgument, "implementation sets use different stores");
    return std::includes(other.members.begin(), other.members.end(), members.begin(), members.end());
}

ImplementationSet enumerateImplementations(const TransitionSystem& sys, StateId s, std::size_t depthBound,
                                           const Limits& limits, std::shared_ptr<TreeStore> store) {
    requireParameterFree(sys, "enumerateImplementations");
    if (s >= sys.stateCount()) throw Error(ErrorCode::InvalidArgument, "state out of range");
    if (!store) store = std::make_shared<TreeStore>();

    // Longest path from s over the reachable part; cycles are rejected.
    std::vector<int> mark(sys.stateCount(), 0);  // 0 new, 1 on stack, 2 done
    std::vector<std::size_t> height(sys.stateCount(), 0);
    std::function<void(StateId)> visit = [&](StateId x) {
        mark[x] = 1;
        for (const auto& t : sys.outgoing(x)) {
            if (mark[t.target] == 1) throw Error(ErrorCode::CyclicInput, "system has a cycle through " + sys.stateName(x));
            if (mark[t.target] == 0) visit(t.target);
            height[x] = std::max(height[x], 1 + height[t.target]);
        }
        mark[x] = 2;
    };
    visit(s);
    if (height[s] > depthBound)
        throw Error(ErrorCode::InvalidArgument, "depth bound " + std::to_string(depthBound) +
                                                    " below the longest path " + std::to_string(height[s]));

    std::vector<std::optional<std::vector<TreeStore::Id>>> memo(sys.stateCount());
    auto tooMany = [&](std::size_t n) {
        if (n > limits.maxImplementations)
            throw Error(ErrorCode::SizeLimit, "more than " + std::to_string(limits.maxImplementations) +
                                                  " implementations");
    };
    std::function<const std::vector<TreeStore::Id>&(StateId)> impls = [&](StateId x) -> const std::vector<TreeStore::Id>& {
        if (memo[x]) return *memo[x];
        std::vector<TreeStore::Id> result;
        for (const auto& m : tranSets(sys, x, {}, limits)) {
            // Per action: the admissible successor sets X with every target covered.
            std::map<std::string, std::vector<StateId>> byAction;
            for (auto [a, t] : m.pairs(sys)) byAction[sys.actionName(a)].push_back(t);
            std::vector<std::vector<TreeStore::Children>> options;
            bool empty = false;
            for (const auto& [a, targets] : byAction) {
                std::vector<TreeStore::Id> pool;
                for (StateId t : targets) {
                    const auto& sub = impls(t);
                    pool.insert(pool.end(), sub.begin(), sub.end());
                }
                std::sort(pool.begin(), pool.end());
                pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
                if (pool.size() > 20) tooMany(limits.maxImplementations + 1);
                std::vector<TreeStore::Children> opts;
                for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << pool.size()); ++bits) {
                    bool covered = true;
                    for (StateId t : targets) {
                        bool hit = false;
                        for (std::size_t i = 0; i < pool.size() && !hit; ++i)
                            hit = ((bits >> i) & 1u) && std::binary_search(memo[t]->begin(), memo[t]->end(), pool[i]);
                        covered = covered && hit;
                    }
                    if (!covered) continue;
                    TreeStore::Children c;
                    for (std::size_t i = 0; i < pool.size(); ++i)
                        if ((bits >> i) & 1u) c.emplace_back(a, pool[i]);
                    opts.push_back(std::move(c));
                    tooMany(opts.size());
                }
                if (opts.empty()) empty = true;
                options.push_back(std::move(opts));
            }
            if (empty) continue;
            std::size_t combos = 1;
            for (const auto& o : options) {
                combos *= o.size();
                tooMany(combos);
            }
            std::vector<std::size_t> pick(options.size(), 0);
            for (std::size_t n = 0; n < combos; ++n) {
                TreeStore::Children c;
                for (std::size_t i = 0; i < options.size(); ++i)
                    c.insert(c.end(), options[i][pick[i]].begin(), options[i][pick[i]].end());
                result.push_back(store->intern(std::move(c)));
                for (std::size_t i = 0; i < options.size(); ++i) {
                    if (++pick[i] < options[i].size()) break;
                    pick[i] = 0;
                }
            }
            std::sort(result.begin(), result.end());
            result.erase(std::unique(result.begin(), result.end()), result.end());
            tooMany(result.size());
        }
        memo[x] = std::move(result);
        return *memo[x];
    };
    ImplementationSet out{store, impls(s)};
    return out;
}

bool implementationInclusion(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                             const Limits& limits) {
    auto store = std::make_shared<TreeStore>();
    auto l = enumerateImplementations(left, s0, left.stateCount(), limits, store);
    auto r = enumerateImplementations(right, t0, right.stateCount(), limits, store);
    return l.includedIn(r);
}

}  // namespace mtsref
