#include "mtsref/modal.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "mtsref/core.hpp"

namespace mtsref {

bool RefinementRelation::contains(StateId s, StateId t) const {
    return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(s, t));
}

namespace {

using Pair = std::pair<std::uint32_t, StateId>;  // (joint action, target)
using Move = std::vector<Pair>;

/// Admissible sets of every state under one valuation, over joint action ids.
struct TranTable {
    std::vector<std::vector<Move>> sets;
};

TranTable buildTable(const TransitionSystem& sys, Valuation nu, const std::vector<std::uint32_t>& actions,
                     const Limits& limits) {
    TranTable table;
    table.sets.resize(sys.stateCount());
    for (StateId s = 0; s < sys.stateCount(); ++s) {
        auto out = sys.outgoing(s);
        for (const auto& e : tranSets(sys, s, nu, limits)) {
            Move m;
            for (std::uint32_t i = 0; i < out.size(); ++i)
                if (e.contains(i)) m.emplace_back(actions[out[i].action], out[i].target);
            table.sets[s].push_back(std::move(m));
        }
    }
    return table;
}

/// Dense relation over S1 × S2.
struct Rel {
    std::size_t n2 = 0;
    std::vector<char> bits;

    Rel(std::size_t n1, std::size_t n2_, char init) : n2(n2_), bits(n1 * n2_, init) {}
    bool operator()(StateId s, StateId t) const { return bits[s * n2 + t] != 0; }
    void set(StateId s, StateId t, bool v) { bits[s * n2 + t] = v ? 1 : 0; }
};

bool matches(const Move& m, const Move& n, const Rel& rel) {
    for (const auto& [a, sp] : m) {
        bool found = false;
        for (const auto& [b, tp] : n)
            if (a == b && rel(sp, tp)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    for (const auto& [b, tp] : n) {
        bool found = false;
        for (const auto& [a, sp] : m)
            if (a == b && rel(sp, tp)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

bool pairOk(const TranTable& l, const TranTable& r, StateId s, StateId t, const Rel& rel) {
    for (const auto& m : l.sets[s]) {
        bool any = false;
        for (const auto& n : r.sets[t])
            if (matches(m, n, rel)) {
                any = true;
                break;
            }
        if (!any) return false;
    }
    return true;
}

std::vector<std::vector<StateId>> predecessors(const TransitionSystem& sys) {
    std::vector<std::vector<StateId>> pred(sys.stateCount());
    for (const auto& e : sys.transitions()) pred[e.target].push_back(e.source);
    for (auto& p : pred) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
    }
    return pred;
}

using Condition = std::function<bool(StateId, StateId, const Rel&)>;

struct GfpResult {
    Rel rel;
    std::optional<std::pair<StateId, StateId>> counterexample;
};

/// Worklist greatest fixpoint. With `stopEarly`, returns as soon as
/// (s0,t0) is removed (the relation is then not the fixpoint).
GfpResult greatestFixpoint(const TransitionSystem& left, const TransitionSystem& right, Rel init,
                           const Condition& ok, StateId s0, StateId t0, bool stopEarly, const Deadline* deadline) {
    const std::size_t n1 = left.stateCount();
    const std::size_t n2 = right.stateCount();
    auto predL = predecessors(left);
    auto predR = predecessors(right);
    Rel rel = std::move(init);
    std::vector<char> queued(n1 * n2, 0);
    std::deque<std::pair<StateId, StateId>> work;
    for (StateId s = 0; s < n1; ++s)
        for (StateId t = 0; t < n2; ++t)
            if (rel(s, t)) {
                work.emplace_back(s, t);
                queued[s * n2 + t] = 1;
            }
    std::optional<std::pair<StateId, StateId>> last;
    std::optional<std::pair<StateId, StateId>> cex;
    std::size_t steps = 0;
    while (!work.empty()) {
        if ((++steps & 255u) == 0) checkDeadline(deadline);
        auto [s, t] = work.front();
        work.pop_front();
        queued[s * n2 + t] = 0;
        if (!rel(s, t) || ok(s, t, rel)) continue;
        rel.set(s, t, false);
        if (s == s0 && t == t0) {
            cex = last.value_or(std::make_pair(s, t));
            if (stopEarly) return {std::move(rel), cex};
        }
        last = std::make_pair(s, t);
        for (StateId p : predL[s])
            for (StateId q : predR[t])
                if (rel(p, q) && !queued[p * n2 + q]) {
                    queued[p * n2 + q] = 1;
                    work.emplace_back(p, q);
                }
    }
    if (n1 > 0 && n2 > 0 && !rel(s0, t0) && !cex) cex = std::make_pair(s0, t0);
    return {std::move(rel), cex};
}

RefinementRelation toRelation(const Rel& rel, std::size_t n1) {
    RefinementRelation out;
    for (StateId s = 0; s < n1; ++s)
        for (StateId t = 0; t < rel.n2; ++t)
            if (rel(s, t)) out.pairs.emplace_back(s, t);
    return out;
}

Rel fromRelation(const RefinementRelation& r, std::size_t n1, std::size_t n2) {
    Rel rel(n1, n2, 0);
    for (auto [s, t] : r.pairs)
        if (s < n1 && t < n2) rel.set(s, t, true);
    return rel;
}

void checkStates(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0) {
    if (s0 >= left.stateCount() || t0 >= right.stateCount())
        throw Error(ErrorCode::InvalidArgument, "state id out of range");
}

void checkParamLimit(const TransitionSystem& left, const TransitionSystem& right, const Limits& limits) {
    if (left.paramCount() + right.paramCount() > limits.maxParams)
        throw Error(ErrorCode::ParamLimit, std::to_string(left.paramCount() + right.paramCount()) +
                                               " parameters exceed the cap of " + std::to_string(limits.maxParams));
}

/// Tran tables of both sides for every valuation, built lazily.
class TableCache {
public:
    TableCache(const TransitionSystem& left, const TransitionSystem& right, const Limits& limits)
        : left_(left), right_(right), limits_(limits), joint_(left, right),
          leftTables_(std::size_t{1} << left.paramCount()), rightTables_(std::size_t{1} << right.paramCount()) {}

    const TranTable& leftTable(Valuation mu) { return get(leftTables_, left_, mu, joint_.left); }
    const TranTable& rightTable(Valuation nu) { return get(rightTables_, right_, nu, joint_.right); }

private:
    const TranTable& get(std::vector<std::optional<TranTable>>& cache, const TransitionSystem& sys, Valuation v,
                         const std::vector<std::uint32_t>& actions) {
        auto& slot = cache[v.bits()];
        if (!slot) slot = buildTable(sys, v, actions, limits_);
        return *slot;
    }

    const TransitionSystem& left_;
    const TransitionSystem& right_;
    Limits limits_;
    JointAlphabet joint_;
    std::vector<std::optional<TranTable>> leftTables_;
    std::vector<std::optional<TranTable>> rightTables_;
};

Condition tableCondition(const TranTable& l, const TranTable& r) {
    return [&l, &r](StateId s, StateId t, const Rel& rel) { return pairOk(l, r, s, t, rel); };
}

/// Valuation lanes: bit ν set when the property holds under ν.
class Lanes {
public:
    Lanes(std::size_t pairs, std::size_t lanes) : words_((lanes + 63) / 64), lanes_(lanes), bits_(pairs * words_) {
        for (std::size_t p = 0; p < pairs; ++p) fill(p);
    }
    std::size_t words() const { return words_; }
    std::uint64_t* at(std::size_t pair) { return bits_.data() + pair * words_; }
    const std::uint64_t* at(std::size_t pair) const { return bits_.data() + pair * words_; }
    bool any(std::size_t pair) const {
        const auto* w = at(pair);
        return std::any_of(w, w + words_, [](std::uint64_t x) { return x != 0; });
    }
    bool test(std::size_t pair, std::uint64_t lane) const { return (at(pair)[lane / 64] >> (lane % 64)) & 1u; }

private:
    void fill(std::size_t pair) {
        auto* w = at(pair);
        for (std::size_t i = 0; i < words_; ++i) {
            std::size_t left = lanes_ - 64 * i;
            w[i] = left >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << left) - 1;
        }
    }
    std::size_t words_, lanes_;
    std::vector<std::uint64_t> bits_;
};

/// Right admissible sets over all valuations at once: each distinct move of
/// a state with the lanes under which it is admissible.
struct LaneTable {
    std::vector<std::vector<Move>> moves;
    std::vector<std::vector<std::vector<std::uint64_t>>> lanes;
};

LaneTable buildLaneTable(const TransitionSystem& sys, const std::vector<std::uint32_t>& actions,
                         const Limits& limits) {
    const std::uint64_t count = std::uint64_t{1} << sys.paramCount();
    const std::size_t words = (count + 63) / 64;
    LaneTable table;
    table.moves.resize(sys.stateCount());
    table.lanes.resize(sys.stateCount());
    for (StateId s = 0; s < sys.stateCount(); ++s) {
        auto out = sys.outgoing(s);
        const bool parametric = sys.obligation(s).mentionsParams();
        std::map<std::uint64_t, std::size_t> index;  // admissible mask -> slot
        const auto perNu = parametric ? tranSetsPerValuation(sys, s, limits)
                                      : std::vector<std::vector<AdmissibleSet>>{tranSets(sys, s, {}, limits)};
        for (std::uint64_t nu = 0; nu < perNu.size(); ++nu)
            for (const auto& e : perNu[nu]) {
                auto [it, fresh] = index.emplace(e.mask, table.moves[s].size());
                if (fresh) {
                    Move m;
                    for (std::uint32_t i = 0; i < out.size(); ++i)
                        if (e.contains(i)) m.emplace_back(actions[out[i].action], out[i].target);
                    table.moves[s].push_back(std::move(m));
                    table.lanes[s].emplace_back(words, 0);
                }
                auto& l = table.lanes[s][it->second];
                if (parametric) {
                    l[nu / 64] |= std::uint64_t{1} << (nu % 64);
                } else {
                    for (std::size_t i = 0; i < words; ++i) {
                        std::size_t rest = count - 64 * i;
                        l[i] = rest >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << rest) - 1;
                    }
                }
            }
    }
    return table;
}

/// Greatest fixpoint of the BMTS condition for one left valuation and every
/// right valuation in parallel. Lanes never interact, so lane ν is the
/// relation of the (μ,ν) check. Stops once no lane keeps (s0,t0).
/// `cex0` receives lane 0's counterexample in the sense of greatestFixpoint.
Lanes laneFixpoint(const TransitionSystem& left, const TransitionSystem& right, const TranTable& l,
                   const LaneTable& r, StateId s0, StateId t0, std::optional<std::pair<StateId, StateId>>& cex0,
                   const Deadline* deadline) {
    const std::size_t n1 = left.stateCount(), n2 = right.stateCount();
    Lanes rel(n1 * n2, std::size_t{1} << right.paramCount());
    const std::size_t W = rel.words();
    auto predL = predecessors(left);
    auto predR = predecessors(right);
    std::vector<char> queued(n1 * n2, 1);
    std::deque<std::pair<StateId, StateId>> work;
    for (StateId s = 0; s < n1; ++s)
        for (StateId t = 0; t < n2; ++t) work.emplace_back(s, t);
    std::vector<std::uint64_t> cond(W), acc(W), match(W), side(W);
    std::optional<std::pair<StateId, StateId>> last0;
    std::size_t steps = 0;
    while (!work.empty()) {
        if ((++steps & 255u) == 0) checkDeadline(deadline);
        auto [s, t] = work.front();
        work.pop_front();
        const std::size_t here = s * n2 + t;
        queued[here] = 0;
        if (!rel.any(here)) continue;
        std::copy(rel.at(here), rel.at(here) + W, cond.begin());
        auto zero = [W](const std::vector<std::uint64_t>& v) {
            for (std::size_t i = 0; i < W; ++i)
                if (v[i]) return false;
            return true;
        };
        for (const auto& m : l.sets[s]) {
            std::fill(acc.begin(), acc.end(), 0);
            for (std::size_t k = 0; k < r.moves[t].size(); ++k) {
                const auto& n = r.moves[t][k];
                const auto& admissible = r.lanes[t][k];
                for (std::size_t i = 0; i < W; ++i) match[i] = admissible[i] & cond[i] & ~acc[i];
                // every element of m answered in n, and every element of n in m
                for (int dir = 0; dir < 2 && !zero(match); ++dir) {
                    const Move& from = dir == 0 ? m : n;
                    const Move& into = dir == 0 ? n : m;
                    for (const auto& [a, x] : from) {
                        std::fill(side.begin(), side.end(), 0);
                        for (const auto& [b, y] : into) {
                            if (a != b) continue;
                            const auto* w = rel.at(dir == 0 ? x * n2 + y : y * n2 + x);
                            for (std::size_t i = 0; i < W; ++i) side[i] |= w[i];
                        }
                        for (std::size_t i = 0; i < W; ++i) match[i] &= side[i];
                        if (zero(match)) break;
                    }
                }
                bool covered = true;
                for (std::size_t i = 0; i < W; ++i) {
                    acc[i] |= match[i];
                    covered = covered && (cond[i] & ~acc[i]) == 0;
                }
                if (covered) break;
            }
            for (std::size_t i = 0; i < W; ++i) cond[i] &= acc[i];
            if (zero(cond)) break;
        }
        auto* cur = rel.at(here);
        if (std::equal(cond.begin(), cond.end(), cur)) continue;
        if ((cur[0] & 1u) && !(cond[0] & 1u)) {
            if (s == s0 && t == t0) cex0 = last0.value_or(std::make_pair(s, t));
            last0 = std::make_pair(s, t);
        }
        std::copy(cond.begin(), cond.end(), cur);
        if (s == s0 && t == t0 && !rel.any(here)) return rel;
        for (StateId p : predL[s])
            for (StateId q : predR[t])
                if (!queued[p * n2 + q] && rel.any(p * n2 + q)) {
                    queued[p * n2 + q] = 1;
                    work.emplace_back(p, q);
                }
    }
    return rel;
}

}  // namespace

ModalVerdict modalRefinesMts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                             const Limits&, const Deadline* deadline) {
    checkStates(left, s0, right, t0);
    if (!kindAtMost(classify(left), SystemKind::MTS) || !kindAtMost(classify(right), SystemKind::MTS))
        throw Error(ErrorCode::KindError, "modal refinement of MTS requires MTS inputs");
    JointAlphabet joint(left, right);

    // may[s] and must[s] as (joint action, target) lists.
    auto modalities = [](const TransitionSystem& sys, const std::vector<std::uint32_t>& actions) {
        std::vector<Move> may(sys.stateCount()), must(sys.stateCount());
        for (StateId s = 0; s < sys.stateCount(); ++s) {
            for (const auto& e : sys.outgoing(s)) may[s].emplace_back(actions[e.action], e.target);
            std::vector<const Formula*> stack{&sys.obligation(s)};
            while (!stack.empty()) {
                const Formula* f = stack.back();
                stack.pop_back();
                if (f->kind() == FormulaKind::And) {
                    stack.push_back(&f->left());
                    stack.push_back(&f->right());
                } else if (f->kind() == FormulaKind::Trans) {
                    must[s].emplace_back(actions[f->action()], f->target());
                }
            }
            std::sort(must[s].begin(), must[s].end());
            must[s].erase(std::unique(must[s].begin(), must[s].end()), must[s].end());
        }
        return std::make_pair(may, must);
    };
    auto [mayL, mustL] = modalities(left, joint.left);
    auto [mayR, mustR] = modalities(right, joint.right);

    auto covered = [](const Move& from, const Move& into, const Rel& rel, bool leftToRight) {
        for (const auto& [a, x] : from) {
            bool found = false;
            for (const auto& [b, y] : into)
                if (a == b && (leftToRight ? rel(x, y) : rel(y, x))) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
        return true;
    };
    Condition ok = [&](StateId s, StateId t, const Rel& rel) {
        return covered(mayL[s], mayR[t], rel, true) && covered(mustR[t], mustL[s], rel, false);
    };
    auto res = greatestFixpoint(left, right, Rel(left.stateCount(), right.stateCount(), 1), ok, s0, t0, false,
                                deadline);
    ModalVerdict v;
    v.holds = res.rel(s0, t0);
    if (v.holds) v.relation = toRelation(res.rel, left.stateCount());
    else v.counterexample = res.counterexample;
    return v;
}

ModalVerdict modalRefinesBmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                              const Limits& limits, const Deadline* deadline) {
    checkStates(left, s0, right, t0);
    if (left.paramCount() != 0 || right.paramCount() != 0)
        throw Error(ErrorCode::KindError, "modal refinement of BMTS requires parameter-free inputs");
    TableCache cache(left, right, limits);
    const auto& l = cache.leftTable({});
    const auto& r = cache.rightTable({});
    auto res = greatestFixpoint(left, right, Rel(left.stateCount(), right.stateCount(), 1), tableCondition(l, r), s0,
                                t0, false, deadline);
    ModalVerdict v;
    v.holds = res.rel(s0, t0);
    if (v.holds) v.relation = toRelation(res.rel, left.stateCount());
    else v.counterexample = res.counterexample;
    return v;
}

ModalVerdict modalRefinesPmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                              const Limits& limits, const Deadline* deadline) {
    checkStates(left, s0, right, t0);
    checkParamLimit(left, right, limits);
    TableCache cache(left, right, limits);
    const std::uint64_t muCount = std::uint64_t{1} << left.paramCount();
    const std::uint64_t nuCount = std::uint64_t{1} << right.paramCount();
    JointAlphabet joint(left, right);
    const auto lanes = buildLaneTable(right, joint.right, limits);
    const std::size_t n2 = right.stateCount();
    ModalVerdict v;
    v.holds = true;
    for (std::uint64_t mu = 0; mu < muCount; ++mu) {
        const auto& l = cache.leftTable(Valuation(mu));
        std::optional<std::pair<StateId, StateId>> cex0;
        auto rel = laneFixpoint(left, right, l, lanes, s0, t0, cex0, deadline);
        std::optional<std::uint64_t> nu;
        for (std::uint64_t k = 0; k < nuCount && !nu; ++k)
            if (rel.test(s0 * n2 + t0, k)) nu = k;
        if (!nu) {
            v.holds = false;
            v.perValuation.clear();
            v.failingMu = Valuation(mu);
            v.counterexample = cex0;
            return v;
        }
        RefinementRelation w;
        for (StateId s = 0; s < left.stateCount(); ++s)
            for (StateId t = 0; t < n2; ++t)
                if (rel.test(s * n2 + t, *nu)) w.pairs.emplace_back(s, t);
        v.perValuation.push_back({Valuation(mu), Valuation(*nu), std::move(w)});
    }
    return v;
}

ModalVerdict modalRefinesPmtsOriginal(const TransitionSystem& left, StateId s0, const TransitionSystem& right,
                                      StateId t0, const Limits& limits, const Deadline* deadline) {
    checkStates(left, s0, right, t0);
    checkParamLimit(left, right, limits);
    const std::size_t muCount = std::size_t{1} << left.paramCount();
    const std::size_t nuCount = std::size_t{1} << right.paramCount();
    {
        // |2^P2|^(2^P1), saturating.
        std::size_t space = 1;
        for (std::size_t i = 0; i < muCount && space <= limits.maxSelectors; ++i) space *= nuCount;
        if (space > limits.maxSelectors)
            throw Error(ErrorCode::ParamLimit, "selector space exceeds the cap of " +
                                                   std::to_string(limits.maxSelectors));
    }
    const std::size_t n1 = left.stateCount();
    const std::size_t n2 = right.stateCount();
    TableCache cache(left, right, limits);

    // Per-(μ,ν) greatest relations; every shared relation is below their intersection.
    std::vector<std::vector<Rel>> base(muCount);
    for (std::size_t mu = 0; mu < muCount; ++mu)
        for (std::size_t nu = 0; nu < nuCount; ++nu) {
            auto res = greatestFixpoint(left, right, Rel(n1, n2, 1),
                                        tableCondition(cache.leftTable(Valuation(mu)), cache.rightTable(Valuation(nu))),
                                        s0, t0, false, deadline);
            base[mu].push_back(std::move(res.rel));
        }

    std::vector<std::size_t> sigma(muCount, 0);
    std::optional<Rel> winner;
    std::optional<std::pair<StateId, StateId>> cex;

    std::function<bool(std::size_t, const Rel&)> search = [&](std::size_t mu, const Rel& seed) -> bool {
        checkDeadline(deadline);
        if (mu == muCount) {
            std::vector<std::pair<const TranTable*, const TranTable*>> conds;
            for (std::size_t m = 0; m < muCount; ++m)
                conds.emplace_back(&cache.leftTable(Valuation(m)), &cache.rightTable(Valuation(sigma[m])));
            Condition ok = [&conds](StateId s, StateId t, const Rel& rel) {
                for (auto [l, r] : conds)
                    if (!pairOk(*l, *r, s, t, rel)) return false;
                return true;
            };
            auto res = greatestFixpoint(left, right, seed, ok, s0, t0, true, deadline);
            if (res.rel(s0, t0)) {
                winner = std::move(res.rel);
                return true;
            }
            if (!cex) cex = res.counterexample;
            return false;
        }
        for (std::size_t nu = 0; nu < nuCount; ++nu) {
            const Rel& b = base[mu][nu];
            if (!b(s0, t0)) continue;
            Rel next = seed;
            for (std::size_t i = 0; i < next.bits.size(); ++i) next.bits[i] = next.bits[i] && b.bits[i];
            sigma[mu] = nu;
            if (search(mu + 1, next)) return true;
        }
        return false;
    };

    ModalVerdict v;
    if (n1 > 0 && n2 > 0) v.holds = search(0, Rel(n1, n2, 1));
    if (v.holds) {
        v.relation = toRelation(*winner, n1);
        for (std::size_t mu = 0; mu < muCount; ++mu)
            v.perValuation.push_back({Valuation(mu), Valuation(sigma[mu]), v.relation});
    } else {
        v.counterexample = cex.value_or(std::make_pair(s0, t0));
        // A μ whose every ν already loses (s0,t0), if there is one.
        for (std::size_t mu = 0; mu < muCount && !v.failingMu; ++mu) {
            bool any = false;
            for (std::size_t nu = 0; nu < nuCount; ++nu) any = any || base[mu][nu](s0, t0);
            if (!any) v.failingMu = Valuation(mu);
        }
    }
    return v;
}

bool boundedModalRefines(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                         std::size_t n, const Limits& limits) {
    checkStates(left, s0, right, t0);
    if (left.paramCount() != 0 || right.paramCount() != 0)
        throw Error(ErrorCode::KindError, "bounded modal refinement requires parameter-free inputs");
    TableCache cache(left, right, limits);
    const auto& l = cache.leftTable({});
    const auto& r = cache.rightTable({});
    Rel cur(left.stateCount(), right.stateCount(), 1);
    for (std::size_t i = 0; i < n; ++i) {
        Rel next(left.stateCount(), right.stateCount(), 0);
        for (StateId s = 0; s < left.stateCount(); ++s)
            for (StateId t = 0; t < right.stateCount(); ++t)
                if (cur(s, t) && pairOk(l, r, s, t, cur)) next.set(s, t, true);
        if (next.bits == cur.bits) break;
        cur = std::move(next);
    }
    return cur(s0, t0);
}

bool auditRelation(const TransitionSystem& left, Valuation mu, const TransitionSystem& right, Valuation nu,
                   const RefinementRelation& relation, const Limits& limits) {
    TableCache cache(left, right, limits);
    const auto& l = cache.leftTable(mu);
    const auto& r = cache.rightTable(nu);
    Rel rel = fromRelation(relation, left.stateCount(), right.stateCount());
    for (auto [s, t] : relation.pairs)
        if (s >= left.stateCount() || t >= right.stateCount() || !pairOk(l, r, s, t, rel)) return false;
    return true;
}

bool auditPmtsWitness(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                      const ModalVerdict& verdict, const Limits& limits) {
    if (!verdict.holds) return true;
    const std::uint64_t muCount = std::uint64_t{1} << left.paramCount();
    if (verdict.perValuation.size() != muCount) return false;
    for (std::uint64_t mu = 0; mu < muCount; ++mu) {
        const auto& w = verdict.perValuation[mu];
        if (w.mu.bits() != mu || (w.nu.bits() >> right.paramCount()) != 0) return false;
        if (!w.relation.contains(s0, t0)) return false;
        if (!auditRelation(left, w.mu, right, w.nu, w.relation, limits)) return false;
    }
    return true;
}

bool auditOriginalWitness(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                          const ModalVerdict& verdict, const Limits& limits) {
    if (!verdict.holds) return true;
    if (!verdict.relation.contains(s0, t0)) return false;
    const std::uint64_t muCount = std::uint64_t{1} << left.paramCount();
    if (verdict.perValuation.size() != muCount) return false;
    for (std::uint64_t mu = 0; mu < muCount; ++mu) {
        const auto& w = verdict.perValuation[mu];
        if (w.mu.bits() != mu) return false;
        if (!auditRelation(left, w.mu, right, w.nu, verdict.relation, limits)) return false;
    }
    return true;
}

}  // namespace mtsref
