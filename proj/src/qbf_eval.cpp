#include <algorithm>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "mtsref/qbf.hpp"
#include "mtsref/sat.hpp"
#include "qbf_cnf.hpp"

namespace mtsref {

namespace {

std::vector<ExprPool::Id> cone(const ExprPool& pool, ExprPool::Id root) {
    std::vector<char> seen(pool.nodeCount(), 0);
    std::vector<ExprPool::Id> stack{root}, out;
    while (!stack.empty()) {
        auto e = stack.back();
        stack.pop_back();
        if (seen[e]) continue;
        seen[e] = 1;
        out.push_back(e);
        for (auto k : pool.children(e)) stack.push_back(k);
    }
    std::sort(out.begin(), out.end());  // children precede parents
    return out;
}

/// Prefix with the matrix's unbound variables prepended as an ∃ block.
std::vector<QuantBlock> closedPrefix(const ExprPool& pool, ExprPool::Id root, const std::vector<QuantBlock>& prefix) {
    std::vector<char> bound;
    for (const auto& b : prefix)
        for (auto v : b.vars) {
            if (v >= bound.size()) bound.resize(v + 1, 0);
            bound[v] = 1;
        }
    QuantBlock free{Quantifier::Exists, {}};
    for (auto e : cone(pool, root))
        if (pool.kind(e) == ExprKind::Var) {
            auto v = pool.varOf(e);
            if (v >= bound.size() || !bound[v]) free.vars.push_back(v);
        }
    std::vector<QuantBlock> out;
    if (!free.vars.empty()) out.push_back(std::move(free));
    for (const auto& b : prefix)
        if (!b.vars.empty()) out.push_back(b);
    return out;
}

class Expansion {
public:
    Expansion(const ExprPool& pool, ExprPool::Id root, std::vector<std::pair<std::uint32_t, Quantifier>> order,
              const Deadline* deadline)
        : pool_(pool), root_(root), nodes_(cone(pool, root)), order_(std::move(order)), deadline_(deadline) {
        std::uint32_t maxVar = 0;
        for (auto [v, q] : order_) maxVar = std::max(maxVar, v);
        for (auto e : nodes_)
            if (pool.kind(e) == ExprKind::Var) maxVar = std::max(maxVar, pool.varOf(e));
        vals_.assign(maxVar + 1, -1);
        nodeVal_.assign(pool.nodeCount(), -1);
    }

    bool run() { return recurse(0) == 1; }

private:
    int evaluate() {
        for (auto e : nodes_) {
            int r = -1;
            switch (pool_.kind(e)) {
            case ExprKind::True: r = 1; break;
            case ExprKind::Var: r = vals_[pool_.varOf(e)]; break;
            case ExprKind::Not: {
                int c = nodeVal_[pool_.children(e)[0]];
                r = c < 0 ? -1 : 1 - c;
                break;
            }
            case ExprKind::And:
            case ExprKind::Or: {
                const int absorbing = pool_.kind(e) == ExprKind::And ? 0 : 1;
                bool unknown = false;
                r = 1 - absorbing;
                for (auto k : pool_.children(e)) {
                    int c = nodeVal_[k];
                    if (c == absorbing) {
                        r = absorbing;
                        unknown = false;
                        break;
                    }
                    if (c < 0) unknown = true;
                }
                if (unknown) r = -1;
                break;
            }
            }
            nodeVal_[e] = r;
        }
        return nodeVal_[root_];
    }

    int recurse(std::size_t depth) {
        if ((++steps_ & 1023u) == 0) checkDeadline(deadline_);
        int r = evaluate();
        if (r >= 0) return r;
        auto [v, q] = order_[depth];
        int result = q == Quantifier::Forall ? 1 : 0;
        for (int b = 0; b < 2; ++b) {
            vals_[v] = static_cast<std::int8_t>(b);
            int x = recurse(depth + 1);
            if (q == Quantifier::Exists && x == 1) {
                result = 1;
                break;
            }
            if (q == Quantifier::Forall && x == 0) {
                result = 0;
                break;
            }
        }
        vals_[v] = -1;
        return result;
    }

    const ExprPool& pool_;
    ExprPool::Id root_;
    std::vector<ExprPool::Id> nodes_;
    std::vector<std::pair<std::uint32_t, Quantifier>> order_;
    const Deadline* deadline_;
    std::vector<std::int8_t> vals_;
    std::vector<int> nodeVal_;
    std::size_t steps_ = 0;
};

// ------------------------------------------------------------------ CEGAR

using Move = std::unordered_map<std::uint32_t, bool>;

struct Game {
    ExprPool pool;
    ExprPool::Id root = 0;
    std::vector<QuantBlock> prefix;  // nonempty blocks, alternating
};

struct Outcome {
    bool value = false;
    Move move;  // first block, meaningful when the first player wins
};

void tidy(std::vector<QuantBlock>& prefix) {
    std::vector<QuantBlock> out;
    for (auto& b : prefix) {
        if (b.vars.empty()) continue;
        if (!out.empty() && out.back().quantifier == b.quantifier)
            out.back().vars.insert(out.back().vars.end(), b.vars.begin(), b.vars.end());
        else
            out.push_back(std::move(b));
    }
    prefix = std::move(out);
}

class Cegar {
public:
    static constexpr std::size_t kExpandUniversal = 6;

    explicit Cegar(const Deadline* deadline) : deadline_(deadline) {}

    std::uint32_t fresh() { return ++nextVar_; }
    void reserve(std::uint32_t v) { nextVar_ = std::max(nextVar_, v); }

    Outcome solve(Game g) {
        checkDeadline(deadline_);
        tidy(g.prefix);
        if (g.pool.isTop(g.root) || g.pool.isBottom(g.root)) return {g.pool.isTop(g.root), {}};
        if (g.prefix.empty()) return sat(g, {});
        if (g.prefix.front().quantifier == Quantifier::Forall) {
            const auto& ys = g.prefix.front().vars;
            if (ys.size() <= kExpandUniversal) {
                // Small universal block: one cofactor game per assignment.
                for (std::uint64_t a = 0; a < (std::uint64_t{1} << ys.size()); ++a) {
                    Move m;
                    for (std::size_t i = 0; i < ys.size(); ++i) m[ys[i]] = (a >> i) & 1u;
                    Game sub;
                    sub.root = sub.pool.import(g.pool, g.root, [&](std::uint32_t v) -> std::uint32_t {
                        auto it = m.find(v);
                        if (it == m.end()) return v;
                        return it->second ? UINT32_MAX : 0u;
                    });
                    sub.prefix.assign(g.prefix.begin() + 1, g.prefix.end());
                    if (!solve(std::move(sub)).value) return {false, std::move(m)};
                }
                return {true, {}};
            }
            Game d;
            d.root = d.pool.negate(d.pool.import(g.pool, g.root, [](std::uint32_t v) { return v; }));
            d.prefix = g.prefix;
            for (auto& b : d.prefix)
                b.quantifier = b.quantifier == Quantifier::Forall ? Quantifier::Exists : Quantifier::Forall;
            Outcome o = solve(std::move(d));
            o.value = !o.value;
            return o;
        }
        const auto& xs = g.prefix[0].vars;
        if (g.prefix.size() == 1) return sat(g, xs);

        // Start from the all-false move; a full propositional seed is slow on large matrices.
        Move tau;
        for (auto x : xs) tau[x] = false;

        // Conjuncts sharing no inner variable are independent games once X is fixed.
        const auto parts = components(g);
        const std::size_t levels = g.prefix.size() - 2;
        std::unordered_map<std::uint32_t, std::size_t> levelOf;
        for (std::size_t k = 0; k < levels; ++k)
            for (auto v : g.prefix[2 + k].vars) levelOf[v] = k;

        // Abstraction: the opponent restricted to the moves found so far. With
        // one inner level it stays propositional and is solved incrementally.
        std::optional<Incremental> inc;
        if (levels <= 1) inc.emplace(xs);
        Game abs;
        abs.prefix.assign(1 + levels, QuantBlock{});
        abs.prefix[0] = {Quantifier::Exists, xs};
        for (std::size_t k = 0; k < levels; ++k) abs.prefix[1 + k].quantifier = g.prefix[2 + k].quantifier;
        std::vector<ExprPool::Id> copies;
        std::vector<std::optional<std::vector<char>>> wonWith(parts.size());

        for (;;) {
            checkDeadline(deadline_);
            bool won = true;
            for (std::size_t pi = 0; pi < parts.size(); ++pi) {
                const auto& part = parts[pi];
                // A component keeps its verdict while the variables it reads are unchanged.
                std::vector<char> view;
                view.reserve(part.outer.size());
                for (auto v : part.outer) {
                    auto it = tau.find(v);
                    view.push_back(it != tau.end() && it->second);
                }
                if (wonWith[pi] && *wonWith[pi] == view) continue;
                // Does τ win this component against every continuation?
                Game check;
                check.root = check.pool.import(g.pool, part.root, [&](std::uint32_t v) -> std::uint32_t {
                    auto it = tau.find(v);
                    if (it == tau.end()) return v;
                    return it->second ? UINT32_MAX : 0u;
                });
                check.prefix.assign(g.prefix.begin() + 1, g.prefix.end());
                for (auto& b : check.prefix) restrictTo(b, part.vars);
                Outcome reply = solve(std::move(check));
                if (reply.value) {
                    wonWith[pi] = std::move(view);
                    continue;
                }
                wonWith[pi].reset();
                won = false;
                Move mu;
                for (auto y : g.prefix[1].vars)
                    if (part.vars.count(y)) {
                        auto it = reply.move.find(y);
                        mu[y] = it != reply.move.end() && it->second;
                    }
                std::unordered_map<std::uint32_t, std::uint32_t> rename;
                auto mapVar = [&](std::uint32_t v) -> std::uint32_t {
                    auto it = mu.find(v);
                    if (it != mu.end()) return it->second ? UINT32_MAX : 0u;
                    auto lv = levelOf.find(v);
                    if (lv == levelOf.end()) return v;
                    auto& r = rename[v];
                    if (r == 0) {
                        r = fresh();
                        abs.prefix[1 + lv->second].vars.push_back(r);
                    }
                    return r;
                };
                if (inc) inc->add(g.pool, part.root, mapVar);
                else copies.push_back(abs.pool.import(g.pool, part.root, mapVar));
            }
            if (won) return {true, tau};

            Outcome cand;
            if (inc) {
                cand = inc->solve(deadline_);
            } else {
                Game round;
                round.pool = abs.pool;
                round.root = round.pool.conj(copies);
                round.prefix = abs.prefix;
                cand = solve(std::move(round));
            }
            if (!cand.value) return {false, {}};
            tau.clear();
            for (auto x : xs) {
                auto it = cand.move.find(x);
                tau[x] = it != cand.move.end() && it->second;
            }
        }
    }

private:
    struct Part {
        ExprPool::Id root;
        std::unordered_set<std::uint32_t> vars;  // inner variables of the component
        std::vector<std::uint32_t> outer;       // first-block variables it reads
    };

    static void restrictTo(QuantBlock& b, const std::unordered_set<std::uint32_t>& keep) {
        std::vector<std::uint32_t> vs;
        for (auto v : b.vars)
            if (keep.count(v)) vs.push_back(v);
        b.vars = std::move(vs);
    }

    /// Top-level conjuncts grouped by shared variables bound after the first block.
    static std::vector<Part> components(Game& g) {
        std::vector<ExprPool::Id> kids;
        if (g.pool.kind(g.root) == ExprKind::And) kids = g.pool.children(g.root);
        else kids = {g.root};
        std::unordered_set<std::uint32_t> inner;
        for (std::size_t k = 1; k < g.prefix.size(); ++k) inner.insert(g.prefix[k].vars.begin(), g.prefix[k].vars.end());
        std::vector<std::vector<std::uint32_t>> outerOf(kids.size());

        std::vector<std::size_t> parent(kids.size());
        for (std::size_t i = 0; i < kids.size(); ++i) parent[i] = i;
        std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
            return parent[i] == i ? i : parent[i] = find(parent[i]);
        };
        std::unordered_map<std::uint32_t, std::size_t> owner;
        std::vector<std::vector<std::uint32_t>> varsOf(kids.size());
        std::vector<std::uint32_t> stamp(g.pool.nodeCount(), UINT32_MAX);
        for (std::size_t i = 0; i < kids.size(); ++i) {
            std::vector<ExprPool::Id> stack{kids[i]};
            while (!stack.empty()) {
                auto e = stack.back();
                stack.pop_back();
                if (stamp[e] == i) continue;
                stamp[e] = static_cast<std::uint32_t>(i);
                if (g.pool.kind(e) == ExprKind::Var) {
                    auto v = g.pool.varOf(e);
                    if (!inner.count(v)) {
                        outerOf[i].push_back(v);
                        continue;
                    }
                    varsOf[i].push_back(v);
                    auto [it, fresh] = owner.emplace(v, i);
                    if (!fresh) parent[find(i)] = find(it->second);
                }
                for (auto k : g.pool.children(e)) stack.push_back(k);
            }
        }
        std::unordered_map<std::size_t, std::size_t> index;
        std::vector<std::vector<ExprPool::Id>> groups;
        std::vector<Part> out;
        for (std::size_t i = 0; i < kids.size(); ++i) {
            auto [it, fresh] = index.emplace(find(i), groups.size());
            if (fresh) {
                groups.emplace_back();
                out.push_back({0, {}, {}});
            }
            groups[it->second].push_back(kids[i]);
            out[it->second].vars.insert(varsOf[i].begin(), varsOf[i].end());
            auto& o = out[it->second].outer;
            o.insert(o.end(), outerOf[i].begin(), outerOf[i].end());
        }
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k].root = g.pool.conj(std::move(groups[k]));
            auto& o = out[k].outer;
            std::sort(o.begin(), o.end());
            o.erase(std::unique(o.begin(), o.end()), o.end());
        }
        return out;
    }

    /// Growing propositional abstraction kept in one SAT solver.
    class Incremental {
    public:
        explicit Incremental(const std::vector<std::uint32_t>& xs) : xs_(xs) {
            for (auto x : xs_) satVar(x);
        }

        template <class MapVar>
        void add(const ExprPool& pool, ExprPool::Id root, const MapVar& mapVar) {
            ExprPool copy;
            auto r = copy.import(pool, root, mapVar);
            for (auto e : cone(copy, r))
                if (copy.kind(e) == ExprKind::Var) satVar(copy.varOf(e));
            CnfBuilder cnf(solver_.varCount());
            cnf.assertTrue(copy, r, [&](std::uint32_t v) { return ids_.at(v); });
            while (solver_.varCount() < cnf.varCount()) solver_.newVar();
            for (const auto& c : cnf.clauses()) solver_.addClause(c);
        }

        Outcome solve(const Deadline* deadline) {
            Outcome o;
            o.value = solver_.solve(deadline);
            if (o.value)
                for (auto x : xs_) o.move[x] = solver_.modelValue(ids_.at(x));
            return o;
        }

    private:
        int satVar(std::uint32_t v) {
            auto [it, fresh] = ids_.emplace(v, 0);
            if (fresh) it->second = solver_.newVar();
            return it->second;
        }
        std::vector<std::uint32_t> xs_;
        std::unordered_map<std::uint32_t, int> ids_;
        SatSolver solver_;
    };

    /// Satisfiability with every variable existential; the move covers `xs`.
    Outcome sat(const Game& g, const std::vector<std::uint32_t>& xs) {
        std::unordered_map<std::uint32_t, int> ids;
        int next = 0;
        auto mapVar = [&](std::uint32_t v) {
            auto [it, inserted] = ids.emplace(v, 0);
            if (inserted) it->second = ++next;
            return it->second;
        };
        for (auto e : cone(g.pool, g.root))
            if (g.pool.kind(e) == ExprKind::Var) mapVar(g.pool.varOf(e));
        CnfBuilder cnf(next);
        cnf.assertTrue(g.pool, g.root, mapVar);
        SatSolver solver;
        for (int i = 0; i < cnf.varCount(); ++i) solver.newVar();
        for (const auto& c : cnf.clauses()) solver.addClause(c);
        Outcome o;
        o.value = solver.solve(deadline_);
        if (o.value)
            for (auto x : xs) {
                auto it = ids.find(x);
                o.move[x] = it != ids.end() && solver.modelValue(it->second);
            }
        return o;
    }

    const Deadline* deadline_;
    std::uint32_t nextVar_ = 0;
};

std::size_t boundCount(const std::vector<QuantBlock>& prefix) {
    std::size_t n = 0;
    for (const auto& b : prefix) n += b.vars.size();
    return n;
}

}  // namespace

bool evalQbfExpansion(const QbfInstance& inst, const Limits& limits, const Deadline* deadline) {
    auto prefix = closedPrefix(inst.pool, inst.matrix, inst.prefix);
    const std::size_t n = boundCount(prefix);
    if (n > limits.maxQbfExpansionVars)
        throw Error(ErrorCode::VarLimit, std::to_string(n) + " variables exceed the expansion cap of " +
                                             std::to_string(limits.maxQbfExpansionVars));
    std::vector<std::pair<std::uint32_t, Quantifier>> order;
    for (const auto& b : prefix)
        for (auto v : b.vars) order.emplace_back(v, b.quantifier);
    return Expansion(inst.pool, inst.matrix, std::move(order), deadline).run();
}

bool evalQbfCegar(const QbfInstance& inst, const Deadline* deadline) {
    Cegar solver(deadline);
    Game g;
    g.root = g.pool.import(inst.pool, inst.matrix, [](std::uint32_t v) { return v; });
    g.prefix = closedPrefix(inst.pool, inst.matrix, inst.prefix);
    std::uint32_t maxVar = static_cast<std::uint32_t>(inst.variableCount());
    for (const auto& b : g.prefix)
        for (auto v : b.vars) maxVar = std::max(maxVar, v);
    solver.reserve(maxVar);
    return solver.solve(std::move(g)).value;
}

bool evalQbf(const QbfInstance& inst, const Limits& limits, const Deadline* deadline) {
    if (boundCount(closedPrefix(inst.pool, inst.matrix, inst.prefix)) <= limits.maxQbfExpansionVars)
        return evalQbfExpansion(inst, limits, deadline);
    return evalQbfCegar(inst, deadline);
}

}  // namespace mtsref
