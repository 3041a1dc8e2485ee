#pragma once

// Tseitin transformation shared by the QDIMACS writer and the CEGAR solver.

#include <cstdlib>
#include <vector>

#include "mtsref/qbf.hpp"

namespace mtsref {

class CnfBuilder {
public:
    /// Variables 1..reserved belong to the caller; Tseitin variables follow.
    explicit CnfBuilder(int reserved) : next_(reserved) {}

    int varCount() const { return next_; }
    const std::vector<std::vector<int>>& clauses() const { return clauses_; }

    /// Adds clauses forcing `root` true. `mapVar` sends pool variables to
    /// caller variables.
    template <class MapVar>
    void assertTrue(const ExprPool& pool, ExprPool::Id root, const MapVar& mapVar) {
        memo_.assign(pool.nodeCount(), 0);
        assertNode(pool, root, mapVar);
    }

private:
    template <class MapVar>
    void assertNode(const ExprPool& pool, ExprPool::Id e, const MapVar& mapVar) {
        switch (pool.kind(e)) {
        case ExprKind::True: return;
        case ExprKind::And:
            for (auto k : pool.children(e)) assertNode(pool, k, mapVar);
            return;
        case ExprKind::Or: {
            std::vector<int> c;
            for (auto k : pool.children(e)) c.push_back(lit(pool, k, mapVar));
            clauses_.push_back(std::move(c));
            return;
        }
        default:
            if (pool.isBottom(e)) {
                clauses_.push_back({});
                return;
            }
            clauses_.push_back({lit(pool, e, mapVar)});
        }
    }

    template <class MapVar>
    int lit(const ExprPool& pool, ExprPool::Id e, const MapVar& mapVar) {
        if (memo_[e] != 0) return memo_[e];
        int out = 0;
        switch (pool.kind(e)) {
        case ExprKind::True:
            out = ++next_;
            clauses_.push_back({out});
            break;
        case ExprKind::Var: out = mapVar(pool.varOf(e)); break;
        case ExprKind::Not: out = -lit(pool, pool.children(e)[0], mapVar); break;
        case ExprKind::And:
        case ExprKind::Or: {
            std::vector<int> kids;
            for (auto k : pool.children(e)) kids.push_back(lit(pool, k, mapVar));
            out = ++next_;
            const bool isAnd = pool.kind(e) == ExprKind::And;
            // And: out -> k_i,  (k_1 & ... ) -> out.   Or: out -> (k_1 | ...), k_i -> out.
            std::vector<int> big{isAnd ? out : -out};
            for (int k : kids) {
                clauses_.push_back(isAnd ? std::vector<int>{-out, k} : std::vector<int>{out, -k});
                big.push_back(isAnd ? -k : k);
            }
            clauses_.push_back(std::move(big));
            break;
        }
        }
        memo_[e] = out;
        return out;
    }

    int next_;
    std::vector<std::vector<int>> clauses_;
    std::vector<int> memo_;
};

}  // namespace mtsref
