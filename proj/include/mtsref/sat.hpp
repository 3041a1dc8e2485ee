#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mtsref/error.hpp"

namespace mtsref {

/// Small CDCL SAT solver (two watched literals, first-UIP learning, VSIDS,
/// Luby restarts, phase saving). Literals are DIMACS-style: variable v
/// (1-based) is `v` positive and `-v` negative.
class SatSolver {
public:
    /// Returns the new variable's 1-based id.
    int newVar();
    int varCount() const { return static_cast<int>(assigns_.size()); }

    /// Returns false once the clause set is known unsatisfiable.
    bool addClause(std::span<const int> lits);
    bool addClause(std::initializer_list<int> lits) { return addClause(std::span<const int>(lits.begin(), lits.size())); }

    /// Decides the clause set. Throws Timeout when `deadline` passes.
    bool solve(const Deadline* deadline = nullptr);

    /// Value of variable `v` in the last model.
    bool modelValue(int v) const { return model_[v - 1] != 0; }

private:
    using Lit = std::uint32_t;  // 2*var + negative
    static Lit toLit(int dimacs) {
        return dimacs > 0 ? Lit(2 * (dimacs - 1)) : Lit(2 * (-dimacs - 1) + 1);
    }
    static std::uint32_t var(Lit l) { return l >> 1; }
    static Lit neg(Lit l) { return l ^ 1u; }

    // -1 unassigned, 0 false, 1 true
    int value(Lit l) const {
        int v = assigns_[var(l)];
        return v < 0 ? -1 : (v ^ static_cast<int>(l & 1u));
    }

    void enqueue(Lit l, std::int32_t reason);
    std::int32_t propagate();  // conflicting clause or -1
    void analyze(std::int32_t conflict, std::vector<Lit>& learnt, int& backLevel);
    void backtrack(int level);
    int decisionLevel() const { return static_cast<int>(trailLim_.size()); }
    void attach(std::uint32_t cref);

    void bump(std::uint32_t v);
    void heapInsert(std::uint32_t v);
    std::uint32_t heapPop();
    void heapUp(std::size_t i);
    void heapDown(std::size_t i);

    bool ok_ = true;
    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::vector<std::uint32_t>> watches_;  // indexed by literal
    std::vector<std::int8_t> assigns_;
    std::vector<int> level_;
    std::vector<std::int32_t> reason_;
    std::vector<Lit> trail_;
    std::vector<std::size_t> trailLim_;
    std::size_t qhead_ = 0;
    std::vector<double> activity_;
    double varInc_ = 1.0;
    std::vector<std::uint32_t> heap_;
    std::vector<std::int64_t> heapPos_;  // -1 when absent
    std::vector<std::int8_t> phase_;
    std::vector<char> seen_;
    std::vector<std::int8_t> model_;
};

}  // namespace mtsref
