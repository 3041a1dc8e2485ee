#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtsref/error.hpp"
#include "mtsref/system.hpp"

namespace mtsref {

enum class VarRole { Rel, LTrans, RTrans, LParam, RParam, Aux, Plain };

/// A propositional variable of a QBF instance. Ids are 1-based.
struct QbfVariable {
    VarRole role = VarRole::Plain;
    // Rel: (u, v). LTrans: index into T1. RTrans: (u, index into T2).
    // LParam/RParam: parameter id. Aux/Plain: unused.
    std::uint32_t first = 0;
    std::uint32_t second = 0;
    std::string label;
};

enum class Quantifier { Forall, Exists };

struct QuantBlock {
    Quantifier quantifier = Quantifier::Exists;
    std::vector<std::uint32_t> vars;
};

enum class ExprKind : std::uint8_t { True, Var, Not, And, Or };

/// Shared-node Boolean circuit with n-ary conjunction and disjunction.
/// Constructors fold constants, so structurally trivial inputs stay small.
class ExprPool {
public:
    using Id = std::uint32_t;

    ExprPool();

    Id top() const { return 0; }
    Id bottom() const { return 1; }
    Id var(std::uint32_t v);
    Id negate(Id e);
    Id conj(std::vector<Id> parts);
    Id disj(std::vector<Id> parts);
    Id conj(Id a, Id b) { return conj(std::vector<Id>{a, b}); }
    Id disj(Id a, Id b) { return disj(std::vector<Id>{a, b}); }
    Id implies(Id a, Id b) { return disj(negate(a), b); }
    Id iff(Id a, Id b) { return conj(implies(a, b), implies(b, a)); }

    ExprKind kind(Id e) const { return nodes_[e].kind; }
    std::uint32_t varOf(Id e) const { return nodes_[e].var; }
    const std::vector<Id>& children(Id e) const { return nodes_[e].kids; }
    std::size_t nodeCount() const { return nodes_.size(); }

    bool isTop(Id e) const { return e == 0; }
    bool isBottom(Id e) const { return e == 1; }

    /// Nodes plus edges reachable from `root`, counting shared nodes once.
    std::size_t size(Id root) const;

    /// Copies the cone of `root` from `other` with every variable mapped by
    /// `mapVar` (a returned 0 means false, UINT32_MAX means true).
    template <class MapVar>
    Id import(const ExprPool& other, Id root, const MapVar& mapVar);

private:
    struct Node {
        ExprKind kind;
        std::uint32_t var = 0;
        std::vector<Id> kids;
    };
    std::vector<Node> nodes_;
    std::vector<Id> varNodes_;
    Id make(Node n);
};

/// Prenex QBF: quantifier blocks (outermost first) and a circuit matrix.
struct QbfInstance {
    std::vector<QbfVariable> variables;  // variables[i] has id i+1
    std::vector<QuantBlock> prefix;
    ExprPool pool;
    ExprPool::Id matrix = 0;

    std::uint32_t addVariable(QbfVariable v);
    std::size_t variableCount() const { return variables.size(); }

    /// Drops empty blocks and merges adjacent blocks with equal quantifiers.
    void normalize();

    /// Sizes of the variable groups by role.
    std::size_t countRole(VarRole role) const;
};

/// Ψ for BMTS inputs under prefix ∃X_R ∀X_T1 ∃X_T2. Throws KindError for
/// parametric input.
QbfInstance encodeBmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0);

/// Ψ with parameter atoms under prefix ∀P1 ∃P2 ∃X_R ∀X_T1 ∃X_T2. The
/// prefix is normalized.
QbfInstance encodePmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0);

/// The fixed-relation variant: prefix ∃X_R ∀P1 ∃P2 ∀X_T1 ∃X_T2 over the
/// same matrix, so one relation serves every valuation.
QbfInstance encodePmtsOriginal(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0);
/// Bound on the matrix size of the encodings: |S1||S2|(|T1||T2| + |Φ1| + |Φ2|)
/// with at least 1 in each factor, where |Φ| sums obligation sizes.
std::size_t encodingSizeMeasure(const TransitionSystem& left, const TransitionSystem& right);

/// Exhaustive expansion with short-circuiting. Throws VarLimit above the cap.
bool evalQbfExpansion(const QbfInstance& inst, const Limits& limits = {}, const Deadline* deadline = nullptr);

/// Counterexample-guided expansion over the SAT solver; no variable cap.
bool evalQbfCegar(const QbfInstance& inst, const Deadline* deadline = nullptr);

/// Expansion when the instance fits the cap, CEGAR otherwise.
bool evalQbf(const QbfInstance& inst, const Limits& limits = {}, const Deadline* deadline = nullptr);

/// Prenex CNF in QDIMACS. Tseitin variables form the innermost existential
/// block (merged with an existing innermost existential block).
std::string toQdimacs(const QbfInstance& inst);

/// Reads QDIMACS into an instance whose matrix is the clause conjunction.
/// Variables not bound by the prefix are placed in an outermost ∃ block.
QbfInstance parseQdimacs(std::string_view text);

struct ExternalSolverOptions {
    std::string command;  // "{file}" is replaced by the QDIMACS path; appended when absent
    std::optional<double> timeoutSeconds;
};

/// Runs an external solver on the QDIMACS form. Exit 10 means true and 20
/// false. Throws SolverUnavailable, SolverTimeout or SolverProtocol.
bool solveExternal(const QbfInstance& inst, const ExternalSolverOptions& options);

// ---------------------------------------------------------------------------

template <class MapVar>
ExprPool::Id ExprPool::import(const ExprPool& other, Id root, const MapVar& mapVar) {
    std::vector<Id> memo(other.nodes_.size(), UINT32_MAX);
    // Iterative post-order to stay clear of deep recursion.
    std::vector<std::pair<Id, bool>> stack{{root, false}};
    while (!stack.empty()) {
        auto [e, expanded] = stack.back();
        stack.pop_back();
        if (memo[e] != UINT32_MAX) continue;
        const Node& n = other.nodes_[e];
        if (!expanded && (n.kind == ExprKind::Not || n.kind == ExprKind::And || n.kind == ExprKind::Or)) {
            stack.emplace_back(e, true);
            for (Id k : n.kids)
                if (memo[k] == UINT32_MAX) stack.emplace_back(k, false);
            continue;
        }
        switch (n.kind) {
        case ExprKind::True: memo[e] = top(); break;
        case ExprKind::Var: {
            std::uint32_t m = mapVar(n.var);
            memo[e] = m == 0 ? bottom() : (m == UINT32_MAX ? top() : var(m));
            break;
        }
        case ExprKind::Not: memo[e] = negate(memo[n.kids[0]]); break;
        case ExprKind::And:
        case ExprKind::Or: {
            std::vector<Id> kids;
            kids.reserve(n.kids.size());
            for (Id k : n.kids) kids.push_back(memo[k]);
            memo[e] = n.kind == ExprKind::And ? conj(std::move(kids)) : disj(std::move(kids));
            break;
        }
        }
    }
    return memo[root];
}

}  // namespace mtsref
