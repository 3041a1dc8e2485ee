#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>

namespace mtsref {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;
using ParamId = std::uint32_t;

enum class FormulaKind : std::uint8_t { True, Trans, Param, Not, And, Or };

/// Immutable Boolean formula over transition atoms `(a,t)` and parameter
/// atoms. Only the core connectives are represented; xor, implication and
/// equivalence are expanded by their factory functions. Falsity is `!tt`.
/// Copies are cheap: subtrees are shared.
class Formula {
public:
    Formula();  // tt

    static Formula tt();
    static Formula ff();
    static Formula trans(ActionId action, StateId target);
    static Formula param(ParamId p);
    static Formula negation(Formula f);
    static Formula conj(Formula l, Formula r);
    static Formula disj(Formula l, Formula r);

    // (l && !r) || (!l && r)
    static Formula exclusiveOr(Formula l, Formula r);
    // !l || r
    static Formula implies(Formula l, Formula r);
    // (!l || r) && (l || !r)
    static Formula iff(Formula l, Formula r);

    /// Left-folded conjunction; `tt` when empty.
    static Formula conjunction(std::span<const Formula> parts);
    /// Left-folded disjunction; `ff` when empty.
    static Formula disjunction(std::span<const Formula> parts);

    FormulaKind kind() const;
    ActionId action() const;  // Trans only
    StateId target() const;   // Trans only
    ParamId param() const;    // Param only
    const Formula& child() const;  // Not only
    const Formula& left() const;   // And/Or
    const Formula& right() const;  // And/Or

    bool isTrue() const { return kind() == FormulaKind::True; }
    /// `!tt`
    bool isFalse() const;
    bool mentionsParams() const;

    /// Number of nodes counted as a tree.
    std::size_t size() const;

    /// Structural identity.
    friend bool operator==(const Formula& a, const Formula& b);

    template <class TransFn, class ParamFn>
    bool evaluate(const TransFn& transAtom, const ParamFn& paramAtom) const;

    using TransMap = std::function<Formula(ActionId, StateId)>;
    using ParamMap = std::function<Formula(ParamId)>;

    /// Replaces every atom by the formula returned from the respective map.
    /// Shared subtrees are rewritten once.
    Formula substitute(const TransMap& trans, const ParamMap& param) const;

    /// Constant folding of `!tt`, `x && tt`, `x || tt` and friends.
    Formula simplified() const;

    const void* identity() const { return node_.get(); }

    struct Node;

private:
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Formula::Node {
    FormulaKind kind = FormulaKind::True;
    std::uint32_t a = 0;  // action or parameter id
    std::uint32_t b = 0;  // target state
    Formula lhs;          // Not child / And,Or left
    Formula rhs;

    Node() : lhs(nullptr), rhs(nullptr) {}
};

template <class TransFn, class ParamFn>
bool Formula::evaluate(const TransFn& transAtom, const ParamFn& paramAtom) const {
    const Node& n = *node_;
    switch (n.kind) {
    case FormulaKind::True: return true;
    case FormulaKind::Trans: return transAtom(n.a, n.b);
    case FormulaKind::Param: return paramAtom(n.a);
    case FormulaKind::Not: return !n.lhs.evaluate(transAtom, paramAtom);
    case FormulaKind::And:
        return n.lhs.evaluate(transAtom, paramAtom) && n.rhs.evaluate(transAtom, paramAtom);
    case FormulaKind::Or:
        return n.lhs.evaluate(transAtom, paramAtom) || n.rhs.evaluate(transAtom, paramAtom);
    }
    return false;
}

}  // namespace mtsref
