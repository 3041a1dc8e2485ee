#include "mtsref/formula.hpp"

#include <cassert>

namespace mtsref {

namespace {

std::shared_ptr<const Formula::Node> makeNode(FormulaKind kind, std::uint32_t a, std::uint32_t b) {
    auto n = std::make_shared<Formula::Node>();
    n->kind = kind;
    n->a = a;
    n->b = b;
    return n;
}

}  // namespace

Formula::Formula() : Formula(tt()) {}

Formula Formula::tt() {
    static const std::shared_ptr<const Node> node = makeNode(FormulaKind::True, 0, 0);
    return Formula(node);
}

Formula Formula::ff() { return negation(tt()); }

Formula Formula::trans(ActionId action, StateId target) {
    return Formula(makeNode(FormulaKind::Trans, action, target));
}

Formula Formula::param(ParamId p) { return Formula(makeNode(FormulaKind::Param, p, 0)); }

Formula Formula::negation(Formula f) {
    auto n = std::make_shared<Node>();
    n->kind = FormulaKind::Not;
    n->lhs = std::move(f);
    return Formula(std::move(n));
}

Formula Formula::conj(Formula l, Formula r) {
    auto n = std::make_shared<Node>();
    n->kind = FormulaKind::And;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return Formula(std::move(n));
}

Formula Formula::disj(Formula l, Formula r) {
    auto n = std::make_shared<Node>();
    n->kind = FormulaKind::Or;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return Formula(std::move(n));
}

Formula Formula::exclusiveOr(Formula l, Formula r) {
    return disj(conj(l, negation(r)), conj(negation(l), r));
}

Formula Formula::implies(Formula l, Formula r) { return disj(negation(std::move(l)), std::move(r)); }

Formula Formula::iff(Formula l, Formula r) {
    return conj(disj(negation(l), r), disj(l, negation(r)));
}

Formula Formula::conjunction(std::span<const Formula> parts) {
    if (parts.empty()) return tt();
    Formula acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = conj(acc, parts[i]);
    return acc;
}

Formula Formula::disjunction(std::span<const Formula> parts) {
    if (parts.empty()) return ff();
    Formula acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = disj(acc, parts[i]);
    return acc;
}

FormulaKind Formula::kind() const { return node_->kind; }

ActionId Formula::action() const {
    assert(kind() == FormulaKind::Trans);
    return node_->a;
}

StateId Formula::target() const {
    assert(kind() == FormulaKind::Trans);
    return node_->b;
}

ParamId Formula::param() const {
    assert(kind() == FormulaKind::Param);
    return node_->a;
}

const Formula& Formula::child() const {
    assert(kind() == FormulaKind::Not);
    return node_->lhs;
}

const Formula& Formula::left() const {
    assert(kind() == FormulaKind::And || kind() == FormulaKind::Or);
    return node_->lhs;
}

const Formula& Formula::right() const {
    assert(kind() == FormulaKind::And || kind() == FormulaKind::Or);
    return node_->rhs;
}

bool Formula::isFalse() const { return kind() == FormulaKind::Not && child().isTrue(); }

bool Formula::mentionsParams() const {
    switch (kind()) {
    case FormulaKind::True:
    case FormulaKind::Trans: return false;
    case FormulaKind::Param: return true;
    case FormulaKind::Not: return child().mentionsParams();
    case FormulaKind::And:
    case FormulaKind::Or: return left().mentionsParams() || right().mentionsParams();
    }
    return false;
}

std::size_t Formula::size() const {
    switch (kind()) {
    case FormulaKind::True:
    case FormulaKind::Trans:
    case FormulaKind::Param: return 1;
    case FormulaKind::Not: return 1 + child().size();
    case FormulaKind::And:
    case FormulaKind::Or: return 1 + left().size() + right().size();
    }
    return 1;
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::Trans: return a.action() == b.action() && a.target() == b.target();
    case FormulaKind::Param: return a.param() == b.param();
    case FormulaKind::Not: return a.child() == b.child();
    case FormulaKind::And:
    case FormulaKind::Or: return a.left() == b.left() && a.right() == b.right();
    }
    return false;
}

namespace {

struct Rewriter {
    const Formula::TransMap& trans;
    const Formula::ParamMap& param;
    std::unordered_map<const void*, Formula> memo;

    Formula run(const Formula& f) {
        if (auto it = memo.find(f.identity()); it != memo.end()) return it->second;
        Formula out;
        switch (f.kind()) {
        case FormulaKind::True: out = f; break;
        case FormulaKind::Trans: out = trans(f.action(), f.target()); break;
        case FormulaKind::Param: out = param(f.param()); break;
        case FormulaKind::Not: out = Formula::negation(run(f.child())); break;
        case FormulaKind::And: out = Formula::conj(run(f.left()), run(f.right())); break;
        case FormulaKind::Or: out = Formula::disj(run(f.left()), run(f.right())); break;
        }
        memo.emplace(f.identity(), out);
        return out;
    }
};

Formula simplify(const Formula& f, std::unordered_map<const void*, Formula>& memo) {
    if (auto it = memo.find(f.identity()); it != memo.end()) return it->second;
    Formula out = f;
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Trans:
    case FormulaKind::Param: break;
    case FormulaKind::Not: {
        Formula c = simplify(f.child(), memo);
        if (c.isFalse()) out = Formula::tt();
        else if (c.kind() == FormulaKind::Not) out = c.child();
        else out = Formula::negation(c);
        break;
    }
    case FormulaKind::And: {
        Formula l = simplify(f.left(), memo);
        Formula r = simplify(f.right(), memo);
        if (l.isFalse() || r.isFalse()) out = Formula::ff();
        else if (l.isTrue()) out = r;
        else if (r.isTrue()) out = l;
        else out = Formula::conj(l, r);
        break;
    }
    case FormulaKind::Or: {
        Formula l = simplify(f.left(), memo);
        Formula r = simplify(f.right(), memo);
        if (l.isTrue() || r.isTrue()) out = Formula::tt();
        else if (l.isFalse()) out = r;
        else if (r.isFalse()) out = l;
        else out = Formula::disj(l, r);
        break;
    }
    }
    memo.emplace(f.identity(), out);
    return out;
}

}  // namespace

Formula Formula::substitute(const TransMap& trans, const ParamMap& param) const {
    Rewriter rw{trans, param, {}};
    return rw.run(*this);
}

Formula Formula::simplified() const {
    std::unordered_map<const void*, Formula> memo;
    return simplify(*this, memo);
}

}  // namespace mtsref
