#include "mtsref/qbf.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "qbf_cnf.hpp"

namespace mtsref {

// ---------------------------------------------------------------- ExprPool

ExprPool::ExprPool() {
    nodes_.push_back({ExprKind::True, 0, {}});
    nodes_.push_back({ExprKind::Not, 0, {0}});
}

ExprPool::Id ExprPool::make(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

ExprPool::Id ExprPool::var(std::uint32_t v) {
    if (v >= varNodes_.size()) varNodes_.resize(v + 1, 0);
    if (varNodes_[v] == 0) varNodes_[v] = make({ExprKind::Var, v, {}});
    return varNodes_[v];
}

ExprPool::Id ExprPool::negate(Id e) {
    if (e == top()) return bottom();
    if (e == bottom()) return top();
    if (nodes_[e].kind == ExprKind::Not) return nodes_[e].kids[0];
    return make({ExprKind::Not, 0, {e}});
}

ExprPool::Id ExprPool::conj(std::vector<Id> parts) {
    std::vector<Id> kids;
    kids.reserve(parts.size());
    for (Id p : parts) {
        if (p == bottom()) return bottom();
        if (p == top()) continue;
        if (nodes_[p].kind == ExprKind::And) {
            for (Id k : nodes_[p].kids) kids.push_back(k);
        } else {
            kids.push_back(p);
        }
    }
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    if (kids.empty()) return top();
    if (kids.size() == 1) return kids[0];
    return make({ExprKind::And, 0, std::move(kids)});
}

ExprPool::Id ExprPool::disj(std::vector<Id> parts) {
    std::vector<Id> kids;
    kids.reserve(parts.size());
    for (Id p : parts) {
        if (p == top()) return top();
        if (p == bottom()) continue;
        if (nodes_[p].kind == ExprKind::Or) {
            for (Id k : nodes_[p].kids) kids.push_back(k);
        } else {
            kids.push_back(p);
        }
    }
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
    if (kids.empty()) return bottom();
    if (kids.size() == 1) return kids[0];
    return make({ExprKind::Or, 0, std::move(kids)});
}

std::size_t ExprPool::size(Id root) const {
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<Id> stack{root};
    std::size_t total = 0;
    while (!stack.empty()) {
        Id e = stack.back();
        stack.pop_back();
        if (seen[e]) continue;
        seen[e] = 1;
        total += 1 + nodes_[e].kids.size();
        for (Id k : nodes_[e].kids) stack.push_back(k);
    }
    return total;
}

// ------------------------------------------------------------- QbfInstance

std::uint32_t QbfInstance::addVariable(QbfVariable v) {
    variables.push_back(std::move(v));
    return static_cast<std::uint32_t>(variables.size());
}

void QbfInstance::normalize() {
    std::vector<QuantBlock> out;
    for (auto& b : prefix) {
        if (b.vars.empty()) continue;
        if (!out.empty() && out.back().quantifier == b.quantifier) {
            out.back().vars.insert(out.back().vars.end(), b.vars.begin(), b.vars.end());
        } else {
            out.push_back(std::move(b));
        }
    }
    prefix = std::move(out);
}

std::size_t QbfInstance::countRole(VarRole role) const {
    return static_cast<std::size_t>(
        std::count_if(variables.begin(), variables.end(), [&](const QbfVariable& v) { return v.role == role; }));
}

// ---------------------------------------------------------------- encoding

namespace {

QbfInstance encode(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                   bool withParams) {
    if (s0 >= left.stateCount() || t0 >= right.stateCount())
        throw Error(ErrorCode::InvalidArgument, "state id out of range");
    const std::size_t n1 = left.stateCount();
    const std::size_t n2 = right.stateCount();
    const auto t1 = left.transitions();
    const auto t2 = right.transitions();
    JointAlphabet joint(left, right);
    QbfInstance inst;

    std::vector<std::uint32_t> rel(n1 * n2);
    for (StateId u = 0; u < n1; ++u)
        for (StateId v = 0; v < n2; ++v)
            rel[u * n2 + v] = inst.addVariable(
                {VarRole::Rel, u, v, "R(" + left.stateName(u) + "," + right.stateName(v) + ")"});
    std::vector<std::uint32_t> lt(t1.size());
    for (std::uint32_t i = 0; i < t1.size(); ++i)
        lt[i] = inst.addVariable({VarRole::LTrans, i, 0,
                                  "T1(" + left.stateName(t1[i].source) + "," + left.actionName(t1[i].action) + "," +
                                      left.stateName(t1[i].target) + ")"});
    std::vector<std::uint32_t> rt(n1 * t2.size());
    for (StateId u = 0; u < n1; ++u)
        for (std::uint32_t j = 0; j < t2.size(); ++j)
            rt[u * t2.size() + j] = inst.addVariable(
                {VarRole::RTrans, u, j,
                 "T2(" + left.stateName(u) + ";" + right.stateName(t2[j].source) + "," +
                     right.actionName(t2[j].action) + "," + right.stateName(t2[j].target) + ")"});
    std::vector<std::uint32_t> lp, rp;
    if (withParams) {
        for (ParamId p = 0; p < left.paramCount(); ++p)
            lp.push_back(inst.addVariable({VarRole::LParam, p, 0, "P1(" + left.paramName(p) + ")"}));
        for (ParamId p = 0; p < right.paramCount(); ++p)
            rp.push_back(inst.addVariable({VarRole::RParam, p, 0, "P2(" + right.paramName(p) + ")"}));
    }

    auto& pool = inst.pool;
    std::function<ExprPool::Id(const Formula&, const std::function<std::uint32_t(ActionId, StateId)>&,
                               const std::vector<std::uint32_t>&)>
        translate = [&](const Formula& f, const std::function<std::uint32_t(ActionId, StateId)>& transVar,
                        const std::vector<std::uint32_t>& paramVars) -> ExprPool::Id {
        switch (f.kind()) {
        case FormulaKind::True: return pool.top();
        case FormulaKind::Trans: return pool.var(transVar(f.action(), f.target()));
        case FormulaKind::Param: return pool.var(paramVars[f.param()]);
        case FormulaKind::Not: return pool.negate(translate(f.child(), transVar, paramVars));
        case FormulaKind::And:
            return pool.conj(translate(f.left(), transVar, paramVars), translate(f.right(), transVar, paramVars));
        case FormulaKind::Or:
            return pool.disj(translate(f.left(), transVar, paramVars), translate(f.right(), transVar, paramVars));
        }
        return pool.top();
    };
    auto globalIndex = [](const TransitionSystem& sys, StateId s, ActionId a, StateId t) {
        auto out = sys.outgoing(s);
        auto local = sys.localIndex(s, a, t);
        return static_cast<std::uint32_t>((out.data() - sys.transitions().data()) + *local);
    };

    std::vector<ExprPool::Id> piLeft(n1);
    for (StateId u = 0; u < n1; ++u)
        piLeft[u] = translate(
            left.obligation(u), [&](ActionId a, StateId x) { return lt[globalIndex(left, u, a, x)]; }, lp);

    std::vector<ExprPool::Id> top{pool.var(rel[s0 * n2 + t0])};
    for (StateId u = 0; u < n1; ++u) {
        const auto outU = left.outgoing(u);
        const std::size_t baseU = static_cast<std::size_t>(outU.data() - t1.data());
        for (StateId v = 0; v < n2; ++v) {
            const auto outV = right.outgoing(v);
            const std::size_t baseV = static_cast<std::size_t>(outV.data() - t2.data());
            auto rtVar = [&](std::size_t j) { return pool.var(rt[u * t2.size() + baseV + j]); };
            ExprPool::Id piRight = translate(
                right.obligation(v),
                [&](ActionId a, StateId x) { return rt[u * t2.size() + globalIndex(right, v, a, x)]; }, rp);
            std::vector<ExprPool::Id> phi;
            for (std::size_t i = 0; i < outU.size(); ++i) {
                std::vector<ExprPool::Id> alts;
                for (std::size_t j = 0; j < outV.size(); ++j)
                    if (joint.left[outU[i].action] == joint.right[outV[j].action])
                        alts.push_back(pool.conj(rtVar(j), pool.var(rel[outU[i].target * n2 + outV[j].target])));
                phi.push_back(pool.implies(pool.var(lt[baseU + i]), pool.disj(std::move(alts))));
            }
            for (std::size_t j = 0; j < outV.size(); ++j) {
                std::vector<ExprPool::Id> alts;
                for (std::size_t i = 0; i < outU.size(); ++i)
                    if (joint.left[outU[i].action] == joint.right[outV[j].action])
                        alts.push_back(
                            pool.conj(pool.var(lt[baseU + i]), pool.var(rel[outU[i].target * n2 + outV[j].target])));
                phi.push_back(pool.implies(rtVar(j), pool.disj(std::move(alts))));
            }
            ExprPool::Id psi = pool.implies(piLeft[u], pool.conj(piRight, pool.conj(std::move(phi))));
            top.push_back(pool.implies(pool.var(rel[u * n2 + v]), psi));
        }
    }
    inst.matrix = pool.conj(std::move(top));

    if (withParams) {
        inst.prefix.push_back({Quantifier::Forall, lp});
        inst.prefix.push_back({Quantifier::Exists, rp});
    }
    inst.prefix.push_back({Quantifier::Exists, rel});
    inst.prefix.push_back({Quantifier::Forall, lt});
    inst.prefix.push_back({Quantifier::Exists, rt});
    return inst;
}

}  // namespace

QbfInstance encodeBmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0) {
    if (left.paramCount() != 0 || right.paramCount() != 0)
        throw Error(ErrorCode::KindError, "BMTS encoding requires parameter-free inputs");
    return encode(left, s0, right, t0, false);
}

QbfInstance encodePmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0) {
    QbfInstance inst = encode(left, s0, right, t0, true);
    inst.normalize();
    return inst;
}

QbfInstance encodePmtsOriginal(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0) {
    QbfInstance inst = encode(left, s0, right, t0, true);
    // Same matrix; the relation moves outside the parameter blocks.
    const std::pair<VarRole, Quantifier> order[] = {{VarRole::Rel, Quantifier::Exists},
                                                    {VarRole::LParam, Quantifier::Forall},
                                                    {VarRole::RParam, Quantifier::Exists},
                                                    {VarRole::LTrans, Quantifier::Forall},
                                                    {VarRole::RTrans, Quantifier::Exists}};
    std::vector<QuantBlock> prefix;
    for (auto [role, q] : order) {
        QuantBlock block{q, {}};
        for (const auto& b : inst.prefix)
            for (auto v : b.vars)
                if (inst.variables[v - 1].role == role) block.vars.push_back(v);
        prefix.push_back(std::move(block));
    }
    inst.prefix = std::move(prefix);
    inst.normalize();
    return inst;
}

std::size_t encodingSizeMeasure(const TransitionSystem& left, const TransitionSystem& right) {
    auto phiSize = [](const TransitionSystem& sys) {
        std::size_t total = 0;
        for (StateId s = 0; s < sys.stateCount(); ++s) total += sys.obligation(s).size();
        return total;
    };
    const std::size_t s1 = std::max<std::size_t>(1, left.stateCount());
    const std::size_t s2 = std::max<std::size_t>(1, right.stateCount());
    const std::size_t t1 = std::max<std::size_t>(1, left.transitions().size());
    const std::size_t t2 = std::max<std::size_t>(1, right.transitions().size());
    return s1 * s2 * (t1 * t2 + phiSize(left) + phiSize(right));
}

// ---------------------------------------------------------------- QDIMACS

std::string toQdimacs(const QbfInstance& inst) {
    CnfBuilder cnf(static_cast<int>(inst.variableCount()));
    cnf.assertTrue(inst.pool, inst.matrix, [](std::uint32_t v) { return static_cast<int>(v); });

    std::vector<QuantBlock> blocks = inst.prefix;
    std::vector<std::uint32_t> aux;
    for (int v = static_cast<int>(inst.variableCount()) + 1; v <= cnf.varCount(); ++v)
        aux.push_back(static_cast<std::uint32_t>(v));
    blocks.push_back({Quantifier::Exists, aux});
    QbfInstance shape;
    shape.prefix = std::move(blocks);
    shape.normalize();

    std::ostringstream os;
    os << "c qdimacs encoding\n";
    for (std::size_t i = 0; i < inst.variables.size(); ++i) {
        const auto& v = inst.variables[i];
        if (!v.label.empty()) os << "c " << (i + 1) << ' ' << v.label << '\n';
    }
    if (!aux.empty()) os << "c " << aux.front() << '-' << aux.back() << " tseitin\n";
    os << "p cnf " << cnf.varCount() << ' ' << cnf.clauses().size() << '\n';
    for (const auto& b : shape.prefix) {
        os << (b.quantifier == Quantifier::Exists ? 'e' : 'a');
        for (auto v : b.vars) os << ' ' << v;
        os << " 0\n";
    }
    for (const auto& c : cnf.clauses()) {
        for (int l : c) os << l << ' ';
        os << "0\n";
    }
    return os.str();
}

QbfInstance parseQdimacs(std::string_view text) {
    QbfInstance inst;
    std::istringstream in{std::string(text)};
    std::string line;
    long declared = -1;
    std::vector<char> bound;
    std::vector<ExprPool::Id> clauses;
    std::vector<int> current;
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::SyntaxError, "QDIMACS: " + msg); };
    auto ensureVar = [&](long v) {
        if (v <= 0 || (declared >= 0 && v > declared)) fail("variable " + std::to_string(v) + " out of range");
    };
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head == "c") continue;
        if (head == "p") {
            std::string fmt;
            long nclauses = 0;
            if (!(ls >> fmt >> declared >> nclauses) || fmt != "cnf" || declared < 0) fail("bad problem line");
            for (long v = 1; v <= declared; ++v) inst.addVariable({VarRole::Plain, 0, 0, std::to_string(v)});
            bound.assign(static_cast<std::size_t>(declared) + 1, 0);
            continue;
        }
        if (declared < 0) fail("missing problem line");
        if (head == "a" || head == "e") {
            QuantBlock b{head == "a" ? Quantifier::Forall : Quantifier::Exists, {}};
            long v = 0;
            while (ls >> v && v != 0) {
                ensureVar(v);
                b.vars.push_back(static_cast<std::uint32_t>(v));
                bound[static_cast<std::size_t>(v)] = 1;
            }
            inst.prefix.push_back(std::move(b));
            continue;
        }
        std::istringstream cs(line);
        long lit = 0;
        while (cs >> lit) {
            if (lit == 0) {
                std::vector<ExprPool::Id> lits;
                for (int l : current) {
                    auto x = inst.pool.var(static_cast<std::uint32_t>(std::abs(l)));
                    lits.push_back(l > 0 ? x : inst.pool.negate(x));
                }
                clauses.push_back(inst.pool.disj(std::move(lits)));
                current.clear();
            } else {
                ensureVar(std::labs(lit));
                current.push_back(static_cast<int>(lit));
            }
        }
        if (cs.fail() && !cs.eof()) fail("bad clause line '" + line + "'");
    }
    if (declared < 0) fail("missing problem line");
    if (!current.empty()) fail("unterminated clause");
    QuantBlock free{Quantifier::Exists, {}};
    for (long v = 1; v <= declared; ++v)
        if (!bound[static_cast<std::size_t>(v)]) free.vars.push_back(static_cast<std::uint32_t>(v));
    inst.prefix.insert(inst.prefix.begin(), std::move(free));
    inst.normalize();
    inst.matrix = inst.pool.conj(std::move(clauses));
    return inst;
}

}  // namespace mtsref
