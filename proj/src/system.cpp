#include "mtsref/system.hpp"

#include <algorithm>

#include "mtsref/error.hpp"

namespace mtsref {

const char* systemKindName(SystemKind kind) {
    switch (kind) {
    case SystemKind::Implementation: return "IMPLEMENTATION";
    case SystemKind::MTS: return "MTS";
    case SystemKind::DMTS: return "DMTS";
    case SystemKind::BMTS: return "BMTS";
    case SystemKind::PMTS: return "PMTS";
    }
    return "?";
}

std::optional<StateId> TransitionSystem::findState(std::string_view name) const {
    if (auto it = stateIndex_.find(std::string(name)); it != stateIndex_.end()) return it->second;
    return std::nullopt;
}

std::optional<ActionId> TransitionSystem::findAction(std::string_view name) const {
    for (std::size_t i = 0; i < actionNames_.size(); ++i)
        if (actionNames_[i] == name) return static_cast<ActionId>(i);
    return std::nullopt;
}

std::optional<ParamId> TransitionSystem::findParam(std::string_view name) const {
    for (std::size_t i = 0; i < paramNames_.size(); ++i)
        if (paramNames_[i] == name) return static_cast<ParamId>(i);
    return std::nullopt;
}

std::span<const Transition> TransitionSystem::outgoing(StateId s) const {
    return std::span<const Transition>(transitions_).subspan(outBegin_[s], outBegin_[s + 1] - outBegin_[s]);
}

std::optional<std::uint32_t> TransitionSystem::localIndex(StateId s, ActionId a, StateId t) const {
    auto out = outgoing(s);
    Transition key{s, a, t};
    auto it = std::lower_bound(out.begin(), out.end(), key);
    if (it == out.end() || *it != key) return std::nullopt;
    return static_cast<std::uint32_t>(it - out.begin());
}

bool operator==(const TransitionSystem& a, const TransitionSystem& b) {
    return a.name_ == b.name_ && a.stateNames_ == b.stateNames_ && a.actionNames_ == b.actionNames_ &&
           a.paramNames_ == b.paramNames_ && a.transitions_ == b.transitions_ &&
           a.obligations_ == b.obligations_ && a.initial_ == b.initial_;
}

SystemBuilder::SystemBuilder(std::string name) { sys_.name_ = std::move(name); }

StateId SystemBuilder::addState(std::string name) {
    if (sys_.stateIndex_.count(name)) throw Error(ErrorCode::DuplicateName, "duplicate state '" + name + "'");
    auto id = static_cast<StateId>(sys_.stateNames_.size());
    sys_.stateIndex_.emplace(name, id);
    sys_.stateNames_.push_back(std::move(name));
    sys_.obligations_.push_back(Formula::tt());
    return id;
}

ActionId SystemBuilder::addAction(std::string_view name) {
    std::string key(name);
    if (auto it = actionIndex_.find(key); it != actionIndex_.end()) return it->second;
    auto id = static_cast<ActionId>(sys_.actionNames_.size());
    actionIndex_.emplace(key, id);
    sys_.actionNames_.push_back(std::move(key));
    return id;
}

ParamId SystemBuilder::addParam(std::string name) {
    if (paramIndex_.count(name)) throw Error(ErrorCode::DuplicateName, "duplicate parameter '" + name + "'");
    if (sys_.paramNames_.size() >= 64) throw Error(ErrorCode::ParamLimit, "at most 64 parameters are supported");
    auto id = static_cast<ParamId>(sys_.paramNames_.size());
    paramIndex_.emplace(name, id);
    sys_.paramNames_.push_back(std::move(name));
    return id;
}

void SystemBuilder::addTransition(StateId source, ActionId action, StateId target) {
    if (source >= stateCount() || target >= stateCount() || action >= sys_.actionNames_.size())
        throw Error(ErrorCode::InvalidArgument, "transition refers to an unknown state or action");
    pending_.push_back({source, action, target});
}

void SystemBuilder::setObligation(StateId s, Formula phi) {
    if (s >= stateCount()) throw Error(ErrorCode::InvalidArgument, "obligation for unknown state");
    sys_.obligations_[s] = std::move(phi);
}

void SystemBuilder::setInitial(StateId s) {
    if (s >= stateCount()) throw Error(ErrorCode::InvalidArgument, "unknown initial state");
    sys_.initial_ = s;
}

std::optional<StateId> SystemBuilder::findState(std::string_view name) const { return sys_.findState(name); }

std::optional<ActionId> SystemBuilder::findAction(std::string_view name) const {
    if (auto it = actionIndex_.find(std::string(name)); it != actionIndex_.end()) return it->second;
    return std::nullopt;
}

std::optional<ParamId> SystemBuilder::findParam(std::string_view name) const {
    if (auto it = paramIndex_.find(std::string(name)); it != paramIndex_.end()) return it->second;
    return std::nullopt;
}

bool SystemBuilder::hasTransition(StateId source, ActionId action, StateId target) const {
    Transition key{source, action, target};
    return std::find(pending_.begin(), pending_.end(), key) != pending_.end();
}

namespace {

void validateAtoms(const TransitionSystem& sys, StateId s, const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True: return;
    case FormulaKind::Trans:
        if (f.target() >= sys.stateCount() || f.action() >= sys.actionCount() ||
            !sys.localIndex(s, f.action(), f.target())) {
            throw Error(ErrorCode::AtomWithoutTransition,
                        "obligation of state '" + sys.stateName(s) + "' mentions a transition that is not declared");
        }
        return;
    case FormulaKind::Param:
        if (f.param() >= sys.paramCount())
            throw Error(ErrorCode::UndeclaredName, "obligation of state '" + sys.stateName(s) +
                                                        "' mentions an undeclared parameter");
        return;
    case FormulaKind::Not: validateAtoms(sys, s, f.child()); return;
    case FormulaKind::And:
    case FormulaKind::Or:
        validateAtoms(sys, s, f.left());
        validateAtoms(sys, s, f.right());
        return;
    }
}

}  // namespace

TransitionSystem SystemBuilder::build() && {
    std::sort(pending_.begin(), pending_.end());
    pending_.erase(std::unique(pending_.begin(), pending_.end()), pending_.end());

    // Canonical alphabet: used actions only, ordered by name, so identity does
    // not depend on declaration order.
    std::vector<bool> used(sys_.actionNames_.size(), false);
    for (const auto& t : pending_) used[t.action] = true;
    std::vector<ActionId> order;
    for (ActionId a = 0; a < used.size(); ++a)
        if (used[a]) order.push_back(a);
    std::sort(order.begin(), order.end(),
              [&](ActionId x, ActionId y) { return sys_.actionNames_[x] < sys_.actionNames_[y]; });
    std::vector<ActionId> remap(used.size(), 0);
    std::vector<std::string> names;
    for (ActionId i = 0; i < order.size(); ++i) {
        remap[order[i]] = i;
        names.push_back(sys_.actionNames_[order[i]]);
    }
    bool identity = names.size() == sys_.actionNames_.size();
    for (ActionId i = 0; identity && i < order.size(); ++i) identity = order[i] == i;
    if (!identity) {
        for (auto& t : pending_) t.action = remap[t.action];
        std::sort(pending_.begin(), pending_.end());
        for (auto& phi : sys_.obligations_)
            phi = phi.substitute([&](ActionId a, StateId t) { return Formula::trans(remap[a], t); },
                                 [](ParamId p) { return Formula::param(p); });
        sys_.actionNames_ = std::move(names);
    }
    sys_.transitions_ = std::move(pending_);
    sys_.outBegin_.assign(sys_.stateCount() + 1, 0);
    for (const auto& t : sys_.transitions_) ++sys_.outBegin_[t.source + 1];
    for (std::size_t i = 1; i < sys_.outBegin_.size(); ++i) sys_.outBegin_[i] += sys_.outBegin_[i - 1];
    for (StateId s = 0; s < sys_.stateCount(); ++s) validateAtoms(sys_, s, sys_.obligations_[s]);
    return std::move(sys_);
}

std::vector<std::pair<ActionId, StateId>> AdmissibleSet::pairs(const TransitionSystem& sys) const {
    std::vector<std::pair<ActionId, StateId>> out;
    auto ts = sys.outgoing(owner);
    for (std::uint32_t i = 0; i < ts.size(); ++i)
        if (contains(i)) out.emplace_back(ts[i].action, ts[i].target);
    return out;
}

JointAlphabet::JointAlphabet(const TransitionSystem& l, const TransitionSystem& r) {
    std::unordered_map<std::string, std::uint32_t> index;
    auto intern = [&](const std::string& name) {
        auto [it, fresh] = index.emplace(name, static_cast<std::uint32_t>(labels.size()));
        if (fresh) labels.push_back(name);
        return it->second;
    };
    for (const auto& a : l.actionNames()) left.push_back(intern(a));
    for (const auto& a : r.actionNames()) right.push_back(intern(a));
}

}  // namespace mtsref
