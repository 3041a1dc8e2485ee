#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtsref/formula.hpp"

namespace mtsref {

struct Transition {
    StateId source = 0;
    ActionId action = 0;
    StateId target = 0;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// Set of parameters assigned true, as a bit set over parameter ids.
class Valuation {
public:
    constexpr Valuation() = default;
    constexpr explicit Valuation(std::uint64_t bits) : bits_(bits) {}

    constexpr bool contains(ParamId p) const { return (bits_ >> p) & 1u; }
    constexpr void insert(ParamId p) { bits_ |= std::uint64_t{1} << p; }
    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }

    friend constexpr bool operator==(Valuation, Valuation) = default;

private:
    std::uint64_t bits_ = 0;
};

enum class SystemKind { Implementation, MTS, DMTS, BMTS, PMTS };

const char* systemKindName(SystemKind kind);

/// `true` iff every system of kind `kind` is also of kind `bound`.
constexpr bool kindAtMost(SystemKind kind, SystemKind bound) {
    return static_cast<int>(kind) <= static_cast<int>(bound);
}

/// Unified representation of MTS, DMTS, BMTS and PMTS: states, a transition
/// relation, a parameter set and an obligation formula per state.
/// Immutable; build with `SystemBuilder`.
class TransitionSystem {
public:
    TransitionSystem() = default;

    const std::string& name() const { return name_; }

    std::size_t stateCount() const { return stateNames_.size(); }
    const std::string& stateName(StateId s) const { return stateNames_[s]; }
    std::optional<StateId> findState(std::string_view name) const;

    std::size_t actionCount() const { return actionNames_.size(); }
    const std::string& actionName(ActionId a) const { return actionNames_[a]; }
    std::optional<ActionId> findAction(std::string_view name) const;

    std::size_t paramCount() const { return paramNames_.size(); }
    const std::string& paramName(ParamId p) const { return paramNames_[p]; }
    std::optional<ParamId> findParam(std::string_view name) const;

    /// All transitions, sorted by (source, action, target).
    std::span<const Transition> transitions() const { return transitions_; }
    /// T(s), sorted by (action, target). Positions in this span are the
    /// local indices used by admissible sets.
    std::span<const Transition> outgoing(StateId s) const;
    std::optional<std::uint32_t> localIndex(StateId s, ActionId a, StateId t) const;

    const Formula& obligation(StateId s) const { return obligations_[s]; }
    std::optional<StateId> initial() const { return initial_; }

    const std::vector<std::string>& stateNames() const { return stateNames_; }
    const std::vector<std::string>& actionNames() const { return actionNames_; }
    const std::vector<std::string>& paramNames() const { return paramNames_; }

    /// Structural identity; names included, action and parameter tables compared by position.
    friend bool operator==(const TransitionSystem& a, const TransitionSystem& b);

private:
    friend class SystemBuilder;

    std::string name_;
    std::vector<std::string> stateNames_;
    std::vector<std::string> actionNames_;
    std::vector<std::string> paramNames_;
    std::vector<Transition> transitions_;
    std::vector<std::size_t> outBegin_;  // size stateCount()+1
    std::vector<Formula> obligations_;
    std::optional<StateId> initial_;
    std::unordered_map<std::string, StateId> stateIndex_;
};

class SystemBuilder {
public:
    explicit SystemBuilder(std::string name = "M");

    /// Throws DuplicateName.
    StateId addState(std::string name);
    /// Interns the action label.
    ActionId addAction(std::string_view name);
    /// Throws DuplicateName.
    ParamId addParam(std::string name);

    /// Duplicate triples are ignored.
    void addTransition(StateId source, ActionId action, StateId target);
    void setObligation(StateId s, Formula phi);
    void setInitial(StateId s);

    std::size_t stateCount() const { return sys_.stateNames_.size(); }
    std::optional<StateId> findState(std::string_view name) const;
    std::optional<ActionId> findAction(std::string_view name) const;
    std::optional<ParamId> findParam(std::string_view name) const;
    bool hasTransition(StateId source, ActionId action, StateId target) const;

    /// Validates that every transition atom of Φ(s) has a matching outgoing
    /// transition and every parameter atom is declared. Throws
    /// AtomWithoutTransition / UndeclaredName. Unused actions are dropped and
    /// the rest renumbered by name, so builder-issued ActionIds are stale.
    TransitionSystem build() &&;

private:
    TransitionSystem sys_;
    std::vector<Transition> pending_;
    std::unordered_map<std::string, ActionId> actionIndex_;
    std::unordered_map<std::string, ParamId> paramIndex_;
};

/// A subset of T(owner), as a bit mask over local transition indices.
struct AdmissibleSet {
    StateId owner = 0;
    std::uint32_t mask = 0;

    bool contains(std::uint32_t localIndex) const { return (mask >> localIndex) & 1u; }
    std::vector<std::pair<ActionId, StateId>> pairs(const TransitionSystem& sys) const;

    friend bool operator==(const AdmissibleSet&, const AdmissibleSet&) = default;
};

/// Maps the action labels of two systems into one shared index space.
struct JointAlphabet {
    std::vector<std::uint32_t> left;   // left ActionId -> joint id
    std::vector<std::uint32_t> right;  // right ActionId -> joint id
    std::vector<std::string> labels;

    JointAlphabet(const TransitionSystem& l, const TransitionSystem& r);
};

}  // namespace mtsref
