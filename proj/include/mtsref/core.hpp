#pragma once

#include <set>
#include <utility>
#include <vector>

#include "mtsref/error.hpp"
#include "mtsref/system.hpp"

namespace mtsref {

/// Satisfaction of `phi` by the chosen transitions together with the true
/// parameters of `nu`.
bool evalFormula(const Formula& phi, const std::set<std::pair<ActionId, StateId>>& chosen, Valuation nu);

/// Tran_ν(s): every subset of T(s) that satisfies Φ(s) under `nu`, in
/// increasing mask order. Throws OutDegreeLimit when |T(s)| exceeds the cap.
std::vector<AdmissibleSet> tranSets(const TransitionSystem& sys, StateId s, Valuation nu,
                                    const Limits& limits = {});

/// Tran_ν(s) for every ν ⊆ P, indexed by ν's bits.
std::vector<std::vector<AdmissibleSet>> tranSetsPerValuation(const TransitionSystem& sys, StateId s,
                                                             const Limits& limits = {});

/// The BMTS obtained by substituting tt/ff for the parameters according to `nu`.
TransitionSystem induceValuation(const TransitionSystem& sys, Valuation nu);

SystemKind classify(const TransitionSystem& sys);

/// Φ(s) is satisfiable for some valuation of the parameters it mentions.
bool isLocallyConsistent(const TransitionSystem& sys, StateId s, const Limits& limits = {});

struct PruneResult {
    TransitionSystem system;
    std::vector<StateId> removed;                 // ids in the input system, ascending
    std::vector<std::optional<StateId>> mapping;  // input id -> id in `system`
};

/// Removes locally inconsistent states until none are left. Transitions into
/// removed states are dropped and their atoms rewritten to `ff`.
PruneResult prune(const TransitionSystem& sys, const Limits& limits = {});

/// Every state reachable from `from` has at most one successor per action.
bool isDeterministic(const TransitionSystem& sys, StateId from);
bool isDeterministic(const TransitionSystem& sys);

/// States reachable from `from` (including it), ascending.
std::vector<StateId> reachableStates(const TransitionSystem& sys, StateId from);

bool isAcyclic(const TransitionSystem& sys);

/// Sub-system on the given states (kept in the given order). Transitions
/// leaving the subset are dropped and their atoms rewritten to `ff`.
TransitionSystem restrictStates(const TransitionSystem& sys, const std::vector<StateId>& keep,
                                std::vector<std::optional<StateId>>* mapping = nullptr);

/// Disjoint union; states of `right` are shifted by `left.stateCount()` and
/// renamed with a suffix when names collide. The initial state is `left`'s.
TransitionSystem disjointUnion(const TransitionSystem& left, const TransitionSystem& right, std::string name = "U");

}  // namespace mtsref
