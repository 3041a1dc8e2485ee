#pragma once

#include <vector>

#include "mtsref/error.hpp"
#include "mtsref/system.hpp"

namespace mtsref {

/// A system with a designated initial state.
struct Rooted {
    TransitionSystem system;
    StateId initial = 0;
};

struct MultiInitialSystem {
    TransitionSystem system;
    std::vector<StateId> initials;  // nonempty
};

/// How the fresh initial state combines the per-valuation obligations.
enum class InitialCombination {
    /// Disjunction of per-valuation obligations, each conjoined with the
    /// absence of transitions into the other copies.
    Guarded,
    /// Literal n-ary exclusive or of the per-valuation obligations.
    Parity,
    /// Exactly one per-valuation obligation holds.
    ExactlyOne,
};

const char* initialCombinationName(InitialCombination c);

struct DeparamOptions {
    InitialCombination combination = InitialCombination::Guarded;
    bool trimUnreachable = true;
    bool simplify = false;
};

/// BMTS with a fresh initial state and one copy of the system per valuation.
/// Copies are named "s@{p,q}". Untrimmed output has 1 + |S|·2^|P| states
/// with the copies in state-major, valuation-minor order after the initial.
/// Parameter-free input is returned unchanged. Throws ParamLimit.
Rooted deparameterize(const TransitionSystem& sys, StateId s0, const DeparamOptions& options = {},
                      const Limits& limits = {});

/// DMTS whose states are the admissible sets of the input, named "M#k" in
/// state-major, Tran-order. Initials are the admissible sets of s0.
MultiInitialSystem denegate(const TransitionSystem& sys, StateId s0, const Limits& limits = {});

/// Powerset construction over the part reachable from {s0}. Macrostates
/// are named "{s,t}". Parameters are kept. Throws StateLimit.
Rooted deterministicHull(const TransitionSystem& sys, StateId s0, bool simplify = false, const Limits& limits = {});

/// Same states and transitions with Φ'(s) the disjunction of Φ(s) over all
/// valuations. Throws ParamLimit.
TransitionSystem parameterFreeHull(const TransitionSystem& sys, bool simplify = false, const Limits& limits = {});

}  // namespace mtsref
