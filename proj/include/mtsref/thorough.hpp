#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtsref/error.hpp"
#include "mtsref/system.hpp"

namespace mtsref {

/// Witness of one explicitly derived Avoid entry: the chosen M ∈ Tran(s)
/// and one later set per (element of M, f), where f runs over the
/// admissible sets of the avoided states.
struct AvoidEntry {
    StateId left = 0;
    std::uint64_t mask = 0;  // avoided states as bits over the universe
    AdmissibleSet witnessM;
    struct Later {
        std::uint32_t mElement = 0;  // index into witnessM.pairs(left system)
        StateId fOwner = 0;          // right state whose admissible set f is
        std::uint32_t fIndex = 0;    // index of f in Tran(fOwner)
        std::uint64_t mask = 0;
    };
    std::vector<Later> later;
    std::size_t sequence = 0;  // insertion order; later sets refer to smaller sequences
};

/// Least Avoid relation between states of `left` and sets of `right` states
/// drawn from a fixed universe. Stored downward closed.
class AvoidSet {
public:
    const std::vector<StateId>& universe() const { return universe_; }
    std::uint64_t maskOf(const std::vector<StateId>& rightStates) const;
    bool contains(StateId s, std::uint64_t mask) const;
    bool contains(StateId s, const std::vector<StateId>& rightStates) const;
    /// Members (s, mask), counting every member of the downward closure.
    std::size_t size() const;
    /// The explicit entry covering (s, mask), a superset derivation when
    /// (s, mask) came from closing downward. nullptr when absent or mask = 0.
    const AvoidEntry* origin(StateId s, std::uint64_t mask) const;
    std::size_t rounds() const { return rounds_; }

private:
    friend AvoidSet computeAvoid(const TransitionSystem&, const TransitionSystem&, std::vector<StateId>,
                                 const Limits&, const Deadline*);
    std::vector<StateId> universe_;
    std::vector<std::int32_t> universeIndex_;        // right state -> bit, -1 outside
    std::vector<std::vector<std::int32_t>> member_;  // [s][mask] -> entry index, -1 absent, -2 for mask 0
    std::vector<AvoidEntry> entries_;
    std::size_t rounds_ = 0;
};

/// Avoid by Kleene iteration. Both systems must be parameter-free and
/// globally consistent; `universe` must be closed under successors in
/// `right`. Throws StateLimit when the universe exceeds maxAvoidStates.
AvoidSet computeAvoid(const TransitionSystem& left, const TransitionSystem& right, std::vector<StateId> universe,
                      const Limits& limits = {}, const Deadline* deadline = nullptr);
/// Avoid of a single system over all of its states.
AvoidSet computeAvoid(const TransitionSystem& sys, const Limits& limits = {}, const Deadline* deadline = nullptr);

/// Implementation I of s with I not refining any state of `mask`, built
/// from the Avoid witnesses. Initial state is I's root.
TransitionSystem distinguishingImplementation(const AvoidSet& avoid, const TransitionSystem& left, StateId s,
                                              std::uint64_t mask, const Limits& limits = {});

/// Thorough refinement of BMTS via Avoid after pruning both sides.
bool thoroughRefinesBmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                         const Limits& limits = {}, const Deadline* deadline = nullptr);
/// Thorough refinement of PMTS through de-parameterization of both sides.
bool thoroughRefinesPmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                         const Limits& limits = {}, const Deadline* deadline = nullptr);

/// Hash-consed finite trees; equal ids are bisimilar and vice versa.
class TreeStore {
public:
    using Id = std::uint32_t;
    using Children = std::vector<std::pair<std::string, Id>>;  // sorted, unique

    Id intern(Children children);
    const Children& children(Id id) const { return trees_[id]; }
    std::size_t size() const { return trees_.size(); }
    std::size_t depth(Id id) const;
    /// The tree as an implementation with one state per node.
    TransitionSystem toSystem(Id id, const std::string& name = "I") const;

private:
    std::vector<Children> trees_;
    std::map<Children, Id> index_;
};

struct ImplementationSet {
    std::shared_ptr<TreeStore> store;
    std::vector<TreeStore::Id> members;  // sorted, unique

    std::size_t size() const { return members.size(); }
    bool contains(TreeStore::Id id) const;
    bool includedIn(const ImplementationSet& other) const;
};

/// ⟦s⟧ up to bisimilarity for an acyclic parameter-free system. Throws
/// CyclicInput, InvalidArgument when `depthBound` is below the longest path
/// from s, and SizeLimit above maxImplementations.
ImplementationSet enumerateImplementations(const TransitionSystem& sys, StateId s, std::size_t depthBound,
                                           const Limits& limits = {}, std::shared_ptr<TreeStore> store = nullptr);

/// ⟦s0⟧ ⊆ ⟦t0⟧ by enumerating both sides into one store.
bool implementationInclusion(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                             const Limits& limits = {});

}  // namespace mtsref
