#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mtsref/error.hpp"
#include "mtsref/system.hpp"

namespace mtsref {

/// A set of (left state, right state) pairs, sorted.
struct RefinementRelation {
    std::vector<std::pair<StateId, StateId>> pairs;

    bool contains(StateId s, StateId t) const;
};

/// One entry of a parametric witness: valuation μ of the left system answered
/// by ν of the right system, with the refinement relation between the
/// induced systems.
struct ValuationWitness {
    Valuation mu;
    Valuation nu;
    RefinementRelation relation;
};

struct ModalVerdict {
    bool holds = false;
    /// Witness for MTS/BMTS checks and the fixed relation of the original
    /// parametric definition.
    RefinementRelation relation;
    /// Witness of the parametric check, one entry per μ in increasing order.
    std::vector<ValuationWitness> perValuation;
    /// When refuted: the last pair removed before (s0,t0), or (s0,t0) itself.
    std::optional<std::pair<StateId, StateId>> counterexample;
    /// When a parametric check fails: a μ without a matching ν.
    std::optional<Valuation> failingMu;
};

/// Modal refinement of MTS via may/must matching. Throws KindError when
/// either side is not an MTS.
ModalVerdict modalRefinesMts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                             const Limits& limits = {}, const Deadline* deadline = nullptr);

/// Modal refinement of BMTS: greatest relation closed under the
/// admissible-set matching condition. Throws KindError for parametric input.
/// Inconsistent states are handled literally (an empty Tran(s) refines
/// everything), so callers need not prune first.
ModalVerdict modalRefinesBmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                              const Limits& limits = {}, const Deadline* deadline = nullptr);

/// For every μ ⊆ P1 some ν ⊆ P2 with the induced BMTS in refinement.
ModalVerdict modalRefinesPmts(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                              const Limits& limits = {}, const Deadline* deadline = nullptr);

/// The stronger variant with one relation shared by all valuations: some
/// R ∋ (s0,t0) and a choice ν = σ(μ) such that R is closed under every
/// (μ, σ(μ)) condition.
ModalVerdict modalRefinesPmtsOriginal(const TransitionSystem& left, StateId s0, const TransitionSystem& right,
                                      StateId t0, const Limits& limits = {}, const Deadline* deadline = nullptr);

/// (s0,t0) ∈ Rⁿ, where R⁰ = S1×S2 and Rⁱ⁺¹ holds the pairs meeting the
/// matching condition with respect to Rⁱ. BMTS inputs.
bool boundedModalRefines(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                         std::size_t n, const Limits& limits = {});

/// Every pair of `relation` meets the BMTS matching condition with respect
/// to `relation` itself under the given valuations.
bool auditRelation(const TransitionSystem& left, Valuation mu, const TransitionSystem& right, Valuation nu,
                   const RefinementRelation& relation, const Limits& limits = {});

/// Checks a verdict's witness against the definition it claims.
bool auditPmtsWitness(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                      const ModalVerdict& verdict, const Limits& limits = {});
bool auditOriginalWitness(const TransitionSystem& left, StateId s0, const TransitionSystem& right, StateId t0,
                          const ModalVerdict& verdict, const Limits& limits = {});

}  // namespace mtsref
