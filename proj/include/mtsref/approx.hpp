#pragma once

#include <optional>
#include <string>

#include "mtsref/error.hpp"
#include "mtsref/modal.hpp"
#include "mtsref/system.hpp"

namespace mtsref {

enum class SandwichAnswer { Yes, No, Unknown };
enum class SandwichRule { ModalBelow, DeterministicRight, HullRefute, ExactAvoid, Inconclusive };

const char* sandwichAnswerName(SandwichAnswer a);  // YES, NO, UNKNOWN
const char* sandwichRuleName(SandwichRule r);      // PROP2_MODAL, ...

struct SandwichVerdict {
    SandwichAnswer answer = SandwichAnswer::Unknown;
    SandwichRule rule = SandwichRule::Inconclusive;
    /// The modal check that fired, when the rule is a modal one.
    std::optional<ModalVerdict> modal;
    /// Result of the exact check when it ran.
    std::optional<bool> exact;
    std::string note;
};

/// Thorough refinement s0 ≤t t0 decided cheaply where possible:
///  1. s0 ≤m t0 gives YES;
///  2. a deterministic parameter-free right side gives NO;
///  3. s0 not below 𝓟(𝓓(t0)) gives NO, provided t0 is modally below that hull;
///  4. with allowExact, the Avoid check (skipped on a size limit);
///  5. otherwise UNKNOWN.
/// Both sides are pruned first.
SandwichVerdict decideThoroughApprox(const TransitionSystem& left, StateId s0, const TransitionSystem& right,
                                     StateId t0, bool allowExact, const Limits& limits = {},
                                     const Deadline* deadline = nullptr);

}  // namespace mtsref
