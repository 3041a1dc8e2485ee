#include "mtsref/approx.hpp"

#include "mtsref/core.hpp"
#include "mtsref/thorough.hpp"
#include "mtsref/transform.hpp"

namespace mtsref {

const char* sandwichAnswerName(SandwichAnswer a) {
    switch (a) {
    case SandwichAnswer::Yes: return "YES";
    case SandwichAnswer::No: return "NO";
    case SandwichAnswer::Unknown: return "UNKNOWN";
    }
    return "?";
}

const char* sandwichRuleName(SandwichRule r) {
    switch (r) {
    case SandwichRule::ModalBelow: return "PROP2_MODAL";
    case SandwichRule::DeterministicRight: return "PROP3_DET_COMPLETE";
    case SandwichRule::HullRefute: return "COROLLARY_HULL_REFUTE";
    case SandwichRule::ExactAvoid: return "EXACT_AVOID";
    case SandwichRule::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

namespace {

SandwichVerdict verdict(SandwichAnswer a, SandwichRule r, std::string note) {
    SandwichVerdict v;
    v.answer = a;
    v.rule = r;
    v.note = std::move(note);
    return v;
}

bool limitBreach(ErrorCode c) {
    return c == ErrorCode::StateLimit || c == ErrorCode::ParamLimit || c == ErrorCode::SizeLimit ||
           c == ErrorCode::OutDegreeLimit;
}

// Against a deterministic parameter-free right side, ≤t and ≤m coincide once
// the left side is consistent. A PMTS left side is split per valuation so the
// induced systems can be pruned. Returns a failing modal check, if any.
std::optional<ModalVerdict> refuteAgainstDeterministic(const TransitionSystem& l, StateId s,
                                                       const TransitionSystem& r, StateId t, const Limits& limits,
                                                       const Deadline* deadline) {
    if (l.paramCount() > limits.maxParams)
        throw Error(ErrorCode::ParamLimit, std::to_string(l.paramCount()) + " parameters exceed the cap of " +
                                               std::to_string(limits.maxParams));
    for (std::uint64_t mu = 0; mu < (std::uint64_t{1} << l.paramCount()); ++mu) {
        auto induced = prune(induceValuation(l, Valuation(mu)), limits);
        if (!induced.mapping[s]) continue;
        auto m = modalRefinesBmts(induced.system, *induced.mapping[s], r, t, limits, deadline);
        if (!m.holds) {
            m.failingMu = Valuation(mu);
            return m;
        }
    }
    return std::nullopt;
}

}  // namespace

SandwichVerdict decideThoroughApprox(const TransitionSystem& left, StateId s0, const TransitionSystem& right,
                                     StateId t0, bool allowExact, const Limits& limits, const Deadline* deadline) {
    if (s0 >= left.stateCount() || t0 >= right.stateCount())
        throw Error(ErrorCode::InvalidArgument, "state out of range");
    auto pl = prune(left, limits);
    auto pr = prune(right, limits);
    if (!pl.mapping[s0])
        return verdict(SandwichAnswer::Yes, SandwichRule::ExactAvoid, "left state has no implementation");
    const auto& l = pl.system;
    const StateId s = *pl.mapping[s0];

    if (!pr.mapping[t0]) {
        // ⟦t0⟧ = ∅ while ⟦s0⟧ ≠ ∅ after pruning.
        auto v = verdict(SandwichAnswer::No, SandwichRule::ExactAvoid, "right state has no implementation");
        v.exact = false;
        return v;
    }
    const auto& r = pr.system;
    const StateId t = *pr.mapping[t0];

    auto m = modalRefinesPmts(l, s, r, t, limits, deadline);
    if (m.holds) {
        auto v = verdict(SandwichAnswer::Yes, SandwichRule::ModalBelow, "modal refinement holds");
        v.modal = std::move(m);
        return v;
    }

    if (r.paramCount() == 0 && isDeterministic(r, t)) {
        auto refuted = refuteAgainstDeterministic(l, s, r, t, limits, deadline);
        if (!refuted) {
            // Every consistent valuation of the left side refines t.
            auto v = verdict(SandwichAnswer::Yes, SandwichRule::ModalBelow,
                             "modal refinement holds for every left valuation after pruning");
            return v;
        }
        auto v = verdict(SandwichAnswer::No, SandwichRule::DeterministicRight,
                         "modal refinement fails against a deterministic parameter-free right side");
        v.modal = std::move(*refuted);
        return v;
    }

    std::string note = "modal refinement fails; right side nondeterministic or parametric";
    try {
        auto hull = deterministicHull(r, t, false, limits);
        auto flat = prune(parameterFreeHull(hull.system, false, limits), limits);
        if (flat.mapping[hull.initial]) {
            const StateId h = *flat.mapping[hull.initial];
            if (modalRefinesPmts(r, t, flat.system, h, limits, deadline).holds) {
                auto hm = refuteAgainstDeterministic(l, s, flat.system, h, limits, deadline);
                if (hm) {
                    auto v = verdict(SandwichAnswer::No, SandwichRule::HullRefute,
                                     "left state is not below the parameter-free deterministic hull");
                    v.modal = std::move(*hm);
                    return v;
                }
                note += "; left state is below the hull";
            } else {
                note += "; right state is not below its own hull, hull rule not applicable";
            }
        }
    } catch (const Error& e) {
        if (!limitBreach(e.code())) throw;
        note += std::string("; hull skipped: ") + e.what();
    }

    if (allowExact) {
        try {
            bool exact = thoroughRefinesPmts(l, s, r, t, limits, deadline);
            auto v = verdict(exact ? SandwichAnswer::Yes : SandwichAnswer::No, SandwichRule::ExactAvoid,
                             exact ? "Avoid does not contain the pair" : "Avoid contains the pair");
            v.exact = exact;
            return v;
        } catch (const Error& e) {
            if (!limitBreach(e.code())) throw;
            note += std::string("; exact check skipped: ") + e.what();
        }
    }
    return verdict(SandwichAnswer::Unknown, SandwichRule::Inconclusive, note);
}

}  // namespace mtsref
