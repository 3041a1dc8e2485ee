#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace mtsref {

enum class ErrorCode {
    SyntaxError,
    UndeclaredName,
    AtomWithoutTransition,
    DuplicateName,
    InvalidArgument,
    KindError,
    OutDegreeLimit,
    ParamLimit,
    StateLimit,
    VarLimit,
    SizeLimit,
    CyclicInput,
    GenFailure,
    Timeout,
    SolverUnavailable,
    SolverTimeout,
    SolverProtocol,
};

const char* errorCodeName(ErrorCode code);

/// Location of a token in a source text. Lines and columns are 1-based,
/// offsets are byte offsets with `begin <= end`.
struct SourceSpan {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t begin = 0;
    std::size_t end = 0;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<SourceSpan> span = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    const std::optional<SourceSpan>& span() const noexcept { return span_; }

private:
    ErrorCode code_;
    std::optional<SourceSpan> span_;
};

/// Caps guarding the exponential enumerations. All are configurable.
struct Limits {
    std::size_t maxOutDegree = 20;
    std::size_t maxParams = 12;            // |P1| + |P2| for PMTS checks, |P| for hulls
    std::size_t maxSelectors = 1u << 20;   // selector functions for the fixed-relation definition
    std::size_t maxAvoidStates = 10;       // size of the right-hand universe of Avoid
    std::size_t maxHullStates = 4096;      // macrostates of the deterministic hull
    std::size_t maxQbfExpansionVars = 24;  // expansion evaluator
    std::size_t maxImplementations = 100000;
};

/// Wall-clock deadline shared by long-running checks. A default-constructed
/// deadline never expires.
class Deadline {
public:
    Deadline() = default;
    explicit Deadline(std::chrono::steady_clock::duration budget)
        : at_(std::chrono::steady_clock::now() + budget) {}

    bool expired() const { return at_ && std::chrono::steady_clock::now() >= *at_; }
    void check() const;

private:
    std::optional<std::chrono::steady_clock::time_point> at_;
};

inline void checkDeadline(const Deadline* deadline) {
    if (deadline) deadline->check();
}

}  // namespace mtsref
