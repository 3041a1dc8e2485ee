#include "mtsref/error.hpp"

namespace mtsref {

const char* errorCodeName(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError: return "SYNTAX_ERROR";
    case ErrorCode::UndeclaredName: return "UNDECLARED_NAME";
    case ErrorCode::AtomWithoutTransition: return "ATOM_WITHOUT_TRANSITION";
    case ErrorCode::DuplicateName: return "DUPLICATE_NAME";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::KindError: return "KIND_ERROR";
    case ErrorCode::OutDegreeLimit: return "OUT_DEGREE_LIMIT";
    case ErrorCode::ParamLimit: return "PARAM_LIMIT";
    case ErrorCode::StateLimit: return "STATE_LIMIT";
    case ErrorCode::VarLimit: return "VAR_LIMIT";
    case ErrorCode::SizeLimit: return "SIZE_LIMIT";
    case ErrorCode::CyclicInput: return "CYCLIC_INPUT";
    case ErrorCode::GenFailure: return "GEN_FAILURE";
    case ErrorCode::Timeout: return "TIMEOUT";
    case ErrorCode::SolverUnavailable: return "SOLVER_UNAVAILABLE";
    case ErrorCode::SolverTimeout: return "SOLVER_TIMEOUT";
    case ErrorCode::SolverProtocol: return "SOLVER_PROTOCOL";
    }
    return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<SourceSpan> span)
    : std::runtime_error(std::string(errorCodeName(code)) + ": " + message), code_(code), span_(span) {}

void Deadline::check() const {
    if (expired()) throw Error(ErrorCode::Timeout, "deadline exceeded");
}

}  // namespace mtsref
