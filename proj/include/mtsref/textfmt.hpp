#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mtsref/system.hpp"

namespace mtsref {

/// Parses every `system NAME { ... }` block of `text`.
///
///   system ::= "system" NAME "{" decls "}"
///   decls  ::= ("params:" names ";")? "states:" names ";" ("init:" NAME ";")?
///              ("trans:" edge+)? ("phi" NAME "=" formula ";")*
///   edge   ::= NAME "-" NAME "->" NAME ";"
///
/// Formulas use `tt ff (a,t) p ! && || xor => <=>`, binding in that order
/// (`=>` is right-associative). NAME is an identifier or a double-quoted
/// string. Omitted obligations default to `tt`; without `init:` the system
/// has no initial state. Errors carry the span of the offending token.
std::vector<TransitionSystem> parseSystems(std::string_view text);

/// Like `parseSystems` but requires exactly one system.
TransitionSystem parseSystem(std::string_view text);

std::string serializeSystem(const TransitionSystem& sys);
std::string serializeFormula(const TransitionSystem& sys, const Formula& phi);

/// Quotes `name` when it is not a plain identifier.
std::string formatName(std::string_view name);

}  // namespace mtsref
