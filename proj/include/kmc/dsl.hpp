#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmc/model.hpp"
#include "kmc/source_span.hpp"

namespace kmc {

/// Protocol files (`.kmc`):
///
///     file     = { decl } ;
///     decl     = "role" IDENT ":" ltype ;
///     ltype    = "end" | "rec" IDENT "." ltype | IDENT | atom | branches
///              | "(" ltype ")" ;
///     atom     = IDENT ("!" | "?") IDENT [ "<" IDENT ">" ] ";" ltype ;
///     branches = "{" atom "}" { "or" "{" atom "}" } ;
///
/// `//` starts a comment. A bare IDENT in type position is a recursion
/// variable; a missing payload sort means `unit`.

struct ParseError {
  enum class Kind { Syntax, Validation };

  Kind kind = Kind::Syntax;
  SourceSpan span;
  std::string message;
};

struct ParsedSystem {
  System system;
  std::vector<LocalTypePtr> local_types;  // per role, with spans
  std::vector<SourceSpan> role_spans;     // the role name in each decl
  std::vector<std::vector<SourceSpan>> transition_spans;  // [role][transition]
  std::vector<Diagnostic> lints;
};

struct ParseResult {
  std::optional<ParsedSystem> parsed;
  std::vector<ParseError> errors;

  explicit operator bool() const { return parsed.has_value(); }
};

/// Never throws on malformed input; every error carries a span inside `text`
/// (for empty input, the span 1:1).
ParseResult parse_system(std::string_view text);

/// Convenience wrapper that throws std::runtime_error with the first error.
System parse_system_or_throw(std::string_view text);

/// Canonical text for a machine as a local type: every state revisited on
/// the depth-first stack becomes a `rec` binder; binders are named `t`, `t1`,
/// `t2`, ... by nesting depth.
LocalTypePtr machine_to_local_type(const Machine& machine);

std::string render_local_type(const LocalType& type);

/// One `role NAME: TYPE` line per role in declaration order.
std::string render_system(const System& system);

}  // namespace kmc
