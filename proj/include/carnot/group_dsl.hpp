#pragma once

#include "carnot/group.hpp"

#include <optional>
#include <string>
#include <vector>

namespace carnot {

/// Text of a `.group` document:
///
///   # comment
///   group heisenberg
///   strata 2 1
///   Q 3 : -1/2 x1 y2 ; 1/2 x2 y1
///
/// Coefficients are rational or decimal literals; a repeated variable is a
/// power. Dilation weights follow from `strata`.
struct GroupDefSource {
  std::string text;
  std::string provenance = "builtin";
};

struct ParseDiagnostic {
  enum class Severity { error, warning };
  int line = 0;
  int column = 0;
  Severity severity = Severity::error;
  std::string message;

  std::string to_string(const std::string& provenance = "") const;
};

struct ParseResult {
  std::optional<std::string> name;
  std::optional<GroupLaw> law;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return law.has_value(); }
};

/// Syntax and per-term checks are reported at the offending token; law-level
/// axiom failures (associativity and the like) at the Q line they concern.
ParseResult parse_group(const GroupDefSource& source);

/// Canonical text: Q lines in coordinate order, terms in descending
/// lexicographic order of their (x, y) multi-index.
GroupDefSource emit_group(const std::string& name, const GroupLaw& law);

GroupDefSource load_group_file(const std::string& path);

/// Resolves a builtin name or a path to a `.group` file. Throws GroupError
/// with the rendered diagnostics on failure.
GroupSpec resolve_group(const std::string& reference);

}  // namespace carnot
