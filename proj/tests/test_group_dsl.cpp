#include "carnot/group_dsl.hpp"

#include <doctest.h>

#include <algorithm>

using namespace carnot;

namespace {
ParseResult parse(const std::string& text) { return parse_group({text, "test"}); }

bool has_error(const ParseResult& r, const std::string& fragment, int line = 0) {
  return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const ParseDiagnostic& d) {
    return d.severity == ParseDiagnostic::Severity::error && d.message.find(fragment) != std::string::npos &&
           (line == 0 || d.line == line);
  });
}
}  // namespace

TEST_CASE("Heisenberg source parses to the builtin law") {
  auto r = parse("# the Heisenberg group\ngroup heisenberg\nstrata 2 1\nQ 3 : -1/2 x1 y2 ; 1/2 x2 y1\n");
  REQUIRE(r.ok());
  CHECK(*r.name == "heisenberg");
  CHECK(*r.law == builtin_group("heisenberg").law());
}

TEST_CASE("decimal coefficients are exact") {
  auto r = parse("group h\nstrata 2 1\nQ 3 : -0.5 x1 y2 ; 0.5 x2 y1\n");
  REQUIRE(r.ok());
  CHECK(*r.law == builtin_group("heisenberg").law());
}

TEST_CASE("emit and parse round-trip on builtins") {
  for (const char* name : {"heisenberg", "htype22", "step3I", "euclidean(3)"}) {
    auto g = builtin_group(name);
    auto src = emit_group(g.name(), g.law());
    auto r = parse_group(src);
    REQUIRE_MESSAGE(r.ok(), src.text);
    CHECK(*r.law == g.law());
  }
}

TEST_CASE("canonical text") {
  auto h = builtin_group("heisenberg");
  CHECK(emit_group("heisenberg", h.law()).text == "group heisenberg\nstrata 2 1\nQ 3 : -1/2 x1 y2 ; 1/2 x2 y1\n");
  auto e = builtin_group("euclidean(3)");
  CHECK(emit_group("flat", e.law()).text == "group flat\nstrata 3\n");
  auto i = builtin_group("step3I");
  CHECK(emit_group("step3I", i.law()).text ==
        "group step3I\nstrata 2 1 1\n"
        "Q 3 : 1/2 x1 y2 ; -1/2 x2 y1\n"
        "Q 4 : 1/12 x1 x1 y2 ; -1/12 x1 x2 y1 ; -1/12 x1 y1 y2 ; 1/2 x1 y3 ; 1/12 x2 y1 y1 ; -1/2 x3 y1\n");
}

TEST_CASE("semantic errors carry positions") {
  auto r = parse("group g\nstrata 2 1\nQ 1 : 1 x1 y2\n");
  CHECK_FALSE(r.ok());
  CHECK(has_error(r, "target coordinate has weight 1", 3));
  CHECK(r.diagnostics.front().column == 3);

  r = parse("group g\nstrata 2 1\nQ 3 : one x1 y2\n");
  CHECK(has_error(r, "not a rational literal", 3));

  r = parse("group g\nstrata 2 1\nQ 3 : 1 x1 z2\n");
  CHECK(has_error(r, "unknown variable 'z2'", 3));

  r = parse("group g\nstrata 2 1\nQ 3 : 1 x1 y4\n");
  CHECK(has_error(r, "unknown variable 'y4'"));

  r = parse("group g\nstrata 2 1\nQ 3 : 0.5 x1\n");
  CHECK(has_error(r, "not mixed", 3));

  r = parse("group g\nstrata 2 1\nQ 3 : 1/2 x1 y2 y2\n");
  CHECK(has_error(r, "weighted degree 3", 3));

  r = parse("group g\nstrata 2 1 1\nQ 4 : 1 x3 y4\n");
  CHECK(has_error(r, "weight < 3"));
}

TEST_CASE("structural errors") {
  CHECK(has_error(parse("group g\nQ 3 : 1 x1 y2\nstrata 2 1\n"), "before 'strata'", 2));
  CHECK(has_error(parse("strata 2 1\n"), "missing 'group"));
  CHECK(has_error(parse("group g\n"), "missing 'strata'"));
  CHECK(has_error(parse("group g\nstrata 2 0\n"), "not a positive integer", 2));
  CHECK(has_error(parse("group g\nstrata 2 1\nfoo\n"), "unknown directive", 3));
  CHECK(has_error(parse("group g\nstrata 2 1\nQ 3 : 1/2 x1 y2\nQ 3 : 1/2 x1 y2\n"), "duplicate Q3", 4));
  CHECK(has_error(parse("group g\nstrata 2 1\nQ 3 1 x1 y2\n"), "expected 'Q <j> : <terms>'", 3));
}

TEST_CASE("law-level failures are reported at the Q line") {
  // Associativity fails without the cubic correction.
  auto r = parse("group g\nstrata 2 1 1\nQ 3 : 1/2 x1 y2 ; -1/2 x2 y1\nQ 4 : 1/2 x1 y3 ; -1/2 x3 y1\n");
  CHECK_FALSE(r.ok());
  CHECK(has_error(r, "associativity"));
  for (const auto& d : r.diagnostics) {
    CHECK(d.line >= 1);
    CHECK(d.line <= 4);
    CHECK(d.column >= 1);
  }
}

TEST_CASE("resolve_group accepts builtin names") {
  CHECK(resolve_group("heisenberg").homogeneous_dimension() == 4);
  CHECK_THROWS_AS(resolve_group("missing/file.group"), GroupError);
}
